#include "varqd/potential_parser.hpp"

#include "varqd/errors.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

namespace varqd {
namespace {

struct Argument {
  std::string key;
  std::optional<double> number;
  std::optional<std::string> text;
  std::optional<Potential> nested;
};

class Parser {
 public:
  Parser(const std::string& text, const PotentialContext& context)
      : text_(text), context_(context) {}

  Potential parse() {
    Potential p = expression();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected trailing text");
    return p;
  }

 private:
  [[noreturn]] void fail(const std::string& message) const {
    throw ValidationError("potential", message + " at column " + std::to_string(pos_ + 1) +
                                           " of '" + text_ + "'");
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  std::string identifier() {
    skip_space();
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    if (start == pos_) fail("expected a name");
    return text_.substr(start, pos_ - start);
  }

  std::optional<double> try_number() {
    skip_space();
    const char* begin = text_.c_str() + pos_;
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin) return std::nullopt;
    pos_ += static_cast<std::size_t>(end - begin);
    return v;
  }

  std::string quoted() {
    expect('"');
    std::string out;
    while (pos_ < text_.size() && text_[pos_] != '"') out += text_[pos_++];
    if (pos_ == text_.size()) fail("unterminated string");
    ++pos_;
    return out;
  }

  Argument argument() {
    skip_space();
    Argument a;
    if (pos_ < text_.size() && (std::isalpha(static_cast<unsigned char>(text_[pos_])))) {
      const std::size_t mark = pos_;
      const std::string name = identifier();
      if (accept('=')) {
        a.key = name;
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == '"') {
          a.text = quoted();
        } else if (auto v = try_number()) {
          a.number = v;
        } else {
          fail("expected a number or string after '" + name + "='");
        }
        return a;
      }
      pos_ = mark;
      a.nested = expression();
      return a;
    }
    if (auto v = try_number()) {
      a.number = v;
      return a;
    }
    fail("expected an argument");
  }

  Potential expression() {
    const std::string name = identifier();
    expect('(');
    std::vector<Argument> args;
    if (!accept(')')) {
      do {
        args.push_back(argument());
      } while (accept(','));
      expect(')');
    }
    return build(name, args);
  }

  Potential build(const std::string& name, const std::vector<Argument>& args) {
    auto keyed = [&](std::map<std::string, double> defaults) {
      for (const auto& a : args) {
        if (a.key.empty() || !a.number) fail(name + " takes key=number arguments");
        auto it = defaults.find(a.key);
        if (it == defaults.end()) fail("unknown parameter '" + a.key + "' for " + name);
        it->second = *a.number;
      }
      return defaults;
    };
    auto nested = [&]() {
      std::vector<Potential> out;
      for (const auto& a : args) {
        if (!a.nested) fail(name + " takes potential arguments");
        out.push_back(*a.nested);
      }
      if (out.empty()) fail(name + " needs at least one term");
      return out;
    };
    if (name == "harmonic") {
      auto p = keyed({{"k", 1.0}});
      return Harmonic{p["k"]};
    }
    if (name == "quartic") {
      auto p = keyed({{"k2", 1.0}, {"k4", 0.0}});
      return Quartic{p["k2"], p["k4"]};
    }
    if (name == "morse") {
      auto p = keyed({{"D", 1.0}, {"a", 1.0}, {"x0", 0.0}});
      return Morse{p["D"], p["a"], p["x0"]};
    }
    if (name == "doublewell") {
      auto p = keyed({{"a", 1.0}, {"b", 1.0}});
      return DoubleWell{p["a"], p["b"]};
    }
    if (name == "pair") {
      auto p = keyed({{"lambda", 1.0}});
      return PairProduct{p["lambda"]};
    }
    if (name == "constant") {
      auto p = keyed({{"c", 0.0}});
      return Constant{p["c"]};
    }
    if (name == "linear") {
      std::vector<double> slopes;
      for (const auto& a : args) {
        if (!a.key.empty() || !a.number) fail("linear takes plain numbers");
        slopes.push_back(*a.number);
      }
      if (slopes.empty()) fail("linear needs one slope per coordinate");
      return Linear{slopes};
    }
    if (name == "separable") {
      auto axes = nested();
      for (const auto& a : axes) {
        if (!a.one_coordinate()) fail("separable axes must be one-coordinate models");
      }
      return SeparableSum{axes};
    }
    if (name == "sum") return Sum{nested()};
    if (name == "custom") {
      if (args.size() != 1 || args[0].key != "file" || !args[0].text) {
        fail("custom takes a single file=\"...\" argument");
      }
      if (!context_.grid) fail("custom potentials need a grid");
      std::filesystem::path path = *args[0].text;
      if (path.is_relative()) path = context_.base_directory / path;
      return Custom(*context_.grid, read_table(path, *context_.grid));
    }
    fail("unknown potential '" + name + "'");
  }

  const std::string& text_;
  const PotentialContext& context_;
  std::size_t pos_ = 0;
};

}  // namespace

Potential parse_potential(const std::string& text, const PotentialContext& context) {
  return Parser(text, context).parse();
}

std::vector<double> read_table(const std::filesystem::path& path, const Grid& grid) {
  std::ifstream in(path);
  if (!in) throw ValidationError("potential", "cannot read table " + path.string());
  std::vector<double> values;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream words(line);
    std::string word;
    while (words >> word) {
      char* end = nullptr;
      const double v = std::strtod(word.c_str(), &end);
      if (end != word.c_str() + word.size()) {
        throw ValidationError("potential", "non-numeric entry '" + word + "' in " + path.string());
      }
      values.push_back(v);
    }
  }
  if (values.size() != grid.size()) {
    throw ValidationError("potential", path.string() + " has " + std::to_string(values.size()) +
                                           " values; the grid needs " +
                                           std::to_string(grid.size()));
  }
  return values;
}

}  // namespace varqd
