#include "varqd/config.hpp"

#include "varqd/errors.hpp"
#include "varqd/hartree.hpp"
#include "varqd/log.hpp"
#include "varqd/potential_parser.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace varqd {
namespace {

std::string number_text(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::optional<double> parse_number(const std::string& text) {
  if (text.empty()) return std::nullopt;
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (end != text.c_str() + text.size()) return std::nullopt;
  return v;
}

// Removes a trailing comment that is not inside a string.
std::string strip_comment(const std::string& line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) in_string = !in_string;
    if (line[i] == '#' && !in_string) return line.substr(0, i);
  }
  return line;
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "kind", "principle", "hbar", "potential", "c2",
      "frozen.delta", "frozen.theta", "frozen.q", "frozen.p",
      "hartree.centers", "hartree.momenta", "hartree.widths", "hartree.kinetic_scales",
      "grid.length", "grid.points", "grid.max_points",
      "integrator.method", "integrator.dt", "integrator.t_final", "integrator.tolerance",
      "integrator.estimate_error", "integrator.renormalize",
      "output.stride", "output.directory",
      "reference.enabled", "reference.dt"};
  return keys;
}

}  // namespace

ConfigValue parse_config_value(const std::string& raw, const std::string& key) {
  const std::string text = trim(raw);
  if (text.empty()) throw ValidationError(key, "missing value");
  if (text.front() == '"') {
    if (text.size() < 2 || text.back() != '"') throw ValidationError(key, "unterminated string");
    std::string out;
    for (std::size_t i = 1; i + 1 < text.size(); ++i) {
      if (text[i] == '\\' && i + 2 < text.size()) {
        ++i;
        out += text[i] == 'n' ? '\n' : text[i];
      } else {
        out += text[i];
      }
    }
    return out;
  }
  if (text == "true") return true;
  if (text == "false") return false;
  if (text.front() == '[') {
    if (text.back() != ']') throw ValidationError(key, "unterminated array");
    std::vector<double> out;
    std::stringstream items(text.substr(1, text.size() - 2));
    std::string item;
    while (std::getline(items, item, ',')) {
      item = trim(item);
      if (item.empty()) continue;
      auto v = parse_number(item);
      if (!v) throw ValidationError(key, "array entries must be numbers, got '" + item + "'");
      out.push_back(*v);
    }
    return out;
  }
  if (auto v = parse_number(text)) return *v;
  throw ValidationError(key, "cannot parse value '" + text + "'");
}

ConfigTable ConfigTable::parse(const std::string& text) {
  ConfigTable table;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    line = trim(strip_comment(line));
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(line_number);
    if (line.front() == '[') {
      if (line.back() != ']') throw ValidationError(where, "malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) throw ValidationError(where, "empty section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ValidationError(where, "expected key = value");
    const std::string name = trim(line.substr(0, eq));
    if (name.empty()) throw ValidationError(where, "missing key");
    const std::string key = section.empty() ? name : section + "." + name;
    if (table.contains(key)) throw ValidationError(key, "duplicate key");
    table.values_[key] = parse_config_value(line.substr(eq + 1), key);
  }
  return table;
}

double ConfigTable::number(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ValidationError(key, "required");
  if (const auto* v = std::get_if<double>(&it->second)) return *v;
  throw ValidationError(key, "must be a number");
}

double ConfigTable::number(const std::string& key, double fallback) const {
  return contains(key) ? number(key) : fallback;
}

long ConfigTable::integer(const std::string& key) const {
  const double v = number(key);
  if (v != std::floor(v) || std::abs(v) > 1e15) throw ValidationError(key, "must be an integer");
  return static_cast<long>(v);
}

long ConfigTable::integer(const std::string& key, long fallback) const {
  return contains(key) ? integer(key) : fallback;
}

std::string ConfigTable::string(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ValidationError(key, "required");
  if (const auto* v = std::get_if<std::string>(&it->second)) return *v;
  throw ValidationError(key, "must be a string");
}

std::string ConfigTable::string(const std::string& key, const std::string& fallback) const {
  return contains(key) ? string(key) : fallback;
}

bool ConfigTable::boolean(const std::string& key, bool fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (const auto* v = std::get_if<bool>(&it->second)) return *v;
  throw ValidationError(key, "must be true or false");
}

std::vector<double> ConfigTable::array(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ValidationError(key, "required");
  if (const auto* v = std::get_if<std::vector<double>>(&it->second)) return *v;
  if (const auto* v = std::get_if<double>(&it->second)) return {*v};
  throw ValidationError(key, "must be an array of numbers");
}

std::vector<double> ConfigTable::array(const std::string& key,
                                       const std::vector<double>& fallback) const {
  return contains(key) ? array(key) : fallback;
}

std::string ConfigTable::canonical() const {
  std::string out;
  for (const auto& [key, value] : values_) {
    out += key + " = ";
    std::visit(
        [&](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, double>) {
            out += number_text(v);
          } else if constexpr (std::is_same_v<T, std::string>) {
            out += "\"" + v + "\"";
          } else if constexpr (std::is_same_v<T, bool>) {
            out += v ? "true" : "false";
          } else {
            out += "[";
            for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + number_text(v[i]);
            out += "]";
          }
        },
        value);
    out += "\n";
  }
  return out;
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

int Scenario::coordinates() const {
  if (frozen) return static_cast<int>(frozen->q.size());
  return static_cast<int>(hartree->centers.size());
}

Grid Scenario::grid() const {
  if (frozen) return Grid(coordinates(), length, points);
  return Grid(1, length, points);
}

Grid Scenario::reference_grid() const {
  if (frozen) return grid();
  if (coordinates() != 2) {
    throw ValidationError("hartree.centers", "grid references need exactly two particles");
  }
  return Grid(2, length, points);
}

Hamiltonian Scenario::hamiltonian() const {
  return Hamiltonian(hbar, potential, hartree ? hartree->kinetic_scales : std::vector<double>{});
}

FrozenParams Scenario::frozen_params() const {
  if (!frozen) throw ValidationError("frozen", "scenario has no [frozen] block");
  FrozenParams p;
  p.theta = frozen->theta;
  p.q = frozen->q;
  p.p = frozen->p;
  p.delta = frozen->delta;
  p.hbar = hbar;
  return p;
}

HartreeState Scenario::hartree_state() const {
  if (!hartree) throw ValidationError("hartree", "scenario has no [hartree] block");
  HartreeState s;
  s.hbar = hbar;
  const Grid g = grid();
  for (std::size_t n = 0; n < hartree->centers.size(); ++n) {
    s.particles.push_back(gaussian_particle(g, hartree->centers[n], hartree->momenta[n],
                                            hartree->widths[n], hbar));
  }
  return s;
}

Wavefunction Scenario::initial_wavefunction() const {
  if (frozen) return synthesize(frozen_params(), grid());
  if (coordinates() != 2) {
    throw ValidationError("hartree.centers", "grid references need exactly two particles");
  }
  return assemble_product(hartree_state());
}

std::uint64_t Scenario::config_hash() const { return fnv1a(table.canonical()); }

std::uint64_t Scenario::physics_hash() const {
  std::string s = "hbar=" + number_text(hbar) + ";potential=" + potential.describe() +
                  ";coordinates=" + std::to_string(coordinates()) +
                  ";length=" + number_text(length) + ";points=" + std::to_string(points);
  auto list = [&](const char* name, const std::vector<double>& v) {
    s += std::string(";") + name + "=";
    for (double x : v) s += number_text(x) + ",";
  };
  if (frozen) {
    s += ";delta=" + number_text(frozen->delta) + ";theta=" + number_text(frozen->theta);
    list("q", frozen->q);
    list("p", frozen->p);
  } else {
    list("centers", hartree->centers);
    list("momenta", hartree->momenta);
    list("widths", hartree->widths);
    list("scales", hartree->kinetic_scales);
  }
  if (!potential.analytic()) {
    // Tabulated potentials are identified by their values.
    for (double v : potential.tabulate(reference_grid())) s += number_text(v) + ",";
  }
  return fnv1a(s);
}

Scenario load_scenario(const ConfigTable& table, const std::filesystem::path& base_directory) {
  for (const auto& [key, value] : table.values()) {
    if (!known_keys().count(key)) throw ValidationError(key, "unknown key");
  }
  Scenario sc;
  sc.table = table;
  sc.base_directory = base_directory;

  const std::string kind = table.string("kind");
  if (kind == "frozen") {
    sc.kind = Kind::Frozen;
  } else if (kind == "hartree") {
    sc.kind = Kind::Hartree;
  } else if (kind == "reference") {
    sc.kind = Kind::Reference;
  } else {
    throw ValidationError("kind", "must be frozen, hartree or reference, got '" + kind + "'");
  }
  const std::string principle = table.string("principle", "mvp");
  if (principle == "mvp") {
    sc.principle = Principle::MVP;
  } else if (principle == "tdvp") {
    sc.principle = Principle::TDVP;
  } else {
    throw ValidationError("principle", "must be mvp or tdvp, got '" + principle + "'");
  }
  sc.hbar = table.number("hbar", 1.0);
  if (!(sc.hbar > 0.0) || !std::isfinite(sc.hbar)) throw ValidationError("hbar", "must be positive");

  const bool has_frozen = table.contains("frozen.q") || table.contains("frozen.delta");
  const bool has_hartree = table.contains("hartree.centers");
  if (has_frozen && has_hartree) {
    throw ValidationError("kind", "give either a [frozen] or a [hartree] block, not both");
  }
  if (sc.kind == Kind::Frozen && !has_frozen) throw ValidationError("frozen.q", "required");
  if (sc.kind == Kind::Hartree && !has_hartree) throw ValidationError("hartree.centers", "required");
  if (sc.kind == Kind::Reference && !has_frozen && !has_hartree) {
    throw ValidationError("kind", "a reference run needs a [frozen] or [hartree] initial state");
  }

  sc.length = table.number("grid.length", 20.0);
  if (!(sc.length > 0.0) || !std::isfinite(sc.length)) {
    throw ValidationError("grid.length", "must be positive");
  }
  const long points = table.integer("grid.points", 256);
  if (points < 8 || points > (1L << 24) || (points & (points - 1)) != 0) {
    throw ValidationError("grid.points", "must be a power of two >= 8, got " + std::to_string(points));
  }
  sc.points = static_cast<int>(points);
  const long max_points = table.integer("grid.max_points", static_cast<long>(Grid::kMaxPoints));
  if (max_points < 8) throw ValidationError("grid.max_points", "must be at least 8");
  sc.max_points = static_cast<std::size_t>(std::min<long>(max_points, Grid::kMaxPoints));

  if (has_frozen) {
    FrozenSettings f;
    f.delta = table.number("frozen.delta");
    if (!(f.delta > 0.0) || !std::isfinite(f.delta)) {
      throw ValidationError("frozen.delta", "must be positive");
    }
    f.theta = table.number("frozen.theta", 0.0);
    f.q = table.array("frozen.q");
    if (f.q.size() != 1 && f.q.size() != 2) {
      throw ValidationError("frozen.q", "grid runs support 1 or 2 dimensions, got " +
                                            std::to_string(f.q.size()));
    }
    f.p = table.array("frozen.p", std::vector<double>(f.q.size(), 0.0));
    if (f.p.size() != f.q.size()) throw ValidationError("frozen.p", "must match frozen.q in length");
    for (double q : f.q) {
      if (std::abs(2.0 * f.delta * q) + 5.0 * f.delta > 0.5 * sc.length) {
        throw ValidationError("frozen.q", "packet centre 2*delta*q must stay 5*delta inside the box");
      }
    }
    sc.frozen = f;
  } else {
    HartreeSettings h;
    h.centers = table.array("hartree.centers");
    const std::size_t n = h.centers.size();
    if (n < 2 || n > 4) {
      throw ValidationError("hartree.centers", "Hartree products need 2 to 4 particles, got " +
                                                   std::to_string(n));
    }
    h.momenta = table.array("hartree.momenta", std::vector<double>(n, 0.0));
    h.widths = table.array("hartree.widths");
    h.kinetic_scales = table.array("hartree.kinetic_scales", std::vector<double>(n, 1.0));
    if (h.momenta.size() != n) throw ValidationError("hartree.momenta", "one entry per particle");
    if (h.widths.size() != n) throw ValidationError("hartree.widths", "one entry per particle");
    if (h.kinetic_scales.size() != n) {
      throw ValidationError("hartree.kinetic_scales", "one entry per particle");
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (!(h.widths[i] > 0.0)) throw ValidationError("hartree.widths", "must be positive");
      if (!(h.kinetic_scales[i] > 0.0)) {
        throw ValidationError("hartree.kinetic_scales", "must be positive");
      }
      if (std::abs(h.centers[i]) + 5.0 * h.widths[i] > 0.5 * sc.length) {
        throw ValidationError("hartree.centers", "particle " + std::to_string(i + 1) +
                                                     " must stay 5 widths inside the box");
      }
    }
    sc.hartree = h;
  }

  std::size_t total = 1;
  const int axes = sc.frozen ? sc.coordinates() : (sc.coordinates() == 2 ? 2 : 1);
  for (int a = 0; a < axes; ++a) total *= static_cast<std::size_t>(sc.points);
  if (total > sc.max_points) {
    throw ValidationError("grid.points", "grid of " + std::to_string(total) +
                                             " points exceeds grid.max_points");
  }

  sc.integrator.dt = table.number("integrator.dt", 1e-3);
  sc.integrator.t_final = table.number("integrator.t_final", 1.0);
  sc.integrator.tolerance = table.number("integrator.tolerance", 1e-8);
  const std::string method = table.string("integrator.method", "rk4");
  if (method == "rk4") {
    sc.integrator.method = Method::RK4;
  } else if (method == "rk45") {
    sc.integrator.method = Method::RK45;
  } else {
    throw ValidationError("integrator.method", "must be rk4 or rk45, got '" + method + "'");
  }
  if (!(sc.integrator.dt > 0.0)) throw ValidationError("integrator.dt", "must be positive");
  if (!(sc.integrator.t_final >= 0.0) || !std::isfinite(sc.integrator.t_final)) {
    throw ValidationError("integrator.t_final", "must be nonnegative");
  }
  if (!(sc.integrator.tolerance > 0.0)) {
    throw ValidationError("integrator.tolerance", "must be positive");
  }
  sc.estimate_error = table.boolean("integrator.estimate_error", false);
  sc.renormalize = table.boolean("integrator.renormalize", true);

  const long stride = table.integer("output.stride", 1);
  if (stride < 1) throw ValidationError("output.stride", "must be at least 1");
  sc.stride = static_cast<int>(stride);
  sc.output_directory = table.string("output.directory", "out");

  sc.reference_enabled = table.boolean("reference.enabled", sc.kind == Kind::Reference);
  sc.reference_dt = table.number("reference.dt", sc.kind == Kind::Reference ? sc.integrator.dt : 1e-4);
  if (!(sc.reference_dt > 0.0)) throw ValidationError("reference.dt", "must be positive");
  if (sc.reference_enabled && sc.hartree && sc.coordinates() != 2) {
    throw ValidationError("reference.enabled", "grid references need exactly two particles");
  }
  if (sc.reference_enabled && sc.kind != Kind::Reference) {
    if (sc.integrator.method != Method::RK4) {
      throw ValidationError("reference.enabled", "reference comparison needs the fixed-step rk4 method");
    }
    const double t = sc.integrator.t_final;
    const double steps = std::max(1.0, std::ceil(t / sc.integrator.dt - 1e-9));
    const double spacing = t / steps * sc.stride;
    const double ratio = spacing / sc.reference_dt;
    if (t > 0.0 && std::abs(ratio - std::round(ratio)) > 1e-6 * ratio) {
      throw ValidationError("reference.dt", "sample spacing " + number_text(spacing) +
                                                " is not a multiple of the reference step");
    }
  }

  if (table.contains("c2")) {
    sc.c2 = table.number("c2");
    if (!(*sc.c2 >= 0.0)) throw ValidationError("c2", "must be nonnegative");
  }

  sc.potential_text = table.string("potential");
  PotentialContext context;
  context.base_directory = base_directory;
  if (sc.frozen || sc.coordinates() == 2) context.grid = sc.reference_grid();
  sc.potential = parse_potential(sc.potential_text, context);
  try {
    sc.potential.check_dimension(sc.coordinates());
  } catch (const DimensionError& e) {
    throw ValidationError("potential", e.what());
  }

  if (sc.kind == Kind::Hartree) {
    // The mean fields are estimated by V along each axis with the other coordinates at 0.
    const Grid g = sc.grid();
    std::vector<double> x(static_cast<std::size_t>(sc.coordinates()), 0.0);
    double v_max = 0.0;
    for (auto& xn : x) {
      for (int j = 0; j < g.points(); ++j) {
        xn = g.coordinate(j);
        if (sc.potential.analytic()) v_max = std::max(v_max, std::abs(sc.potential.value(x)));
      }
      xn = 0.0;
    }
    const double e_max = 0.5 * sc.hbar * sc.hbar *
                             *std::max_element(sc.hartree->kinetic_scales.begin(),
                                               sc.hartree->kinetic_scales.end()) *
                             std::pow(g.max_wavenumber(), 2) +
                         v_max;
    if (sc.integrator.method == Method::RK4 && sc.integrator.dt * e_max / sc.hbar > 2.8) {
      warn("integrator.dt exceeds the RK4 stability limit of the grid operator (dt * "
           "E_max / hbar = " + number_text(sc.integrator.dt * e_max / sc.hbar) + " > 2.8)");
    }
  }
  return sc;
}

Scenario load_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config", "cannot read " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  const auto base = path.parent_path();
  return load_scenario(ConfigTable::parse(buffer.str()), base.empty() ? "." : base);
}

}  // namespace varqd
