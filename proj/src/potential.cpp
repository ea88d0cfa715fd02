#include "varqd/potential.hpp"

#include "varqd/errors.hpp"
#include "varqd/spectral.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace varqd {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Raw moments E[x^n] of N(c, s^2).
double moment(int n, double c, double s) {
  const double s2 = s * s;
  switch (n) {
    case 0: return 1.0;
    case 1: return c;
    case 2: return c * c + s2;
    case 3: return c * c * c + 3.0 * c * s2;
    case 4: return c * c * c * c + 6.0 * c * c * s2 + 3.0 * s2 * s2;
    default: throw std::logic_error("moment order > 4");
  }
}

// E[exp(-r (x - x0))] for x ~ N(c, s^2).
double exponential_moment(double r, double c, double x0, double s) {
  return std::exp(-r * (c - x0) + 0.5 * r * r * s * s);
}

// One-coordinate model evaluation. Returns false if `model` is not a
// one-coordinate function.
struct OneCoordinate {
  double value(const Potential::Model& model, double x) const;
  double slope(const Potential::Model& model, double x) const;
};

double OneCoordinate::value(const Potential::Model& model, double x) const {
  return std::visit(
      overloaded{
          [&](const Harmonic& m) { return 0.5 * m.k * x * x; },
          [&](const Quartic& m) { return 0.5 * m.k2 * x * x + 0.25 * m.k4 * x * x * x * x; },
          [&](const Morse& m) {
            const double e = 1.0 - std::exp(-m.width * (x - m.center));
            return m.depth * e * e;
          },
          [&](const DoubleWell& m) { return m.a * x * x * x * x - m.b * x * x; },
          [&](const Constant& m) { return m.value; },
          [&](const Sum& m) {
            double s = 0.0;
            for (const auto& t : m.terms) s += value(t.model(), x);
            return s;
          },
          [&](const auto&) -> double {
            throw DimensionError("not a one-coordinate potential");
          },
      },
      model);
}

double OneCoordinate::slope(const Potential::Model& model, double x) const {
  return std::visit(
      overloaded{
          [&](const Harmonic& m) { return m.k * x; },
          [&](const Quartic& m) { return m.k2 * x + m.k4 * x * x * x; },
          [&](const Morse& m) {
            const double e = std::exp(-m.width * (x - m.center));
            return 2.0 * m.depth * m.width * e * (1.0 - e);
          },
          [&](const DoubleWell& m) { return 4.0 * m.a * x * x * x - 2.0 * m.b * x; },
          [&](const Constant&) { return 0.0; },
          [&](const Sum& m) {
            double s = 0.0;
            for (const auto& t : m.terms) s += slope(t.model(), x);
            return s;
          },
          [&](const auto&) -> double {
            throw DimensionError("not a one-coordinate potential");
          },
      },
      model);
}

// Gaussian means of one-coordinate models (Constant contributes once per call).
std::optional<double> one_coordinate_mean(const Potential::Model& model, double c, double s) {
  return std::visit(
      overloaded{
          [&](const Harmonic& m) -> std::optional<double> { return 0.5 * m.k * moment(2, c, s); },
          [&](const Quartic& m) -> std::optional<double> {
            return 0.5 * m.k2 * moment(2, c, s) + 0.25 * m.k4 * moment(4, c, s);
          },
          [&](const Morse& m) -> std::optional<double> {
            const double e1 = exponential_moment(m.width, c, m.center, s);
            const double e2 = exponential_moment(2.0 * m.width, c, m.center, s);
            return m.depth * (1.0 - 2.0 * e1 + e2);
          },
          [&](const DoubleWell& m) -> std::optional<double> {
            return m.a * moment(4, c, s) - m.b * moment(2, c, s);
          },
          [&](const Constant& m) -> std::optional<double> { return m.value; },
          [&](const Sum& m) -> std::optional<double> {
            double total = 0.0;
            for (const auto& t : m.terms) {
              auto v = one_coordinate_mean(t.model(), c, s);
              if (!v) return std::nullopt;
              total += *v;
            }
            return total;
          },
          [&](const auto&) -> std::optional<double> { return std::nullopt; },
      },
      model);
}

std::optional<double> one_coordinate_slope_mean(const Potential::Model& model, double c,
                                                double s) {
  return std::visit(
      overloaded{
          [&](const Harmonic& m) -> std::optional<double> { return m.k * c; },
          [&](const Quartic& m) -> std::optional<double> {
            return m.k2 * c + m.k4 * moment(3, c, s);
          },
          [&](const Morse& m) -> std::optional<double> {
            const double e1 = exponential_moment(m.width, c, m.center, s);
            const double e2 = exponential_moment(2.0 * m.width, c, m.center, s);
            return 2.0 * m.depth * m.width * (e1 - e2);
          },
          [&](const DoubleWell& m) -> std::optional<double> {
            return 4.0 * m.a * moment(3, c, s) - 2.0 * m.b * c;
          },
          [&](const Constant&) -> std::optional<double> { return 0.0; },
          [&](const Sum& m) -> std::optional<double> {
            double total = 0.0;
            for (const auto& t : m.terms) {
              auto v = one_coordinate_slope_mean(t.model(), c, s);
              if (!v) return std::nullopt;
              total += *v;
            }
            return total;
          },
          [&](const auto&) -> std::optional<double> { return std::nullopt; },
      },
      model);
}

bool is_per_coordinate(const Potential::Model& m) {
  return std::holds_alternative<Harmonic>(m) || std::holds_alternative<Quartic>(m) ||
         std::holds_alternative<Morse>(m) || std::holds_alternative<DoubleWell>(m);
}

}  // namespace

Custom::Custom(Grid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw DimensionError("custom potential table size does not match its grid");
  }
  for (int a = 0; a < grid_.dimension(); ++a) gradients_.push_back(derivative(grid_, values_, a));
}

std::size_t Custom::locate(std::span<const double> x) const {
  if (x.size() != static_cast<std::size_t>(grid_.dimension())) {
    throw DimensionError("custom potential evaluated in the wrong dimension");
  }
  const double h = grid_.spacing();
  std::size_t flat = 0;
  for (std::size_t a = 0; a < x.size(); ++a) {
    const double pos = (x[a] + 0.5 * grid_.length()) / h;
    const double index = std::round(pos);
    if (std::abs(pos - index) > 1e-9 || index < 0 || index >= grid_.points()) {
      throw DimensionError("custom potential evaluated off its grid");
    }
    flat = flat * static_cast<std::size_t>(grid_.points()) + static_cast<std::size_t>(index);
  }
  return flat;
}

Potential::Potential() : Potential(Constant{0.0}) {}

double Potential::value(std::span<const double> x) const {
  const OneCoordinate one;
  return std::visit(
      overloaded{
          [&](const PairProduct& m) {
            double s = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i)
              for (std::size_t j = i + 1; j < x.size(); ++j) s += x[i] * x[j];
            return m.coupling * s;
          },
          [&](const Linear& m) {
            if (m.slopes.size() != x.size()) throw DimensionError("linear slope count mismatch");
            double s = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) s += m.slopes[i] * x[i];
            return s;
          },
          [&](const Constant& m) { return m.value; },
          [&](const SeparableSum& m) {
            if (m.axes.size() != x.size()) throw DimensionError("separable sum arity mismatch");
            double s = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) s += one.value(m.axes[i].model(), x[i]);
            return s;
          },
          [&](const Sum& m) {
            double s = 0.0;
            for (const auto& t : m.terms) s += t.value(x);
            return s;
          },
          [&](const Custom& m) { return m.values()[m.locate(x)]; },
          [&](const auto&) {
            double s = 0.0;
            for (double xi : x) s += one.value(model(), xi);
            return s;
          },
      },
      model());
}

void Potential::gradient(std::span<const double> x, std::span<double> out) const {
  if (out.size() != x.size()) throw DimensionError("gradient output has wrong size");
  const OneCoordinate one;
  std::visit(
      overloaded{
          [&](const PairProduct& m) {
            double total = 0.0;
            for (double xi : x) total += xi;
            for (std::size_t i = 0; i < x.size(); ++i) out[i] = m.coupling * (total - x[i]);
          },
          [&](const Linear& m) {
            if (m.slopes.size() != x.size()) throw DimensionError("linear slope count mismatch");
            for (std::size_t i = 0; i < x.size(); ++i) out[i] = m.slopes[i];
          },
          [&](const Constant&) {
            for (double& o : out) o = 0.0;
          },
          [&](const SeparableSum& m) {
            if (m.axes.size() != x.size()) throw DimensionError("separable sum arity mismatch");
            for (std::size_t i = 0; i < x.size(); ++i) out[i] = one.slope(m.axes[i].model(), x[i]);
          },
          [&](const Sum& m) {
            std::vector<double> part(x.size());
            for (double& o : out) o = 0.0;
            for (const auto& t : m.terms) {
              t.gradient(x, part);
              for (std::size_t i = 0; i < x.size(); ++i) out[i] += part[i];
            }
          },
          [&](const Custom& m) {
            const std::size_t j = m.locate(x);
            for (std::size_t i = 0; i < x.size(); ++i) out[i] = m.gradient(static_cast<int>(i))[j];
          },
          [&](const auto&) {
            for (std::size_t i = 0; i < x.size(); ++i) out[i] = one.slope(model(), x[i]);
          },
      },
      model());
}

bool Potential::separable() const {
  return std::visit(overloaded{
                        [](const PairProduct& m) { return m.coupling == 0.0; },
                        [](const Custom&) { return false; },
                        [](const Sum& m) {
                          for (const auto& t : m.terms)
                            if (!t.separable()) return false;
                          return true;
                        },
                        [](const auto&) { return true; },
                    },
                    model());
}

bool Potential::analytic() const {
  return std::visit(overloaded{
                        [](const Custom&) { return false; },
                        [](const Sum& m) {
                          for (const auto& t : m.terms)
                            if (!t.analytic()) return false;
                          return true;
                        },
                        [](const SeparableSum& m) {
                          for (const auto& t : m.axes)
                            if (!t.analytic()) return false;
                          return true;
                        },
                        [](const auto&) { return true; },
                    },
                    model());
}

bool Potential::one_coordinate() const {
  return std::visit(overloaded{
                        [](const Sum& m) {
                          for (const auto& t : m.terms)
                            if (!t.one_coordinate()) return false;
                          return true;
                        },
                        [](const Constant&) { return true; },
                        [&](const auto&) { return is_per_coordinate(model()); },
                    },
                    model());
}

void Potential::check_dimension(int dimension) const {
  std::visit(overloaded{
                 [&](const SeparableSum& m) {
                   if (m.axes.size() != static_cast<std::size_t>(dimension)) {
                     throw DimensionError("separable sum has " + std::to_string(m.axes.size()) +
                                          " axes but the problem has " +
                                          std::to_string(dimension) + " coordinates");
                   }
                   for (const auto& a : m.axes) {
                     if (!a.one_coordinate()) {
                       throw DimensionError("separable sum axes must be one-coordinate models");
                     }
                   }
                 },
                 [&](const Sum& m) {
                   for (const auto& t : m.terms) t.check_dimension(dimension);
                 },
                 [&](const Linear& m) {
                   if (m.slopes.size() != static_cast<std::size_t>(dimension)) {
                     throw DimensionError("linear potential has " +
                                          std::to_string(m.slopes.size()) +
                                          " slopes but the problem has " +
                                          std::to_string(dimension) + " coordinates");
                   }
                 },
                 [&](const Custom& m) {
                   if (m.grid().dimension() != dimension) {
                     throw DimensionError("custom potential dimension mismatch");
                   }
                 },
                 [](const auto&) {},
             },
             model());
}

std::vector<double> Potential::tabulate(const Grid& grid) const {
  check_dimension(grid.dimension());
  if (const auto* c = std::get_if<Custom>(&model())) {
    require_same_grid(c->grid(), grid);
    return c->values();
  }
  return varqd::tabulate(grid, [this](std::span<const double> x) { return value(x); });
}

std::vector<std::vector<double>> Potential::tabulate_gradient(const Grid& grid) const {
  check_dimension(grid.dimension());
  const auto d = static_cast<std::size_t>(grid.dimension());
  std::vector<std::vector<double>> out(d, std::vector<double>(grid.size()));
  std::vector<double> g(d);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const auto x = grid.point(j);
    gradient(std::span<const double>(x.data(), d), g);
    for (std::size_t a = 0; a < d; ++a) out[a][j] = g[a];
  }
  return out;
}

std::optional<double> Potential::gaussian_mean(std::span<const double> center,
                                               double sigma) const {
  check_dimension(static_cast<int>(center.size()));
  return std::visit(
      overloaded{
          [&](const PairProduct& m) -> std::optional<double> {
            double s = 0.0;
            for (std::size_t i = 0; i < center.size(); ++i)
              for (std::size_t j = i + 1; j < center.size(); ++j) s += center[i] * center[j];
            return m.coupling * s;
          },
          [&](const Linear& m) -> std::optional<double> {
            double s = 0.0;
            for (std::size_t i = 0; i < center.size(); ++i) s += m.slopes[i] * center[i];
            return s;
          },
          [&](const Constant& m) -> std::optional<double> { return m.value; },
          [&](const SeparableSum& m) -> std::optional<double> {
            double s = 0.0;
            for (std::size_t i = 0; i < center.size(); ++i) {
              auto v = one_coordinate_mean(m.axes[i].model(), center[i], sigma);
              if (!v) return std::nullopt;
              s += *v;
            }
            return s;
          },
          [&](const Sum& m) -> std::optional<double> {
            double s = 0.0;
            for (const auto& t : m.terms) {
              auto v = t.gaussian_mean(center, sigma);
              if (!v) return std::nullopt;
              s += *v;
            }
            return s;
          },
          [&](const Custom&) -> std::optional<double> { return std::nullopt; },
          [&](const auto&) -> std::optional<double> {
            double s = 0.0;
            for (double c : center) s += *one_coordinate_mean(model(), c, sigma);
            return s;
          },
      },
      model());
}

std::optional<std::vector<double>> Potential::gaussian_gradient_mean(
    std::span<const double> center, double sigma) const {
  using Result = std::optional<std::vector<double>>;
  check_dimension(static_cast<int>(center.size()));
  const std::size_t d = center.size();
  return std::visit(
      overloaded{
          [&](const PairProduct& m) -> Result {
            double total = 0.0;
            for (double c : center) total += c;
            std::vector<double> g(d);
            for (std::size_t i = 0; i < d; ++i) g[i] = m.coupling * (total - center[i]);
            return g;
          },
          [&](const Linear& m) -> Result { return m.slopes; },
          [&](const Constant&) -> Result { return std::vector<double>(d, 0.0); },
          [&](const SeparableSum& m) -> Result {
            std::vector<double> g(d);
            for (std::size_t i = 0; i < d; ++i) {
              auto v = one_coordinate_slope_mean(m.axes[i].model(), center[i], sigma);
              if (!v) return std::nullopt;
              g[i] = *v;
            }
            return g;
          },
          [&](const Sum& m) -> Result {
            std::vector<double> g(d, 0.0);
            for (const auto& t : m.terms) {
              auto v = t.gaussian_gradient_mean(center, sigma);
              if (!v) return std::nullopt;
              for (std::size_t i = 0; i < d; ++i) g[i] += (*v)[i];
            }
            return g;
          },
          [&](const Custom&) -> Result { return std::nullopt; },
          [&](const auto&) -> Result {
            std::vector<double> g(d);
            for (std::size_t i = 0; i < d; ++i)
              g[i] = *one_coordinate_slope_mean(model(), center[i], sigma);
            return g;
          },
      },
      model());
}

std::string Potential::describe() const {
  return std::visit(
      overloaded{
          [](const Harmonic& m) { return "harmonic(k=" + number(m.k) + ")"; },
          [](const Quartic& m) {
            return "quartic(k2=" + number(m.k2) + ",k4=" + number(m.k4) + ")";
          },
          [](const Morse& m) {
            return "morse(D=" + number(m.depth) + ",a=" + number(m.width) +
                   ",x0=" + number(m.center) + ")";
          },
          [](const DoubleWell& m) {
            return "doublewell(a=" + number(m.a) + ",b=" + number(m.b) + ")";
          },
          [](const PairProduct& m) { return "pair(lambda=" + number(m.coupling) + ")"; },
          [](const Linear& m) {
            std::string s = "linear(";
            for (std::size_t i = 0; i < m.slopes.size(); ++i) {
              if (i) s += ",";
              s += number(m.slopes[i]);
            }
            return s + ")";
          },
          [](const Constant& m) { return "constant(c=" + number(m.value) + ")"; },
          [](const SeparableSum& m) {
            std::string s = "separable(";
            for (std::size_t i = 0; i < m.axes.size(); ++i) {
              if (i) s += ",";
              s += m.axes[i].describe();
            }
            return s + ")";
          },
          [](const Sum& m) {
            std::string s = "sum(";
            for (std::size_t i = 0; i < m.terms.size(); ++i) {
              if (i) s += ",";
              s += m.terms[i].describe();
            }
            return s + ")";
          },
          [](const Custom& m) {
            return "custom(points=" + std::to_string(m.grid().points()) +
                   ",dimension=" + std::to_string(m.grid().dimension()) + ")";
          },
      },
      model());
}

namespace {

void append_one_coordinate(const Potential& p, int coordinate, std::vector<ProductTerm>& out) {
  OneCoordinate one;
  if (const auto* c = std::get_if<Constant>(&p.model())) {
    out.push_back({c->value, {}});
    return;
  }
  auto model = p;
  out.push_back({1.0, {Factor{coordinate, [model, one](double x) {
                                return one.value(model.model(), x);
                              }}}});
}

bool decompose_into(const Potential& p, int coordinates, std::vector<ProductTerm>& out) {
  return std::visit(
      overloaded{
          [&](const PairProduct& m) {
            const auto identity = [](double x) { return x; };
            for (int i = 0; i < coordinates; ++i)
              for (int j = i + 1; j < coordinates; ++j)
                out.push_back({m.coupling, {Factor{i, identity}, Factor{j, identity}}});
            return true;
          },
          [&](const Linear& m) {
            const auto identity = [](double x) { return x; };
            for (int i = 0; i < coordinates; ++i)
              out.push_back({m.slopes[static_cast<std::size_t>(i)], {Factor{i, identity}}});
            return true;
          },
          [&](const Constant& m) {
            out.push_back({m.value, {}});
            return true;
          },
          [&](const SeparableSum& m) {
            for (int i = 0; i < coordinates; ++i) {
              append_one_coordinate(m.axes[static_cast<std::size_t>(i)], i, out);
            }
            return true;
          },
          [&](const Sum& m) {
            for (const auto& t : m.terms)
              if (!decompose_into(t, coordinates, out)) return false;
            return true;
          },
          [&](const Custom&) { return false; },
          [&](const auto&) {
            for (int i = 0; i < coordinates; ++i) append_one_coordinate(p, i, out);
            return true;
          },
      },
      p.model());
}

}  // namespace

std::optional<std::vector<ProductTerm>> decompose(const Potential& potential, int coordinates) {
  potential.check_dimension(coordinates);
  std::vector<ProductTerm> terms;
  if (!decompose_into(potential, coordinates, terms)) return std::nullopt;
  return terms;
}

}  // namespace varqd
