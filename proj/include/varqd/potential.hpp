#pragma once

#include "varqd/grid.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace varqd {

class Potential;

// One-coordinate models are summed over every coordinate they are applied to:
// V(x) = sum_i f(x_i).

/// f(x) = k/2 x^2
struct Harmonic {
  double k = 1.0;
};

/// f(x) = k2/2 x^2 + k4/4 x^4
struct Quartic {
  double k2 = 1.0;
  double k4 = 0.0;
};

/// f(x) = D (1 - exp(-a (x - x0)))^2
struct Morse {
  double depth = 1.0;
  double width = 1.0;
  double center = 0.0;
};

/// f(x) = a x^4 - b x^2
struct DoubleWell {
  double a = 1.0;
  double b = 1.0;
};

/// V(x) = lambda * sum_{i<j} x_i x_j; for two coordinates this is lambda x1 x2.
struct PairProduct {
  double coupling = 1.0;
};

/// V(x) = sum_i mu_i x_i; one slope per coordinate.
struct Linear {
  std::vector<double> slopes;
};

/// V(x) = c, independent of the dimension.
struct Constant {
  double value = 0.0;
};

/// V(x) = sum_i V_i(x_i) with one one-coordinate model per axis.
struct SeparableSum {
  std::vector<Potential> axes;
};

/// V(x) = sum of terms.
struct Sum {
  std::vector<Potential> terms;
};

/// Values tabulated on a grid; gradients by spectral differentiation.
class Custom {
 public:
  Custom(Grid grid, std::vector<double> values);

  const Grid& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  const std::vector<double>& gradient(int axis) const {
    return gradients_[static_cast<std::size_t>(axis)];
  }
  /// Flat index of a grid point; throws DimensionError off-grid.
  std::size_t locate(std::span<const double> x) const;

 private:
  Grid grid_;
  std::vector<double> values_;
  std::vector<std::vector<double>> gradients_;
};

/// A potential energy surface V: R^d -> R with real coefficients.
class Potential {
 public:
  using Model = std::variant<Harmonic, Quartic, Morse, DoubleWell, PairProduct, Linear,
                             Constant, SeparableSum, Sum, Custom>;

  Potential();  // V = 0
  template <class M>
    requires std::is_constructible_v<Model, M>
  Potential(M model) : model_(std::make_shared<Model>(std::move(model))) {}

  const Model& model() const { return *model_; }

  double value(std::span<const double> x) const;
  void gradient(std::span<const double> x, std::span<double> out) const;

  /// True when V is a sum of one-coordinate functions.
  bool separable() const;
  /// False when any part is a tabulated Custom potential.
  bool analytic() const;
  /// True when every part is a one-coordinate model (usable as an axis of SeparableSum).
  bool one_coordinate() const;
  /// Throws DimensionError if V cannot be evaluated in `dimension` coordinates.
  void check_dimension(int dimension) const;

  std::vector<double> tabulate(const Grid& grid) const;
  /// Gradient component tables, one per axis.
  std::vector<std::vector<double>> tabulate_gradient(const Grid& grid) const;

  /// <V> for the isotropic Gaussian density N(center, sigma^2 I); nullopt for Custom parts.
  std::optional<double> gaussian_mean(std::span<const double> center, double sigma) const;
  /// <grad V> for the same density.
  std::optional<std::vector<double>> gaussian_gradient_mean(std::span<const double> center,
                                                            double sigma) const;

  /// Canonical text in the scenario potential grammar.
  std::string describe() const;

 private:
  std::shared_ptr<const Model> model_;
};

/// One factor f(x_coordinate) of a product term.
struct Factor {
  int coordinate = 0;
  std::function<double(double)> function;
};

/// coefficient * prod_k factors[k](x_{coordinate_k}); coordinates within a term are distinct.
struct ProductTerm {
  double coefficient = 1.0;
  std::vector<Factor> factors;
};

/// Writes V as a sum of products of one-coordinate functions, if it is one.
/// Returns nullopt for tabulated potentials.
std::optional<std::vector<ProductTerm>> decompose(const Potential& potential, int coordinates);

}  // namespace varqd
