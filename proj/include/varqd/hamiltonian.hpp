#pragma once

#include "varqd/grid.hpp"
#include "varqd/potential.hpp"

#include <optional>
#include <span>
#include <vector>

namespace varqd {

/// Parameters of H = lambda A^dagger.A + mu.x + omega for ladder operators of width delta.
struct ExactClass {
  double delta = 1.0;
  double lambda = 1.0;
  std::vector<double> mu;
  double omega = 0.0;
};

/// H = -sum_a (hbar^2 s_a / 2) d_a^2 + V with unit mass and per-axis kinetic scales s_a.
class Hamiltonian {
 public:
  Hamiltonian(double hbar, Potential potential, std::vector<double> kinetic_scales = {});

  /// lambda A^dagger.A + mu.x + omega written in kinetic + potential form, with
  /// A^dagger.A = |x|^2/(4 delta^2) - delta^2 Laplacian - d/2.
  static Hamiltonian exact_class(double hbar, const ExactClass& params);

  double hbar() const { return hbar_; }
  const Potential& potential() const { return potential_; }
  /// s_a; 1 when no scales were given.
  double kinetic_scale(int axis) const;
  /// hbar^2 s_a / 2.
  double kinetic_coefficient(int axis) const;
  /// True when every axis has unit mass (s_a = 1) for `dimension` axes.
  bool schrodinger_form(int dimension) const;
  const std::optional<ExactClass>& exact() const { return exact_; }

  /// Throws DimensionError if the potential or the scales do not fit `dimension`.
  void check_dimension(int dimension) const;

 private:
  double hbar_;
  Potential potential_;
  std::vector<double> kinetic_scales_;
  std::optional<ExactClass> exact_;
};

/// Kinetic symbol and potential table of a Hamiltonian on one grid.
class GridHamiltonian {
 public:
  GridHamiltonian(const Hamiltonian& h, const Grid& grid);

  const Grid& grid() const { return grid_; }
  double hbar() const { return hbar_; }
  /// sum_a c_a k_a^2 in FFT order.
  const std::vector<double>& kinetic_symbol() const { return symbol_; }
  const std::vector<double>& potential_table() const { return potential_; }

  Wavefunction apply(const Wavefunction& u) const;
  Wavefunction apply_kinetic(const Wavefunction& u) const;
  /// Largest eigenvalue of the discrete kinetic operator.
  double max_kinetic() const;

 private:
  Grid grid_;
  double hbar_;
  std::vector<double> symbol_;
  std::vector<double> potential_;
};

/// -sum_a c_a d_a^2 u + V u with spectral derivatives.
Wavefunction apply_h(const Hamiltonian& h, const Wavefunction& u);

/// <u|(grad V) u> by quadrature; Custom gradients come from spectral differentiation.
std::vector<double> grad_v_expectation(const Potential& v, const Wavefunction& u);

/// Width that puts V = k/2 |x|^2 (unit mass) into the exact class: delta^2 = hbar / (2 sqrt k).
double matched_width(double hbar, double k);

/// Exact-class parameters of V = k/2 |x|^2 at the matched width.
ExactClass matched_harmonic(double hbar, double k, int dimension);

}  // namespace varqd
