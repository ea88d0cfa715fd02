#pragma once

#include "varqd/frozen.hpp"
#include "varqd/grid.hpp"
#include "varqd/hamiltonian.hpp"

#include <Eigen/Core>

#include <optional>
#include <vector>

namespace varqd {

/// Normalized Hartree product u = phi_1 x ... x phi_N of one-dimensional factors.
/// Particle indices are 0-based; particle 0 carries the gauge factor c1.
struct HartreeState {
  std::vector<Wavefunction> particles;
  double hbar = 1.0;

  int count() const { return static_cast<int>(particles.size()); }
  /// Throws unless 2 <= N <= 4, every factor is one-dimensional and |1 - ||phi_n||| <= tolerance.
  void validate(double tolerance = 1e-8) const;
  /// Rescales every factor to unit norm; returns the largest drift |1 - ||phi_n|||.
  double renormalize();

  Eigen::VectorXcd pack() const;
  HartreeState with_packed(const Eigen::VectorXcd& y) const;
};

/// Normalized phi(x) proportional to exp(-(x - x0)^2 / (4 sigma^2) + i k (x - x0) / hbar).
Wavefunction gaussian_particle(const Grid& grid, double center, double momentum, double width,
                               double hbar);

/// Mean-field reductions of a potential over a Hartree product.
///
/// Potentials are written as sums of products of one-coordinate functions, so every
/// moment is a product of 1D quadratures. Two-particle problems also accept any
/// potential tabulated on the product grid.
class MeanField {
 public:
  /// `grids[n]` is the grid of particle n.
  MeanField(const Potential& v, std::vector<Grid> grids);

  int particles() const { return static_cast<int>(grids_.size()); }
  bool tabulated() const { return table_.has_value(); }

  /// V_n(x_n) = <psi_n|V psi_n>, the partial expectation over every particle but n.
  std::vector<double> reduce(const HartreeState& state, int n) const;
  /// V_0 = <u|V u>.
  double mean(const HartreeState& state) const;
  /// ||V u||^2.
  double squared_norm(const HartreeState& state) const;
  /// The part of V coupling two or more particles; one-particle terms and constants dropped.
  MeanField coupling() const;

 private:
  struct Factor {
    int particle;
    std::vector<double> table;
  };
  struct Term {
    double coefficient;
    std::vector<Factor> factors;
  };

  MeanField() = default;
  std::vector<std::vector<double>> factor_means(const HartreeState& state) const;

  std::vector<Grid> grids_;
  std::vector<Term> terms_;
  std::optional<std::vector<double>> table_;
};

/// V_n for particle n (0-based).
std::vector<double> mean_field_reduce(const Potential& v, const HartreeState& state, int n);

/// Hamiltonian over N particle coordinates with its per-particle grids.
class HartreeSystem {
 public:
  HartreeSystem(Hamiltonian h, std::vector<Grid> grids);
  HartreeSystem(Hamiltonian h, const Grid& grid, int particles);

  const Hamiltonian& hamiltonian() const { return h_; }
  int particles() const { return static_cast<int>(grids_.size()); }
  const Grid& grid(int n) const { return grids_[static_cast<std::size_t>(n)]; }
  const MeanField& mean_field() const { return mean_field_; }
  const MeanField& coupling() const { return coupling_; }
  /// h_n phi for the one-particle kinetic operator of particle n.
  Wavefunction apply_kinetic(int n, const Wavefunction& phi) const;
  /// Largest kinetic eigenvalue over all particles.
  double max_kinetic() const;
  /// Checks particle count, grids and hbar of a state against the system.
  void check(const HartreeState& state) const;

 private:
  Hamiltonian h_;
  std::vector<Grid> grids_;
  std::vector<std::vector<double>> symbols_;
  MeanField mean_field_;
  MeanField coupling_;
};

struct HartreeEnergies {
  double e0 = 0.0;
  /// eps_m = <phi_m|h_m phi_m>
  std::vector<double> kinetic;
  double v0 = 0.0;
};

HartreeEnergies energies(const HartreeState& state, const HartreeSystem& system);

struct HartreeDerivative {
  std::vector<Wavefunction> rates;
  /// i hbar <phi_1|phi_1 dot>, measured from the returned rate.
  double c1 = 0.0;
  double e0 = 0.0;
  /// Set for TDVP: the gauge constant kappa_1 = 0 is a convention.
  bool gauge_convention = false;

  Eigen::VectorXcd pack() const;
};

/// i hbar phi_n dot = (h_n + sum_{m != n} eps_m + V_n + c1 delta_{n0} - E0) phi_n, with c1 = E0.
/// Throws NumericalError if some |1 - ||phi_n||| exceeds norm_tolerance.
HartreeDerivative hartree_eom(const HartreeState& state, const HartreeSystem& system,
                              Principle principle = Principle::MVP, double norm_tolerance = 1e-6);

struct FluctuatingPotential {
  double v0 = 0.0;
  /// V_n tables, one per particle.
  std::vector<std::vector<double>> mean_fields;
  /// V - sum V_n + (N - 1) V_0 on the product grid; two particles only.
  std::optional<std::vector<double>> table;
};

FluctuatingPotential fluctuating_potential(const HartreeState& state, const HartreeSystem& system,
                                           bool assemble_table = true);

/// (1/hbar)(||Vu||^2 - sum_n ||V_n phi_n||^2 + (N - 1) V_0^2)^(1/2).
double epsilon_hartree(const HartreeState& state, const HartreeSystem& system);

/// phi_1 x phi_2 on the two-dimensional product grid.
Wavefunction assemble_product(const HartreeState& state);

/// Two-dimensional grid with the geometry of a one-dimensional particle grid.
Grid product_grid(const Grid& grid);

}  // namespace varqd
