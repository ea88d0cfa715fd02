#pragma once

#include "varqd/grid.hpp"
#include "varqd/hamiltonian.hpp"
#include "varqd/tangent.hpp"

#include <Eigen/Core>

#include <optional>
#include <vector>

namespace varqd {

enum class Principle { MVP, TDVP };

const char* to_string(Principle p);

/// Point (theta, z = q + i p) on the frozen Gaussian manifold of width delta:
/// u(x) = (2 pi delta^2)^(-d/4) exp(i theta - |x - 2 delta q|^2 / (4 delta^2)
///        + (i/delta) p.(x - delta q)).
/// The packet is centred at 2 delta q with mean momentum (hbar/delta) p.
struct FrozenParams {
  double theta = 0.0;
  std::vector<double> q;
  std::vector<double> p;
  double delta = 1.0;
  double hbar = 1.0;

  int dimension() const { return static_cast<int>(q.size()); }
  std::vector<cplx> z() const;
  /// Throws ValidationError on non-positive delta/hbar or mismatched q, p.
  void validate() const;

  /// [theta, q_1..q_d, p_1..p_d]
  Eigen::VectorXd pack() const;
  FrozenParams with_packed(const Eigen::VectorXd& y) const;
};

struct FrozenDerivative {
  double theta_dot = 0.0;
  std::vector<cplx> z_dot;
  /// Set for TDVP: theta_dot is the McLachlan value, not determined by the principle.
  bool gauge_convention = false;

  std::vector<double> q_dot() const;
  std::vector<double> p_dot() const;
  Eigen::VectorXd pack() const;
};

/// Hamiltonian plus the grid on which grid-side quantities are evaluated.
///
/// Schrodinger-form Hamiltonians with analytic potentials use closed-form Gaussian
/// moments for the equations of motion; everything else goes through the grid.
class FrozenSystem {
 public:
  FrozenSystem(Hamiltonian h, int dimension, std::optional<Grid> grid = std::nullopt);

  const Hamiltonian& hamiltonian() const { return h_; }
  int dimension() const { return dimension_; }
  bool has_grid() const { return grid_h_.has_value(); }
  const Grid& grid() const;
  const GridHamiltonian& grid_hamiltonian() const;
  bool analytic() const { return analytic_; }

 private:
  Hamiltonian h_;
  int dimension_;
  std::optional<GridHamiltonian> grid_h_;
  bool analytic_;
};

/// Closed-form samples of the packet.
Wavefunction synthesize(const FrozenParams& params, const Grid& grid, bool strict = false);

/// {i u, i x_m u, (x_m - 2 delta q_m) u}, in that order.
TangentBasis tangent_basis(const FrozenParams& params, const Grid& grid);
/// tangent_basis without the phase direction i u.
TangentBasis reduced_tangent_basis(const FrozenParams& params, const Grid& grid);

/// Coefficients of u_dot on tangent_basis: (theta_dot - p_dot.q - p.q_dot, p_dot/delta, q_dot/delta).
Eigen::VectorXd tangent_coefficients(const FrozenParams& params, const FrozenDerivative& rate);
/// Inverse of tangent_coefficients.
FrozenDerivative from_tangent_coefficients(const FrozenParams& params,
                                           const Eigen::VectorXd& coefficients);

/// u_dot assembled on the grid.
Wavefunction velocity(const FrozenParams& params, const FrozenDerivative& rate, const Grid& grid);

/// E0 = <u|Hu>.
double energy(const FrozenParams& params, const FrozenSystem& system);

/// Variational equations of motion for (theta, z).
FrozenDerivative eom(const FrozenParams& params, const FrozenSystem& system,
                     Principle principle = Principle::MVP);
/// Same, always through the commutator expectation on the grid.
FrozenDerivative eom_grid(const FrozenParams& params, const FrozenSystem& system,
                          Principle principle = Principle::MVP);

struct EpsilonBreakdown {
  /// (||(H - E0)u||^2 - hbar^2 |z_dot|^2)^(1/2) / hbar
  double local = 0.0;
  /// (||Hu||^2 / hbar^2 - ||u_dot||^2)^(1/2)
  double minimal_distance = 0.0;
  /// ||u_dot - Hu/(i hbar)||
  double residual = 0.0;
  double hu_norm = 0.0;
  double velocity_norm = 0.0;
  double energy = 0.0;
  double fluctuation = 0.0;
};

EpsilonBreakdown epsilon_breakdown(const FrozenParams& params, const FrozenSystem& system);
/// The reported epsilon: the residual route of epsilon_breakdown.
double epsilon(const FrozenParams& params, const FrozenSystem& system);

struct FluctuationReport {
  /// hbar |z_dot|
  double analytic = 0.0;
  /// ||(H_u - E0)u|| from the grid assembly sum_m i hbar z_dot_m (x_m - 2 delta q_m) u / delta
  double grid = 0.0;
  /// ||(H - E0)u||
  double total = 0.0;
  /// (||(H - E0)u||^2 - ||(H_u - E0)u||^2) / hbar^2
  double epsilon_squared = 0.0;
};

FluctuationReport energy_fluctuation(const FrozenParams& params, const FrozenSystem& system);
/// (H_u - E0) u on the grid.
Wavefunction variational_fluctuation(const FrozenParams& params, const FrozenSystem& system);

/// (hbar/(8 delta^2) + delta^2 C2/(2 hbar)) sqrt(d^2 + 2d).
double taylor_bound(const FrozenParams& params, double c2);

}  // namespace varqd
