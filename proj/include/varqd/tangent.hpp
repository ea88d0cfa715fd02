#pragma once

#include "varqd/grid.hpp"

#include <Eigen/Core>

#include <string>
#include <vector>

namespace varqd {

/// Vectors spanning a real-linear subspace of the grid Hilbert space.
struct TangentBasis {
  std::vector<Wavefunction> vectors;
  std::vector<std::string> labels;

  void add(Wavefunction v, std::string label);
  std::size_t size() const { return vectors.size(); }
};

struct Projection {
  Eigen::VectorXd coefficients;
  Wavefunction projected;
  /// Condition number of the matrix that was solved.
  double condition = 1.0;
};

inline constexpr double kDefaultMaxCondition = 1e10;

/// G_ij = Re<v_i|v_j>.
Eigen::MatrixXd gram_matrix(const TangentBasis& basis);
/// Omega_ij = Im<v_i|v_j>.
Eigen::MatrixXd symplectic_matrix(const TangentBasis& basis);
/// 2-norm condition number of the Gram matrix.
double gram_condition(const TangentBasis& basis);

/// Metric (McLachlan) projection: Re<v_i|w - Pw> = 0 for all i.
Projection project_metric(const TangentBasis& basis, const Wavefunction& w,
                          double max_condition = kDefaultMaxCondition);
/// Symplectic (Kramer-Saraceno) projection: Im<v_i|w - Pw> = 0 for all i.
Projection project_symplectic(const TangentBasis& basis, const Wavefunction& w,
                              double max_condition = kDefaultMaxCondition);
/// ||w - P^g w||.
double residual_distance(const TangentBasis& basis, const Wavefunction& w,
                         double max_condition = kDefaultMaxCondition);

/// Sum_i c_i v_i.
Wavefunction combine(const TangentBasis& basis, const Eigen::VectorXd& coefficients);

}  // namespace varqd
