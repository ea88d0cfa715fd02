#include "varqd/tangent.hpp"

#include "varqd/errors.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include <cmath>
#include <limits>

namespace varqd {
namespace {

void check_basis(const TangentBasis& basis) {
  if (basis.vectors.empty()) throw DimensionError("empty tangent basis");
  for (const auto& v : basis.vectors) require_same_grid(basis.vectors.front().grid(), v.grid());
}

Eigen::MatrixXcd inner_matrix(const TangentBasis& basis) {
  check_basis(basis);
  const auto n = static_cast<Eigen::Index>(basis.size());
  const auto rows = static_cast<Eigen::Index>(basis.vectors.front().size());
  Eigen::MatrixXcd stacked(rows, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    stacked.col(i) = basis.vectors[static_cast<std::size_t>(i)].values();
  }
  return basis.vectors.front().grid().cell_volume() * (stacked.adjoint() * stacked);
}

Eigen::VectorXcd inner_vector(const TangentBasis& basis, const Wavefunction& w) {
  check_basis(basis);
  Eigen::VectorXcd out(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t i = 0; i < basis.size(); ++i) {
    out[static_cast<Eigen::Index>(i)] = inner(basis.vectors[i], w);
  }
  return out;
}

double condition_from_singular_values(const Eigen::VectorXd& s) {
  const double smin = s.minCoeff();
  if (smin <= 0.0) return std::numeric_limits<double>::infinity();
  return s.maxCoeff() / smin;
}

}  // namespace

void TangentBasis::add(Wavefunction v, std::string label) {
  if (!vectors.empty()) require_same_grid(vectors.front().grid(), v.grid());
  vectors.push_back(std::move(v));
  labels.push_back(std::move(label));
}

Eigen::MatrixXd gram_matrix(const TangentBasis& basis) { return inner_matrix(basis).real(); }

Eigen::MatrixXd symplectic_matrix(const TangentBasis& basis) {
  return inner_matrix(basis).imag();
}

double gram_condition(const TangentBasis& basis) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram_matrix(basis),
                                                     Eigen::EigenvaluesOnly);
  return condition_from_singular_values(eig.eigenvalues().cwiseAbs());
}

Wavefunction combine(const TangentBasis& basis, const Eigen::VectorXd& coefficients) {
  check_basis(basis);
  if (static_cast<std::size_t>(coefficients.size()) != basis.size()) {
    throw DimensionError("coefficient count does not match basis size");
  }
  Wavefunction out(basis.vectors.front().grid());
  for (std::size_t i = 0; i < basis.size(); ++i) {
    out.values() += coefficients[static_cast<Eigen::Index>(i)] * basis.vectors[i].values();
  }
  return out;
}

Projection project_metric(const TangentBasis& basis, const Wavefunction& w,
                          double max_condition) {
  const Eigen::MatrixXd g = gram_matrix(basis);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(g, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd lambda = eig.eigenvalues();
  const double condition =
      lambda.minCoeff() <= 0.0 ? std::numeric_limits<double>::infinity()
                               : lambda.maxCoeff() / lambda.minCoeff();
  if (!(condition <= max_condition)) {
    throw DegenerateBasisError("Gram matrix condition number " + std::to_string(condition) +
                                   " exceeds " + std::to_string(max_condition),
                               condition);
  }
  const Eigen::VectorXd r = inner_vector(basis, w).real();
  Eigen::VectorXd c = g.llt().solve(r);
  return {c, combine(basis, c), condition};
}

Projection project_symplectic(const TangentBasis& basis, const Wavefunction& w,
                              double max_condition) {
  const Eigen::MatrixXd omega = symplectic_matrix(basis);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(omega);
  const Eigen::VectorXd s = svd.singularValues();
  double condition = condition_from_singular_values(s);
  // A vanishing form has every singular value at rounding level.
  if (s.maxCoeff() <= 1e-14 * gram_matrix(basis).trace()) {
    condition = std::numeric_limits<double>::infinity();
  }
  if (!(condition <= max_condition)) {
    throw DegenerateSymplecticError("symplectic matrix is singular (condition " +
                                        std::to_string(condition) + ")",
                                    condition);
  }
  const Eigen::VectorXd rhs = inner_vector(basis, w).imag();
  Eigen::VectorXd c = omega.partialPivLu().solve(rhs);
  return {c, combine(basis, c), condition};
}

double residual_distance(const TangentBasis& basis, const Wavefunction& w,
                         double max_condition) {
  const auto p = project_metric(basis, w, max_condition);
  return norm(w - p.projected);
}

}  // namespace varqd
