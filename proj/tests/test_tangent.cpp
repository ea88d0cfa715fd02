#include "support.hpp"
#include "varqd/errors.hpp"
#include "varqd/tangent.hpp"

#include <Eigen/Dense>
#include <doctest.h>

using namespace varqd;
using test::cplx;

namespace {

const cplx I(0.0, 1.0);

TangentBasis packets(const Grid& g) {
  TangentBasis b;
  b.add(synthesize(test::params1d(-0.5, 0.2, 0.7), g), "a");
  b.add(synthesize(test::params1d(0.3, -0.4, 0.9), g), "b");
  b.add(synthesize(test::params1d(0.9, 0.6, 0.6), g), "c");
  return b;
}

// Real least squares min |sum c_i v_i - w| from explicitly summed normal equations.
Eigen::VectorXd least_squares(const TangentBasis& b, const Wavefunction& w) {
  const auto n = static_cast<Eigen::Index>(b.size());
  Eigen::MatrixXd a(n, n);
  Eigen::VectorXd r(n);
  const double h = w.grid().cell_volume();
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& vi = b.vectors[static_cast<std::size_t>(i)];
    double ri = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) ri += (vi[j].real() * w[j].real() + vi[j].imag() * w[j].imag());
    r(i) = ri * h;
    for (Eigen::Index k = 0; k < n; ++k) {
      const auto& vk = b.vectors[static_cast<std::size_t>(k)];
      double s = 0.0;
      for (std::size_t j = 0; j < w.size(); ++j) s += vi[j].real() * vk[j].real() + vi[j].imag() * vk[j].imag();
      a(i, k) = s * h;
    }
  }
  return a.fullPivLu().solve(r);
}

Wavefunction complex_projector(const std::vector<Wavefunction>& span, const Wavefunction& w) {
  // Orthonormalize complex-linearly (Gram-Schmidt twice) and project.
  std::vector<Wavefunction> e;
  for (const auto& v : span) {
    Wavefunction x = v;
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& f : e) x -= inner(f, x) * f;
    x *= 1.0 / norm(x);
    e.push_back(x);
  }
  Wavefunction out(w.grid());
  for (const auto& f : e) out += inner(f, w) * f;
  return out;
}

}  // namespace

TEST_CASE("metric projection, trivial cases") {
  const Grid g = test::line();
  const auto u = synthesize(test::params1d(0.2, 0.1, 0.8), g);
  TangentBasis b;
  b.add(u, "u");
  const auto p = project_metric(b, 2.5 * u);
  CHECK(p.coefficients(0) == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(norm(2.5 * u - p.projected) <= 1e-12);
  const auto q = project_metric(b, I * u);
  CHECK(norm(q.projected) <= 1e-14);
  CHECK(residual_distance(b, I * u) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(residual_distance(b, 3.0 * u) <= 1e-10);
}

TEST_CASE("metric projection against a least-squares oracle") {
  const Grid g = test::line(20.0, 128);
  const TangentBasis b = packets(g);
  test::Rng rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const auto w = test::random_smooth(g, rng);
    const auto p = project_metric(b, w);
    const auto oracle = least_squares(b, w);
    CHECK((p.coefficients - oracle).cwiseAbs().maxCoeff() <= 1e-9);
    const auto r = w - p.projected;
    for (const auto& v : b.vectors) CHECK(std::abs(metric(v, r)) <= 1e-10 * norm(w));
    const double pyth = std::sqrt(squared_norm(w) - squared_norm(p.projected));
    CHECK(residual_distance(b, w) == doctest::Approx(pyth).epsilon(1e-10));
    // Idempotence.
    const auto again = project_metric(b, p.projected);
    CHECK((again.coefficients - p.coefficients).cwiseAbs().maxCoeff() <= 1e-10);
    // Minimality against random tangent perturbations.
    const double best = norm(r);
    for (int k = 0; k < 100; ++k) {
      Eigen::VectorXd c = p.coefficients;
      for (Eigen::Index i = 0; i < c.size(); ++i) c(i) += rng.uniform(-0.1, 0.1);
      CHECK(norm(combine(b, c) - w) >= best);
    }
  }
}

TEST_CASE("symplectic projection on {u, iu}") {
  const Grid g = test::line(20.0, 128);
  const auto u = synthesize(test::params1d(0.4, -0.3, 0.8), g);
  TangentBasis b;
  b.add(u, "u");
  b.add(I * u, "iu");
  const auto omega = symplectic_matrix(b);
  CHECK(omega(0, 1) == doctest::Approx(1.0).epsilon(1e-12));
  test::Rng rng(5);
  const auto w = test::random_smooth(g, rng);
  const auto p = project_symplectic(b, w);
  // Omega c = s by hand: [0 1; -1 0] c = (Im<u|w>, Im<iu|w>).
  const double s0 = symplectic(u, w), s1 = symplectic(I * u, w);
  CHECK(p.coefficients(1) == doctest::Approx(s0).epsilon(1e-10));
  CHECK(p.coefficients(0) == doctest::Approx(-s1).epsilon(1e-10));
  const auto r = w - p.projected;
  for (const auto& v : b.vectors) CHECK(std::abs(symplectic(v, r)) <= 1e-10 * norm(w));
  CHECK(norm(project_symplectic(b, p.projected).projected - p.projected) <= 1e-12);
}

TEST_CASE("degenerate bases") {
  const Grid g = test::line(20.0, 128);
  const auto u = synthesize(test::params1d(0.0, 0.0, 1.0), g);
  TangentBasis single;
  single.add(u, "u");
  CHECK_THROWS_AS(project_symplectic(single, u), DegenerateSymplecticError);
  TangentBasis twice;
  twice.add(u, "u");
  twice.add(2.0 * u, "2u");
  try {
    project_metric(twice, u);
    FAIL("expected a degenerate basis");
  } catch (const DegenerateBasisError& e) {
    CHECK(e.condition() > kDefaultMaxCondition);
  }
}

TEST_CASE("projections coincide on complex-linear spans") {
  const Grid g = test::line(20.0, 128);
  const auto u = synthesize(test::params1d(0.2, 0.5, 0.7), g);
  const auto v = synthesize(test::params1d(-0.6, 0.1, 0.9), g);
  TangentBasis b;
  b.add(u, "u");
  b.add(I * u, "iu");
  b.add(v, "v");
  b.add(I * v, "iv");
  test::Rng rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const auto w = test::random_smooth(g, rng);
    const auto pg = project_metric(b, w).projected;
    const auto pw = project_symplectic(b, w).projected;
    const auto pc = complex_projector({u, v}, w);
    CHECK(norm(pg - pw) <= 1e-10 * norm(w));
    CHECK(norm(pg - pc) <= 1e-10 * norm(w));
  }
}
