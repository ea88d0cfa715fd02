#include "support.hpp"
#include "varqd/errors.hpp"
#include "varqd/hartree.hpp"
#include "varqd/spectral.hpp"

#include <doctest.h>

#include <vector>

using namespace varqd;
using test::cplx;

namespace {

// Second-order central differences with periodic wrap.
Wavefunction fd_laplacian(const Wavefunction& u) {
  const Grid& g = u.grid();
  const int m = g.points();
  const double h2 = g.spacing() * g.spacing();
  Wavefunction out(g);
  for (int j = 0; j < m; ++j) {
    const auto jj = static_cast<std::size_t>(j);
    out[jj] = (u[static_cast<std::size_t>((j + 1) % m)] - 2.0 * u[jj] +
               u[static_cast<std::size_t>((j + m - 1) % m)]) / h2;
  }
  return out;
}

double max_abs(const Wavefunction& u) {
  return u.values().cwiseAbs().maxCoeff();
}

std::vector<Potential> analytic_models() {
  return {Harmonic{1.3},
          Quartic{1.0, 0.1},
          Morse{2.0, 0.7, 0.4},
          DoubleWell{0.05, 0.5},
          PairProduct{0.8},
          Linear{{0.4, -0.3}},
          Constant{1.7},
          SeparableSum{{Potential(Harmonic{1.0}), Potential(Morse{1.0, 0.5, -0.2})}},
          Sum{{Potential(Quartic{0.5, 0.2}), Potential(PairProduct{0.3})}}};
}

}  // namespace

TEST_CASE("matched ground state is an eigenfunction") {
  const Grid g = test::line();
  const Hamiltonian h(1.0, Harmonic{1.0});
  const auto u = synthesize(test::params1d(0.0, 0.0, std::sqrt(0.5)), g);
  const auto hu = apply_h(h, u);
  CHECK(max_abs(hu - 0.5 * u) <= 1e-8);
}

TEST_CASE("plane waves are kinetic eigenfunctions") {
  const Grid g = test::line(20.0, 64);
  const double k = 2.0 * test::kPi * 3.0 / 20.0;
  const auto u = Wavefunction::sample(g, [&](std::span<const double> x) {
    return std::exp(cplx(0.0, k * x[0]));
  });
  const Hamiltonian h(0.7, Potential());
  CHECK(max_abs(apply_h(h, u) - (0.5 * 0.7 * 0.7 * k * k) * u) <= 1e-11);
}

TEST_CASE("spectral Laplacian against finite differences") {
  const Hamiltonian h(1.0, Quartic{1.0, 0.1});
  double previous = 0.0;
  for (int m : {128, 256, 512}) {
    const Grid g = test::line(20.0, m);
    const auto u = synthesize(test::params1d(0.8, 0.5, 0.8), g);
    const auto table = Potential(Quartic{1.0, 0.1}).tabulate(g);
    Wavefunction oracle = -0.5 * fd_laplacian(u) + u.multiplied(table);
    const double err = max_abs(apply_h(h, u) - oracle);
    const double h2 = g.spacing() * g.spacing();
    CHECK(err <= 2.0 * h2);
    if (previous > 0.0) CHECK(previous / err == doctest::Approx(4.0).epsilon(0.05));
    previous = err;
  }
}

TEST_CASE("apply_h is linear and Hermitian") {
  const Grid g = test::line(20.0, 128);
  const Hamiltonian h(1.0, Morse{1.0, 0.5, 0.0});
  test::Rng rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    const auto u = test::random_smooth(g, rng);
    const auto v = test::random_smooth(g, rng);
    const cplx a(0.4, 1.1), b(-0.7, 0.2);
    const auto lhs = apply_h(h, a * u + b * v);
    const auto rhs = a * apply_h(h, u) + b * apply_h(h, v);
    CHECK(norm(lhs - rhs) <= 1e-12 * norm(lhs));
    const auto hu = apply_h(h, u);
    CHECK(std::abs(inner(u, hu).imag()) <= 1e-12 * norm(hu) * norm(u));
    CHECK(std::abs(inner(v, hu) - std::conj(inner(u, apply_h(h, v)))) <= 1e-11 * norm(hu) * norm(v));
  }
}

TEST_CASE("two-dimensional Hamiltonian") {
  const Grid g(2, 16.0, 64);
  const Hamiltonian h(1.0, Harmonic{1.0});
  FrozenParams f;
  f.q = {0.0, 0.0};
  f.p = {0.0, 0.0};
  f.delta = std::sqrt(0.5);
  const auto u = synthesize(f, g);
  CHECK(norm(apply_h(h, u) - 1.0 * u) <= 1e-8);
}

TEST_CASE("gradient expectations") {
  const Grid g = test::line();
  const auto u = synthesize(test::params1d(1.5, 0.0, 1.0), g);
  CHECK(grad_v_expectation(Harmonic{1.0}, u)[0] == doctest::Approx(3.0).epsilon(1e-8));
  CHECK(grad_v_expectation(Potential(), u)[0] == 0.0);
  const auto centred = synthesize(test::params1d(0.0, 0.0, 0.8), g);
  CHECK(std::abs(grad_v_expectation(DoubleWell{0.1, 1.0}, centred)[0]) <= 1e-10);
}

TEST_CASE("analytic gradients match spectral differentiation") {
  const Grid g(2, 30.0, 128);
  const auto window = tabulate(g, [](std::span<const double> x) {
    return std::exp(-(x[0] * x[0] + x[1] * x[1]) / 2.0);
  });
  for (const auto& v : analytic_models()) {
    // Multiply by a Gaussian window so the product is periodic to machine precision.
    const auto values = v.tabulate(g);
    const auto grads = v.tabulate_gradient(g);
    std::vector<double> windowed(values.size());
    for (std::size_t j = 0; j < values.size(); ++j) windowed[j] = values[j] * window[j];
    for (int a = 0; a < 2; ++a) {
      const auto spectral = derivative(g, windowed, a);
      double worst = 0.0;
      for (std::size_t j = 0; j < values.size(); ++j) {
        const auto x = g.point(j);
        const double dw = -x[static_cast<std::size_t>(a)] * window[j];
        const double exact = grads[static_cast<std::size_t>(a)][j] * window[j] + values[j] * dw;
        worst = std::max(worst, std::abs(spectral[j] - exact));
      }
      INFO(v.describe(), " axis ", a);
      CHECK(worst <= 1e-8);
    }
  }
}

TEST_CASE("closed-form Gaussian moments match quadrature") {
  const Grid g(2, 24.0, 256);
  const std::vector<double> centre{0.6, -0.4};
  const double sigma = 0.7;
  const auto density = tabulate(g, [&](std::span<const double> x) {
    const double r2 = (x[0] - centre[0]) * (x[0] - centre[0]) + (x[1] - centre[1]) * (x[1] - centre[1]);
    return std::exp(-r2 / (2.0 * sigma * sigma)) / (2.0 * test::kPi * sigma * sigma);
  });
  for (const auto& v : analytic_models()) {
    const auto values = v.tabulate(g);
    const auto grads = v.tabulate_gradient(g);
    double mean = 0.0;
    std::vector<double> gmean(2, 0.0);
    for (std::size_t j = 0; j < values.size(); ++j) {
      mean += values[j] * density[j] * g.cell_volume();
      for (std::size_t a = 0; a < 2; ++a) gmean[a] += grads[a][j] * density[j] * g.cell_volume();
    }
    INFO(v.describe());
    CHECK(*v.gaussian_mean(centre, sigma) == doctest::Approx(mean).epsilon(1e-10));
    const auto closed = *v.gaussian_gradient_mean(centre, sigma);
    for (std::size_t a = 0; a < 2; ++a) CHECK(closed[a] == doctest::Approx(gmean[a]).epsilon(1e-10));
  }
}

TEST_CASE("separability flags") {
  CHECK(Potential(Harmonic{1.0}).separable());
  CHECK(Potential(SeparableSum{{Potential(Harmonic{1.0}), Potential(Quartic{1.0, 0.1})}}).separable());
  CHECK(Potential(Linear{{1.0, 2.0}}).separable());
  CHECK_FALSE(Potential(PairProduct{1.0}).separable());
  CHECK_FALSE(Potential(Sum{{Potential(Harmonic{1.0}), Potential(PairProduct{0.1})}}).separable());
  const Grid g(2, 10.0, 16);
  CHECK_FALSE(Potential(Custom(g, std::vector<double>(g.size(), 0.0))).analytic());
}

TEST_CASE("dimension checks") {
  CHECK_THROWS_AS(Potential(Linear{{1.0, 2.0}}).check_dimension(1), DimensionError);
  CHECK_THROWS_AS(Potential(SeparableSum{{Potential(Harmonic{1.0})}}).check_dimension(2),
                  DimensionError);
  const Hamiltonian h(1.0, Harmonic{1.0});
  CHECK_THROWS_AS(Hamiltonian(0.0, Harmonic{1.0}), ValidationError);
  CHECK_NOTHROW(h.check_dimension(2));
}

TEST_CASE("mean-field reduction") {
  const Grid g = test::line(20.0, 128);
  HartreeState s;
  s.particles = {gaussian_particle(g, -0.5, 0.3, 0.9, 1.0), gaussian_particle(g, 1.2, -0.2, 0.7, 1.0)};
  const double mu2 = expectation_x(s.particles[1])[0];

  SUBCASE("pair product") {
    const auto v1 = mean_field_reduce(PairProduct{1.0}, s, 0);
    for (int j = 0; j < g.points(); ++j) {
      CHECK(v1[static_cast<std::size_t>(j)] == doctest::Approx(g.coordinate(j) * mu2).epsilon(1e-12));
    }
  }
  SUBCASE("separable shift") {
    const Potential v = SeparableSum{{Potential(Harmonic{1.0}), Potential(Quartic{0.5, 0.3})}};
    const auto v1 = mean_field_reduce(v, s, 0);
    const auto second = Potential(Quartic{0.5, 0.3}).tabulate(g);
    const double shift = expectation(s.particles[1], second);
    for (int j = 0; j < g.points(); ++j) {
      const double x = g.coordinate(j);
      CHECK(v1[static_cast<std::size_t>(j)] == doctest::Approx(0.5 * x * x + shift).epsilon(1e-12));
    }
  }
  SUBCASE("zero potential") {
    for (double x : mean_field_reduce(Potential(), s, 1)) CHECK(x == 0.0);
  }
  SUBCASE("expectations agree with the product") {
    const Potential v = Sum{{Potential(Morse{1.0, 0.6, 0.1}), Potential(PairProduct{0.7})}};
    const MeanField mf(v, {g, g});
    const double v0 = mf.mean(s);
    const auto u = assemble_product(s);
    CHECK(expectation(u, v.tabulate(product_grid(g))) == doctest::Approx(v0).epsilon(1e-12));
    for (int n = 0; n < 2; ++n) {
      CHECK(expectation(s.particles[static_cast<std::size_t>(n)], mf.reduce(s, n)) ==
            doctest::Approx(v0).epsilon(1e-12));
    }
  }
  SUBCASE("tabulated two-particle potential") {
    const Grid g2 = product_grid(g);
    const Potential analytic = Sum{{Potential(Harmonic{1.0}), Potential(PairProduct{0.4})}};
    const Potential custom = Custom(g2, analytic.tabulate(g2));
    for (int n = 0; n < 2; ++n) {
      const auto a = mean_field_reduce(analytic, s, n);
      const auto c = mean_field_reduce(custom, s, n);
      for (std::size_t j = 0; j < a.size(); ++j) CHECK(c[j] == doctest::Approx(a[j]).epsilon(1e-10));
    }
  }
}
