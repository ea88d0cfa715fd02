#include "support.hpp"
#include "varqd/errors.hpp"
#include "varqd/log.hpp"
#include "varqd/reference.hpp"

#include <doctest.h>

using namespace varqd;
using test::cplx;

TEST_CASE("free Gaussian dispersion") {
  const Grid g = test::line(40.0, 512);
  auto psi = [&](double t) {
    return Wavefunction::sample(g, [t](std::span<const double> x) {
      return test::free_gaussian(x[0], t, -1.0, 0.8, 0.7, 1.0);
    });
  };
  const auto run = split_step(psi(0.0), Hamiltonian(1.0, Potential()), 1e-3, 1000, 100);
  double worst = 0.0;
  for (const auto& s : run.snapshots) {
    worst = std::max(worst, (s.psi - psi(s.t)).values().cwiseAbs().maxCoeff());
    // Variance s^2 + (hbar t / (2 s))^2.
    const double mean = expectation_x(s.psi)[0];
    const double var = second_moment(s.psi, 0, 0) - mean * mean;
    CHECK(var == doctest::Approx(0.49 + std::pow(s.t / 1.4, 2)).epsilon(1e-9));
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("coherent state revival") {
  const Grid g = test::line(20.0, 256);
  FrozenParams f = test::params1d(1.0, 0.5, std::sqrt(0.5));
  const auto psi0 = synthesize(f, g);
  const long steps = 8000;
  const auto run = split_step(psi0, Hamiltonian(1.0, Harmonic{1.0}), 2.0 * test::kPi / steps, steps, steps);
  const auto& end = run.snapshots.back().psi;
  CHECK(std::abs(inner(psi0, end)) >= 1.0 - 1e-8);
  // Exact phase after one period: exp(-i E0 T) with E0 = hbar/2 + classical energy.
  CHECK(std::abs(end.values().cwiseAbs().maxCoeff() - psi0.values().cwiseAbs().maxCoeff()) <= 1e-6);
}

TEST_CASE("unitarity and energy") {
  const Grid g = test::line(20.0, 128);
  const auto psi0 = synthesize(test::params1d(0.8, 0.4, 0.7), g);
  const Hamiltonian h(1.0, Quartic{1.0, 0.1});
  const auto run = split_step(psi0, h, 1e-3, 10000, 1000);
  CHECK(run.max_norm_drift <= 1e-12);
  CHECK(run.snapshots.size() == 11);
  CHECK(run.snapshots.back().t == doctest::Approx(10.0));
  // The splitting conserves a modified energy; the O(dt^2) offset needs a finer step.
  const auto fine = split_step(psi0, h, 1e-4, 10000, 1000);
  const double e0 = fine.snapshots.front().energy;
  for (const auto& s : fine.snapshots) CHECK(std::abs(s.energy - e0) <= 1e-8 * std::abs(e0));
}

TEST_CASE("second-order convergence") {
  const Grid g = test::line(20.0, 128);
  const auto psi0 = synthesize(test::params1d(0.8, 0.4, 0.7), g);
  const Hamiltonian h(1.0, Quartic{1.0, 0.1});
  auto final_state = [&](double dt) {
    const long steps = std::lround(1.0 / dt);
    return split_step(psi0, h, dt, steps, steps).snapshots.back().psi;
  };
  const auto a = final_state(0.01), b = final_state(0.005), c = final_state(0.0025);
  const double ratio = norm(a - b) / norm(b - c);
  CHECK(ratio == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("two-dimensional reference") {
  const Grid g(2, 16.0, 64);
  FrozenParams f;
  f.q = {0.5, -0.3};
  f.p = {0.2, 0.4};
  f.delta = std::sqrt(0.5);
  const auto psi0 = synthesize(f, g);
  const long steps = 2000;
  const auto run = split_step(psi0, Hamiltonian(1.0, Harmonic{1.0}), 2.0 * test::kPi / steps, steps, steps);
  CHECK(std::abs(inner(psi0, run.snapshots.back().psi)) >= 1.0 - 1e-6);
}

TEST_CASE("true error lookups") {
  const Grid g = test::line(20.0, 64);
  const auto psi0 = synthesize(test::params1d(0.0, 0.0, 0.8), g);
  const auto run = split_step(psi0, Hamiltonian(1.0, Harmonic{1.0}), 0.01, 10, 5);
  CHECK(true_error(run.at(0.05).psi, run, 0.05) == 0.0);
  CHECK(true_error(psi0, run, 0.0) == 0.0);
  CHECK_THROWS_AS(run.at(0.03), DimensionError);
  CHECK_THROWS_AS(true_error(Wavefunction(test::line(20.0, 128)), run, 0.0), DimensionError);
}

TEST_CASE("stability warning") {
  std::vector<std::string> seen;
  auto previous = set_warning_sink([&](const std::string& m) { seen.push_back(m); });
  const Grid g = test::line(20.0, 256);
  const auto psi0 = synthesize(test::params1d(0.0, 0.0, 0.8), g);
  split_step(psi0, Hamiltonian(1.0, Potential()), 0.1, 1, 1);
  CHECK(seen.size() == 1);
  split_step(psi0, Hamiltonian(1.0, Potential()), 1e-4, 1, 1);
  CHECK(seen.size() == 1);
  set_warning_sink(previous);
}
