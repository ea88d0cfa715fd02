#include "support.hpp"
#include "varqd/errors.hpp"
#include "varqd/propagate.hpp"

#include <doctest.h>

using namespace varqd;
using test::cplx;

namespace {

IntegratorOptions rk4(double dt, double t) {
  IntegratorOptions o;
  o.dt = dt;
  o.t_final = t;
  return o;
}

double energy_drift(const TrajectoryRecord& r) {
  double worst = 0.0;
  for (const auto& s : r.samples) worst = std::max(worst, std::abs(s.energy - r.samples.front().energy));
  return worst;
}

}  // namespace

TEST_CASE("zero horizon") {
  const FrozenSystem sys(Hamiltonian(1.0, Harmonic{1.0}), 1, test::line());
  const auto r = run_frozen(test::params1d(1.0, 0.5, 0.7), sys, Principle::MVP, rk4(1e-3, 0.0));
  REQUIRE(r.samples.size() == 1);
  CHECK(r.samples[0].bound == 0.0);
  CHECK(r.accepted_steps == 0);
  const auto c = certify(r);
  CHECK(c.bound == 0.0);
  CHECK_FALSE(c.true_error.has_value());
}

TEST_CASE("matched oscillator closes its orbit") {
  const auto e = matched_harmonic(1.0, 1.0, 1);
  const FrozenSystem sys(Hamiltonian(1.0, Harmonic{1.0}), 1);
  const auto start = test::params1d(1.0, 0.5, e.delta);
  RecordOptions rec;
  rec.stride = 1000;
  const auto r = run_frozen(start, sys, Principle::MVP, rk4(1e-3, 2.0 * test::kPi), rec);
  const auto& end = r.frozen_states.back();
  CHECK(std::abs(end.q[0] - 1.0) <= 1e-8);
  CHECK(std::abs(end.p[0] - 0.5) <= 1e-8);
  CHECK(r.final_sample().t == 2.0 * test::kPi);
  // Classical oscillator: 2 delta q(t) = 2 delta (q0 cos t + p0 sin t).
  for (const auto& s : r.samples) {
    CHECK(s.parameters[1] == doctest::Approx(std::cos(s.t) + 0.5 * std::sin(s.t)).epsilon(1e-9));
  }
}

TEST_CASE("record invariants") {
  const FrozenSystem sys(Hamiltonian(1.0, Quartic{1.0, 0.1}), 1, test::line());
  RecordOptions rec;
  rec.stride = 7;
  const auto r = run_frozen(test::params1d(1.0, 0.5, 0.7), sys, Principle::MVP, rk4(0.01, 1.0), rec);
  CHECK(r.samples.front().bound == 0.0);
  CHECK(r.final_sample().t == 1.0);
  for (std::size_t k = 1; k < r.samples.size(); ++k) {
    CHECK(r.samples[k].t > r.samples[k - 1].t);
    CHECK(r.samples[k].bound >= r.samples[k - 1].bound);
    CHECK(r.samples[k].epsilon >= 0.0);
  }
  CHECK(r.samples.size() == 100 / 7 + 2);
  CHECK(r.index_at(0.07) == 1);
  CHECK_THROWS_AS(r.index_at(0.05), DimensionError);
}

TEST_CASE("trapezoidal bound") {
  const FrozenSystem sys(Hamiltonian(1.0, Quartic{1.0, 0.1}), 1, test::line());
  const auto r = run_frozen(test::params1d(1.0, 0.5, 0.7), sys, Principle::MVP, rk4(0.05, 1.0));
  double b = 0.0;
  for (std::size_t k = 1; k < r.samples.size(); ++k) {
    b += 0.5 * (r.samples[k].t - r.samples[k - 1].t) * (r.samples[k].epsilon + r.samples[k - 1].epsilon);
    CHECK(r.samples[k].bound == doctest::Approx(b).epsilon(1e-13));
  }
}

TEST_CASE("MVP and TDVP give the same orbit") {
  const FrozenSystem sys(Hamiltonian(1.0, Morse{2.0, 0.5, 0.0}), 1, test::line());
  const auto start = test::params1d(0.6, 0.3, 0.7);
  const auto m = run_frozen(start, sys, Principle::MVP, rk4(0.01, 2.0));
  const auto t = run_frozen(start, sys, Principle::TDVP, rk4(0.01, 2.0));
  CHECK(t.gauge_convention);
  CHECK_FALSE(m.gauge_convention);
  for (std::size_t k = 0; k < m.samples.size(); ++k) {
    for (std::size_t i = 1; i < m.samples[k].parameters.size(); ++i) {
      CHECK(std::abs(m.samples[k].parameters[i] - t.samples[k].parameters[i]) <= 1e-9);
    }
  }
}

TEST_CASE("fourth-order energy conservation") {
  const FrozenSystem sys(Hamiltonian(1.0, Quartic{1.0, 0.1}), 1);
  const auto start = test::params1d(1.2, 0.5, 0.7);
  RecordOptions rec;
  rec.epsilon = false;
  // Larger steps are pre-asymptotic (ratios above 20).
  const double coarse = energy_drift(run_frozen(start, sys, Principle::TDVP, rk4(0.0125, 5.0), rec));
  const double fine = energy_drift(run_frozen(start, sys, Principle::TDVP, rk4(0.00625, 5.0), rec));
  const double order = std::log2(coarse / fine);
  INFO("drift ratio ", coarse / fine);
  CHECK(order >= 3.8);
  CHECK(order <= 4.5);
}

TEST_CASE("adaptive integration") {
  const FrozenSystem sys(Hamiltonian(1.0, Quartic{1.0, 0.1}), 1);
  const auto start = test::params1d(1.0, 0.5, 0.7);
  IntegratorOptions o = rk4(0.1, 3.0);
  o.method = Method::RK45;
  o.tolerance = 1e-10;
  RecordOptions rec;
  rec.epsilon = false;
  const auto a = run_frozen(start, sys, Principle::MVP, o, rec);
  const auto b = run_frozen(start, sys, Principle::MVP, rk4(1e-3, 3.0), rec);
  CHECK(a.final_sample().t == 3.0);
  for (std::size_t i = 1; i < 3; ++i) {
    CHECK(a.final_sample().parameters[i] == doctest::Approx(b.final_sample().parameters[i]).epsilon(1e-7));
  }
  o.min_step = 1.0;
  o.tolerance = 1e-14;
  CHECK_THROWS_AS(run_frozen(start, sys, Principle::MVP, o, rec), NumericalError);
}

TEST_CASE("certificates") {
  TrajectoryRecord r;
  r.integrator = rk4(0.5, 1.0);
  for (int k = 0; k < 3; ++k) {
    TrajectorySample s;
    s.t = 0.5 * k;
    s.epsilon = 0.2;
    s.bound = 0.1 * k;
    r.samples.push_back(s);
  }
  const auto bare = certify(r);
  CHECK(bare.bound == doctest::Approx(0.2));
  CHECK(bare.epsilon_max == 0.2);
  CHECK(bare.rows.size() == 3);
  CHECK_FALSE(bare.rows[2].true_error.has_value());
  SlackModel slack;
  slack.integrator = 1.0;
  slack.dt = 0.1;
  slack.grid_tail = 1e-3;
  CHECK(slack.at(2.0) == doctest::Approx(1e-4 * 2.0 + 1e-3));
  const auto ok = certify(r, std::vector<ErrorSample>{{0.0, 0.0}, {1.0, 0.2009}}, slack);
  CHECK_FALSE(ok.violated);
  CHECK(*ok.margin == doctest::Approx(-0.0009));
  const auto bad = certify(r, std::vector<ErrorSample>{{1.0, 0.25}}, slack);
  CHECK(bad.violated);
  CHECK_THROWS_AS(certify(r, std::vector<ErrorSample>{{0.3, 0.0}}, slack), DimensionError);
  CHECK(SlackModel::integrator_constant(1.5e-9, 0.1, 1.0) ==
        doctest::Approx(kSlackSafety * 16.0 * 1.5e-9 / (15.0 * 1e-4)));
}

TEST_CASE("free Hartree product follows the exact product") {
  const Grid g = test::line(20.0, 64);
  HartreeState s;
  s.particles = {gaussian_particle(g, -1.0, 0.5, 0.8, 1.0), gaussian_particle(g, 1.0, -0.4, 0.9, 1.0)};
  const HartreeSystem sys(Hamiltonian(1.0, Potential()), g, 2);
  const auto r = run_hartree(s, sys, Principle::MVP, rk4(0.005, 1.0));
  const auto u = assemble_product(r.hartree_states.back());
  const auto exact = Wavefunction::sample(product_grid(g), [](std::span<const double> x) {
    return test::free_gaussian(x[0], 1.0, -1.0, 0.5, 0.8, 1.0) * test::free_gaussian(x[1], 1.0, 1.0, -0.4, 0.9, 1.0);
  });
  CHECK(norm(u - exact) <= 1e-7);
  CHECK(r.final_sample().epsilon <= 1e-10);
}

TEST_CASE("coupled Hartree run") {
  const Grid g = test::line(20.0, 64);
  HartreeState s;
  s.particles = {gaussian_particle(g, -1.0, 0.3, 0.8, 1.0), gaussian_particle(g, 1.0, 0.0, 0.9, 1.0)};
  const HartreeSystem sys(Hamiltonian(1.0, Sum{{Potential(Harmonic{1.0}), Potential(PairProduct{0.5})}}), g, 2);
  const auto r = run_hartree(s, sys, Principle::MVP, rk4(0.01, 1.0));
  for (const auto& x : r.samples) {
    REQUIRE(x.c1.has_value());
    CHECK(std::abs(*x.c1 - x.energy) <= 1e-8);
    // Norms before renormalization: the per-step drift.
    for (double n : x.particle_norms) CHECK(std::abs(n - 1.0) <= 1e-10);
  }
  for (const auto& state : r.hartree_states) {
    for (const auto& phi : state.particles) CHECK(std::abs(norm(phi) - 1.0) <= 1e-12);
  }
  CHECK(r.renormalizations > 0);
  CHECK(r.max_norm_drift <= 1e-8);
  CHECK(r.final_sample().bound > 0.0);
  RecordOptions keep;
  keep.renormalize = false;
  const auto raw = run_hartree(s, sys, Principle::MVP, rk4(0.01, 1.0), keep);
  CHECK(raw.renormalizations == 0);
}
