#pragma once

#include "varqd/frozen.hpp"
#include "varqd/grid.hpp"
#include "varqd/hamiltonian.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace test {

using varqd::cplx;
inline constexpr double kPi = std::numbers::pi;

inline varqd::Grid line(double length = 20.0, int points = 256) {
  return varqd::Grid(1, length, points);
}

/// Closed-form frozen packet evaluated independently of the library.
inline cplx packet_value(double x, double theta, double q, double p, double delta, double hbar = 1.0) {
  (void)hbar;
  const double c = 2.0 * delta * q;
  const double amp = std::pow(2.0 * kPi * delta * delta, -0.25);
  return amp * std::exp(cplx(-(x - c) * (x - c) / (4.0 * delta * delta),
                             theta + p * (x - delta * q) / delta));
}

inline varqd::FrozenParams params1d(double q, double p, double delta, double theta = 0.0,
                                    double hbar = 1.0) {
  varqd::FrozenParams f;
  f.theta = theta;
  f.q = {q};
  f.p = {p};
  f.delta = delta;
  f.hbar = hbar;
  return f;
}

/// Smooth, decaying, non-Gaussian test function.
inline varqd::Wavefunction bump(const varqd::Grid& g, double shift = 0.3, double k = 0.8) {
  return varqd::Wavefunction::sample(g, [&](std::span<const double> x) {
    double r2 = 0.0;
    for (double xi : x) r2 += (xi - shift) * (xi - shift);
    return std::exp(cplx(-0.5 * r2, k * x[0])) * (1.0 + 0.3 * x[0]);
  });
}

struct Rng {
  std::mt19937_64 engine;
  explicit Rng(std::uint64_t seed) : engine(seed) {}
  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(engine); }
};

/// Random smooth wavefunction: a sum of a few random Gaussians.
inline varqd::Wavefunction random_smooth(const varqd::Grid& g, Rng& rng) {
  varqd::Wavefunction w(g);
  for (int k = 0; k < 3; ++k) {
    const double c = rng.uniform(-3.0, 3.0);
    const double s = rng.uniform(0.5, 1.5);
    const double kk = rng.uniform(-2.0, 2.0);
    const cplx a(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
    w += varqd::Wavefunction::sample(g, [&](std::span<const double> x) {
      return a * std::exp(cplx(-(x[0] - c) * (x[0] - c) / (2.0 * s * s), kk * x[0]));
    });
  }
  return w;
}

}  // namespace test

namespace test {

/// Free evolution (unit mass) of the normalized Gaussian
/// (2 pi s^2)^(-1/4) exp(-(x - x0)^2 / (4 s^2) + i k (x - x0) / hbar).
inline cplx free_gaussian(double x, double t, double x0, double k, double s, double hbar) {
  const cplx a = cplx(s * s, 0.5 * hbar * t);
  const double y = x - x0 - k * t;
  return std::pow(2.0 * kPi, -0.25) * std::sqrt(s) / std::sqrt(a) *
         std::exp(-y * y / (4.0 * a) + cplx(0.0, k * (x - x0) / hbar - 0.5 * k * k * t / hbar));
}

}  // namespace test
