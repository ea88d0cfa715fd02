#pragma once

#include "varqd/errors.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <string>

namespace varqd {

enum class Method { RK4, RK45 };

const char* to_string(Method m);

struct IntegratorOptions {
  Method method = Method::RK4;
  /// Fixed step for RK4; initial step for RK45.
  double dt = 1e-3;
  double t_final = 1.0;
  /// Relative and absolute tolerance of the adaptive method.
  double tolerance = 1e-8;
  double min_step = 1e-12;
};

struct StepInfo {
  double t = 0.0;
  double dt = 0.0;
  long accepted = 0;
  long rejected = 0;
};

/// Integrates y' = rhs(t, y) from 0 to options.t_final.
///
/// observe(info, y) is called at t = 0 and after every accepted step and may modify y
/// (e.g. to renormalize). RK4 uses ceil(T/dt) equal steps ending exactly at T.
template <class Vec, class Rhs, class Observer>
void integrate_ode(Vec y, Rhs&& rhs, const IntegratorOptions& options, Observer&& observe) {
  const double t_final = options.t_final;
  if (!(options.dt > 0.0)) throw NumericalError("time step must be positive");
  if (!(t_final >= 0.0)) throw NumericalError("final time must be nonnegative");
  StepInfo info;
  observe(info, y);
  if (t_final == 0.0) return;

  if (options.method == Method::RK4) {
    const long steps = std::max(1L, static_cast<long>(std::ceil(t_final / options.dt - 1e-9)));
    const double h = t_final / static_cast<double>(steps);
    for (long n = 0; n < steps; ++n) {
      const double t = n * h;
      const Vec k1 = rhs(t, y);
      const Vec k2 = rhs(t + 0.5 * h, Vec(y + (0.5 * h) * k1));
      const Vec k3 = rhs(t + 0.5 * h, Vec(y + (0.5 * h) * k2));
      const Vec k4 = rhs(t + h, Vec(y + h * k3));
      y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      info.t = n + 1 == steps ? t_final : (n + 1) * h;
      info.dt = h;
      ++info.accepted;
      observe(info, y);
    }
    return;
  }

  // Dormand-Prince 5(4) with a standard step-size controller.
  constexpr double a21 = 1.0 / 5.0;
  constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
  constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
  constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                   a54 = -212.0 / 729.0;
  constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                   a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
  constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                   b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
  constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                   e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
  const double tol = options.tolerance;
  double t = 0.0;
  double h = std::min(options.dt, t_final);
  while (t < t_final) {
    const bool last = t + h >= t_final * (1.0 - 1e-14);
    if (last) h = t_final - t;
    const Vec k1 = rhs(t, y);
    const Vec k2 = rhs(t + h / 5.0, Vec(y + h * (a21 * k1)));
    const Vec k3 = rhs(t + 3.0 * h / 10.0, Vec(y + h * (a31 * k1 + a32 * k2)));
    const Vec k4 = rhs(t + 4.0 * h / 5.0, Vec(y + h * (a41 * k1 + a42 * k2 + a43 * k3)));
    const Vec k5 =
        rhs(t + 8.0 * h / 9.0, Vec(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)));
    const Vec k6 = rhs(t + h, Vec(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)));
    const Vec next = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const Vec k7 = rhs(t + h, next);
    const Vec err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const auto scale = (tol + tol * y.cwiseAbs().cwiseMax(next.cwiseAbs()).array()).eval();
    const double error =
        std::sqrt((err.cwiseAbs().array() / scale).square().mean());
    if (!std::isfinite(error)) throw NumericalError("adaptive step produced non-finite values");
    if (error <= 1.0) {
      t = last ? t_final : t + h;
      y = next;
      info.t = t;
      info.dt = h;
      ++info.accepted;
      observe(info, y);
    } else {
      ++info.rejected;
    }
    const double factor =
        error == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(error, -0.2), 0.2, 5.0);
    h *= factor;
    if (t < t_final && h < options.min_step) {
      throw NumericalError("adaptive step size underflow at t = " + std::to_string(t));
    }
  }
}

}  // namespace varqd
