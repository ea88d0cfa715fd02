#include "varqd/frozen.hpp"

#include "varqd/errors.hpp"
#include "varqd/log.hpp"

#include <cmath>
#include <numbers>

namespace varqd {

const char* to_string(Principle p) { return p == Principle::MVP ? "mvp" : "tdvp"; }

std::vector<cplx> FrozenParams::z() const {
  std::vector<cplx> out(q.size());
  for (std::size_t m = 0; m < q.size(); ++m) out[m] = cplx(q[m], p[m]);
  return out;
}

void FrozenParams::validate() const {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw ValidationError("delta", "must be positive");
  if (!(hbar > 0.0) || !std::isfinite(hbar)) throw ValidationError("hbar", "must be positive");
  if (q.empty()) throw ValidationError("q", "needs at least one coordinate");
  if (q.size() != p.size()) throw ValidationError("p", "must have as many entries as q");
  for (std::size_t m = 0; m < q.size(); ++m) {
    if (!std::isfinite(q[m]) || !std::isfinite(p[m])) {
      throw ValidationError("q", "entries must be finite");
    }
  }
  if (!std::isfinite(theta)) throw ValidationError("theta", "must be finite");
}

Eigen::VectorXd FrozenParams::pack() const {
  const int d = dimension();
  Eigen::VectorXd y(2 * d + 1);
  y[0] = theta;
  for (int m = 0; m < d; ++m) {
    y[1 + m] = q[static_cast<std::size_t>(m)];
    y[1 + d + m] = p[static_cast<std::size_t>(m)];
  }
  return y;
}

FrozenParams FrozenParams::with_packed(const Eigen::VectorXd& y) const {
  const int d = dimension();
  if (y.size() != 2 * d + 1) throw DimensionError("packed frozen state has the wrong size");
  FrozenParams out = *this;
  out.theta = y[0];
  for (int m = 0; m < d; ++m) {
    out.q[static_cast<std::size_t>(m)] = y[1 + m];
    out.p[static_cast<std::size_t>(m)] = y[1 + d + m];
  }
  return out;
}

std::vector<double> FrozenDerivative::q_dot() const {
  std::vector<double> out;
  for (const auto& v : z_dot) out.push_back(v.real());
  return out;
}

std::vector<double> FrozenDerivative::p_dot() const {
  std::vector<double> out;
  for (const auto& v : z_dot) out.push_back(v.imag());
  return out;
}

Eigen::VectorXd FrozenDerivative::pack() const {
  const auto d = static_cast<Eigen::Index>(z_dot.size());
  Eigen::VectorXd y(2 * d + 1);
  y[0] = theta_dot;
  for (Eigen::Index m = 0; m < d; ++m) {
    y[1 + m] = z_dot[static_cast<std::size_t>(m)].real();
    y[1 + d + m] = z_dot[static_cast<std::size_t>(m)].imag();
  }
  return y;
}

FrozenSystem::FrozenSystem(Hamiltonian h, int dimension, std::optional<Grid> grid)
    : h_(std::move(h)), dimension_(dimension) {
  if (dimension < 1) throw DimensionError("frozen packets need at least one coordinate");
  h_.check_dimension(dimension);
  if (grid) {
    if (grid->dimension() != dimension) {
      throw DimensionError("grid dimension does not match the packet dimension");
    }
    grid_h_.emplace(h_, *grid);
  }
  analytic_ = h_.schrodinger_form(dimension) && h_.potential().analytic();
  if (!analytic_ && !grid_h_) {
    throw DimensionError("this Hamiltonian needs a grid for the frozen equations of motion");
  }
}

const Grid& FrozenSystem::grid() const { return grid_hamiltonian().grid(); }

const GridHamiltonian& FrozenSystem::grid_hamiltonian() const {
  if (!grid_h_) throw DimensionError("frozen system has no grid");
  return *grid_h_;
}

Wavefunction synthesize(const FrozenParams& params, const Grid& grid, bool strict) {
  params.validate();
  const int d = params.dimension();
  if (grid.dimension() != d) throw DimensionError("grid dimension does not match the packet");
  const double delta = params.delta;
  for (int m = 0; m < d; ++m) {
    const double reach = std::abs(2.0 * delta * params.q[static_cast<std::size_t>(m)]) + 5.0 * delta;
    if (reach >= 0.5 * grid.length()) {
      const std::string message = "packet within 5 delta of the box edge on axis " +
                                  std::to_string(m + 1);
      if (strict) throw BoundaryError(message);
      warn(message);
    }
  }
  const double prefactor = std::pow(2.0 * std::numbers::pi * delta * delta, -0.25 * d);
  return Wavefunction::sample(grid, [&](std::span<const double> x) {
    double re = 0.0;
    double im = params.theta;
    for (int m = 0; m < d; ++m) {
      const auto i = static_cast<std::size_t>(m);
      const double shift = x[i] - 2.0 * delta * params.q[i];
      re -= shift * shift / (4.0 * delta * delta);
      im += params.p[i] * (x[i] - delta * params.q[i]) / delta;
    }
    return prefactor * std::exp(cplx(re, im));
  });
}

TangentBasis tangent_basis(const FrozenParams& params, const Grid& grid) {
  const Wavefunction u = synthesize(params, grid);
  TangentBasis basis;
  basis.add(cplx(0.0, 1.0) * u, "i u");
  for (const auto& v : reduced_tangent_basis(params, grid).vectors) basis.add(v, "");
  const int d = params.dimension();
  for (int m = 0; m < d; ++m) {
    basis.labels[static_cast<std::size_t>(1 + m)] = "i x" + std::to_string(m + 1) + " u";
    basis.labels[static_cast<std::size_t>(1 + d + m)] =
        "(x" + std::to_string(m + 1) + " - 2 delta q" + std::to_string(m + 1) + ") u";
  }
  return basis;
}

TangentBasis reduced_tangent_basis(const FrozenParams& params, const Grid& grid) {
  const Wavefunction u = synthesize(params, grid);
  const int d = params.dimension();
  TangentBasis basis;
  for (int m = 0; m < d; ++m) {
    basis.add(cplx(0.0, 1.0) * u.times_coordinate(m), "i x" + std::to_string(m + 1) + " u");
  }
  for (int m = 0; m < d; ++m) {
    Wavefunction v = u.times_coordinate(m);
    v -= (2.0 * params.delta * params.q[static_cast<std::size_t>(m)]) * u;
    basis.add(std::move(v), "(x" + std::to_string(m + 1) + " - 2 delta q" +
                                std::to_string(m + 1) + ") u");
  }
  return basis;
}

Eigen::VectorXd tangent_coefficients(const FrozenParams& params, const FrozenDerivative& rate) {
  const int d = params.dimension();
  if (rate.z_dot.size() != static_cast<std::size_t>(d)) {
    throw DimensionError("derivative dimension does not match parameters");
  }
  Eigen::VectorXd c(2 * d + 1);
  double phase = rate.theta_dot;
  for (int m = 0; m < d; ++m) {
    const auto i = static_cast<std::size_t>(m);
    const double qd = rate.z_dot[i].real();
    const double pd = rate.z_dot[i].imag();
    phase -= pd * params.q[i] + params.p[i] * qd;
    c[1 + m] = pd / params.delta;
    c[1 + d + m] = qd / params.delta;
  }
  c[0] = phase;
  return c;
}

FrozenDerivative from_tangent_coefficients(const FrozenParams& params,
                                           const Eigen::VectorXd& coefficients) {
  const int d = params.dimension();
  if (coefficients.size() != 2 * d + 1) throw DimensionError("expected 2d+1 coefficients");
  FrozenDerivative rate;
  rate.theta_dot = coefficients[0];
  for (int m = 0; m < d; ++m) {
    const auto i = static_cast<std::size_t>(m);
    const double qd = params.delta * coefficients[1 + d + m];
    const double pd = params.delta * coefficients[1 + m];
    rate.z_dot.emplace_back(qd, pd);
    rate.theta_dot += pd * params.q[i] + params.p[i] * qd;
  }
  return rate;
}

Wavefunction velocity(const FrozenParams& params, const FrozenDerivative& rate, const Grid& grid) {
  const Wavefunction u = synthesize(params, grid);
  const int d = params.dimension();
  const double delta = params.delta;
  Wavefunction out(grid);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const auto x = grid.point(j);
    cplx factor(0.0, rate.theta_dot);
    for (int m = 0; m < d; ++m) {
      const auto i = static_cast<std::size_t>(m);
      const double qd = rate.z_dot[i].real();
      const double pd = rate.z_dot[i].imag();
      factor += qd / delta * (x[i] - 2.0 * delta * params.q[i]);
      factor += cplx(0.0, pd / delta * (x[i] - delta * params.q[i]));
      factor -= cplx(0.0, params.p[i] * qd);
    }
    out[j] = factor * u[j];
  }
  return out;
}

namespace {

std::vector<double> center(const FrozenParams& params) {
  std::vector<double> c(params.q.size());
  for (std::size_t m = 0; m < c.size(); ++m) c[m] = 2.0 * params.delta * params.q[m];
  return c;
}

void check_system(const FrozenParams& params, const FrozenSystem& system) {
  params.validate();
  if (params.dimension() != system.dimension()) {
    throw DimensionError("packet dimension does not match the system");
  }
  if (params.hbar != system.hamiltonian().hbar()) {
    throw ValidationError("hbar", "packet and Hamiltonian disagree on hbar");
  }
}

double analytic_energy(const FrozenParams& params, const FrozenSystem& system) {
  const double hbar = params.hbar;
  const double delta2 = params.delta * params.delta;
  double p2 = 0.0;
  for (double v : params.p) p2 += v * v;
  const auto c = center(params);
  const double potential = *system.hamiltonian().potential().gaussian_mean(c, params.delta);
  return hbar * hbar * params.dimension() / (8.0 * delta2) + hbar * hbar * p2 / (2.0 * delta2) +
         potential;
}

// Packet samples with the quadrature sanity check.
Wavefunction grid_packet(const FrozenParams& params, const FrozenSystem& system) {
  Wavefunction u = synthesize(params, system.grid());
  const double n = norm(u);
  if (std::abs(n - 1.0) > 1e-4) {
    throw AccuracyError("grid norm of the packet is " + std::to_string(n) +
                        "; the grid no longer resolves it");
  }
  return u;
}

double phase_rate(const FrozenParams& params, const std::vector<cplx>& z_dot, double e0) {
  double s = -e0;
  for (std::size_t m = 0; m < z_dot.size(); ++m) {
    s += params.hbar * (params.p[m] * z_dot[m].real() - params.q[m] * z_dot[m].imag());
  }
  return s / params.hbar;
}

}  // namespace

double energy(const FrozenParams& params, const FrozenSystem& system) {
  check_system(params, system);
  if (system.analytic()) return analytic_energy(params, system);
  const Wavefunction u = grid_packet(params, system);
  return inner(u, system.grid_hamiltonian().apply(u)).real();
}

FrozenDerivative eom(const FrozenParams& params, const FrozenSystem& system, Principle principle) {
  check_system(params, system);
  if (!system.analytic()) return eom_grid(params, system, principle);
  const double hbar = params.hbar;
  const double delta = params.delta;
  const auto grad = *system.hamiltonian().potential().gaussian_gradient_mean(center(params), delta);
  FrozenDerivative rate;
  for (std::size_t m = 0; m < params.q.size(); ++m) {
    rate.z_dot.emplace_back(hbar * params.p[m] / (2.0 * delta * delta), -delta / hbar * grad[m]);
  }
  rate.theta_dot = phase_rate(params, rate.z_dot, analytic_energy(params, system));
  rate.gauge_convention = principle == Principle::TDVP;
  return rate;
}

FrozenDerivative eom_grid(const FrozenParams& params, const FrozenSystem& system,
                          Principle principle) {
  check_system(params, system);
  const Wavefunction u = grid_packet(params, system);
  const Wavefunction hu = system.grid_hamiltonian().apply(u);
  const double e0 = inner(u, hu).real();
  const double hbar = params.hbar;
  FrozenDerivative rate;
  for (int m = 0; m < params.dimension(); ++m) {
    const auto i = static_cast<std::size_t>(m);
    // <u|[H, A_m] u> = 2 q_m E0 - <x_m u|Hu> / delta
    const cplx commutator = 2.0 * params.q[i] * e0 - inner(u.times_coordinate(m), hu) / params.delta;
    rate.z_dot.push_back(cplx(0.0, 1.0) * commutator / hbar);
  }
  rate.theta_dot = phase_rate(params, rate.z_dot, e0);
  rate.gauge_convention = principle == Principle::TDVP;
  return rate;
}

namespace {

double checked_root(double radicand, const char* what) {
  if (radicand < -1e-12) {
    throw NumericalError(std::string(what) + " radicand is " + std::to_string(radicand));
  }
  return std::sqrt(std::max(radicand, 0.0));
}

}  // namespace

EpsilonBreakdown epsilon_breakdown(const FrozenParams& params, const FrozenSystem& system) {
  check_system(params, system);
  const Wavefunction u = grid_packet(params, system);
  const Wavefunction hu = system.grid_hamiltonian().apply(u);
  const double hbar = params.hbar;
  const FrozenDerivative rate = eom_grid(params, system);

  EpsilonBreakdown out;
  out.energy = inner(u, hu).real();
  const double hu2 = squared_norm(hu);
  const double fluctuation2 = squared_norm(hu - out.energy * u);
  double zdot2 = 0.0;
  for (const auto& v : rate.z_dot) zdot2 += std::norm(v);
  const Wavefunction udot = velocity(params, rate, system.grid());
  const double velocity2 = squared_norm(udot);

  out.hu_norm = std::sqrt(hu2);
  out.velocity_norm = std::sqrt(velocity2);
  out.fluctuation = std::sqrt(fluctuation2);
  out.local = checked_root((fluctuation2 - hbar * hbar * zdot2) / (hbar * hbar), "epsilon");
  out.minimal_distance = checked_root(hu2 / (hbar * hbar) - velocity2, "minimal distance");
  out.residual = norm(udot - cplx(0.0, -1.0 / hbar) * hu);
  return out;
}

double epsilon(const FrozenParams& params, const FrozenSystem& system) {
  // The residual norm has no cancellation between large squares.
  return epsilon_breakdown(params, system).residual;
}

Wavefunction variational_fluctuation(const FrozenParams& params, const FrozenSystem& system) {
  check_system(params, system);
  const Wavefunction u = grid_packet(params, system);
  const FrozenDerivative rate = eom_grid(params, system);
  Wavefunction out(system.grid());
  for (int m = 0; m < params.dimension(); ++m) {
    const auto i = static_cast<std::size_t>(m);
    Wavefunction shifted = u.times_coordinate(m);
    shifted -= (2.0 * params.delta * params.q[i]) * u;
    out += (cplx(0.0, params.hbar) * rate.z_dot[i] / params.delta) * shifted;
  }
  return out;
}

FluctuationReport energy_fluctuation(const FrozenParams& params, const FrozenSystem& system) {
  check_system(params, system);
  const Wavefunction u = grid_packet(params, system);
  const Wavefunction hu = system.grid_hamiltonian().apply(u);
  const double e0 = inner(u, hu).real();
  const FrozenDerivative rate = eom_grid(params, system);
  double zdot2 = 0.0;
  for (const auto& v : rate.z_dot) zdot2 += std::norm(v);

  FluctuationReport out;
  out.analytic = params.hbar * std::sqrt(zdot2);
  const double grid2 = squared_norm(variational_fluctuation(params, system));
  out.grid = std::sqrt(grid2);
  const double total2 = squared_norm(hu - e0 * u);
  out.total = std::sqrt(total2);
  out.epsilon_squared = (total2 - grid2) / (params.hbar * params.hbar);
  return out;
}

double taylor_bound(const FrozenParams& params, double c2) {
  params.validate();
  if (c2 < 0.0 || !std::isfinite(c2)) throw ValidationError("C2", "must be nonnegative");
  const double d = params.dimension();
  const double delta2 = params.delta * params.delta;
  return (params.hbar / (8.0 * delta2) + delta2 * c2 / (2.0 * params.hbar)) *
         std::sqrt(d * d + 2.0 * d);
}

}  // namespace varqd
