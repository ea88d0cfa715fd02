#include "varqd/propagate.hpp"

#include "varqd/errors.hpp"

#include <algorithm>
#include <cmath>

namespace varqd {

const char* to_string(Method m) { return m == Method::RK4 ? "rk4" : "rk45"; }

const char* to_string(Kind k) {
  switch (k) {
    case Kind::Frozen: return "frozen";
    case Kind::Hartree: return "hartree";
    case Kind::Reference: return "reference";
  }
  return "unknown";
}

const TrajectorySample& TrajectoryRecord::final_sample() const {
  if (samples.empty()) throw DimensionError("empty trajectory");
  return samples.back();
}

std::size_t TrajectoryRecord::index_at(double t) const {
  auto it = std::lower_bound(samples.begin(), samples.end(), t - 1e-9,
                             [](const TrajectorySample& s, double v) { return s.t < v; });
  if (it == samples.end() || std::abs(it->t - t) > 1e-9) {
    throw DimensionError("no trajectory sample at t = " + std::to_string(t));
  }
  return static_cast<std::size_t>(it - samples.begin());
}

namespace {

bool should_record(const StepInfo& info, const IntegratorOptions& options, int stride) {
  return info.accepted == 0 || info.t >= options.t_final ||
         info.accepted % std::max(1, stride) == 0;
}

}  // namespace

TrajectoryRecord run_frozen(const FrozenParams& initial, const FrozenSystem& system,
                            Principle principle, const IntegratorOptions& integrator,
                            const RecordOptions& record) {
  TrajectoryRecord out;
  out.kind = Kind::Frozen;
  out.principle = principle;
  out.gauge_convention = principle == Principle::TDVP;
  out.hbar = initial.hbar;
  out.integrator = integrator;

  const bool with_epsilon = record.epsilon && system.has_grid();
  double bound = 0.0;
  double previous_epsilon = 0.0;
  auto rhs = [&](double, const Eigen::VectorXd& y) -> Eigen::VectorXd {
    return eom(initial.with_packed(y), system, principle).pack();
  };
  auto observe = [&](const StepInfo& info, Eigen::VectorXd& y) {
    const FrozenParams params = initial.with_packed(y);
    const double eps = with_epsilon ? epsilon(params, system) : 0.0;
    if (info.accepted > 0) bound += 0.5 * info.dt * (previous_epsilon + eps);
    previous_epsilon = eps;
    out.accepted_steps = info.accepted;
    out.rejected_steps = info.rejected;
    if (!should_record(info, integrator, record.stride)) return;
    TrajectorySample s;
    s.t = info.t;
    s.step = info.dt;
    s.epsilon = eps;
    s.bound = bound;
    s.energy = energy(params, system);
    s.norm = system.has_grid() ? norm(synthesize(params, system.grid())) : 1.0;
    s.parameters.assign(y.data(), y.data() + y.size());
    out.samples.push_back(std::move(s));
    out.frozen_states.push_back(params);
  };
  integrate_ode(initial.pack(), rhs, integrator, observe);
  return out;
}

TrajectoryRecord run_hartree(const HartreeState& initial, const HartreeSystem& system,
                             Principle principle, const IntegratorOptions& integrator,
                             const RecordOptions& record) {
  system.check(initial);
  initial.validate();
  TrajectoryRecord out;
  out.kind = Kind::Hartree;
  out.principle = principle;
  out.gauge_convention = principle == Principle::TDVP;
  out.hbar = initial.hbar;
  out.integrator = integrator;

  double bound = 0.0;
  double previous_epsilon = 0.0;
  // Runge-Kutta stages leave the unit sphere by O(dt^2); only accepted states are held to 1e-6.
  auto rhs = [&](double, const Eigen::VectorXcd& y) -> Eigen::VectorXcd {
    return hartree_eom(initial.with_packed(y), system, principle, 1e-1).pack();
  };
  auto observe = [&](const StepInfo& info, Eigen::VectorXcd& y) {
    HartreeState state = initial.with_packed(y);
    std::vector<double> norms;
    double drift = 0.0;
    for (const auto& phi : state.particles) {
      norms.push_back(norm(phi));
      drift = std::max(drift, std::abs(norms.back() - 1.0));
    }
    out.max_norm_drift = std::max(out.max_norm_drift, drift);
    if (record.renormalize && drift > 1e-12) {
      state.renormalize();
      y = state.pack();
      ++out.renormalizations;
    }
    const double eps = epsilon_hartree(state, system);
    if (info.accepted > 0) bound += 0.5 * info.dt * (previous_epsilon + eps);
    previous_epsilon = eps;
    out.accepted_steps = info.accepted;
    out.rejected_steps = info.rejected;
    if (!should_record(info, integrator, record.stride)) return;
    const auto rate = hartree_eom(state, system, principle);
    const auto e = energies(state, system);
    TrajectorySample s;
    s.t = info.t;
    s.step = info.dt;
    s.epsilon = eps;
    s.bound = bound;
    s.energy = e.e0;
    s.c1 = rate.c1;
    s.kinetic = e.kinetic;
    s.particle_norms = norms;
    double product = 1.0;
    for (double n : norms) product *= n;
    s.norm = product;
    out.samples.push_back(std::move(s));
    out.hartree_states.push_back(std::move(state));
  };
  integrate_ode(initial.pack(), rhs, integrator, observe);
  return out;
}

double SlackModel::at(double t) const {
  return integrator * std::pow(dt, 4) * t + reference * dt_reference * dt_reference * t +
         grid_tail;
}

double SlackModel::integrator_constant(double halving_difference, double dt, double t_final) {
  if (!(dt > 0.0) || !(t_final > 0.0)) return 0.0;
  // e(dt) - e(dt/2) = (15/16) e(dt) for a fourth-order method; the factor
  // kSlackSafety covers pre-asymptotic steps and error growth that is not linear in t.
  return kSlackSafety * 16.0 * halving_difference / (15.0 * std::pow(dt, 4) * t_final);
}

double SlackModel::reference_constant(double halving_difference, double dt_reference,
                                      double t_final) {
  if (!(dt_reference > 0.0) || !(t_final > 0.0)) return 0.0;
  return kSlackSafety * 4.0 * halving_difference / (3.0 * dt_reference * dt_reference * t_final);
}

CertificateReport certify(const TrajectoryRecord& trajectory,
                          const std::optional<std::vector<ErrorSample>>& errors,
                          const std::optional<SlackModel>& slack) {
  CertificateReport report;
  const auto& last = trajectory.final_sample();
  report.final_time = last.t;
  report.bound = last.bound;
  report.dt = trajectory.integrator.dt;
  report.slack = slack;
  double sum = 0.0;
  for (const auto& s : trajectory.samples) {
    report.epsilon_max = std::max(report.epsilon_max, s.epsilon);
    sum += s.epsilon;
    report.rows.push_back({s.t, s.epsilon, s.bound, std::nullopt, std::nullopt, std::nullopt});
  }
  report.epsilon_mean = sum / static_cast<double>(trajectory.samples.size());
  if (!errors) return report;

  for (const auto& e : *errors) {
    const std::size_t i = trajectory.index_at(e.t);
    auto& row = report.rows[i];
    row.true_error = e.true_error;
    row.slack = slack ? slack->at(row.t) : 0.0;
    row.margin = row.bound - e.true_error;
    if (e.true_error > row.bound + *row.slack) report.violated = true;
  }
  const auto& final_row = report.rows.back();
  if (final_row.true_error) {
    report.true_error = final_row.true_error;
    report.margin = final_row.margin;
  }
  return report;
}

}  // namespace varqd
