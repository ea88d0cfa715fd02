#pragma once

#include "varqd/frozen.hpp"
#include "varqd/hartree.hpp"
#include "varqd/integrator.hpp"

#include <optional>
#include <string>
#include <vector>

namespace varqd {

struct TrajectorySample {
  double t = 0.0;
  double norm = 1.0;
  double energy = 0.0;
  double epsilon = 0.0;
  /// Trapezoidal integral of epsilon over all accepted steps up to t.
  double bound = 0.0;
  /// Step that produced this sample (0 at t = 0).
  double step = 0.0;
  /// Frozen: [theta, q_1..q_d, p_1..p_d].
  std::vector<double> parameters;
  /// Hartree only.
  std::optional<double> c1;
  std::vector<double> particle_norms;
  std::vector<double> kinetic;
};

enum class Kind { Frozen, Hartree, Reference };

const char* to_string(Kind k);

struct TrajectoryRecord {
  Kind kind = Kind::Frozen;
  Principle principle = Principle::MVP;
  /// True when theta (frozen) or kappa_1 = 0 (Hartree) is an adopted gauge, not determined.
  bool gauge_convention = false;
  double hbar = 1.0;
  IntegratorOptions integrator;
  std::vector<TrajectorySample> samples;
  long accepted_steps = 0;
  long rejected_steps = 0;
  /// Largest per-particle norm drift seen before renormalization.
  double max_norm_drift = 0.0;
  long renormalizations = 0;
  /// States at the recorded samples.
  std::vector<FrozenParams> frozen_states;
  std::vector<HartreeState> hartree_states;

  const TrajectorySample& final_sample() const;
  /// Index of the sample at time t; throws DimensionError if there is none within 1e-9.
  std::size_t index_at(double t) const;
};

struct RecordOptions {
  /// Record every stride-th accepted step; the final step is always recorded.
  int stride = 1;
  /// Evaluate epsilon on the grid at every step (frozen packets without a grid report 0).
  bool epsilon = true;
  /// Hartree: renormalize factors whose norm drifts by more than 1e-12.
  bool renormalize = true;
};

TrajectoryRecord run_frozen(const FrozenParams& initial, const FrozenSystem& system,
                            Principle principle, const IntegratorOptions& integrator,
                            const RecordOptions& record = {});

TrajectoryRecord run_hartree(const HartreeState& initial, const HartreeSystem& system,
                             Principle principle, const IntegratorOptions& integrator,
                             const RecordOptions& record = {});

/// Multiplier applied to step-halving error constants.
inline constexpr double kSlackSafety = 2.0;

/// Integrator and grid contributions to the discrepancy between the computed
/// true error and the exact one.
struct SlackModel {
  /// slack(t) = integrator * dt^4 * t + reference * dt_ref^2 * t + grid_tail
  double integrator = 0.0;
  double dt = 0.0;
  double reference = 0.0;
  double dt_reference = 0.0;
  double grid_tail = 0.0;

  double at(double t) const;
  /// Constants from step halving: difference of final states at dt and dt/2 over [0, T].
  static double integrator_constant(double halving_difference, double dt, double t_final);
  static double reference_constant(double halving_difference, double dt_reference,
                                   double t_final);
};

struct ErrorSample {
  double t = 0.0;
  double true_error = 0.0;
};

struct CertificateRow {
  double t = 0.0;
  double epsilon = 0.0;
  double bound = 0.0;
  std::optional<double> true_error;
  std::optional<double> slack;
  std::optional<double> margin;
};

struct CertificateReport {
  double final_time = 0.0;
  double bound = 0.0;
  std::optional<double> true_error;
  std::optional<double> margin;
  double epsilon_max = 0.0;
  double epsilon_mean = 0.0;
  double dt = 0.0;
  std::optional<SlackModel> slack;
  /// True when some true error exceeds bound + slack.
  bool violated = false;
  std::vector<CertificateRow> rows;
};

/// Builds the certificate. With reference errors, each error sample must sit at a recorded time.
CertificateReport certify(const TrajectoryRecord& trajectory,
                          const std::optional<std::vector<ErrorSample>>& errors = std::nullopt,
                          const std::optional<SlackModel>& slack = std::nullopt);

}  // namespace varqd
