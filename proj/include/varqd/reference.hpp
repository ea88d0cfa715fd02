#pragma once

#include "varqd/grid.hpp"
#include "varqd/hamiltonian.hpp"

#include <vector>

namespace varqd {

struct ReferenceSnapshot {
  double t = 0.0;
  Wavefunction psi;
  /// <psi|H psi>
  double energy = 0.0;
};

/// Split-step propagation of psi_0 with the snapshots it produced.
struct ReferenceRun {
  Grid grid;
  double hbar = 1.0;
  double dt = 0.0;
  std::vector<ReferenceSnapshot> snapshots;
  /// Largest |norm(t) - norm(0)| over all steps.
  double max_norm_drift = 0.0;

  /// Snapshot at time t (within 1e-9); throws DimensionError if missing.
  const ReferenceSnapshot& at(double t) const;
};

/// Strang splitting e^{-iV dt/2hbar} e^{-iT dt/hbar} e^{-iV dt/2hbar}, `steps` steps,
/// keeping psi_0 and every sample_every-th state (and the last one).
ReferenceRun split_step(const Wavefunction& psi0, const Hamiltonian& h, double dt, long steps,
                        long sample_every = 1);

/// ||u - psi(t)||
double true_error(const Wavefunction& u, const ReferenceRun& run, double t);

}  // namespace varqd
