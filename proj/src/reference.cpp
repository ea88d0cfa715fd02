#include "varqd/reference.hpp"

#include "varqd/errors.hpp"
#include "varqd/log.hpp"
#include "varqd/spectral.hpp"

#include <cmath>
#include <numbers>

namespace varqd {

const ReferenceSnapshot& ReferenceRun::at(double t) const {
  for (const auto& s : snapshots) {
    if (std::abs(s.t - t) <= 1e-9) return s;
  }
  throw DimensionError("no reference snapshot at t = " + std::to_string(t));
}

ReferenceRun split_step(const Wavefunction& psi0, const Hamiltonian& h, double dt, long steps,
                        long sample_every) {
  if (!(dt > 0.0)) throw ValidationError("reference.dt", "must be positive");
  if (steps < 0) throw ValidationError("reference.steps", "must be nonnegative");
  if (sample_every < 1) throw ValidationError("reference.sample_every", "must be positive");
  const Grid& grid = psi0.grid();
  const GridHamiltonian gh(h, grid);
  const double hbar = h.hbar();
  if (dt * gh.max_kinetic() / hbar > std::numbers::pi / 4.0) {
    warn("reference step resolves the kinetic phase poorly: dt * max(T) / hbar = " +
         std::to_string(dt * gh.max_kinetic() / hbar) + " > pi/4");
  }

  const auto n = static_cast<Eigen::Index>(grid.size());
  Eigen::VectorXcd half_potential(n);
  Eigen::VectorXcd kinetic(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto i = static_cast<std::size_t>(j);
    half_potential[j] = std::polar(1.0, -0.5 * dt * gh.potential_table()[i] / hbar);
    kinetic[j] = std::polar(1.0, -dt * gh.kinetic_symbol()[i] / hbar);
  }
  const auto fft = FourierTransform::for_grid(grid);

  ReferenceRun run{grid, hbar, dt, {}, 0.0};
  auto snapshot = [&](double t, const Eigen::VectorXcd& values) {
    Wavefunction psi(grid, values);
    const double e = inner(psi, gh.apply(psi)).real();
    run.snapshots.push_back({t, std::move(psi), e});
  };

  Eigen::VectorXcd psi = psi0.values();
  const double norm0 = norm(psi0);
  snapshot(0.0, psi);
  for (long s = 1; s <= steps; ++s) {
    psi.array() *= half_potential.array();
    fft->forward(psi);
    psi.array() *= kinetic.array();
    fft->backward(psi);
    psi.array() *= half_potential.array();
    const double drift = std::abs(std::sqrt(grid.cell_volume() * psi.squaredNorm()) - norm0);
    run.max_norm_drift = std::max(run.max_norm_drift, drift);
    if (s % sample_every == 0 || s == steps) snapshot(static_cast<double>(s) * dt, psi);
  }
  return run;
}

double true_error(const Wavefunction& u, const ReferenceRun& run, double t) {
  const auto& s = run.at(t);
  require_same_grid(u.grid(), s.psi.grid());
  return norm(u - s.psi);
}

}  // namespace varqd
