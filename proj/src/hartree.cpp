#include "varqd/hartree.hpp"

#include "varqd/errors.hpp"
#include "varqd/spectral.hpp"

#include <algorithm>
#include <cmath>

namespace varqd {

void HartreeState::validate(double tolerance) const {
  if (count() < 2 || count() > 4) {
    throw ValidationError("particles", "Hartree products need 2 to 4 particles, got " +
                                           std::to_string(count()));
  }
  if (!(hbar > 0.0)) throw ValidationError("hbar", "must be positive");
  for (int n = 0; n < count(); ++n) {
    const auto& phi = particles[static_cast<std::size_t>(n)];
    if (phi.grid().dimension() != 1) {
      throw DimensionError("Hartree factors live on one-dimensional grids");
    }
    const double drift = std::abs(norm(phi) - 1.0);
    if (!(drift <= tolerance)) {
      throw NumericalError("particle " + std::to_string(n + 1) + " has norm drift " +
                           std::to_string(drift));
    }
  }
}

double HartreeState::renormalize() {
  double worst = 0.0;
  for (auto& phi : particles) {
    const double n = norm(phi);
    worst = std::max(worst, std::abs(n - 1.0));
    phi *= 1.0 / n;
  }
  return worst;
}

Eigen::VectorXcd HartreeState::pack() const {
  Eigen::Index total = 0;
  for (const auto& phi : particles) total += phi.values().size();
  Eigen::VectorXcd y(total);
  Eigen::Index offset = 0;
  for (const auto& phi : particles) {
    y.segment(offset, phi.values().size()) = phi.values();
    offset += phi.values().size();
  }
  return y;
}

HartreeState HartreeState::with_packed(const Eigen::VectorXcd& y) const {
  HartreeState out = *this;
  Eigen::Index offset = 0;
  for (auto& phi : out.particles) {
    const auto n = phi.values().size();
    if (offset + n > y.size()) throw DimensionError("packed Hartree state is too short");
    phi.values() = y.segment(offset, n);
    offset += n;
  }
  if (offset != y.size()) throw DimensionError("packed Hartree state is too long");
  return out;
}

Wavefunction gaussian_particle(const Grid& grid, double center, double momentum, double width,
                               double hbar) {
  if (grid.dimension() != 1) throw DimensionError("particle grids are one-dimensional");
  if (!(width > 0.0)) throw ValidationError("widths", "must be positive");
  Wavefunction phi = Wavefunction::sample(grid, [&](std::span<const double> x) {
    const double s = x[0] - center;
    return std::exp(cplx(-s * s / (4.0 * width * width), momentum * s / hbar));
  });
  phi *= 1.0 / norm(phi);
  return phi;
}

Grid product_grid(const Grid& grid) { return Grid(2, grid.length(), grid.points()); }

namespace {

bool all_equal(const std::vector<Grid>& grids) {
  return std::all_of(grids.begin(), grids.end(), [&](const Grid& g) { return g == grids[0]; });
}

std::vector<double> density(const Wavefunction& phi) {
  std::vector<double> out(phi.size());
  for (std::size_t j = 0; j < phi.size(); ++j) out[j] = std::norm(phi[j]);
  return out;
}

}  // namespace

MeanField::MeanField(const Potential& v, std::vector<Grid> grids) : grids_(std::move(grids)) {
  const int n = particles();
  if (n < 2 || n > 4) {
    throw UnsupportedPotentialError("mean-field reduction needs 2 to 4 particles");
  }
  for (const auto& g : grids_) {
    if (g.dimension() != 1) throw DimensionError("particle grids are one-dimensional");
  }
  v.check_dimension(n);
  if (auto terms = decompose(v, n)) {
    for (const auto& t : *terms) {
      Term term{t.coefficient, {}};
      for (const auto& f : t.factors) {
        const Grid& g = grids_[static_cast<std::size_t>(f.coordinate)];
        std::vector<double> table(g.size());
        for (int j = 0; j < g.points(); ++j) {
          table[static_cast<std::size_t>(j)] = f.function(g.coordinate(j));
        }
        term.factors.push_back({f.coordinate, std::move(table)});
      }
      terms_.push_back(std::move(term));
    }
    return;
  }
  if (n == 2 && all_equal(grids_)) {
    table_ = v.tabulate(product_grid(grids_[0]));
    return;
  }
  throw UnsupportedPotentialError("potential " + v.describe() +
                                  " is not a sum of one- and two-particle products for " +
                                  std::to_string(n) + " particles");
}

std::vector<std::vector<double>> MeanField::factor_means(const HartreeState& state) const {
  std::vector<std::vector<double>> means;
  for (const auto& t : terms_) {
    std::vector<double> m;
    for (const auto& f : t.factors) {
      m.push_back(expectation(state.particles[static_cast<std::size_t>(f.particle)], f.table));
    }
    means.push_back(std::move(m));
  }
  return means;
}

std::vector<double> MeanField::reduce(const HartreeState& state, int n) const {
  if (state.count() != particles()) throw DimensionError("particle count mismatch");
  if (n < 0 || n >= particles()) throw DimensionError("particle index out of range");
  const Grid& g = grids_[static_cast<std::size_t>(n)];
  std::vector<double> out(g.size(), 0.0);
  if (table_) {
    const auto m = static_cast<std::size_t>(g.points());
    const auto other = density(state.particles[n == 0 ? 1 : 0]);
    const double h = g.spacing();
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        const std::size_t own = n == 0 ? i : j;
        const std::size_t theirs = n == 0 ? j : i;
        out[own] += h * (*table_)[i * m + j] * other[theirs];
      }
    }
    return out;
  }
  const auto means = factor_means(state);
  for (std::size_t t = 0; t < terms_.size(); ++t) {
    double scale = terms_[t].coefficient;
    const std::vector<double>* own = nullptr;
    for (std::size_t k = 0; k < terms_[t].factors.size(); ++k) {
      if (terms_[t].factors[k].particle == n) {
        own = &terms_[t].factors[k].table;
      } else {
        scale *= means[t][k];
      }
    }
    if (own) {
      for (std::size_t j = 0; j < out.size(); ++j) out[j] += scale * (*own)[j];
    } else {
      for (double& o : out) o += scale;
    }
  }
  return out;
}

double MeanField::mean(const HartreeState& state) const {
  if (state.count() != particles()) throw DimensionError("particle count mismatch");
  if (table_) {
    const auto v1 = reduce(state, 0);
    return expectation(state.particles[0], v1);
  }
  const auto means = factor_means(state);
  double total = 0.0;
  for (std::size_t t = 0; t < terms_.size(); ++t) {
    double term = terms_[t].coefficient;
    for (double m : means[t]) term *= m;
    total += term;
  }
  return total;
}

double MeanField::squared_norm(const HartreeState& state) const {
  if (state.count() != particles()) throw DimensionError("particle count mismatch");
  if (table_) {
    const Grid& g = grids_[0];
    const auto m = static_cast<std::size_t>(g.points());
    const auto r1 = density(state.particles[0]);
    const auto r2 = density(state.particles[1]);
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        const double v = (*table_)[i * m + j];
        s += v * v * r1[i] * r2[j];
      }
    }
    return s * g.spacing() * g.spacing();
  }
  const int n = particles();
  std::vector<std::vector<double>> densities;
  for (const auto& phi : state.particles) densities.push_back(density(phi));
  double total = 0.0;
  for (const auto& a : terms_) {
    for (const auto& b : terms_) {
      double product = a.coefficient * b.coefficient;
      for (int p = 0; p < n && product != 0.0; ++p) {
        const std::vector<double>* fa = nullptr;
        const std::vector<double>* fb = nullptr;
        for (const auto& f : a.factors)
          if (f.particle == p) fa = &f.table;
        for (const auto& f : b.factors)
          if (f.particle == p) fb = &f.table;
        if (!fa && !fb) continue;
        const auto& rho = densities[static_cast<std::size_t>(p)];
        double s = 0.0;
        for (std::size_t j = 0; j < rho.size(); ++j) {
          s += rho[j] * (fa ? (*fa)[j] : 1.0) * (fb ? (*fb)[j] : 1.0);
        }
        product *= s * grids_[static_cast<std::size_t>(p)].spacing();
      }
      total += product;
    }
  }
  return total;
}

MeanField MeanField::coupling() const {
  MeanField out;
  out.grids_ = grids_;
  out.table_ = table_;
  for (const auto& t : terms_) {
    if (t.factors.size() >= 2) out.terms_.push_back(t);
  }
  return out;
}

std::vector<double> mean_field_reduce(const Potential& v, const HartreeState& state, int n) {
  std::vector<Grid> grids;
  for (const auto& phi : state.particles) grids.push_back(phi.grid());
  return MeanField(v, std::move(grids)).reduce(state, n);
}

namespace {

std::vector<Grid> replicate(const Grid& grid, int particles) {
  if (particles < 2 || particles > 4) {
    throw ValidationError("particles", "Hartree products need 2 to 4 particles");
  }
  return std::vector<Grid>(static_cast<std::size_t>(particles), grid);
}

}  // namespace

HartreeSystem::HartreeSystem(Hamiltonian h, std::vector<Grid> grids)
    : h_(std::move(h)),
      grids_(std::move(grids)),
      mean_field_(h_.potential(), grids_),
      coupling_(mean_field_.coupling()) {
  h_.check_dimension(particles());
  for (int n = 0; n < particles(); ++n) {
    const double c = h_.kinetic_coefficient(n);
    symbols_.push_back(kinetic_symbol(grid(n), std::vector<double>{c}));
  }
}

HartreeSystem::HartreeSystem(Hamiltonian h, const Grid& grid, int particles)
    : HartreeSystem(std::move(h), replicate(grid, particles)) {}

Wavefunction HartreeSystem::apply_kinetic(int n, const Wavefunction& phi) const {
  require_same_grid(grid(n), phi.grid());
  return apply_multiplier(phi, symbols_[static_cast<std::size_t>(n)]);
}

double HartreeSystem::max_kinetic() const {
  double m = 0.0;
  for (const auto& s : symbols_) m = std::max(m, *std::max_element(s.begin(), s.end()));
  return m;
}

void HartreeSystem::check(const HartreeState& state) const {
  if (state.count() != particles()) {
    throw DimensionError("state has " + std::to_string(state.count()) +
                         " particles but the system has " + std::to_string(particles()));
  }
  for (int n = 0; n < particles(); ++n) {
    require_same_grid(grid(n), state.particles[static_cast<std::size_t>(n)].grid());
  }
  if (state.hbar != h_.hbar()) throw ValidationError("hbar", "state and Hamiltonian disagree");
}

HartreeEnergies energies(const HartreeState& state, const HartreeSystem& system) {
  system.check(state);
  HartreeEnergies out;
  for (int n = 0; n < state.count(); ++n) {
    const auto& phi = state.particles[static_cast<std::size_t>(n)];
    out.kinetic.push_back(inner(phi, system.apply_kinetic(n, phi)).real());
  }
  out.v0 = system.mean_field().mean(state);
  out.e0 = out.v0;
  for (double e : out.kinetic) out.e0 += e;
  return out;
}

Eigen::VectorXcd HartreeDerivative::pack() const {
  Eigen::Index total = 0;
  for (const auto& r : rates) total += r.values().size();
  Eigen::VectorXcd y(total);
  Eigen::Index offset = 0;
  for (const auto& r : rates) {
    y.segment(offset, r.values().size()) = r.values();
    offset += r.values().size();
  }
  return y;
}

HartreeDerivative hartree_eom(const HartreeState& state, const HartreeSystem& system,
                              Principle principle, double norm_tolerance) {
  system.check(state);
  state.validate(norm_tolerance);
  const auto e = energies(state, system);
  double kinetic_total = 0.0;
  for (double k : e.kinetic) kinetic_total += k;
  const double hbar = state.hbar;
  const double c1 = e.e0;

  HartreeDerivative out;
  out.e0 = e.e0;
  out.gauge_convention = principle == Principle::TDVP;
  for (int n = 0; n < state.count(); ++n) {
    const auto& phi = state.particles[static_cast<std::size_t>(n)];
    const auto vn = system.mean_field().reduce(state, n);
    Wavefunction h_phi = system.apply_kinetic(n, phi);
    const double shift = kinetic_total - e.kinetic[static_cast<std::size_t>(n)] +
                         (n == 0 ? c1 : 0.0) - e.e0;
    for (std::size_t j = 0; j < phi.size(); ++j) h_phi[j] += (vn[j] + shift) * phi[j];
    out.rates.push_back(cplx(0.0, -1.0 / hbar) * h_phi);
  }
  out.c1 = (cplx(0.0, hbar) * inner(state.particles[0], out.rates[0])).real();
  return out;
}

FluctuatingPotential fluctuating_potential(const HartreeState& state, const HartreeSystem& system,
                                           bool assemble_table) {
  system.check(state);
  FluctuatingPotential out;
  out.v0 = system.mean_field().mean(state);
  for (int n = 0; n < state.count(); ++n) {
    out.mean_fields.push_back(system.mean_field().reduce(state, n));
  }
  if (!assemble_table) return out;
  if (state.count() != 2 || !(system.grid(0) == system.grid(1))) {
    throw UnsupportedPotentialError(
        "the fluctuating potential table needs two particles on equal grids");
  }
  const Grid g2 = product_grid(system.grid(0));
  std::vector<double> table = system.hamiltonian().potential().tabulate(g2);
  const auto m = static_cast<std::size_t>(g2.points());
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      table[i * m + j] += out.v0 - out.mean_fields[0][i] - out.mean_fields[1][j];
    }
  }
  out.table = std::move(table);
  return out;
}

double epsilon_hartree(const HartreeState& state, const HartreeSystem& system) {
  system.check(state);
  // One-particle terms and constants drop out of the radicand identically; evaluating it
  // on the coupling part alone avoids cancelling large separable contributions.
  const MeanField& v = system.coupling();
  const int n = state.count();
  const double v0 = v.mean(state);
  const double vu2 = v.squared_norm(state);
  double radicand = vu2 + (n - 1) * v0 * v0;
  for (int k = 0; k < n; ++k) {
    const auto vk = v.reduce(state, k);
    std::vector<double> squared(vk.size());
    for (std::size_t j = 0; j < vk.size(); ++j) squared[j] = vk[j] * vk[j];
    radicand -= expectation(state.particles[static_cast<std::size_t>(k)], squared);
  }
  if (radicand < -1e-12 * std::max(1.0, vu2)) {
    throw NumericalError("Hartree epsilon radicand is " + std::to_string(radicand));
  }
  return std::sqrt(std::max(radicand, 0.0)) / state.hbar;
}

Wavefunction assemble_product(const HartreeState& state) {
  if (state.count() != 2) throw DimensionError("product assembly needs exactly two particles");
  const Grid& g = state.particles[0].grid();
  require_same_grid(g, state.particles[1].grid());
  const Grid g2 = product_grid(g);
  Wavefunction out(g2);
  const auto m = static_cast<std::size_t>(g.points());
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) out[i * m + j] = state.particles[0][i] * state.particles[1][j];
  }
  return out;
}

}  // namespace varqd
