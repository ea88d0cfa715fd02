#include "varqd/hamiltonian.hpp"

#include "varqd/errors.hpp"
#include "varqd/spectral.hpp"

#include <algorithm>
#include <cmath>

namespace varqd {

Hamiltonian::Hamiltonian(double hbar, Potential potential, std::vector<double> kinetic_scales)
    : hbar_(hbar), potential_(std::move(potential)), kinetic_scales_(std::move(kinetic_scales)) {
  if (!(hbar > 0.0) || !std::isfinite(hbar)) throw ValidationError("hbar", "must be positive");
  for (double s : kinetic_scales_) {
    if (!(s > 0.0) || !std::isfinite(s)) {
      throw ValidationError("kinetic_scales", "must be positive");
    }
  }
}

Hamiltonian Hamiltonian::exact_class(double hbar, const ExactClass& params) {
  if (!(params.delta > 0.0)) throw ValidationError("delta", "must be positive");
  if (!(params.lambda > 0.0)) throw ValidationError("lambda", "must be positive");
  const auto d = params.mu.size();
  if (d == 0) throw DimensionError("exact class needs one mu entry per coordinate");
  const double delta2 = params.delta * params.delta;
  const double scale = 2.0 * params.lambda * delta2 / (hbar * hbar);
  Potential v = Sum{{Harmonic{params.lambda / (2.0 * delta2)}, Linear{params.mu},
                     Constant{params.omega - 0.5 * params.lambda * static_cast<double>(d)}}};
  Hamiltonian h(hbar, std::move(v), std::vector<double>(d, scale));
  h.exact_ = params;
  return h;
}

double Hamiltonian::kinetic_scale(int axis) const {
  if (kinetic_scales_.empty()) return 1.0;
  if (axis < 0 || static_cast<std::size_t>(axis) >= kinetic_scales_.size()) {
    throw DimensionError("no kinetic scale for axis " + std::to_string(axis));
  }
  return kinetic_scales_[static_cast<std::size_t>(axis)];
}

double Hamiltonian::kinetic_coefficient(int axis) const {
  return 0.5 * hbar_ * hbar_ * kinetic_scale(axis);
}

bool Hamiltonian::schrodinger_form(int dimension) const {
  for (int a = 0; a < dimension; ++a) {
    if (kinetic_scale(a) != 1.0) return false;
  }
  return true;
}

void Hamiltonian::check_dimension(int dimension) const {
  if (!kinetic_scales_.empty() && kinetic_scales_.size() != static_cast<std::size_t>(dimension)) {
    throw DimensionError("kinetic scales given for " + std::to_string(kinetic_scales_.size()) +
                         " axes but the problem has " + std::to_string(dimension));
  }
  potential_.check_dimension(dimension);
}

GridHamiltonian::GridHamiltonian(const Hamiltonian& h, const Grid& grid)
    : grid_(grid), hbar_(h.hbar()) {
  h.check_dimension(grid.dimension());
  std::vector<double> weights(static_cast<std::size_t>(grid.dimension()));
  for (int a = 0; a < grid.dimension(); ++a) {
    weights[static_cast<std::size_t>(a)] = h.kinetic_coefficient(a);
  }
  symbol_ = varqd::kinetic_symbol(grid, weights);
  potential_ = h.potential().tabulate(grid);
}

Wavefunction GridHamiltonian::apply_kinetic(const Wavefunction& u) const {
  require_same_grid(grid_, u.grid());
  return apply_multiplier(u, symbol_);
}

Wavefunction GridHamiltonian::apply(const Wavefunction& u) const {
  Wavefunction out = apply_kinetic(u);
  for (std::size_t j = 0; j < u.size(); ++j) out[j] += potential_[j] * u[j];
  return out;
}

double GridHamiltonian::max_kinetic() const {
  return *std::max_element(symbol_.begin(), symbol_.end());
}

Wavefunction apply_h(const Hamiltonian& h, const Wavefunction& u) {
  return GridHamiltonian(h, u.grid()).apply(u);
}

std::vector<double> grad_v_expectation(const Potential& v, const Wavefunction& u) {
  const Grid& g = u.grid();
  std::vector<std::vector<double>> tables;
  if (const auto* c = std::get_if<Custom>(&v.model())) {
    require_same_grid(c->grid(), g);
    for (int a = 0; a < g.dimension(); ++a) tables.push_back(c->gradient(a));
  } else if (v.analytic()) {
    tables = v.tabulate_gradient(g);
  } else {
    // Sums containing a tabulated part: differentiate the full table.
    const auto values = v.tabulate(g);
    for (int a = 0; a < g.dimension(); ++a) tables.push_back(derivative(g, values, a));
  }
  std::vector<double> out;
  for (const auto& t : tables) out.push_back(expectation(u, t));
  return out;
}

double matched_width(double hbar, double k) {
  if (!(k > 0.0)) throw ValidationError("k", "matched width needs a positive spring constant");
  return std::sqrt(hbar / (2.0 * std::sqrt(k)));
}

ExactClass matched_harmonic(double hbar, double k, int dimension) {
  ExactClass e;
  e.delta = matched_width(hbar, k);
  e.lambda = hbar * hbar / (2.0 * e.delta * e.delta);
  e.mu.assign(static_cast<std::size_t>(dimension), 0.0);
  e.omega = 0.5 * e.lambda * dimension;
  return e;
}

}  // namespace varqd
