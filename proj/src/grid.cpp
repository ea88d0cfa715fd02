#include "varqd/grid.hpp"

#include "varqd/errors.hpp"
#include "varqd/log.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace varqd {

Grid::Grid(int dimension, double length, int points)
    : dimension_(dimension), length_(length), points_(points) {
  if (dimension != 1 && dimension != 2) {
    throw DimensionError("grid dimension must be 1 or 2, got " + std::to_string(dimension));
  }
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw DimensionError("grid length must be positive");
  }
  if (points < 8 || (points & (points - 1)) != 0) {
    throw DimensionError("grid points per axis must be a power of two >= 8, got " +
                         std::to_string(points));
  }
  if (size() > kMaxPoints) {
    throw DimensionError("grid exceeds the memory budget of " + std::to_string(kMaxPoints) +
                         " points");
  }
}

std::size_t Grid::size() const {
  std::size_t n = 1;
  for (int a = 0; a < dimension_; ++a) n *= static_cast<std::size_t>(points_);
  return n;
}

double Grid::cell_volume() const { return std::pow(spacing(), dimension_); }

std::array<double, 2> Grid::point(std::size_t flat) const {
  const auto m = static_cast<std::size_t>(points_);
  if (dimension_ == 1) return {coordinate(static_cast<int>(flat)), 0.0};
  return {coordinate(static_cast<int>(flat / m)), coordinate(static_cast<int>(flat % m))};
}

double Grid::wavenumber(int index) const {
  const int signed_index = index < points_ / 2 ? index : index - points_;
  return 2.0 * std::numbers::pi * signed_index / length_;
}

double Grid::max_wavenumber() const { return std::numbers::pi / spacing(); }

Wavefunction::Wavefunction(Grid grid)
    : grid_(grid), values_(Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(grid.size()))) {}

Wavefunction::Wavefunction(Grid grid, Eigen::VectorXcd values)
    : grid_(grid), values_(std::move(values)) {
  if (static_cast<std::size_t>(values_.size()) != grid_.size()) {
    throw DimensionError("sample count does not match grid size");
  }
}

Wavefunction Wavefunction::sample(const Grid& grid,
                                  const std::function<cplx(std::span<const double>)>& f) {
  Wavefunction out(grid);
  const int d = grid.dimension();
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const auto x = grid.point(j);
    out[j] = f(std::span<const double>(x.data(), static_cast<std::size_t>(d)));
  }
  return out;
}

Wavefunction& Wavefunction::operator+=(const Wavefunction& other) {
  require_same_grid(grid_, other.grid_);
  values_ += other.values_;
  return *this;
}

Wavefunction& Wavefunction::operator-=(const Wavefunction& other) {
  require_same_grid(grid_, other.grid_);
  values_ -= other.values_;
  return *this;
}

Wavefunction& Wavefunction::operator*=(cplx scale) {
  values_ *= scale;
  return *this;
}

Wavefunction Wavefunction::multiplied(std::span<const double> table) const {
  if (table.size() != size()) throw DimensionError("table size does not match grid size");
  Wavefunction out(*this);
  for (std::size_t j = 0; j < size(); ++j) out[j] *= table[j];
  return out;
}

Wavefunction Wavefunction::times_coordinate(int axis) const {
  if (axis < 0 || axis >= grid_.dimension()) throw DimensionError("axis out of range");
  Wavefunction out(*this);
  for (std::size_t j = 0; j < size(); ++j) out[j] *= grid_.point(j)[static_cast<std::size_t>(axis)];
  return out;
}

Wavefunction operator+(Wavefunction a, const Wavefunction& b) { return a += b; }
Wavefunction operator-(Wavefunction a, const Wavefunction& b) { return a -= b; }
Wavefunction operator*(cplx s, Wavefunction a) { return a *= s; }
Wavefunction operator*(Wavefunction a, cplx s) { return a *= s; }

void require_same_grid(const Grid& a, const Grid& b) {
  if (!(a == b)) throw DimensionError("wavefunctions live on different grids");
}

cplx inner(const Wavefunction& u, const Wavefunction& v) {
  require_same_grid(u.grid(), v.grid());
  return u.grid().cell_volume() * u.values().dot(v.values());
}

double metric(const Wavefunction& u, const Wavefunction& v) { return inner(u, v).real(); }

double symplectic(const Wavefunction& u, const Wavefunction& v) { return inner(u, v).imag(); }

double squared_norm(const Wavefunction& u) {
  return u.grid().cell_volume() * u.values().squaredNorm();
}

double norm(const Wavefunction& u) { return std::sqrt(squared_norm(u)); }

namespace {

void check_normalized(const Wavefunction& u) {
  const double n = norm(u);
  if (std::abs(n - 1.0) > 1e-6) {
    warn("moment of a non-normalized state (norm " + std::to_string(n) + ")");
  }
}

}  // namespace

std::vector<double> expectation_x(const Wavefunction& u) {
  check_normalized(u);
  const Grid& g = u.grid();
  std::vector<double> mean(static_cast<std::size_t>(g.dimension()), 0.0);
  for (std::size_t j = 0; j < u.size(); ++j) {
    const double w = std::norm(u[j]);
    const auto x = g.point(j);
    for (int a = 0; a < g.dimension(); ++a) mean[static_cast<std::size_t>(a)] += w * x[static_cast<std::size_t>(a)];
  }
  for (double& m : mean) m *= g.cell_volume();
  return mean;
}

double second_moment(const Wavefunction& u, int m, int n) {
  check_normalized(u);
  const Grid& g = u.grid();
  if (m < 0 || n < 0 || m >= g.dimension() || n >= g.dimension()) {
    throw DimensionError("moment axis out of range");
  }
  double s = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    const auto x = g.point(j);
    s += std::norm(u[j]) * x[static_cast<std::size_t>(m)] * x[static_cast<std::size_t>(n)];
  }
  return s * g.cell_volume();
}

double expectation(const Wavefunction& u, std::span<const double> table) {
  if (table.size() != u.size()) throw DimensionError("table size does not match grid size");
  double s = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) s += std::norm(u[j]) * table[j];
  return s * u.grid().cell_volume();
}

std::vector<double> tabulate(const Grid& grid,
                             const std::function<double(std::span<const double>)>& f) {
  std::vector<double> out(grid.size());
  const auto d = static_cast<std::size_t>(grid.dimension());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const auto x = grid.point(j);
    out[j] = f(std::span<const double>(x.data(), d));
  }
  return out;
}

}  // namespace varqd
