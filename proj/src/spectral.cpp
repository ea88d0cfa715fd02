#include "varqd/spectral.hpp"

#include "varqd/errors.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <utility>

namespace varqd {
namespace {

// FFTW's planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

FourierTransform::FourierTransform(int dimension, int points)
    : dimension_(dimension), points_(points) {
  const std::size_t n = dimension == 1 ? static_cast<std::size_t>(points)
                                       : static_cast<std::size_t>(points) * points;
  auto* scratch = fftw_alloc_complex(n);
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  if (dimension == 1) {
    forward_plan_ = fftw_plan_dft_1d(points, scratch, scratch, FFTW_FORWARD, flags);
    backward_plan_ = fftw_plan_dft_1d(points, scratch, scratch, FFTW_BACKWARD, flags);
  } else {
    forward_plan_ = fftw_plan_dft_2d(points, points, scratch, scratch, FFTW_FORWARD, flags);
    backward_plan_ = fftw_plan_dft_2d(points, points, scratch, scratch, FFTW_BACKWARD, flags);
  }
  fftw_free(scratch);
}

FourierTransform::~FourierTransform() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  fftw_destroy_plan(static_cast<fftw_plan>(backward_plan_));
}

std::shared_ptr<const FourierTransform> FourierTransform::for_grid(const Grid& grid) {
  static std::map<std::pair<int, int>, std::shared_ptr<const FourierTransform>> cache;
  std::lock_guard lock(planner_mutex());
  const auto key = std::make_pair(grid.dimension(), grid.points());
  auto it = cache.find(key);
  if (it == cache.end()) {
    std::shared_ptr<const FourierTransform> plan(
        new FourierTransform(grid.dimension(), grid.points()));
    it = cache.emplace(key, std::move(plan)).first;
  }
  return it->second;
}

void FourierTransform::forward(Eigen::VectorXcd& data) const {
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(static_cast<fftw_plan>(forward_plan_), p, p);
}

void FourierTransform::backward(Eigen::VectorXcd& data) const {
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(static_cast<fftw_plan>(backward_plan_), p, p);
  data /= static_cast<double>(data.size());
}

std::vector<double> kinetic_symbol(const Grid& grid, std::span<const double> axis_weights) {
  if (axis_weights.size() != static_cast<std::size_t>(grid.dimension())) {
    throw DimensionError("one kinetic weight per axis required");
  }
  const int m = grid.points();
  std::vector<double> symbol(grid.size());
  if (grid.dimension() == 1) {
    for (int i = 0; i < m; ++i) {
      const double k = grid.wavenumber(i);
      symbol[static_cast<std::size_t>(i)] = axis_weights[0] * k * k;
    }
  } else {
    for (int i = 0; i < m; ++i) {
      const double k0 = grid.wavenumber(i);
      for (int j = 0; j < m; ++j) {
        const double k1 = grid.wavenumber(j);
        symbol[static_cast<std::size_t>(i) * m + j] =
            axis_weights[0] * k0 * k0 + axis_weights[1] * k1 * k1;
      }
    }
  }
  return symbol;
}

Wavefunction apply_multiplier(const Wavefunction& u, std::span<const double> symbol) {
  if (symbol.size() != u.size()) throw DimensionError("multiplier size does not match grid");
  const auto fft = FourierTransform::for_grid(u.grid());
  Eigen::VectorXcd data = u.values();
  fft->forward(data);
  for (Eigen::Index j = 0; j < data.size(); ++j) data[j] *= symbol[static_cast<std::size_t>(j)];
  fft->backward(data);
  return Wavefunction(u.grid(), std::move(data));
}

Wavefunction laplacian(const Wavefunction& u) {
  const std::vector<double> ones(static_cast<std::size_t>(u.grid().dimension()), 1.0);
  auto symbol = kinetic_symbol(u.grid(), ones);
  for (double& s : symbol) s = -s;
  return apply_multiplier(u, symbol);
}

namespace {

Eigen::VectorXcd derivative_values(const Grid& grid, Eigen::VectorXcd data, int axis) {
  if (axis < 0 || axis >= grid.dimension()) throw DimensionError("axis out of range");
  const auto fft = FourierTransform::for_grid(grid);
  const int m = grid.points();
  fft->forward(data);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const int index = grid.dimension() == 1 ? static_cast<int>(j)
                      : axis == 0           ? static_cast<int>(j / static_cast<std::size_t>(m))
                                            : static_cast<int>(j % static_cast<std::size_t>(m));
    const double k = index == m / 2 ? 0.0 : grid.wavenumber(index);
    data[static_cast<Eigen::Index>(j)] *= cplx(0.0, k);
  }
  fft->backward(data);
  return data;
}

}  // namespace

Wavefunction derivative(const Wavefunction& u, int axis) {
  return Wavefunction(u.grid(), derivative_values(u.grid(), u.values(), axis));
}

std::vector<double> derivative(const Grid& grid, std::span<const double> table, int axis) {
  if (table.size() != grid.size()) throw DimensionError("table size does not match grid");
  Eigen::VectorXcd data(static_cast<Eigen::Index>(table.size()));
  for (std::size_t j = 0; j < table.size(); ++j) data[static_cast<Eigen::Index>(j)] = table[j];
  data = derivative_values(grid, std::move(data), axis);
  std::vector<double> out(table.size());
  for (std::size_t j = 0; j < table.size(); ++j) out[j] = data[static_cast<Eigen::Index>(j)].real();
  return out;
}

double spectral_tail(const Wavefunction& u) {
  const Grid& g = u.grid();
  const auto fft = FourierTransform::for_grid(g);
  Eigen::VectorXcd data = u.values();
  fft->forward(data);
  const int m = g.points();
  const double cutoff = 0.5 * g.max_wavenumber();
  double total = 0.0;
  double tail = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double w = std::norm(data[static_cast<Eigen::Index>(j)]);
    total += w;
    bool high = false;
    if (g.dimension() == 1) {
      high = std::abs(g.wavenumber(static_cast<int>(j))) > cutoff;
    } else {
      high = std::abs(g.wavenumber(static_cast<int>(j / static_cast<std::size_t>(m)))) > cutoff ||
             std::abs(g.wavenumber(static_cast<int>(j % static_cast<std::size_t>(m)))) > cutoff;
    }
    if (high) tail += w;
  }
  return total > 0.0 ? std::sqrt(tail / total) : 0.0;
}

}  // namespace varqd
