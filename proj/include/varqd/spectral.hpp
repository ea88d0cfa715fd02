#pragma once

#include "varqd/grid.hpp"

#include <memory>
#include <span>
#include <vector>

namespace varqd {

/// Cached unnormalized FFTW plans for one grid shape.
///
/// Plans are created once per (dimension, points) pair and shared; executing
/// them on distinct arrays is thread-safe.
class FourierTransform {
 public:
  static std::shared_ptr<const FourierTransform> for_grid(const Grid& grid);

  ~FourierTransform();
  FourierTransform(const FourierTransform&) = delete;
  FourierTransform& operator=(const FourierTransform&) = delete;

  void forward(Eigen::VectorXcd& data) const;
  /// Inverse transform including the 1/M^d normalization.
  void backward(Eigen::VectorXcd& data) const;

 private:
  FourierTransform(int dimension, int points);

  int dimension_;
  int points_;
  void* forward_plan_;
  void* backward_plan_;
};

/// Squared wavenumber |k|^2 weighted per axis: sum_a weight[a] * k_a^2, in FFT order.
std::vector<double> kinetic_symbol(const Grid& grid, std::span<const double> axis_weights);

/// Applies the Fourier multiplier `symbol` (FFT order) to u.
Wavefunction apply_multiplier(const Wavefunction& u, std::span<const double> symbol);

/// Spectral Laplacian.
Wavefunction laplacian(const Wavefunction& u);
/// Spectral first derivative along `axis`; the Nyquist mode is dropped.
Wavefunction derivative(const Wavefunction& u, int axis);
/// Spectral derivative of a real periodic table along `axis`.
std::vector<double> derivative(const Grid& grid, std::span<const double> table, int axis);

/// Root of the fraction of ||u||^2 carried by modes with |k_a| > k_max/2 on any axis.
double spectral_tail(const Wavefunction& u);

}  // namespace varqd
