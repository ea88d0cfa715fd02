#pragma once

#include <Eigen/Core>

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace varqd {

using cplx = std::complex<double>;

/// Uniform periodic grid on the box [-L/2, L/2)^d, d in {1, 2}.
///
/// Samples sit at x_j = -L/2 + j*h with h = L/M. Two-dimensional data are stored
/// row-major: flat index = i0 * M + i1, where i0 indexes the first coordinate.
class Grid {
 public:
  static constexpr std::size_t kMaxPoints = std::size_t{1} << 24;

  Grid(int dimension, double length, int points);

  int dimension() const { return dimension_; }
  double length() const { return length_; }
  int points() const { return points_; }
  double spacing() const { return length_ / points_; }
  std::size_t size() const;
  /// Quadrature weight h^d.
  double cell_volume() const;

  double coordinate(int index) const { return -0.5 * length_ + index * spacing(); }
  /// Coordinates of the sample with flat index `flat`.
  std::array<double, 2> point(std::size_t flat) const;
  /// Angular wavenumber of FFT bin `index` (standard FFT ordering).
  double wavenumber(int index) const;
  double max_wavenumber() const;

  bool operator==(const Grid& other) const = default;

 private:
  int dimension_;
  double length_;
  int points_;
};

/// Complex samples of a state on a Grid.
class Wavefunction {
 public:
  explicit Wavefunction(Grid grid);
  Wavefunction(Grid grid, Eigen::VectorXcd values);

  /// Samples f at every grid point; f receives the point coordinates.
  static Wavefunction sample(const Grid& grid,
                             const std::function<cplx(std::span<const double>)>& f);

  const Grid& grid() const { return grid_; }
  const Eigen::VectorXcd& values() const { return values_; }
  Eigen::VectorXcd& values() { return values_; }
  std::size_t size() const { return static_cast<std::size_t>(values_.size()); }
  cplx operator[](std::size_t i) const { return values_[static_cast<Eigen::Index>(i)]; }
  cplx& operator[](std::size_t i) { return values_[static_cast<Eigen::Index>(i)]; }

  Wavefunction& operator+=(const Wavefunction& other);
  Wavefunction& operator-=(const Wavefunction& other);
  Wavefunction& operator*=(cplx scale);

  /// Pointwise product with a real function tabulated on the same grid.
  Wavefunction multiplied(std::span<const double> table) const;
  /// Pointwise product with coordinate x_axis.
  Wavefunction times_coordinate(int axis) const;

 private:
  Grid grid_;
  Eigen::VectorXcd values_;
};

Wavefunction operator+(Wavefunction a, const Wavefunction& b);
Wavefunction operator-(Wavefunction a, const Wavefunction& b);
Wavefunction operator*(cplx s, Wavefunction a);
Wavefunction operator*(Wavefunction a, cplx s);

/// Throws DimensionError unless both wavefunctions share one grid.
void require_same_grid(const Grid& a, const Grid& b);

/// h^d * sum conj(u_j) v_j; antilinear in the first argument.
cplx inner(const Wavefunction& u, const Wavefunction& v);
/// Real part of the inner product (the metric g).
double metric(const Wavefunction& u, const Wavefunction& v);
/// Imaginary part of the inner product (the symplectic form omega).
double symplectic(const Wavefunction& u, const Wavefunction& v);
double norm(const Wavefunction& u);
double squared_norm(const Wavefunction& u);

/// Position mean <u|x u> per axis.
std::vector<double> expectation_x(const Wavefunction& u);
/// <x_m u | x_n u>.
double second_moment(const Wavefunction& u, int m, int n);
/// Quadrature of |u|^2 against a real table.
double expectation(const Wavefunction& u, std::span<const double> table);

/// Tabulates f over the grid points.
std::vector<double> tabulate(const Grid& grid,
                             const std::function<double(std::span<const double>)>& f);

}  // namespace varqd
