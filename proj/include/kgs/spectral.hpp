#pragma once

#include <complex>
#include <span>
#include <vector>

namespace kgs {

using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex>;
using RealVector = std::vector<double>;

/// Uniform periodic grid on [a, b] with N intervals.
///
/// Nodes are x_j = a + j h for j = 0..N (x_N is identified with x_0), and the
/// Fourier modes are l = -N/2 .. N/2-1 with frequencies mu_l = 2 pi l / (b - a).
/// Coefficient vectors throughout the library are stored in mode order: the
/// storage index k corresponds to l = k - N/2.
class Grid {
public:
  Grid(double a, double b, int n);

  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }
  int size() const noexcept { return n_; }
  double length() const noexcept { return b_ - a_; }
  double h() const noexcept { return (b_ - a_) / n_; }

  double node(int j) const noexcept { return a_ + j * h(); }
  /// All N+1 nodes, including the periodic image x_N = b.
  RealVector nodes() const;

  int mode_number(int k) const noexcept { return k - n_ / 2; }
  int index_of_mode(int l) const noexcept { return l + n_ / 2; }
  /// Frequency of storage index k.
  double mu(int k) const noexcept;
  RealVector mu_values() const;

  friend bool operator==(const Grid&, const Grid&) = default;

private:
  double a_;
  double b_;
  int n_;
};

/// Validating constructor: N even and >= 4, b > a.
Grid make_grid(double a, double b, int n);

/// Discrete Fourier coefficients of a grid function, in mode order.
class SpectralField {
public:
  explicit SpectralField(Grid grid);
  SpectralField(Grid grid, ComplexVector coeffs);

  const Grid& grid() const noexcept { return grid_; }
  std::span<const Complex> coeffs() const noexcept { return coeffs_; }
  std::span<Complex> coeffs() noexcept { return coeffs_; }

  /// Coefficient of mode number l in [-N/2, N/2-1].
  Complex mode(int l) const;

private:
  Grid grid_;
  ComplexVector coeffs_;
};

/// Forward/inverse DFT of one size, holding its own scratch buffer.
///
/// forward() produces (1/N) sum_j v_j exp(-i mu_l (x_j - a)) in mode order;
/// inverse() evaluates sum_l v_l exp(i mu_l (x_j - a)) at the N nodes.
/// Input and output spans may alias. An instance must not be shared between
/// threads; the underlying plans are shared and safe.
class FourierTransform {
public:
  explicit FourierTransform(int n);

  int size() const noexcept { return n_; }
  void forward(std::span<const Complex> nodes, std::span<Complex> coeffs);
  void forward(std::span<const double> nodes, std::span<Complex> coeffs);
  void inverse(std::span<const Complex> coeffs, std::span<Complex> nodes);

private:
  int n_;
  const void* plans_;
  ComplexVector work_in_;
  ComplexVector work_out_;
};

SpectralField forward_transform(const Grid& grid, std::span<const Complex> node_values);
SpectralField forward_transform(const Grid& grid, std::span<const double> node_values);
ComplexVector inverse_transform(const SpectralField& field);

/// Multiplies coefficient l by (i mu_l)^order.
SpectralField spectral_derivative(const SpectralField& field, int order);

/// Multiplies coefficient l by -sin(mu_l^2 tau) / tau.
SpectralField filtered_laplacian(const SpectralField& field, double tau);

ComplexVector pointwise_product(std::span<const Complex> u, std::span<const Complex> v);

ComplexVector conjugate(std::span<const Complex> v);

/// sqrt((b - a) sum_l (1 + mu_l^2 + ... + mu_l^{2s}) |v_l|^2) for s in {0, 1, 2}.
double sobolev_norm(const SpectralField& field, int s);

/// Largest violation of v_{-l} = conj(v_l) (|l| < N/2) and Im v_{-N/2} = 0.
double hermitian_defect(const SpectralField& field);

ComplexVector to_complex(std::span<const double> v);

} // namespace kgs
