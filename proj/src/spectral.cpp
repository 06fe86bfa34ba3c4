#include "kgs/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace kgs {

namespace {

struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  PlanPair() = default;
  PlanPair(const PlanPair&) = delete;
  PlanPair& operator=(const PlanPair&) = delete;
  ~PlanPair() {
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
  }
};

// FFTW_ESTIMATE keeps plan selection deterministic across processes, and
// FFTW_UNALIGNED keeps the same codelets whatever the buffer alignment, so a
// given input always produces bit-identical output.
const PlanPair& plans_for(int n) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<PlanPair>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[n];
  if (!slot) {
    slot = std::make_unique<PlanPair>();
    auto* in = fftw_alloc_complex(static_cast<size_t>(n));
    auto* out = fftw_alloc_complex(static_cast<size_t>(n));
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    slot->forward = fftw_plan_dft_1d(n, in, out, FFTW_FORWARD, flags);
    slot->backward = fftw_plan_dft_1d(n, in, out, FFTW_BACKWARD, flags);
    fftw_free(in);
    fftw_free(out);
    if (!slot->forward || !slot->backward) {
      slot.reset();
      throw std::runtime_error("FFTW planning failed for N=" + std::to_string(n));
    }
  }
  return *slot;
}

fftw_complex* as_fftw(Complex* p) { return reinterpret_cast<fftw_complex*>(p); }

void check_size(std::size_t got, int expected, const char* what) {
  if (got != static_cast<std::size_t>(expected)) {
    throw std::invalid_argument(std::string(what) + ": expected length " + std::to_string(expected) +
                                ", got " + std::to_string(got));
  }
}

} // namespace

Grid::Grid(double a, double b, int n) : a_(a), b_(b), n_(n) {
  if (!(b > a) || !std::isfinite(a) || !std::isfinite(b)) {
    throw std::invalid_argument("grid: require finite a < b");
  }
  if (n < 4 || n % 2 != 0) {
    throw std::invalid_argument("grid: N must be even and at least 4, got " + std::to_string(n));
  }
}

RealVector Grid::nodes() const {
  RealVector x(static_cast<std::size_t>(n_) + 1);
  for (int j = 0; j < n_; ++j) x[j] = node(j);
  x[n_] = b_;
  return x;
}

double Grid::mu(int k) const noexcept {
  return 2.0 * std::numbers::pi * static_cast<double>(mode_number(k)) / (b_ - a_);
}

RealVector Grid::mu_values() const {
  RealVector m(static_cast<std::size_t>(n_));
  for (int k = 0; k < n_; ++k) m[k] = mu(k);
  return m;
}

Grid make_grid(double a, double b, int n) { return Grid(a, b, n); }

SpectralField::SpectralField(Grid grid)
    : grid_(grid), coeffs_(static_cast<std::size_t>(grid.size())) {}

SpectralField::SpectralField(Grid grid, ComplexVector coeffs) : grid_(grid), coeffs_(std::move(coeffs)) {
  check_size(coeffs_.size(), grid_.size(), "spectral field");
}

Complex SpectralField::mode(int l) const {
  const int n = grid_.size();
  if (l < -n / 2 || l >= n / 2) throw std::out_of_range("mode number outside [-N/2, N/2-1]");
  return coeffs_[static_cast<std::size_t>(grid_.index_of_mode(l))];
}

FourierTransform::FourierTransform(int n)
    : n_(n), plans_(&plans_for(n)), work_in_(static_cast<std::size_t>(n)),
      work_out_(static_cast<std::size_t>(n)) {}

// FFTW's natural order puts frequency l at position (l mod N); mode order puts
// it at l + N/2. For even N both maps are a rotation by N/2.
void FourierTransform::forward(std::span<const Complex> nodes, std::span<Complex> coeffs) {
  check_size(nodes.size(), n_, "forward transform");
  check_size(coeffs.size(), n_, "forward transform output");
  const auto& plans = *static_cast<const PlanPair*>(plans_);
  std::copy(nodes.begin(), nodes.end(), work_in_.begin());
  fftw_execute_dft(plans.forward, as_fftw(work_in_.data()), as_fftw(work_out_.data()));
  const int half = n_ / 2;
  const double scale = 1.0 / n_;
  for (int k = 0; k < n_; ++k) coeffs[k] = work_out_[(k + half) % n_] * scale;
}

void FourierTransform::forward(std::span<const double> nodes, std::span<Complex> coeffs) {
  check_size(nodes.size(), n_, "forward transform");
  check_size(coeffs.size(), n_, "forward transform output");
  const auto& plans = *static_cast<const PlanPair*>(plans_);
  std::copy(nodes.begin(), nodes.end(), work_in_.begin());
  fftw_execute_dft(plans.forward, as_fftw(work_in_.data()), as_fftw(work_out_.data()));
  const int half = n_ / 2;
  const double scale = 1.0 / n_;
  for (int k = 0; k < n_; ++k) coeffs[k] = work_out_[(k + half) % n_] * scale;
}

void FourierTransform::inverse(std::span<const Complex> coeffs, std::span<Complex> nodes) {
  check_size(coeffs.size(), n_, "inverse transform");
  check_size(nodes.size(), n_, "inverse transform output");
  const auto& plans = *static_cast<const PlanPair*>(plans_);
  const int half = n_ / 2;
  for (int k = 0; k < n_; ++k) work_in_[(k + half) % n_] = coeffs[k];
  fftw_execute_dft(plans.backward, as_fftw(work_in_.data()), as_fftw(work_out_.data()));
  std::copy(work_out_.begin(), work_out_.end(), nodes.begin());
}

SpectralField forward_transform(const Grid& grid, std::span<const Complex> node_values) {
  check_size(node_values.size(), grid.size(), "forward transform");
  SpectralField field(grid);
  FourierTransform(grid.size()).forward(node_values, field.coeffs());
  return field;
}

SpectralField forward_transform(const Grid& grid, std::span<const double> node_values) {
  check_size(node_values.size(), grid.size(), "forward transform");
  SpectralField field(grid);
  FourierTransform(grid.size()).forward(node_values, field.coeffs());
  return field;
}

ComplexVector inverse_transform(const SpectralField& field) {
  ComplexVector nodes(field.coeffs().size());
  FourierTransform(field.grid().size()).inverse(field.coeffs(), nodes);
  return nodes;
}

SpectralField spectral_derivative(const SpectralField& field, int order) {
  if (order < 1) throw std::invalid_argument("spectral_derivative: order must be positive");
  SpectralField out = field;
  const Grid& g = field.grid();
  auto c = out.coeffs();
  for (int k = 0; k < g.size(); ++k) {
    const Complex symbol(0.0, g.mu(k));
    Complex factor = 1.0;
    for (int m = 0; m < order; ++m) factor *= symbol;
    c[k] *= factor;
  }
  return out;
}

SpectralField filtered_laplacian(const SpectralField& field, double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("filtered_laplacian: tau must be positive");
  SpectralField out = field;
  const Grid& g = field.grid();
  auto c = out.coeffs();
  for (int k = 0; k < g.size(); ++k) {
    const double mu = g.mu(k);
    c[k] *= -std::sin(mu * mu * tau) / tau;
  }
  return out;
}

ComplexVector pointwise_product(std::span<const Complex> u, std::span<const Complex> v) {
  if (u.size() != v.size()) throw std::invalid_argument("pointwise_product: grid mismatch");
  ComplexVector w(u.size());
  std::transform(u.begin(), u.end(), v.begin(), w.begin(), std::multiplies<>());
  return w;
}

ComplexVector conjugate(std::span<const Complex> v) {
  ComplexVector w(v.size());
  std::transform(v.begin(), v.end(), w.begin(), [](Complex z) { return std::conj(z); });
  return w;
}

double sobolev_norm(const SpectralField& field, int s) {
  if (s < 0 || s > 2) throw std::invalid_argument("sobolev_norm: s must be 0, 1 or 2");
  const Grid& g = field.grid();
  const auto c = field.coeffs();
  double sum = 0.0;
  for (int k = 0; k < g.size(); ++k) {
    const double m2 = g.mu(k) * g.mu(k);
    double weight = 1.0;
    double power = 1.0;
    for (int j = 1; j <= s; ++j) {
      power *= m2;
      weight += power;
    }
    sum += weight * std::norm(c[k]);
  }
  return std::sqrt(g.length() * sum);
}

double hermitian_defect(const SpectralField& field) {
  const Grid& g = field.grid();
  const int half = g.size() / 2;
  double defect = std::abs(field.mode(-half).imag());
  for (int l = 1; l < half; ++l) {
    defect = std::max(defect, std::abs(field.mode(-l) - std::conj(field.mode(l))));
  }
  defect = std::max(defect, std::abs(field.mode(0).imag()));
  return defect;
}

ComplexVector to_complex(std::span<const double> v) { return ComplexVector(v.begin(), v.end()); }

} // namespace kgs
