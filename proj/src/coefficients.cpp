#include "kgs/coefficients.hpp"

#include <cmath>
#include <stdexcept>

namespace kgs {

namespace {

constexpr Complex I{0.0, 1.0};

void require_eps(double eps) {
  if (!(eps > 0.0 && eps <= 1.0)) throw std::invalid_argument("eps must lie in (0, 1]");
}

} // namespace

Complex unit_phase(double theta) {
  // 2 pi = two_pi_hi + two_pi_lo to about 1e-32.
  constexpr double two_pi_hi = 6.283185307179586232;
  constexpr double two_pi_lo = 2.4492935982947063545e-16;
  const double k = std::nearbyint(theta / two_pi_hi);
  double r = std::fma(-k, two_pi_hi, theta);
  r = std::fma(-k, two_pi_lo, r);
  return {std::cos(r), std::sin(r)};
}

ModeFrequencies mode_frequencies(double eps, double mu) {
  require_eps(eps);
  if (!std::isfinite(mu)) throw std::invalid_argument("mode frequency must be finite");
  ModeFrequencies f;
  f.eps = eps;
  f.mu = mu;
  const double eps2 = eps * eps;
  f.root = std::hypot(1.0, eps * mu);
  f.omega = f.root / eps2;
  f.lambda_plus = -(1.0 + f.root) / eps2;
  f.lambda_minus = mu * mu / (1.0 + f.root);
  return f;
}

PropagatorCoeffs propagator_coeffs(const ModeFrequencies& f, double s) {
  if (!(s >= 0.0)) throw std::invalid_argument("propagator_coeffs: step must be nonnegative");
  const double eps2 = f.eps * f.eps;
  const double em2 = (f.eps * f.mu) * (f.eps * f.mu);
  // lambda^+ / (lambda^+ - lambda^-) and -lambda^- / (lambda^+ - lambda^-).
  const double w_plus = (1.0 + f.root) / (2.0 * f.root);
  const double w_minus = em2 / (2.0 * f.root * (1.0 + f.root));
  const Complex e_minus = unit_phase(s * f.lambda_minus);
  const Complex e_plus = unit_phase(s * f.lambda_plus);
  const Complex carrier = unit_phase(-s / eps2);
  const double sin_ws = std::sin(f.omega * s);

  PropagatorCoeffs c;
  c.a = w_plus * e_minus + w_minus * e_plus;
  c.b = (sin_ws / f.root) * carrier;
  c.a_dot = -(f.mu * f.mu / f.root) * sin_ws * carrier;
  c.b_dot = (w_plus * e_plus + w_minus * e_minus) / eps2;
  return c;
}

SourceCoeffs source_coeffs(const ModeFrequencies& f, double tau) {
  if (!(tau >= 0.0)) throw std::invalid_argument("source_coeffs: tau must be nonnegative");
  const double eps2 = f.eps * f.eps;
  const double w = f.omega;
  const double x = w * tau;
  const double half_sin = std::sin(0.5 * x);

  SourceCoeffs c;
  c.p = 2.0 * half_sin * half_sin / (eps2 * w * w);
  c.p_dot = std::sin(x) / (eps2 * w);
  if (x < detail::small_phase_switch) {
    // (x - sin x) / x^3 = 1/6 - x^2/120 + x^4/5040 - x^6/362880 + x^8/39916800
    const double x2 = x * x;
    const double series =
        1.0 / 6.0 - x2 * (1.0 / 120.0 - x2 * (1.0 / 5040.0 - x2 * (1.0 / 362880.0 - x2 / 39916800.0)));
    c.q = tau * tau * tau * series / eps2;
  } else {
    c.q = (x - std::sin(x)) / (eps2 * w * w * w);
  }
  c.q_dot = c.p;
  return c;
}

namespace detail {

Complex phase_moment0_series(double y) {
  // sum_k (iy)^k / (k+1)!
  Complex term = 1.0;
  Complex sum = 1.0;
  for (int k = 1; k < 40; ++k) {
    term *= I * y / static_cast<double>(k + 1);
    sum += term;
    if (std::abs(term) < 1e-18) break;
  }
  return sum;
}

Complex phase_moment1_series(double y) {
  // sum_k (iy)^k / (k! (k+2))
  Complex power = 1.0; // (iy)^k / k!
  Complex sum = 0.5;
  for (int k = 1; k < 40; ++k) {
    power *= I * y / static_cast<double>(k);
    const Complex term = power / static_cast<double>(k + 2);
    sum += term;
    if (std::abs(term) < 1e-18) break;
  }
  return sum;
}

Complex phase_moment0_closed(double y) {
  return unit_phase(0.5 * y) * (2.0 * std::sin(0.5 * y) / y);
}

Complex phase_moment1_closed(double y) {
  return -(unit_phase(y) * Complex(-1.0, y) + 1.0) / (y * y);
}

Complex phase_moment0(double y) {
  return std::abs(y) < series_switch ? phase_moment0_series(y) : phase_moment0_closed(y);
}

Complex phase_moment1(double y) {
  return std::abs(y) < series_switch ? phase_moment1_series(y) : phase_moment1_closed(y);
}

} // namespace detail

SchrodingerCoeffs schrodinger_coeffs(const ModeFrequencies& f, double tau) {
  if (!(tau >= 0.0)) throw std::invalid_argument("schrodinger_coeffs: tau must be nonnegative");
  const double eps2 = f.eps * f.eps;
  const double mu2 = f.mu * f.mu;
  const double em = f.eps * std::abs(f.mu);
  const double delta_plus = mu2 + 1.0 / eps2;
  // mu^2 - 1/eps^2 with full relative accuracy near resonance eps |mu| = 1.
  const double delta_minus = (em - 1.0) * (em + 1.0) / eps2;
  const Complex prefactor = I * unit_phase(-mu2 * tau);

  SchrodingerCoeffs c;
  c.c_plus = prefactor * tau * detail::phase_moment0(delta_plus * tau);
  c.c_minus = prefactor * tau * detail::phase_moment0(delta_minus * tau);
  c.d_plus = prefactor * (tau * tau) * detail::phase_moment1(delta_plus * tau);
  c.d_minus = prefactor * (tau * tau) * detail::phase_moment1(delta_minus * tau);
  return c;
}

ModeCoefficients mode_coefficients(const ModeFrequencies& f, double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("time step must be positive");
  ModeCoefficients m;
  m.freq = f;
  m.tau = tau;
  m.propagator = propagator_coeffs(f, tau);
  m.source = source_coeffs(f, tau);
  m.schrodinger = schrodinger_coeffs(f, tau);
  const double x = f.omega * tau;
  m.cos_omega_tau = std::cos(x);
  m.sin_omega_tau_over_omega = std::sin(x) / f.omega;
  m.omega_sin_omega_tau = f.omega * std::sin(x);
  const double mu2 = f.mu * f.mu;
  m.free_phase = unit_phase(-mu2 * tau);
  m.filtered_mu2 = std::sin(mu2 * tau) / tau;
  return m;
}

CoefficientTable::CoefficientTable(const Grid& grid, double eps, double tau)
    : grid_(grid), eps_(eps), tau_(tau) {
  require_eps(eps);
  if (!(tau > 0.0) || !std::isfinite(tau)) throw std::invalid_argument("time step must be positive");
  step_phase_ = unit_phase(tau / (eps * eps));
  modes_.reserve(static_cast<std::size_t>(grid.size()));
  for (int k = 0; k < grid.size(); ++k) {
    modes_.push_back(mode_coefficients(mode_frequencies(eps, grid.mu(k)), tau));
  }
}

} // namespace kgs
