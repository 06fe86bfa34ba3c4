#include "kgs/coefficient_oracle.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace kgs {

namespace {

constexpr Complex I{0.0, 1.0};
constexpr int max_panels = 200000;

std::string sci_string(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

// Integrates f over [0, tau] panel by panel and checks the accumulated
// Gauss-Kronrod error estimate against an absolute tolerance.
template <class F>
auto panel_integral(F f, double tau, double fastest_rate, double tol) {
  using Value = decltype(f(0.0));
  const double quarter_period = 0.5 * std::numbers::pi / std::max(fastest_rate, 1e-300);
  const double panels_needed = std::ceil(tau / quarter_period);
  if (panels_needed > max_panels) {
    throw QuadratureFailure("coefficient oracle: phase too fast for the panel budget");
  }
  const int panels = std::max(1, static_cast<int>(panels_needed));
  const double width = tau / panels;
  Value total{};
  double total_error = 0.0;
  for (int k = 0; k < panels; ++k) {
    double err = 0.0;
    const double lo = k * width;
    const double hi = (k + 1 == panels) ? tau : lo + width;
    // one 31-point rule per panel; boost reports the error of the rule mapped to [-1, 1]
    total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, lo, hi, 0, 0.0, &err);
    total_error += 0.5 * (hi - lo) * err;
  }
  if (!(total_error <= tol)) {
    throw QuadratureFailure("coefficient oracle: tolerance unreachable (estimate " +
                            sci_string(total_error) + ")");
  }
  return total;
}

using OdeState = std::array<double, 4>; // Re u, Im u, Re u', Im u'

// 2i u' + eps^2 u'' + mu^2 u = 0  =>  u'' = -(2i u' + mu^2 u) / eps^2
std::array<Complex, 2> integrate_mode_ode(const ModeFrequencies& f, double tau, Complex u0, Complex v0,
                                          double tol) {
  namespace odeint = boost::numeric::odeint;
  const double eps2 = f.eps * f.eps;
  const double mu2 = f.mu * f.mu;
  auto rhs = [&](const OdeState& y, OdeState& dy, double) {
    dy[0] = y[2];
    dy[1] = y[3];
    dy[2] = (2.0 * y[3] - mu2 * y[0]) / eps2;
    dy[3] = (-2.0 * y[2] - mu2 * y[1]) / eps2;
  };
  OdeState y{u0.real(), u0.imag(), v0.real(), v0.imag()};
  auto stepper = odeint::make_controlled(tol * 1e-2, tol * 1e-2, odeint::runge_kutta_fehlberg78<OdeState>());
  const double fastest = std::max({f.omega + 1.0 / eps2, 1.0});
  odeint::integrate_adaptive(stepper, rhs, y, 0.0, tau, 0.05 / fastest);
  return {Complex(y[0], y[1]), Complex(y[2], y[3])};
}

} // namespace

CoefficientSet closed_form_coefficients(const ModeFrequencies& freq, double tau) {
  const auto prop = propagator_coeffs(freq, tau);
  const auto src = source_coeffs(freq, tau);
  const auto sch = schrodinger_coeffs(freq, tau);
  return {prop.a,       prop.b,      prop.a_dot,     prop.b_dot,      src.p,        src.q,
          src.p_dot,    src.q_dot,   sch.c_plus,     sch.c_minus,     sch.d_plus,   sch.d_minus};
}

CoefficientSet coeff_quadrature_oracle(const ModeFrequencies& f, double tau, double tol) {
  if (!(tau >= 0.0)) throw std::invalid_argument("coefficient oracle: tau must be nonnegative");
  CoefficientSet out{};
  if (tau == 0.0) {
    out.a = 1.0;
    out.b_dot = 1.0 / (f.eps * f.eps);
    return out;
  }
  const double eps2 = f.eps * f.eps;
  const double w = f.omega;
  const double mu2 = f.mu * f.mu;
  const double delta_plus = mu2 + 1.0 / eps2;
  const double delta_minus = mu2 - 1.0 / eps2;
  const double fastest = std::max({w, std::abs(delta_plus), std::abs(delta_minus), mu2});

  out.p = panel_integral([&](double th) { return std::sin(w * (tau - th)) / (eps2 * w); }, tau, fastest, tol);
  out.p_dot = panel_integral([&](double th) { return std::cos(w * (tau - th)) / eps2; }, tau, fastest, tol);
  out.q = panel_integral([&](double th) { return std::sin(w * (tau - th)) / (eps2 * w) * th; }, tau, fastest, tol);
  out.q_dot = panel_integral([&](double th) { return std::cos(w * (tau - th)) / eps2 * th; }, tau, fastest, tol);

  const Complex outer = I * std::exp(Complex(0.0, -mu2 * tau));
  auto phase = [](double rate, double th) { return std::exp(Complex(0.0, rate * th)); };
  out.c_plus = outer * panel_integral([&](double th) { return phase(delta_plus, th); }, tau, fastest, tol);
  out.c_minus = outer * panel_integral([&](double th) { return phase(delta_minus, th); }, tau, fastest, tol);
  out.d_plus = outer * panel_integral([&](double th) { return phase(delta_plus, th) * th; }, tau, fastest, tol);
  out.d_minus = outer * panel_integral([&](double th) { return phase(delta_minus, th) * th; }, tau, fastest, tol);

  // u(tau) = a u(0) + eps^2 b u'(0): basis data (1, 0) gives a and a_dot,
  // (0, 1) gives eps^2 b and eps^2 b_dot.
  const auto first = integrate_mode_ode(f, tau, 1.0, 0.0, tol);
  const auto second = integrate_mode_ode(f, tau, 0.0, 1.0, tol);
  out.a = first[0];
  out.a_dot = first[1];
  out.b = second[0] / eps2;
  out.b_dot = second[1] / eps2;
  return out;
}

double max_abs_deviation(const CoefficientSet& x, const CoefficientSet& y) {
  const double d[] = {std::abs(x.a - y.a),
                      std::abs(x.b - y.b),
                      std::abs(x.a_dot - y.a_dot),
                      std::abs(x.b_dot - y.b_dot),
                      std::abs(x.p - y.p),
                      std::abs(x.q - y.q),
                      std::abs(x.p_dot - y.p_dot),
                      std::abs(x.q_dot - y.q_dot),
                      std::abs(x.c_plus - y.c_plus),
                      std::abs(x.c_minus - y.c_minus),
                      std::abs(x.d_plus - y.d_plus),
                      std::abs(x.d_minus - y.d_minus)};
  return *std::max_element(std::begin(d), std::end(d));
}

} // namespace kgs
