#pragma once

#include "kgs/spectral.hpp"

#include <vector>

namespace kgs {

/// exp(i theta) with theta reduced modulo 2 pi against a two-word 2 pi, so that
/// large phases such as tau / eps^2 keep full relative precision.
Complex unit_phase(double theta);

/// Per-mode frequencies of the linear envelope and remainder equations.
///
/// omega = sqrt(1 + mu^2 eps^2) / eps^2 and lambda^{+-} = -(1 +- sqrt(1 + mu^2 eps^2)) / eps^2.
/// lambda^- is evaluated in the cancellation-free form mu^2 / (1 + sqrt(1 + eps^2 mu^2)).
struct ModeFrequencies {
  double eps = 1.0;
  double mu = 0.0;
  double root = 1.0; ///< sqrt(1 + eps^2 mu^2) = eps^2 omega
  double omega = 1.0;
  double lambda_plus = -2.0;
  double lambda_minus = 0.0;
};

ModeFrequencies mode_frequencies(double eps, double mu);

/// Exact propagator of 2i u' + eps^2 u'' + mu^2 u = 0 over a step s:
/// u(s) = a u(0) + eps^2 b u'(0),  u'(s) = a_dot u(0) + eps^2 b_dot u'(0).
struct PropagatorCoeffs {
  Complex a;
  Complex b;
  Complex a_dot;
  Complex b_dot;
};

PropagatorCoeffs propagator_coeffs(const ModeFrequencies& freq, double s);

/// Linear-in-time quadrature weights of the remainder (meson) source integral.
struct SourceCoeffs {
  double p = 0.0;
  double q = 0.0;
  double p_dot = 0.0;
  double q_dot = 0.0;
};

SourceCoeffs source_coeffs(const ModeFrequencies& freq, double tau);

/// Weights of the oscillatory nucleon source integrals with phases mu^2 +- 1/eps^2.
struct SchrodingerCoeffs {
  Complex c_plus;
  Complex c_minus;
  Complex d_plus;
  Complex d_minus;
};

SchrodingerCoeffs schrodinger_coeffs(const ModeFrequencies& freq, double tau);

/// Every per-mode constant a step needs, for one (eps, tau).
struct ModeCoefficients {
  ModeFrequencies freq;
  double tau = 0.0;
  PropagatorCoeffs propagator;
  SourceCoeffs source;
  SchrodingerCoeffs schrodinger;
  double cos_omega_tau = 1.0;
  double sin_omega_tau_over_omega = 0.0;
  double omega_sin_omega_tau = 0.0;
  Complex free_phase{1.0, 0.0};   ///< exp(-i mu^2 tau)
  double filtered_mu2 = 0.0;      ///< sin(mu^2 tau) / tau
};

ModeCoefficients mode_coefficients(const ModeFrequencies& freq, double tau);

/// Step-invariant coefficients for every mode of a grid at fixed (eps, tau).
class CoefficientTable {
public:
  CoefficientTable(const Grid& grid, double eps, double tau);

  const Grid& grid() const noexcept { return grid_; }
  double eps() const noexcept { return eps_; }
  double tau() const noexcept { return tau_; }
  /// exp(i tau / eps^2)
  Complex step_phase() const noexcept { return step_phase_; }
  const ModeCoefficients& operator[](int k) const { return modes_[static_cast<std::size_t>(k)]; }
  std::size_t size() const noexcept { return modes_.size(); }

private:
  Grid grid_;
  double eps_;
  double tau_;
  Complex step_phase_;
  std::vector<ModeCoefficients> modes_;
};

namespace detail {

/// g1(y) = int_0^1 exp(i y u) du and g2(y) = int_0^1 exp(i y u) u du.
/// Power series below series_switch, closed forms above.
inline constexpr double series_switch = 0.5;
Complex phase_moment0(double y);
Complex phase_moment1(double y);
Complex phase_moment0_series(double y);
Complex phase_moment1_series(double y);
Complex phase_moment0_closed(double y);
Complex phase_moment1_closed(double y);

/// Below this value of omega*tau the source weights use Taylor series.
inline constexpr double small_phase_switch = 0.1;

} // namespace detail

} // namespace kgs
