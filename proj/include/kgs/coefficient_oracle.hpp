#pragma once

#include "kgs/coefficients.hpp"

#include <stdexcept>
#include <string>

namespace kgs {

/// All twelve per-mode step coefficients side by side.
struct CoefficientSet {
  Complex a, b, a_dot, b_dot;
  double p = 0.0, q = 0.0, p_dot = 0.0, q_dot = 0.0;
  Complex c_plus, c_minus, d_plus, d_minus;
};

class QuadratureFailure : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// The closed-form coefficients packed as a CoefficientSet.
CoefficientSet closed_form_coefficients(const ModeFrequencies& freq, double tau);

/// Independent evaluation of the same coefficients: the eight source weights by
/// 31-point Gauss-Kronrod quadrature of their defining integrals on panels no
/// longer than a quarter of the fastest period, and the four propagator entries
/// by adaptive Runge-Kutta-Fehlberg 7(8) integration of the envelope mode ODE
/// from basis data. Throws QuadratureFailure if the requested absolute tolerance
/// is not met within the panel budget.
CoefficientSet coeff_quadrature_oracle(const ModeFrequencies& freq, double tau, double tol = 1e-12);

double max_abs_deviation(const CoefficientSet& x, const CoefficientSet& y);

} // namespace kgs
