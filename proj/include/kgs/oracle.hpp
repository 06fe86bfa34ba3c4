#pragma once

#include "kgs/stepper.hpp"

#include <stdexcept>

namespace kgs {

/// Fourier coefficients (mode order) of the semi-discrete KGS system.
struct ModeODEState {
  ComplexVector phi_hat;
  ComplexVector phi_hat_dot;
  ComplexVector psi_hat;
  double t = 0.0;
};

ModeODEState to_mode_state(const FieldState& state);
FieldState to_field_state(const ModeODEState& state, const Grid& grid, double eps);

/// Right-hand side of the pseudospectral method-of-lines system
///   phi'' = [ (|psi|^2)_l - mu_l^2 phi_l - phi_l / eps^2 ] / eps^2
///   psi'  = -i mu_l^2 psi_l + i (phi psi)_l
/// with nonlinear terms formed at the nodes. The returned t is 1 (dt/dt).
ModeODEState rhs(const ModeODEState& state, const Grid& grid, double eps);

class StabilityViolation : public std::invalid_argument {
public:
  StabilityViolation(const std::string& what, double max_dt) : std::invalid_argument(what), max_dt_(max_dt) {}
  double max_dt() const noexcept { return max_dt_; }

private:
  double max_dt_;
};

/// Fastest linear frequency of the semi-discrete system: the larger of
/// sqrt(1 + mu_max^2 eps^2) / eps^2 and mu_max^2 with mu_max = pi N / (b - a).
double oracle_fastest_frequency(const Grid& grid, double eps);

/// dt * fastest frequency must not exceed this.
inline constexpr double oracle_stability_limit = 0.1;

/// Classical fourth-order Runge-Kutta, n steps of size dt.
ModeODEState rk4_evolve(ModeODEState state, const Grid& grid, double eps, double dt, long n);

/// Fine-step multiscale solve used as a reference solution.
inline constexpr double default_reference_tau = 5e-6;
inline constexpr double default_reference_h = 1.0 / 32.0;

long steps_for(double t_final, double tau);

FieldState reference_solve(std::span<const Complex> psi0, std::span<const double> phi0,
                           std::span<const double> phi1, const Grid& grid, double eps, double t_final,
                           double tau_ref = default_reference_tau);

} // namespace kgs
