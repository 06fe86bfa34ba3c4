#pragma once

#include "kgs/stepper.hpp"

namespace kgs {

enum class LimitModel { wave_operator, schrodinger };

/// Solution of one of the two decoupled limit systems at time t. eps enters the
/// envelope propagation only for the wave-operator model; both models use it
/// for the two-scale reconstruction of the meson field.
struct LimitState {
  Grid grid;
  LimitModel model = LimitModel::schrodinger;
  double eps = 1.0;
  double t = 0.0;
  ComplexVector z;
  ComplexVector psi;
};

/// z(0) = (phi0 - i phi1) / 2.
ComplexVector limit_initial_z(std::span<const double> phi0, std::span<const double> phi1);

/// Exact solution of 2i z' + eps^2 z'' - z_xx = 0 with z'(0) = -(i/2) z_xx(0).
ComplexVector propagate_wave_operator(std::span<const Complex> z0, const Grid& grid, double eps, double t);

/// Exact solution of 2i z' - z_xx = 0.
ComplexVector propagate_schrodinger_z(std::span<const Complex> z0, const Grid& grid, double t);

/// Exact solution of i psi' + psi_xx = 0.
ComplexVector propagate_free_psi(std::span<const Complex> psi0, const Grid& grid, double t);

/// 2 Re(exp(i t / eps^2) z) at each node.
RealVector reconstruct_phi(std::span<const Complex> z, double eps, double t);

LimitState limit_initial_state(LimitModel model, std::span<const Complex> psi0, std::span<const double> phi0,
                               std::span<const double> phi1, const Grid& grid, double eps);

/// The limit solution at time t, computed from the t = 0 state in one exact step.
LimitState limit_solution(const LimitState& initial, double t);

RealVector limit_phi(const LimitState& state);

struct EtaErrors {
  double eta_sw = 0.0;
  double eta_s = 0.0;
};

/// H^1 distances ||phi - phi_lim|| + ||psi - psi_lim|| against the
/// wave-operator and Schrodinger limits at the same time.
EtaErrors eta_errors(const FieldState& full, const LimitState& limit_sw, const LimitState& limit_s);

double eta_error(const FieldState& full, const LimitState& limit);

} // namespace kgs
