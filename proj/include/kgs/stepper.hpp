#pragma once

#include "kgs/coefficients.hpp"
#include "kgs/spectral.hpp"

#include <functional>
#include <stdexcept>
#include <string>
#include <utility>

namespace kgs {

/// Nodal state of the scheme at t_n: meson field, its time derivative (of size
/// O(1/eps^2)) and the nucleon field, each sampled at x_0 .. x_{N-1}.
struct FieldState {
  Grid grid;
  double eps = 1.0;
  double t = 0.0;
  RealVector phi;
  RealVector phi_dot;
  ComplexVector psi;
};

/// Per-step auxiliary coefficient vectors (mode order) of the frequency
/// decomposition: the envelope z(0), its well-prepared derivative, the
/// remainder velocity r'(0) and the nucleon time derivative.
struct DecomposedState {
  ComplexVector z0;
  ComplexVector z0_dot;
  ComplexVector r0_dot;
  ComplexVector psi_dot;
};

class SolverError : public std::runtime_error {
public:
  SolverError(const std::string& what, long step_index)
      : std::runtime_error(what + " (step " + std::to_string(step_index) + ")"), step_(step_index) {}
  long step_index() const noexcept { return step_; }

private:
  long step_;
};

/// Phi = phi0, PhiDot = phi1 / eps^2, Psi = psi0 at t = 0.
FieldState init_state(std::span<const Complex> psi0, std::span<const double> phi0, std::span<const double> phi1,
                      const Grid& grid, double eps);

DecomposedState decompose(const FieldState& state, double tau);

/// The multiscale time integrator. Owns the coefficient table and scratch
/// buffers; advance() performs decompose -> envelope update -> remainder
/// update -> nucleon update -> reconstruction.
class MtiStepper {
public:
  explicit MtiStepper(CoefficientTable table);

  const CoefficientTable& table() const noexcept { return table_; }

  /// Advances the state by one step of size tau. Throws SolverError on a
  /// non-finite value or on a reconstructed meson field that is not real.
  void advance(FieldState& state, long step_index = 0);

  /// Meson update written directly in terms of (Phi, PhiDot, Psi), without the
  /// envelope/remainder split. Must agree with advance() to rounding.
  std::pair<RealVector, RealVector> phi_closed_form(const FieldState& state);

  DecomposedState decomposition(const FieldState& state);

  /// Largest relative imaginary part discarded when the last step took real parts.
  double last_realness_defect() const noexcept { return realness_defect_; }

private:
  void check_state(const FieldState& state) const;
  void decompose_into(const FieldState& state);

  CoefficientTable table_;
  FourierTransform fft_;
  // mode-order coefficients
  ComplexVector z0_hat_, z0_dot_hat_, r0_dot_hat_, psi_hat_, psi_dot_hat_, work_hat_;
  ComplexVector z1_hat_, z1_dot_hat_, r1_hat_, r1_dot_hat_, psi1_hat_;
  // node values
  ComplexVector z0_, z0_dot_, psi_dot_, work_, r1_, aux_;
  double realness_defect_ = 0.0;
};

FieldState step(const FieldState& state, const CoefficientTable& table);

std::pair<RealVector, RealVector> step_phi_closed_form(const FieldState& state, const CoefficientTable& table);

using StepObserver = std::function<void(long, const FieldState&)>;

/// Applies n_steps steps of size tau with one coefficient table; the observer
/// (if any) sees the state after every step.
FieldState evolve(FieldState state, double tau, long n_steps, const StepObserver& observer = {});

/// Relative imaginary-part threshold for reconstructed meson values.
inline constexpr double realness_tolerance = 1e-11;

} // namespace kgs
