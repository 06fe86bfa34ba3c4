#pragma once

#include "kgs/stepper.hpp"

namespace kgs {

/// h sum_j |psi_j|^2.
double mass(std::span<const Complex> psi, const Grid& grid);

/// Discrete Hamiltonian with nodal quadrature and spectral gradients:
///   h sum_j [ (eps^2 phi_t^2 + phi_x^2 + phi^2 / eps^2) / 2 + |psi_x|^2 - |psi|^2 phi ].
/// Gradient terms are summed in coefficient space, (b - a) sum_l mu_l^2 |v_l|^2.
double energy(const FieldState& state);

/// Node values of a function on `fine` at the nodes of `coarse`. The grids must
/// share [a, b] and fine.size() must be a multiple of coarse.size().
template <class T>
std::vector<T> subsample(std::span<const T> fine_values, const Grid& fine, const Grid& coarse);

bool grids_nest(const Grid& fine, const Grid& coarse);

/// H^2 spectral norm of numeric - reference on one grid.
double error_h2(std::span<const Complex> numeric, std::span<const Complex> reference, const Grid& grid);
double error_h2(std::span<const double> numeric, std::span<const double> reference, const Grid& grid);

/// Same, with the reference given on a nested finer grid.
double error_h2(std::span<const Complex> numeric, const Grid& grid, std::span<const Complex> reference,
                const Grid& reference_grid);
double error_h2(std::span<const double> numeric, const Grid& grid, std::span<const double> reference,
                const Grid& reference_grid);

/// eps^2 ||e_phidot||^2 + ||d_x e_phi||^2 + (||e_phi||^2 + ||e_psi||^2) / eps^2, all in H^2.
double error_energy_functional(const SpectralField& e_phi, const SpectralField& e_psi,
                               const SpectralField& e_phidot, double eps);

/// order_k = log(err_{k-1} / err_k) / log(factor), k = 1 .. n-1.
RealVector observed_orders(std::span<const double> errors, double refinement_factor);

struct ErrorRecord {
  double eps = 0.0;
  double tau = 0.0;
  double h = 0.0;
  double t = 0.0;
  double err_phi_h2 = 0.0;
  double err_psi_h2 = 0.0;
  /// eps^2 times the H^2 error of the meson velocity.
  double err_phidot_h2_scaled = 0.0;
};

/// Errors of `numeric` against `reference`, which may live on a nested finer grid.
ErrorRecord measure_errors(const FieldState& numeric, const FieldState& reference, double tau);

} // namespace kgs
