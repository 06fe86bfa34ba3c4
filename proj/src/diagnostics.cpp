#include "kgs/diagnostics.hpp"

#include <cmath>
#include <stdexcept>

namespace kgs {

namespace {

double gradient_norm_squared(const SpectralField& f) {
  double s = 0.0;
  const auto c = f.coeffs();
  for (int k = 0; k < f.grid().size(); ++k) {
    const double mu = f.grid().mu(k);
    s += mu * mu * std::norm(c[k]);
  }
  return f.grid().length() * s;
}

double h2_weight(double mu) {
  const double m2 = mu * mu;
  return 1.0 + m2 + m2 * m2;
}

void require_same_length(std::size_t x, std::size_t y, const Grid& grid) {
  if (x != y || x != static_cast<std::size_t>(grid.size())) {
    throw std::invalid_argument("error_h2: lengths do not match the grid");
  }
}

} // namespace

double mass(std::span<const Complex> psi, const Grid& grid) {
  if (psi.size() != static_cast<std::size_t>(grid.size())) throw std::invalid_argument("mass: length mismatch");
  double s = 0.0;
  for (const auto& v : psi) s += std::norm(v);
  return grid.h() * s;
}

double energy(const FieldState& state) {
  const Grid& grid = state.grid;
  const double eps2 = state.eps * state.eps;
  double local = 0.0;
  for (int j = 0; j < grid.size(); ++j) {
    const double phi = state.phi[j];
    const double phi_t = state.phi_dot[j];
    local += 0.5 * (eps2 * phi_t * phi_t + phi * phi / eps2) - std::norm(state.psi[j]) * phi;
  }
  const double grad_phi = gradient_norm_squared(forward_transform(grid, std::span<const double>(state.phi)));
  const double grad_psi = gradient_norm_squared(forward_transform(grid, std::span<const Complex>(state.psi)));
  return grid.h() * local + 0.5 * grad_phi + grad_psi;
}

bool grids_nest(const Grid& fine, const Grid& coarse) {
  return fine.a() == coarse.a() && fine.b() == coarse.b() && fine.size() % coarse.size() == 0;
}

template <class T>
std::vector<T> subsample(std::span<const T> fine_values, const Grid& fine, const Grid& coarse) {
  if (!grids_nest(fine, coarse)) {
    throw std::invalid_argument("reference grid is not a nested refinement of the coarse grid");
  }
  if (fine_values.size() != static_cast<std::size_t>(fine.size())) {
    throw std::invalid_argument("subsample: length does not match the fine grid");
  }
  const int stride = fine.size() / coarse.size();
  std::vector<T> out(static_cast<std::size_t>(coarse.size()));
  for (int j = 0; j < coarse.size(); ++j) out[j] = fine_values[static_cast<std::size_t>(j) * stride];
  return out;
}

template std::vector<double> subsample(std::span<const double>, const Grid&, const Grid&);
template std::vector<Complex> subsample(std::span<const Complex>, const Grid&, const Grid&);

double error_h2(std::span<const Complex> numeric, std::span<const Complex> reference, const Grid& grid) {
  require_same_length(numeric.size(), reference.size(), grid);
  ComplexVector d(numeric.size());
  for (std::size_t j = 0; j < d.size(); ++j) d[j] = numeric[j] - reference[j];
  return sobolev_norm(forward_transform(grid, d), 2);
}

double error_h2(std::span<const double> numeric, std::span<const double> reference, const Grid& grid) {
  require_same_length(numeric.size(), reference.size(), grid);
  RealVector d(numeric.size());
  for (std::size_t j = 0; j < d.size(); ++j) d[j] = numeric[j] - reference[j];
  return sobolev_norm(forward_transform(grid, std::span<const double>(d)), 2);
}

double error_h2(std::span<const Complex> numeric, const Grid& grid, std::span<const Complex> reference,
                const Grid& reference_grid) {
  const auto restricted = subsample(reference, reference_grid, grid);
  return error_h2(numeric, restricted, grid);
}

double error_h2(std::span<const double> numeric, const Grid& grid, std::span<const double> reference,
                const Grid& reference_grid) {
  const auto restricted = subsample(reference, reference_grid, grid);
  return error_h2(numeric, std::span<const double>(restricted), grid);
}

double error_energy_functional(const SpectralField& e_phi, const SpectralField& e_psi,
                               const SpectralField& e_phidot, double eps) {
  if (!(eps > 0.0 && eps <= 1.0)) throw std::invalid_argument("eps must lie in (0, 1]");
  const Grid& grid = e_phi.grid();
  if (!(e_psi.grid() == grid) || !(e_phidot.grid() == grid)) {
    throw std::invalid_argument("error_energy_functional: grid mismatch");
  }
  const double eps2 = eps * eps;
  double s = 0.0;
  for (int k = 0; k < grid.size(); ++k) {
    const double mu = grid.mu(k);
    const double w = h2_weight(mu);
    s += w * (eps2 * std::norm(e_phidot.coeffs()[k]) + (mu * mu + 1.0 / eps2) * std::norm(e_phi.coeffs()[k]) +
              std::norm(e_psi.coeffs()[k]) / eps2);
  }
  return grid.length() * s;
}

RealVector observed_orders(std::span<const double> errors, double refinement_factor) {
  if (errors.size() < 2) throw std::invalid_argument("observed_orders: need at least two errors");
  if (!(refinement_factor > 1.0)) throw std::invalid_argument("observed_orders: refinement factor must exceed 1");
  for (double e : errors) {
    if (!(e > 0.0) || !std::isfinite(e)) throw std::invalid_argument("observed_orders: errors must be positive");
  }
  RealVector orders(errors.size() - 1);
  const double log_factor = std::log(refinement_factor);
  for (std::size_t k = 1; k < errors.size(); ++k) orders[k - 1] = std::log(errors[k - 1] / errors[k]) / log_factor;
  return orders;
}

ErrorRecord measure_errors(const FieldState& numeric, const FieldState& reference, double tau) {
  if (numeric.eps != reference.eps) throw std::invalid_argument("measure_errors: eps mismatch");
  if (std::abs(numeric.t - reference.t) > 1e-12 * std::max(1.0, std::abs(numeric.t))) {
    throw std::invalid_argument("measure_errors: time mismatch");
  }
  const Grid& g = numeric.grid;
  const Grid& rg = reference.grid;
  ErrorRecord r;
  r.eps = numeric.eps;
  r.tau = tau;
  r.h = g.h();
  r.t = numeric.t;
  r.err_phi_h2 = error_h2(std::span<const double>(numeric.phi), g, reference.phi, rg);
  r.err_psi_h2 = error_h2(std::span<const Complex>(numeric.psi), g, reference.psi, rg);
  r.err_phidot_h2_scaled =
      numeric.eps * numeric.eps * error_h2(std::span<const double>(numeric.phi_dot), g, reference.phi_dot, rg);
  return r;
}

} // namespace kgs
