#include "kgs/limit_models.hpp"

#include <cmath>
#include <stdexcept>

namespace kgs {

namespace {

constexpr Complex I{0.0, 1.0};

void require_nonnegative_time(double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw std::invalid_argument("time must be finite and nonnegative");
}

void require_length(std::size_t got, const Grid& grid, const char* what) {
  if (got != static_cast<std::size_t>(grid.size())) {
    throw std::invalid_argument(std::string(what) + ": length does not match the grid");
  }
}

template <class Multiplier>
ComplexVector apply_multiplier(std::span<const Complex> v, const Grid& grid, Multiplier m) {
  FourierTransform fft(grid.size());
  ComplexVector hat(v.size());
  fft.forward(v, hat);
  for (int k = 0; k < grid.size(); ++k) hat[k] = m(k, hat[k]);
  ComplexVector out(v.size());
  fft.inverse(hat, out);
  return out;
}

} // namespace

ComplexVector limit_initial_z(std::span<const double> phi0, std::span<const double> phi1) {
  if (phi0.size() != phi1.size()) throw std::invalid_argument("limit_initial_z: phi0 and phi1 lengths differ");
  ComplexVector z(phi0.size());
  for (std::size_t j = 0; j < z.size(); ++j) z[j] = 0.5 * Complex(phi0[j], -phi1[j]);
  return z;
}

ComplexVector propagate_wave_operator(std::span<const Complex> z0, const Grid& grid, double eps, double t) {
  require_nonnegative_time(t);
  require_length(z0.size(), grid, "propagate_wave_operator");
  const double eps2 = eps * eps;
  if (t == 0.0) return {z0.begin(), z0.end()};
  return apply_multiplier(z0, grid, [&](int k, Complex zk) {
    const double mu = grid.mu(k);
    const auto prop = propagator_coeffs(mode_frequencies(eps, mu), t);
    return prop.a * zk + eps2 * prop.b * (0.5 * I * mu * mu * zk);
  });
}

ComplexVector propagate_schrodinger_z(std::span<const Complex> z0, const Grid& grid, double t) {
  require_nonnegative_time(t);
  require_length(z0.size(), grid, "propagate_schrodinger_z");
  if (t == 0.0) return {z0.begin(), z0.end()};
  return apply_multiplier(z0, grid, [&](int k, Complex zk) {
    const double mu = grid.mu(k);
    return unit_phase(0.5 * mu * mu * t) * zk;
  });
}

ComplexVector propagate_free_psi(std::span<const Complex> psi0, const Grid& grid, double t) {
  require_nonnegative_time(t);
  require_length(psi0.size(), grid, "propagate_free_psi");
  if (t == 0.0) return {psi0.begin(), psi0.end()};
  return apply_multiplier(psi0, grid, [&](int k, Complex pk) {
    const double mu = grid.mu(k);
    return unit_phase(-mu * mu * t) * pk;
  });
}

RealVector reconstruct_phi(std::span<const Complex> z, double eps, double t) {
  require_nonnegative_time(t);
  if (!(eps > 0.0 && eps <= 1.0)) throw std::invalid_argument("eps must lie in (0, 1]");
  const Complex phase = unit_phase(t / (eps * eps));
  RealVector phi(z.size());
  for (std::size_t j = 0; j < z.size(); ++j) phi[j] = 2.0 * (phase * z[j]).real();
  return phi;
}

LimitState limit_initial_state(LimitModel model, std::span<const Complex> psi0, std::span<const double> phi0,
                               std::span<const double> phi1, const Grid& grid, double eps) {
  if (!(eps > 0.0 && eps <= 1.0)) throw std::invalid_argument("eps must lie in (0, 1]");
  require_length(psi0.size(), grid, "psi0");
  require_length(phi0.size(), grid, "phi0");
  require_length(phi1.size(), grid, "phi1");
  return {grid, model, eps, 0.0, limit_initial_z(phi0, phi1), ComplexVector(psi0.begin(), psi0.end())};
}

LimitState limit_solution(const LimitState& initial, double t) {
  require_nonnegative_time(t);
  const double dt = t - initial.t;
  if (dt < 0.0) throw std::invalid_argument("limit_solution: cannot propagate backwards");
  LimitState out = initial;
  out.t = t;
  out.psi = propagate_free_psi(initial.psi, initial.grid, dt);
  out.z = initial.model == LimitModel::wave_operator
              ? propagate_wave_operator(initial.z, initial.grid, initial.eps, dt)
              : propagate_schrodinger_z(initial.z, initial.grid, dt);
  return out;
}

RealVector limit_phi(const LimitState& state) { return reconstruct_phi(state.z, state.eps, state.t); }

double eta_error(const FieldState& full, const LimitState& limit) {
  if (!(full.grid == limit.grid)) throw std::invalid_argument("eta_error: grid mismatch");
  if (std::abs(full.t - limit.t) > 1e-12 * std::max(1.0, std::abs(full.t))) {
    throw std::invalid_argument("eta_error: time mismatch");
  }
  const auto n = static_cast<std::size_t>(full.grid.size());
  const RealVector phi_lim = limit_phi(limit);
  ComplexVector dphi(n), dpsi(n);
  for (std::size_t j = 0; j < n; ++j) {
    dphi[j] = full.phi[j] - phi_lim[j];
    dpsi[j] = full.psi[j] - limit.psi[j];
  }
  return sobolev_norm(forward_transform(full.grid, dphi), 1) + sobolev_norm(forward_transform(full.grid, dpsi), 1);
}

EtaErrors eta_errors(const FieldState& full, const LimitState& limit_sw, const LimitState& limit_s) {
  return {eta_error(full, limit_sw), eta_error(full, limit_s)};
}

} // namespace kgs
