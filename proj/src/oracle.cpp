#include "kgs/oracle.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace kgs {

namespace {

constexpr Complex I{0.0, 1.0};

// y = [phi_hat | phi_hat_dot | psi_hat], each of length N.
class OracleSystem {
public:
  OracleSystem(const Grid& grid, double eps)
      : grid_(grid), eps_(eps), n_(static_cast<std::size_t>(grid.size())), fft_(grid.size()), phi_(n_),
        psi_(n_), work_(n_), rho_hat_(n_), coupling_hat_(n_), mu2_(n_) {
    for (int k = 0; k < grid.size(); ++k) mu2_[k] = grid.mu(k) * grid.mu(k);
  }

  void operator()(const ComplexVector& y, ComplexVector& dy) {
    const double eps2 = eps_ * eps_;
    std::span<const Complex> phi_hat(y.data(), n_);
    std::span<const Complex> phi_hat_dot(y.data() + n_, n_);
    std::span<const Complex> psi_hat(y.data() + 2 * n_, n_);
    fft_.inverse(phi_hat, phi_);
    fft_.inverse(psi_hat, psi_);
    for (std::size_t j = 0; j < n_; ++j) work_[j] = std::norm(psi_[j]);
    fft_.forward(work_, rho_hat_);
    for (std::size_t j = 0; j < n_; ++j) work_[j] = phi_[j] * psi_[j];
    fft_.forward(work_, coupling_hat_);
    for (std::size_t k = 0; k < n_; ++k) {
      dy[k] = phi_hat_dot[k];
      dy[n_ + k] = (rho_hat_[k] - mu2_[k] * phi_hat[k] - phi_hat[k] / eps2) / eps2;
      dy[2 * n_ + k] = -I * mu2_[k] * psi_hat[k] + I * coupling_hat_[k];
    }
  }

  std::size_t size() const noexcept { return n_; }

private:
  Grid grid_;
  double eps_;
  std::size_t n_;
  FourierTransform fft_;
  ComplexVector phi_, psi_, work_, rho_hat_, coupling_hat_;
  RealVector mu2_;
};

ComplexVector pack(const ModeODEState& s) {
  ComplexVector y;
  y.reserve(3 * s.phi_hat.size());
  y.insert(y.end(), s.phi_hat.begin(), s.phi_hat.end());
  y.insert(y.end(), s.phi_hat_dot.begin(), s.phi_hat_dot.end());
  y.insert(y.end(), s.psi_hat.begin(), s.psi_hat.end());
  return y;
}

ModeODEState unpack(const ComplexVector& y, std::size_t n, double t) {
  ModeODEState s;
  s.phi_hat.assign(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(n));
  s.phi_hat_dot.assign(y.begin() + static_cast<std::ptrdiff_t>(n), y.begin() + static_cast<std::ptrdiff_t>(2 * n));
  s.psi_hat.assign(y.begin() + static_cast<std::ptrdiff_t>(2 * n), y.end());
  s.t = t;
  return s;
}

void check_shape(const ModeODEState& s, const Grid& grid) {
  const auto n = static_cast<std::size_t>(grid.size());
  if (s.phi_hat.size() != n || s.phi_hat_dot.size() != n || s.psi_hat.size() != n) {
    throw std::invalid_argument("oracle state does not match the grid");
  }
}

} // namespace

ModeODEState to_mode_state(const FieldState& state) {
  FourierTransform fft(state.grid.size());
  const auto n = static_cast<std::size_t>(state.grid.size());
  ModeODEState m{ComplexVector(n), ComplexVector(n), ComplexVector(n), state.t};
  fft.forward(state.phi, m.phi_hat);
  fft.forward(state.phi_dot, m.phi_hat_dot);
  fft.forward(state.psi, m.psi_hat);
  return m;
}

FieldState to_field_state(const ModeODEState& m, const Grid& grid, double eps) {
  check_shape(m, grid);
  FourierTransform fft(grid.size());
  const auto n = static_cast<std::size_t>(grid.size());
  ComplexVector nodes(n);
  FieldState s{grid, eps, m.t, RealVector(n), RealVector(n), ComplexVector(n)};
  fft.inverse(m.phi_hat, nodes);
  for (std::size_t j = 0; j < n; ++j) s.phi[j] = nodes[j].real();
  fft.inverse(m.phi_hat_dot, nodes);
  for (std::size_t j = 0; j < n; ++j) s.phi_dot[j] = nodes[j].real();
  fft.inverse(m.psi_hat, s.psi);
  return s;
}

ModeODEState rhs(const ModeODEState& state, const Grid& grid, double eps) {
  if (!(eps > 0.0 && eps <= 1.0)) throw std::invalid_argument("eps must lie in (0, 1]");
  check_shape(state, grid);
  OracleSystem system(grid, eps);
  const ComplexVector y = pack(state);
  ComplexVector dy(y.size());
  system(y, dy);
  return unpack(dy, system.size(), 1.0);
}

double oracle_fastest_frequency(const Grid& grid, double eps) {
  const double mu_max = std::numbers::pi * grid.size() / grid.length();
  const double omega_max = std::hypot(1.0, mu_max * eps) / (eps * eps);
  return std::max(omega_max, mu_max * mu_max);
}

ModeODEState rk4_evolve(ModeODEState state, const Grid& grid, double eps, double dt, long n) {
  if (!(eps > 0.0 && eps <= 1.0)) throw std::invalid_argument("eps must lie in (0, 1]");
  if (n < 0) throw std::invalid_argument("rk4_evolve: step count must be nonnegative");
  check_shape(state, grid);
  if (n == 0) return state;
  const double fastest = oracle_fastest_frequency(grid, eps);
  const double max_dt = oracle_stability_limit / fastest;
  if (!(dt > 0.0) || dt > max_dt) {
    std::ostringstream msg;
    msg << "rk4_evolve: dt = " << dt << " does not resolve the fastest frequency " << fastest
        << "; require dt <= " << max_dt;
    throw StabilityViolation(msg.str(), max_dt);
  }

  OracleSystem system(grid, eps);
  ComplexVector y = pack(state);
  const std::size_t m = y.size();
  ComplexVector k1(m), k2(m), k3(m), k4(m), stage(m);
  for (long step = 0; step < n; ++step) {
    system(y, k1);
    for (std::size_t i = 0; i < m; ++i) stage[i] = y[i] + 0.5 * dt * k1[i];
    system(stage, k2);
    for (std::size_t i = 0; i < m; ++i) stage[i] = y[i] + 0.5 * dt * k2[i];
    system(stage, k3);
    for (std::size_t i = 0; i < m; ++i) stage[i] = y[i] + dt * k3[i];
    system(stage, k4);
    for (std::size_t i = 0; i < m; ++i) y[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  return unpack(y, system.size(), state.t + static_cast<double>(n) * dt);
}

long steps_for(double t_final, double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("time step must be positive");
  if (!(t_final >= 0.0)) throw std::invalid_argument("final time must be nonnegative");
  const double ratio = t_final / tau;
  const double n = std::round(ratio);
  if (std::abs(ratio - n) > 1e-9 * std::max(1.0, ratio)) {
    std::ostringstream msg;
    msg << "final time " << t_final << " is not an integer multiple of tau = " << tau;
    throw std::invalid_argument(msg.str());
  }
  return static_cast<long>(n);
}

FieldState reference_solve(std::span<const Complex> psi0, std::span<const double> phi0,
                           std::span<const double> phi1, const Grid& grid, double eps, double t_final,
                           double tau_ref) {
  const long steps = steps_for(t_final, tau_ref);
  return evolve(init_state(psi0, phi0, phi1, grid, eps), tau_ref, steps);
}

} // namespace kgs
