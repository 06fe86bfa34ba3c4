#include "kgs/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace kgs {

namespace {

constexpr Complex I{0.0, 1.0};

template <class V>
void require_length(const V& v, int n, const char* what) {
  if (v.size() != static_cast<std::size_t>(n)) {
    throw std::invalid_argument(std::string(what) + ": length does not match the grid");
  }
}

template <class V>
bool all_finite(const V& v) {
  return std::all_of(v.begin(), v.end(), [](const auto& x) {
    if constexpr (std::is_same_v<std::decay_t<decltype(x)>, Complex>) {
      return std::isfinite(x.real()) && std::isfinite(x.imag());
    } else {
      return std::isfinite(x);
    }
  });
}

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

} // namespace

FieldState init_state(std::span<const Complex> psi0, std::span<const double> phi0, std::span<const double> phi1,
                      const Grid& grid, double eps) {
  if (!(eps > 0.0 && eps <= 1.0)) throw std::invalid_argument("eps must lie in (0, 1]");
  const int n = grid.size();
  require_length(psi0, n, "psi0");
  require_length(phi0, n, "phi0");
  require_length(phi1, n, "phi1");
  if (!all_finite(psi0) || !all_finite(phi0) || !all_finite(phi1)) {
    throw std::invalid_argument("initial data contains NaN or Inf");
  }
  FieldState s{grid, eps, 0.0, RealVector(phi0.begin(), phi0.end()), RealVector(phi1.begin(), phi1.end()),
               ComplexVector(psi0.begin(), psi0.end())};
  const double eps2 = eps * eps;
  for (double& v : s.phi_dot) v /= eps2;
  return s;
}

MtiStepper::MtiStepper(CoefficientTable table)
    : table_(std::move(table)), fft_(table_.grid().size()) {
  const auto n = static_cast<std::size_t>(table_.grid().size());
  for (auto* v : {&z0_hat_, &z0_dot_hat_, &r0_dot_hat_, &psi_hat_, &psi_dot_hat_, &work_hat_, &z1_hat_,
                  &z1_dot_hat_, &r1_hat_, &r1_dot_hat_, &psi1_hat_, &z0_, &z0_dot_, &psi_dot_, &work_, &r1_,
                  &aux_}) {
    v->assign(n, Complex{});
  }
}

void MtiStepper::check_state(const FieldState& state) const {
  if (!(state.grid == table_.grid())) throw std::invalid_argument("state grid does not match coefficient table");
  if (state.eps != table_.eps()) throw std::invalid_argument("state eps does not match coefficient table");
  const int n = state.grid.size();
  require_length(state.phi, n, "phi");
  require_length(state.phi_dot, n, "phi_dot");
  require_length(state.psi, n, "psi");
}

void MtiStepper::decompose_into(const FieldState& s) {
  const int n = s.grid.size();
  const double eps2 = s.eps * s.eps;

  for (int j = 0; j < n; ++j) z0_[j] = 0.5 * Complex(s.phi[j], -eps2 * s.phi_dot[j]);
  fft_.forward(z0_, z0_hat_);
  for (int k = 0; k < n; ++k) z0_dot_hat_[k] = (0.5 * table_[k].filtered_mu2) * I * z0_hat_[k];
  fft_.inverse(z0_dot_hat_, z0_dot_);

  // r'(0) = -z'(0) - conj(z'(0)), conjugated at the nodes
  for (int j = 0; j < n; ++j) work_[j] = std::conj(z0_dot_[j]);
  fft_.forward(work_, work_hat_);
  for (int k = 0; k < n; ++k) r0_dot_hat_[k] = -z0_dot_hat_[k] - work_hat_[k];

  fft_.forward(s.psi, psi_hat_);
  for (int j = 0; j < n; ++j) work_[j] = s.phi[j] * s.psi[j];
  fft_.forward(work_, work_hat_);
  for (int k = 0; k < n; ++k) {
    psi_dot_hat_[k] = -I * table_[k].filtered_mu2 * psi_hat_[k] + I * work_hat_[k];
  }
  fft_.inverse(psi_dot_hat_, psi_dot_);
}

void MtiStepper::advance(FieldState& s, long step_index) {
  check_state(s);
  const int n = s.grid.size();
  const double eps2 = s.eps * s.eps;
  const double tau = table_.tau();

  decompose_into(s);

  // envelope: exact propagation of the well-prepared data
  for (int k = 0; k < n; ++k) {
    const auto& p = table_[k].propagator;
    z1_hat_[k] = p.a * z0_hat_[k] + eps2 * p.b * z0_dot_hat_[k];
    z1_dot_hat_[k] = p.a_dot * z0_hat_[k] + eps2 * p.b_dot * z0_dot_hat_[k];
  }

  // remainder, driven by |Psi|^2 and its linearised time derivative
  for (int j = 0; j < n; ++j) work_[j] = std::norm(s.psi[j]);
  fft_.forward(work_, work_hat_);
  for (int j = 0; j < n; ++j) aux_[j] = (std::conj(s.psi[j]) * psi_dot_[j]).real();
  fft_.forward(aux_, r1_dot_hat_);
  for (int k = 0; k < n; ++k) {
    const auto& m = table_[k];
    const Complex rho = work_hat_[k];
    const Complex sigma = r1_dot_hat_[k];
    r1_hat_[k] = m.sin_omega_tau_over_omega * r0_dot_hat_[k] + m.source.p * rho + 2.0 * m.source.q * sigma;
    r1_dot_hat_[k] = m.cos_omega_tau * r0_dot_hat_[k] + m.source.p_dot * rho + 2.0 * m.source.q_dot * sigma;
  }
  fft_.inverse(r1_hat_, r1_);

  // nucleon field
  for (int k = 0; k < n; ++k) psi1_hat_[k] = table_[k].free_phase * psi_hat_[k];
  auto accumulate = [&](auto weight) {
    fft_.forward(work_, work_hat_);
    for (int k = 0; k < n; ++k) psi1_hat_[k] += weight(k) * work_hat_[k];
  };
  for (int j = 0; j < n; ++j) work_[j] = z0_[j] * s.psi[j];
  accumulate([&](int k) { return table_[k].schrodinger.c_plus; });
  for (int j = 0; j < n; ++j) work_[j] = z0_dot_[j] * s.psi[j] + z0_[j] * psi_dot_[j];
  accumulate([&](int k) { return table_[k].schrodinger.d_plus; });
  for (int j = 0; j < n; ++j) work_[j] = std::conj(z0_[j]) * s.psi[j];
  accumulate([&](int k) { return table_[k].schrodinger.c_minus; });
  for (int j = 0; j < n; ++j) work_[j] = std::conj(z0_dot_[j]) * s.psi[j] + std::conj(z0_[j]) * psi_dot_[j];
  accumulate([&](int k) { return table_[k].schrodinger.d_minus; });
  for (int j = 0; j < n; ++j) work_[j] = r1_[j].real() * (s.psi[j] + tau * psi_dot_[j]);
  const Complex r_weight = 0.5 * I * tau;
  accumulate([&](int) { return r_weight; });

  // reconstruction at t_{n+1}
  fft_.inverse(z1_hat_, work_);
  fft_.inverse(z1_dot_hat_, aux_);
  fft_.inverse(r1_dot_hat_, z0_dot_);
  fft_.inverse(psi1_hat_, s.psi);

  const Complex phase = table_.step_phase();
  double imag_r = 0.0;
  double imag_r_dot = 0.0;
  for (int j = 0; j < n; ++j) {
    const Complex z = work_[j];
    s.phi[j] = 2.0 * (phase * z).real() + r1_[j].real();
    s.phi_dot[j] = 2.0 * (phase * (aux_[j] + I * z / eps2)).real() + z0_dot_[j].real();
    imag_r = std::max(imag_r, std::abs(r1_[j].imag()));
    imag_r_dot = std::max(imag_r_dot, std::abs(z0_dot_[j].imag()));
  }
  s.t += tau;

  if (!all_finite(s.phi) || !all_finite(s.phi_dot) || !all_finite(s.psi)) {
    throw SolverError("non-finite value in the solution; the time step may be too large", step_index);
  }
  auto relative = [](double discarded, double scale) {
    return discarded == 0.0 ? 0.0 : discarded / std::max(scale, std::numeric_limits<double>::min());
  };
  realness_defect_ = std::max(relative(imag_r, max_abs(s.phi)), relative(imag_r_dot, max_abs(s.phi_dot)));
  if (realness_defect_ > realness_tolerance) {
    throw SolverError("reconstructed meson field is not real (relative imaginary part " +
                          std::to_string(realness_defect_) + ")",
                      step_index);
  }
}

std::pair<RealVector, RealVector> MtiStepper::phi_closed_form(const FieldState& s) {
  check_state(s);
  const int n = s.grid.size();
  decompose_into(s);

  for (int j = 0; j < n; ++j) work_[j] = std::norm(s.psi[j]);
  fft_.forward(work_, work_hat_);
  for (int j = 0; j < n; ++j) aux_[j] = (std::conj(s.psi[j]) * psi_dot_[j]).real();
  fft_.forward(aux_, r1_dot_hat_);
  fft_.forward(s.phi, z1_hat_);
  fft_.forward(s.phi_dot, z1_dot_hat_);

  for (int k = 0; k < n; ++k) {
    const auto& m = table_[k];
    const Complex rho = work_hat_[k];
    const Complex sigma = r1_dot_hat_[k];
    const Complex phi_hat = z1_hat_[k];
    const Complex phi_dot_hat = z1_dot_hat_[k];
    r1_hat_[k] = m.cos_omega_tau * phi_hat + m.sin_omega_tau_over_omega * phi_dot_hat + m.source.p * rho +
                 2.0 * m.source.q * sigma;
    psi1_hat_[k] = m.cos_omega_tau * phi_dot_hat - m.omega_sin_omega_tau * phi_hat + m.source.p_dot * rho +
                   2.0 * m.source.q_dot * sigma;
  }
  fft_.inverse(r1_hat_, work_);
  fft_.inverse(psi1_hat_, aux_);
  RealVector phi(static_cast<std::size_t>(n));
  RealVector phi_dot(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    phi[j] = work_[j].real();
    phi_dot[j] = aux_[j].real();
  }
  return {std::move(phi), std::move(phi_dot)};
}

DecomposedState MtiStepper::decomposition(const FieldState& s) {
  check_state(s);
  decompose_into(s);
  return {z0_hat_, z0_dot_hat_, r0_dot_hat_, psi_dot_hat_};
}

DecomposedState decompose(const FieldState& state, double tau) {
  MtiStepper stepper(CoefficientTable(state.grid, state.eps, tau));
  return stepper.decomposition(state);
}

FieldState step(const FieldState& state, const CoefficientTable& table) {
  MtiStepper stepper(table);
  FieldState next = state;
  stepper.advance(next);
  return next;
}

std::pair<RealVector, RealVector> step_phi_closed_form(const FieldState& state, const CoefficientTable& table) {
  MtiStepper stepper(table);
  return stepper.phi_closed_form(state);
}

FieldState evolve(FieldState state, double tau, long n_steps, const StepObserver& observer) {
  if (n_steps < 0) throw std::invalid_argument("evolve: n_steps must be nonnegative");
  if (n_steps == 0) return state;
  MtiStepper stepper(CoefficientTable(state.grid, state.eps, tau));
  const double t0 = state.t;
  for (long n = 0; n < n_steps; ++n) {
    stepper.advance(state, n + 1);
    // t_n = t0 + n tau, without accumulating rounding in t
    state.t = t0 + static_cast<double>(n + 1) * tau;
    if (observer) observer(n + 1, state);
  }
  return state;
}

} // namespace kgs
