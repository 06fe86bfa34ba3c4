// Randomized property checks. Every property draws its cases from a fixed
// seed, so a failure is reproducible by rerunning the binary.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "kgs/coefficients.hpp"
#include "kgs/stepper.hpp"
#include "support/test_support.hpp"

#include <doctest.h>

using namespace kgs;
using namespace kgs::testing;

namespace {

constexpr int trials = 200;

Grid random_grid(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> half(2, 128);
  std::uniform_real_distribution<double> left(-50.0, 0.0), width(1.0, 100.0);
  const double a = left(rng);
  return make_grid(a, a + width(rng), 2 * half(rng));
}

double random_eps(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> e(-8.0, 0.0);
  return std::exp2(e(rng));
}

double random_tau(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> e(-12.0, -1.0);
  return std::exp2(e(rng));
}

FieldState random_field(const Grid& g, double eps, std::mt19937_64& rng) {
  const auto n = static_cast<std::size_t>(g.size());
  return init_state(random_complex(n, rng), random_real(n, rng), random_real(n, rng), g, eps);
}

} // namespace

TEST_SUITE("properties") {

TEST_CASE("Parseval identity") {
  std::mt19937_64 rng(101);
  for (int t = 0; t < trials; ++t) {
    const Grid g = random_grid(rng);
    const auto v = random_complex(static_cast<std::size_t>(g.size()), rng);
    const auto c = forward_transform(g, v);
    double nodes = 0.0, modes = 0.0;
    for (const auto& x : v) nodes += std::norm(x);
    for (const auto& x : c.coeffs()) modes += std::norm(x);
    CHECK(std::abs(g.h() * nodes - g.length() * modes) <= 1e-13 * g.h() * nodes);
    CHECK(sobolev_norm(c, 0) == doctest::Approx(std::sqrt(g.h() * nodes)).epsilon(1e-13));
  }
}

TEST_CASE("transform round trip") {
  std::mt19937_64 rng(102);
  for (int t = 0; t < trials; ++t) {
    const Grid g = random_grid(rng);
    const auto v = random_complex(static_cast<std::size_t>(g.size()), rng, 10.0);
    const auto back = inverse_transform(forward_transform(g, v));
    CHECK(max_abs_diff(back, v) <= 1e-13 * max_abs(v));
  }
}

TEST_CASE("real fields keep Hermitian coefficients") {
  std::mt19937_64 rng(103);
  for (int t = 0; t < trials; ++t) {
    const Grid g = random_grid(rng);
    const auto n = static_cast<std::size_t>(g.size());
    const auto u = random_real(n, rng), v = random_real(n, rng);
    const auto cu = forward_transform(g, std::span<const double>(u));
    CHECK(hermitian_defect(cu) <= 1e-15);
    CHECK(hermitian_defect(filtered_laplacian(cu, random_tau(rng))) <= 1e-13);
    CHECK(hermitian_defect(spectral_derivative(cu, 2)) <= 1e-12 * (1 + std::pow(g.mu(0), 2)));
    const auto uv = pointwise_product(to_complex(u), to_complex(v));
    CHECK(hermitian_defect(forward_transform(g, uv)) <= 1e-15);
    // conj(w) w is real for any complex w
    const auto w = random_complex(n, rng);
    CHECK(hermitian_defect(forward_transform(g, pointwise_product(conjugate(w), w))) <= 1e-15);
  }
}

TEST_CASE("reconstructed meson field and velocity are real") {
  std::mt19937_64 rng(104);
  for (int t = 0; t < 40; ++t) {
    const Grid g = make_grid(-32, 32, 64);
    const double eps = random_eps(rng);
    MtiStepper stepper(CoefficientTable(g, eps, random_tau(rng)));
    auto s = random_field(g, eps, rng);
    for (int n = 1; n <= 5; ++n) {
      stepper.advance(s, n);
      CHECK(stepper.last_realness_defect() <= realness_tolerance);
    }
  }
}

TEST_CASE("zero state is a fixed point") {
  std::mt19937_64 rng(105);
  for (int t = 0; t < 50; ++t) {
    const Grid g = random_grid(rng);
    const auto n = static_cast<std::size_t>(g.size());
    const double eps = random_eps(rng);
    const auto s = evolve(init_state(ComplexVector(n), RealVector(n), RealVector(n), g, eps), random_tau(rng), 3);
    CHECK(max_abs(s.phi) == 0.0);
    CHECK(max_abs(s.phi_dot) == 0.0);
    CHECK(max_abs(s.psi) == 0.0);
  }
}

TEST_CASE("runs are deterministic") {
  std::mt19937_64 rng(106);
  for (int t = 0; t < 20; ++t) {
    const Grid g = random_grid(rng);
    const double eps = random_eps(rng);
    const double tau = random_tau(rng);
    const auto s = random_field(g, eps, rng);
    const auto x = evolve(s, tau, 4);
    const auto y = evolve(s, tau, 4);
    CHECK(x.phi == y.phi);
    CHECK(x.phi_dot == y.phi_dot);
    CHECK(x.psi == y.psi);
  }
}

TEST_CASE("q_dot equals p") {
  std::mt19937_64 rng(107);
  std::uniform_real_distribution<double> mu(-200.0, 200.0);
  for (int t = 0; t < 5 * trials; ++t) {
    const auto s = source_coeffs(mode_frequencies(random_eps(rng), mu(rng)), random_tau(rng));
    CHECK(s.q_dot == s.p);
  }
}

TEST_CASE("resonant branch is continuous") {
  std::mt19937_64 rng(108);
  std::uniform_real_distribution<double> log_delta(-12.0, -1.0), sign(-1.0, 1.0);
  for (int t = 0; t < trials; ++t) {
    const double eps = random_eps(rng);
    const double tau = random_tau(rng);
    const double delta = std::pow(10.0, log_delta(rng)) * (sign(rng) < 0 ? -1.0 : 1.0);
    const double mu0 = 1.0 / eps;
    const double mu1 = (1.0 + delta) / eps;
    const auto c0 = schrodinger_coeffs(mode_frequencies(eps, mu0), tau);
    const auto c1 = schrodinger_coeffs(mode_frequencies(eps, mu1), tau);
    // |d c / d mu| <= 3 mu tau^2 and |d d / d mu| <= 3 mu tau^3
    const double mu_max = std::max(std::abs(mu0), std::abs(mu1));
    const double dmu = std::abs(mu1 - mu0);
    CHECK(std::abs(c1.c_minus - c0.c_minus) <= 3 * mu_max * tau * tau * dmu + 1e-15 * tau);
    CHECK(std::abs(c1.d_minus - c0.d_minus) <= 3 * mu_max * tau * tau * tau * dmu + 1e-15 * tau * tau);
  }
}

TEST_CASE("series and closed phase moments agree at the switch") {
  std::mt19937_64 rng(109);
  std::uniform_real_distribution<double> near(0.45, 0.55);
  for (int t = 0; t < trials; ++t) {
    const double y = near(rng) * (t % 2 ? 1.0 : -1.0);
    CHECK(std::abs(detail::phase_moment0_series(y) - detail::phase_moment0_closed(y)) <= 1e-15);
    CHECK(std::abs(detail::phase_moment1_series(y) - detail::phase_moment1_closed(y)) <= 1e-15);
  }
}

} // TEST_SUITE
