#pragma once

// Shared helpers for the test binaries: brute-force transforms and random data.

#include "kgs/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <span>
#include <utility>

namespace kgs::testing {

inline Complex expi(double theta) { return {std::cos(theta), std::sin(theta)}; }

// O(N^2) evaluation of (1/N) sum_j v_j exp(-i mu_l (x_j - a)), mode order.
inline ComplexVector naive_forward(const Grid& g, std::span<const Complex> v) {
  const int n = g.size();
  ComplexVector out(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const long double mu = 2.0L * 3.14159265358979323846264338327950288L * g.mode_number(k) / g.length();
    std::complex<long double> s = 0.0L;
    for (int j = 0; j < n; ++j) {
      const long double arg = -mu * (static_cast<long double>(j) * g.length() / n);
      s += std::complex<long double>(v[j].real(), v[j].imag()) * std::complex<long double>(std::cos(arg), std::sin(arg));
    }
    out[k] = Complex(static_cast<double>(s.real() / n), static_cast<double>(s.imag() / n));
  }
  return out;
}

inline ComplexVector naive_inverse(const Grid& g, std::span<const Complex> c) {
  const int n = g.size();
  ComplexVector out(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    std::complex<long double> s = 0.0L;
    for (int k = 0; k < n; ++k) {
      const long double mu = 2.0L * 3.14159265358979323846264338327950288L * g.mode_number(k) / g.length();
      const long double arg = mu * (static_cast<long double>(j) * g.length() / n);
      s += std::complex<long double>(c[k].real(), c[k].imag()) * std::complex<long double>(std::cos(arg), std::sin(arg));
    }
    out[j] = Complex(static_cast<double>(s.real()), static_cast<double>(s.imag()));
  }
  return out;
}

inline ComplexVector random_complex(std::size_t n, std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  ComplexVector v(n);
  for (auto& x : v) {
    const double re = u(rng);
    x = Complex(re, u(rng));
  }
  return v;
}

inline RealVector random_real(std::size_t n, std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  RealVector v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

// Smooth periodic random data: a few low modes with random amplitudes.
inline ComplexVector random_band_limited(const Grid& g, int max_mode, std::mt19937_64& rng) {
  ComplexVector c(static_cast<std::size_t>(g.size()));
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int l = -max_mode; l <= max_mode; ++l) {
    const double re = u(rng);
    c[g.index_of_mode(l)] = Complex(re, u(rng));
  }
  return c;
}

template <class A, class B>
double max_abs_diff(const A& a, const B& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, static_cast<double>(std::abs(a[i] - b[i])));
  return m;
}

template <class A>
double max_abs(const A& a) {
  double m = 0.0;
  for (const auto& x : a) m = std::max(m, static_cast<double>(std::abs(x)));
  return m;
}

// Linear Klein-Gordon modes: eps^2 phi'' + (mu^2 + 1/eps^2) phi = 0.
inline std::pair<RealVector, RealVector> linear_kg_solution(const Grid& g, double eps, std::span<const double> phi0,
                                                      std::span<const double> phi_dot0, double t) {
  const auto p = naive_forward(g, to_complex(phi0));
  const auto v = naive_forward(g, to_complex(phi_dot0));
  ComplexVector pt(p.size()), vt(p.size());
  for (int k = 0; k < g.size(); ++k) {
    // long double phases: w t reaches 1e4 for small eps
    const long double mu = g.mu(k);
    const long double w = std::sqrt(mu * mu + 1 / (static_cast<long double>(eps) * eps)) / eps;
    const long double c = std::cos(w * t), sn = std::sin(w * t);
    pt[k] = static_cast<double>(c) * p[k] + static_cast<double>(sn / w) * v[k];
    vt[k] = static_cast<double>(c) * v[k] - static_cast<double>(w * sn) * p[k];
  }
  const auto x = naive_inverse(g, pt);
  const auto y = naive_inverse(g, vt);
  RealVector phi(x.size()), phi_dot(y.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    phi[j] = x[j].real();
    phi_dot[j] = y[j].real();
  }
  return {phi, phi_dot};
}

} // namespace kgs::testing
