#include "kgs/initial_data.hpp"

#include <cmath>
#include <numbers>

namespace kgs {

namespace benchmark_data {

Complex psi0(double x) { return Complex(0.5, 0.5) / std::cosh(0.5 * x * x); }

Complex psi0_narrow(double x) { return Complex(0.5, 0.5) / std::cosh(x * x); }

double phi0(double x) { return 0.5 * std::exp(-x * x); }

double phi1(double x) { return std::exp(-x * x) / std::numbers::sqrt2; }

} // namespace benchmark_data

InitialData benchmark_initial_data(const Grid& grid, BenchmarkProfile profile) {
  const auto n = static_cast<std::size_t>(grid.size());
  InitialData d{ComplexVector(n), RealVector(n), RealVector(n)};
  for (std::size_t j = 0; j < n; ++j) {
    const double x = grid.node(static_cast<int>(j));
    d.psi0[j] = profile == BenchmarkProfile::standard ? benchmark_data::psi0(x) : benchmark_data::psi0_narrow(x);
    d.phi0[j] = benchmark_data::phi0(x);
    d.phi1[j] = benchmark_data::phi1(x);
  }
  return d;
}

} // namespace kgs
