#pragma once

#include "kgs/spectral.hpp"

namespace kgs {

/// Initial data sampled at the N grid nodes.
struct InitialData {
  ComplexVector psi0;
  RealVector phi0;
  RealVector phi1;
};

/// Nucleon profile of the benchmark: sech(x^2/2), or the narrower sech(x^2).
/// The published error tables match the narrow profile, so runs meant to be
/// compared against them use it.
enum class BenchmarkProfile { standard, narrow_sech };

/// psi0 = (1+i)/2 sech(x^2/2), phi0 = exp(-x^2)/2, phi1 = exp(-x^2)/sqrt(2).
namespace benchmark_data {
Complex psi0(double x);
/// (1+i)/2 sech(x^2).
Complex psi0_narrow(double x);
double phi0(double x);
double phi1(double x);
} // namespace benchmark_data

InitialData benchmark_initial_data(const Grid& grid, BenchmarkProfile profile = BenchmarkProfile::standard);

} // namespace kgs
