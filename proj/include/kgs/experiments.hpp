#pragma once

#include "kgs/config.hpp"
#include "kgs/diagnostics.hpp"
#include "kgs/initial_data.hpp"
#include "kgs/limit_models.hpp"

#include <functional>
#include <iosfwd>
#include <random>

namespace kgs {

using Logger = std::function<void(const std::string&)>;

/// Calls job(i) for i = 0 .. count-1 on up to `threads` worker threads. Each
/// job writes only its own result slot, so the outcome does not depend on the
/// thread count. The exception of the lowest failing index is rethrown.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& job);

/// Initial data of the config sampled on `grid`. A snapshot source must live on
/// `grid` or on a nested refinement of it.
InitialData initial_data_for(const ExperimentConfig& config, const Grid& grid);
FieldState initial_state_for(const ExperimentConfig& config, const Grid& grid, double eps);

struct ConvergenceTable {
  std::string parameter;       // "h" or "tau"
  std::vector<double> eps;     // rows
  std::vector<double> columns; // mesh sizes or time steps
  std::vector<std::vector<ErrorRecord>> records;
  /// Ratio between consecutive columns, or 0 if the columns are not geometric.
  double refinement_factor = 0.0;

  RealVector psi_errors(std::size_t row) const;
  RealVector phi_errors(std::size_t row) const;
  RealVector max_psi_errors() const;
  RealVector max_phi_errors() const;
};

/// One reference run per eps at (h_ref, tau_ref), then one run per mesh size at tau[0].
ConvergenceTable converge_space(const ExperimentConfig& config, const Logger& log = {});

/// One reference run per eps at (h_ref, tau_ref), then one run per time step on mesh[0].
ConvergenceTable converge_time(const ExperimentConfig& config, const Logger& log = {});

void write_convergence_csv(std::ostream& out, const ConvergenceTable& table, const std::string& command,
                           const ExperimentConfig& config);

struct LimitStudy {
  std::vector<double> eps;
  std::vector<double> times;
  std::vector<std::vector<EtaErrors>> eta; // [eps][time]
};

/// Rough working-set size of one limit-study run on a grid of n points.
std::size_t limit_study_memory_bytes(int n);

LimitStudy limit_study(const ExperimentConfig& config, const Logger& log = {});

void write_limit_csv(std::ostream& out, const LimitStudy& study, const ExperimentConfig& config);

/// eta(eps_k) / eta(eps_{k+1}) at the final time, per consecutive pair of eps values.
void write_limit_ratio_csv(std::ostream& out, const LimitStudy& study, const ExperimentConfig& config);

/// Evolves every eps of the config on mesh[0] with tau[0], writing
/// solve_eps<k>.csv (step, t, mass, energy, phi at the node nearest x = 0)
/// and snapshots into output_dir. Returns the paths written.
std::vector<std::string> run_solve(const ExperimentConfig& config, const Logger& log = {});

/// Uniform random real/complex node values (meson velocity scaled by 1/eps^2).
FieldState random_state(const Grid& grid, double eps, std::mt19937_64& rng);

/// Largest relative difference between the meson output of the full step and
/// of the closed-form meson update.
double scheme_equivalence_defect(const FieldState& state, const CoefficientTable& table);

struct ValidationReport {
  double coefficient_max_deviation = 0.0;
  double equivalence_max_defect = 0.0;
  int coefficient_cases = 0;
  int equivalence_cases = 0;
  bool passed = false;
};

/// Coefficient-oracle sweep and scheme-equivalence check on random states.
ValidationReport run_validation(const ExperimentConfig& config, const Logger& log = {});

inline constexpr double coefficient_tolerance = 1e-10;
inline constexpr double equivalence_tolerance = 1e-11;

/// The eps-dependent mode set of the coefficient sweep: 0, pi/32, 1, 4 and
/// the two near-resonant values (1 +- 1e-6) / eps.
std::vector<double> coefficient_sweep_modes(double eps);

} // namespace kgs
