#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace kgs {

class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Settings shared by all experiment commands. Lists hold mesh sizes h (not N)
/// and time steps; the grid size for mesh h is (b - a) / h.
struct ExperimentConfig {
  double a = -32.0;
  double b = 32.0;
  std::vector<double> mesh{1.0 / 16.0};
  std::vector<double> tau{1e-4};
  std::vector<double> eps{1.0};
  double t_final = 1.0;
  /// "paper_default", "narrow_sech" (nucleon profile sech(x^2)) or "snapshot:<path>".
  std::string initial_data = "paper_default";
  double h_ref = 1.0 / 32.0;
  double tau_ref = 5e-6;
  std::string output_dir = ".";
  int threads = 1;
  std::uint64_t seed = 20160101;
  /// Snapshot interval in steps; 0 writes only the initial and final states.
  long snapshot_every = 0;
  long diag_every = 1;
  /// Number of equally spaced output times in the limit study (t = 0 included).
  int samples = 11;
  double max_memory_mb = 2048.0;
  bool full = false;
};

/// Defaults for one command ("solve", "converge-space", "converge-time",
/// "limit-study", "validate"), at desk scale or with the complete sweeps.
ExperimentConfig default_config(const std::string& command, bool full = false);

/// Parses a number written as a decimal literal, a power "2^-9", or a quotient
/// of those ("1/16", "0.2/2^10").
double parse_number(const std::string& text);

/// Comma-separated list of parse_number values.
std::vector<double> parse_number_list(const std::string& text);

/// Applies one key to the config. Unknown keys and malformed values throw ConfigError.
void apply_setting(ExperimentConfig& config, const std::string& key, const std::string& value);

/// Reads "key = value" lines ('#' starts a comment) on top of `base`.
ExperimentConfig parse_config(std::istream& in, ExperimentConfig base);
ExperimentConfig load_config(const std::string& path, ExperimentConfig base);

/// Checks ranges and list shapes; throws ConfigError.
void validate_config(const ExperimentConfig& config);

/// Grid size for mesh size h on [a, b]; throws if (b - a) / h is not an even integer >= 4.
int grid_size_for(double a, double b, double h);

/// "key = value" lines describing the config, in a fixed order.
std::vector<std::string> describe_config(const ExperimentConfig& config);

std::string format_number(double v);

} // namespace kgs
