// Command-line front end for the experiment harness.

#include "kgs/experiments.hpp"
#include "kgs/snapshot.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

struct Overrides {
  std::string config_path;
  std::string eps, tau, mesh, t_final, out;
  int threads = 0;
  long long seed = -1;
  bool full = false;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config_path, "key = value config file")->check(CLI::ExistingFile);
  cmd->add_option("--eps", o.eps, "comma-separated eps list, e.g. 1,1/2,2^-4");
  cmd->add_option("--tau", o.tau, "comma-separated time steps");
  cmd->add_option("--mesh", o.mesh, "comma-separated mesh sizes h");
  cmd->add_option("--t-final", o.t_final, "final time");
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--threads", o.threads, "worker threads for eps sweeps")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", o.seed, "seed for randomized validation")->check(CLI::NonNegativeNumber);
  cmd->add_flag("--full", o.full, "complete sweeps instead of desk-scale defaults");
}

kgs::ExperimentConfig resolve(const std::string& command, const Overrides& o) {
  kgs::ExperimentConfig c = kgs::default_config(command, o.full);
  if (!o.config_path.empty()) c = kgs::load_config(o.config_path, c);
  if (!o.eps.empty()) kgs::apply_setting(c, "eps", o.eps);
  if (!o.tau.empty()) kgs::apply_setting(c, "tau", o.tau);
  if (!o.mesh.empty()) kgs::apply_setting(c, "mesh", o.mesh);
  if (!o.t_final.empty()) kgs::apply_setting(c, "t_final", o.t_final);
  if (!o.out.empty()) c.output_dir = o.out;
  if (o.threads > 0) c.threads = o.threads;
  if (o.seed >= 0) c.seed = static_cast<std::uint64_t>(o.seed);
  if (o.full) c.full = true;
  kgs::validate_config(c);
  return c;
}

std::string output_path(const kgs::ExperimentConfig& c, const std::string& name) {
  std::filesystem::create_directories(c.output_dir);
  return (std::filesystem::path(c.output_dir) / name).string();
}

void write_file(const std::string& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  body(out);
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
  std::cout << "wrote " << path << '\n';
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Klein-Gordon-Schrodinger multiscale spectral solver"};
  app.require_subcommand(1);
  Overrides o;
  const std::vector<std::pair<std::string, std::string>> commands{
      {"solve", "evolve the configured data, writing diagnostics CSV and snapshots"},
      {"converge-space", "spatial error table against a fine reference"},
      {"converge-time", "temporal error table with rates and the max-over-eps row"},
      {"limit-study", "distance to the two limit models as eps decreases"},
      {"validate", "coefficient oracle sweep and scheme equivalence on random states"},
  };
  for (const auto& [name, help] : commands) add_common(app.add_subcommand(name, help), o);

  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();
  auto log = [](const std::string& msg) { std::cerr << msg << '\n'; };

  try {
    const kgs::ExperimentConfig c = resolve(command, o);
    if (command == "solve") {
      for (const auto& path : kgs::run_solve(c, log)) std::cout << "wrote " << path << '\n';
    } else if (command == "converge-space") {
      const auto table = kgs::converge_space(c, log);
      write_file(output_path(c, "converge_space.csv"),
                 [&](std::ostream& out) { kgs::write_convergence_csv(out, table, command, c); });
    } else if (command == "converge-time") {
      const auto table = kgs::converge_time(c, log);
      write_file(output_path(c, "converge_time.csv"),
                 [&](std::ostream& out) { kgs::write_convergence_csv(out, table, command, c); });
    } else if (command == "limit-study") {
      const auto study = kgs::limit_study(c, log);
      write_file(output_path(c, "limit_study.csv"), [&](std::ostream& out) { kgs::write_limit_csv(out, study, c); });
      write_file(output_path(c, "limit_ratios.csv"),
                 [&](std::ostream& out) { kgs::write_limit_ratio_csv(out, study, c); });
    } else {
      const auto report = kgs::run_validation(c, log);
      std::cout << (report.passed ? "validation passed" : "validation FAILED") << '\n';
      return report.passed ? 0 : 1;
    }
  } catch (const kgs::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const kgs::SolverError& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
