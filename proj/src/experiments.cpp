#include "kgs/experiments.hpp"

#include "kgs/coefficient_oracle.hpp"
#include "kgs/oracle.hpp"
#include "kgs/snapshot.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <numbers>
#include <ostream>
#include <thread>

namespace kgs {

namespace {

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.5e", v);
  return buf;
}

void say(const Logger& log, const std::string& msg) {
  if (log) log(msg);
}

void write_header(std::ostream& out, const std::string& command, const ExperimentConfig& config) {
  out << "# command = " << command << '\n';
  for (const auto& line : describe_config(config)) out << "# " << line << '\n';
}

double geometric_factor(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double f = v[0] / v[1];
  if (!(f > 1.0)) return 0.0;
  for (std::size_t k = 1; k + 1 < v.size(); ++k) {
    if (std::abs(v[k] / v[k + 1] - f) > 1e-9 * f) return 0.0;
  }
  return f;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  return out;
}

int nearest_node(const Grid& g, double x) {
  const long j = std::lround((x - g.a()) / g.h());
  return static_cast<int>(std::clamp<long>(j, 0, g.size() - 1));
}

std::vector<double> safe_rates(const RealVector& errors, double factor) {
  if (errors.size() < 2 || !(factor > 1.0)) return {};
  for (double e : errors) {
    if (!(e > 0.0)) return std::vector<double>(errors.size() - 1, std::nan(""));
  }
  return observed_orders(errors, factor);
}

} // namespace

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& job) {
  if (count == 0) return;
  const auto workers = static_cast<std::size_t>(std::clamp<long>(threads, 1, static_cast<long>(count)));
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        job(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

InitialData initial_data_for(const ExperimentConfig& config, const Grid& grid) {
  if (config.initial_data == "paper_default") return benchmark_initial_data(grid);
  if (config.initial_data == "narrow_sech") return benchmark_initial_data(grid, BenchmarkProfile::narrow_sech);
  const std::string prefix = "snapshot:";
  if (config.initial_data.rfind(prefix, 0) != 0) {
    throw ConfigError("initial_data must be 'paper_default', 'narrow_sech' or 'snapshot:<path>'");
  }
  const Snapshot snap = load_snapshot(config.initial_data.substr(prefix.size()));
  const Grid& source = snap.state.grid;
  if (!grids_nest(source, grid)) {
    throw SnapshotError("snapshot grid (N = " + std::to_string(source.size()) +
                        ") cannot be restricted to a grid with N = " + std::to_string(grid.size()));
  }
  InitialData d;
  d.psi0 = subsample(std::span<const Complex>(snap.state.psi), source, grid);
  d.phi0 = subsample(std::span<const double>(snap.state.phi), source, grid);
  d.phi1 = subsample(std::span<const double>(snap.state.phi_dot), source, grid);
  const double eps2 = snap.state.eps * snap.state.eps;
  for (double& v : d.phi1) v *= eps2;
  return d;
}

FieldState initial_state_for(const ExperimentConfig& config, const Grid& grid, double eps) {
  const InitialData d = initial_data_for(config, grid);
  return init_state(d.psi0, d.phi0, d.phi1, grid, eps);
}

RealVector ConvergenceTable::psi_errors(std::size_t row) const {
  RealVector v;
  for (const auto& r : records.at(row)) v.push_back(r.err_psi_h2);
  return v;
}

RealVector ConvergenceTable::phi_errors(std::size_t row) const {
  RealVector v;
  for (const auto& r : records.at(row)) v.push_back(r.err_phi_h2);
  return v;
}

RealVector ConvergenceTable::max_psi_errors() const {
  RealVector v(columns.size(), 0.0);
  for (std::size_t i = 0; i < records.size(); ++i) {
    for (std::size_t k = 0; k < columns.size(); ++k) v[k] = std::max(v[k], records[i][k].err_psi_h2);
  }
  return v;
}

RealVector ConvergenceTable::max_phi_errors() const {
  RealVector v(columns.size(), 0.0);
  for (std::size_t i = 0; i < records.size(); ++i) {
    for (std::size_t k = 0; k < columns.size(); ++k) v[k] = std::max(v[k], records[i][k].err_phi_h2);
  }
  return v;
}

ConvergenceTable converge_space(const ExperimentConfig& config, const Logger& log) {
  validate_config(config);
  const Grid ref_grid = make_grid(config.a, config.b, grid_size_for(config.a, config.b, config.h_ref));
  for (double h : config.mesh) {
    const Grid g = make_grid(config.a, config.b, grid_size_for(config.a, config.b, h));
    if (!grids_nest(ref_grid, g)) {
      throw ConfigError("mesh size " + format_number(h) + " is not nested in the reference mesh");
    }
  }
  ConvergenceTable table{"h", config.eps, config.mesh, {}, geometric_factor(config.mesh)};
  table.records.resize(config.eps.size());
  const double tau = config.tau.front();
  std::mutex log_mutex;
  parallel_for(config.eps.size(), config.threads, [&](std::size_t i) {
    const double eps = config.eps[i];
    const FieldState reference = evolve(initial_state_for(config, ref_grid, eps), config.tau_ref,
                                        steps_for(config.t_final, config.tau_ref));
    for (double h : config.mesh) {
      const Grid g = make_grid(config.a, config.b, grid_size_for(config.a, config.b, h));
      const FieldState s = evolve(initial_state_for(config, g, eps), tau, steps_for(config.t_final, tau));
      table.records[i].push_back(measure_errors(s, reference, tau));
    }
    std::lock_guard lock(log_mutex);
    say(log, "converge-space: eps = " + format_number(eps) + " done");
  });
  return table;
}

ConvergenceTable converge_time(const ExperimentConfig& config, const Logger& log) {
  validate_config(config);
  const Grid grid = make_grid(config.a, config.b, grid_size_for(config.a, config.b, config.mesh.front()));
  const Grid ref_grid = make_grid(config.a, config.b, grid_size_for(config.a, config.b, config.h_ref));
  if (!grids_nest(ref_grid, grid)) throw ConfigError("mesh is not nested in the reference mesh");
  ConvergenceTable table{"tau", config.eps, config.tau, {}, geometric_factor(config.tau)};
  table.records.resize(config.eps.size());
  std::mutex log_mutex;
  parallel_for(config.eps.size(), config.threads, [&](std::size_t i) {
    const double eps = config.eps[i];
    const FieldState reference = evolve(initial_state_for(config, ref_grid, eps), config.tau_ref,
                                        steps_for(config.t_final, config.tau_ref));
    const FieldState initial = initial_state_for(config, grid, eps);
    for (double tau : config.tau) {
      const FieldState s = evolve(initial, tau, steps_for(config.t_final, tau));
      table.records[i].push_back(measure_errors(s, reference, tau));
    }
    std::lock_guard lock(log_mutex);
    say(log, "converge-time: eps = " + format_number(eps) + " done");
  });
  return table;
}

void write_convergence_csv(std::ostream& out, const ConvergenceTable& table, const std::string& command,
                           const ExperimentConfig& config) {
  write_header(out, command, config);
  out << "# rate = log(e_prev / e) / log(" << format_number(table.refinement_factor) << ")\n";
  out << "kind,field,eps";
  for (double c : table.columns) out << ',' << table.parameter << '=' << sci(c);
  out << '\n';
  auto row = [&](const std::string& kind, const std::string& field, const std::string& eps, const RealVector& v,
                 bool leading_blank) {
    out << kind << ',' << field << ',' << eps;
    if (leading_blank) out << ',';
    for (double x : v) out << ',' << sci(x);
    out << '\n';
  };
  for (const std::string field : {"psi", "phi"}) {
    for (std::size_t i = 0; i < table.eps.size(); ++i) {
      const RealVector e = field == "psi" ? table.psi_errors(i) : table.phi_errors(i);
      row("error", field, sci(table.eps[i]), e, false);
      const auto rates = safe_rates(e, table.refinement_factor);
      if (!rates.empty()) row("rate", field, sci(table.eps[i]), rates, true);
    }
    const RealVector m = field == "psi" ? table.max_psi_errors() : table.max_phi_errors();
    row("max_error", field, "max", m, false);
    const auto rates = safe_rates(m, table.refinement_factor);
    if (!rates.empty()) row("max_rate", field, "max", rates, true);
  }
}

std::size_t limit_study_memory_bytes(int n) {
  // stepper scratch, coefficient table, full state and two limit states
  constexpr std::size_t per_node = 17 * 16 + sizeof(ModeCoefficients) + 4 * 8 + 16 + 2 * (16 + 16) + 8 * 16;
  return static_cast<std::size_t>(n) * per_node;
}

LimitStudy limit_study(const ExperimentConfig& config, const Logger& log) {
  validate_config(config);
  const int n = grid_size_for(config.a, config.b, config.mesh.front());
  const double tau = config.tau.front();
  const std::size_t concurrent = std::min<std::size_t>(static_cast<std::size_t>(config.threads), config.eps.size());
  const double needed_mb = static_cast<double>(limit_study_memory_bytes(n) * concurrent) / (1024.0 * 1024.0);
  if (needed_mb > config.max_memory_mb) {
    throw std::runtime_error("limit-study needs about " + sci(needed_mb) + " MB for N = " + std::to_string(n) +
                             " with " + std::to_string(concurrent) + " thread(s), above max_memory_mb = " +
                             format_number(config.max_memory_mb));
  }
  const Grid grid = make_grid(config.a, config.b, n);
  const long total = steps_for(config.t_final, tau);
  std::vector<long> sample_steps;
  if (config.samples == 1 || total == 0) {
    sample_steps.push_back(total);
  } else {
    for (int k = 0; k < config.samples; ++k) {
      const long s = std::lround(static_cast<double>(k) * total / (config.samples - 1));
      if (sample_steps.empty() || s != sample_steps.back()) sample_steps.push_back(s);
    }
  }

  LimitStudy study;
  study.eps = config.eps;
  for (long s : sample_steps) study.times.push_back(static_cast<double>(s) * tau);
  study.eta.assign(config.eps.size(), std::vector<EtaErrors>(sample_steps.size()));
  std::mutex log_mutex;
  parallel_for(config.eps.size(), config.threads, [&](std::size_t i) {
    const double eps = config.eps[i];
    const InitialData d = initial_data_for(config, grid);
    const LimitState sw0 = limit_initial_state(LimitModel::wave_operator, d.psi0, d.phi0, d.phi1, grid, eps);
    const LimitState s0 = limit_initial_state(LimitModel::schrodinger, d.psi0, d.phi0, d.phi1, grid, eps);
    std::size_t next = 0;
    auto record = [&](long step, const FieldState& state) {
      while (next < sample_steps.size() && sample_steps[next] == step) {
        study.eta[i][next] = eta_errors(state, limit_solution(sw0, state.t), limit_solution(s0, state.t));
        ++next;
      }
    };
    const FieldState initial = init_state(d.psi0, d.phi0, d.phi1, grid, eps);
    record(0, initial);
    evolve(initial, tau, total, record);
    std::lock_guard lock(log_mutex);
    say(log, "limit-study: eps = " + format_number(eps) + " done");
  });
  return study;
}

void write_limit_csv(std::ostream& out, const LimitStudy& study, const ExperimentConfig& config) {
  write_header(out, "limit-study", config);
  out << "t,eps,eta_sw,eta_s\n";
  for (std::size_t i = 0; i < study.eps.size(); ++i) {
    for (std::size_t k = 0; k < study.times.size(); ++k) {
      out << sci(study.times[k]) << ',' << sci(study.eps[i]) << ',' << sci(study.eta[i][k].eta_sw) << ','
          << sci(study.eta[i][k].eta_s) << '\n';
    }
  }
}

void write_limit_ratio_csv(std::ostream& out, const LimitStudy& study, const ExperimentConfig& config) {
  write_header(out, "limit-study", config);
  out << "# ratio = eta(eps_from) / eta(eps_to) at t = " << sci(study.times.back()) << '\n';
  out << "eps_from,eps_to,ratio_sw,ratio_s\n";
  for (std::size_t i = 0; i + 1 < study.eps.size(); ++i) {
    const auto& a = study.eta[i].back();
    const auto& b = study.eta[i + 1].back();
    out << sci(study.eps[i]) << ',' << sci(study.eps[i + 1]) << ',' << sci(a.eta_sw / b.eta_sw) << ','
        << sci(a.eta_s / b.eta_s) << '\n';
  }
}

std::vector<std::string> run_solve(const ExperimentConfig& config, const Logger& log) {
  validate_config(config);
  namespace fs = std::filesystem;
  fs::create_directories(config.output_dir);
  const Grid grid = make_grid(config.a, config.b, grid_size_for(config.a, config.b, config.mesh.front()));
  const double tau = config.tau.front();
  const long total = steps_for(config.t_final, tau);
  const int probe = nearest_node(grid, 0.0);
  std::vector<std::vector<std::string>> written(config.eps.size());

  parallel_for(config.eps.size(), config.threads, [&](std::size_t i) {
    const double eps = config.eps[i];
    const std::string stem = (fs::path(config.output_dir) / ("solve_eps" + std::to_string(i))).string();
    auto& files = written[i];
    std::ofstream csv = open_output(stem + ".csv");
    files.push_back(stem + ".csv");
    write_header(csv, "solve", config);
    csv << "# run eps = " << format_number(eps) << ", N = " << grid.size() << ", probe x = "
        << format_number(grid.node(probe)) << '\n';
    csv << "step,t,mass,energy,phi_x0\n";
    auto diag = [&](long step, const FieldState& s) {
      csv << step << ',' << sci(s.t) << ',' << sci(mass(s.psi, grid)) << ',' << sci(energy(s)) << ','
          << sci(s.phi[probe]) << '\n';
    };
    auto snapshot = [&](long step, const FieldState& s) {
      const std::string path = stem + "_step" + std::to_string(step) + ".kgs";
      save_snapshot(path, s, tau);
      files.push_back(path);
    };
    const FieldState initial = initial_state_for(config, grid, eps);
    diag(0, initial);
    snapshot(0, initial);
    evolve(initial, tau, total, [&](long step, const FieldState& s) {
      if (step % config.diag_every == 0 || step == total) diag(step, s);
      if ((config.snapshot_every > 0 && step % config.snapshot_every == 0) || step == total) snapshot(step, s);
    });
    if (!csv) throw std::runtime_error("write to '" + stem + ".csv' failed");
  });
  std::vector<std::string> all;
  for (std::size_t i = 0; i < written.size(); ++i) {
    say(log, "solve: eps = " + format_number(config.eps[i]) + " wrote " + std::to_string(written[i].size()) +
                 " files");
    all.insert(all.end(), written[i].begin(), written[i].end());
  }
  return all;
}

FieldState random_state(const Grid& grid, double eps, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const auto n = static_cast<std::size_t>(grid.size());
  FieldState s{grid, eps, 0.0, RealVector(n), RealVector(n), ComplexVector(n)};
  const double eps2 = eps * eps;
  for (std::size_t j = 0; j < n; ++j) {
    s.phi[j] = u(rng);
    s.phi_dot[j] = u(rng) / eps2;
    const double re = u(rng);
    s.psi[j] = Complex(re, u(rng));
  }
  return s;
}

double scheme_equivalence_defect(const FieldState& state, const CoefficientTable& table) {
  const FieldState stepped = step(state, table);
  const auto [phi, phi_dot] = step_phi_closed_form(state, table);
  auto relative = [](const RealVector& x, const RealVector& y) {
    double diff = 0.0;
    double scale = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      diff = std::max(diff, std::abs(x[j] - y[j]));
      scale = std::max(scale, std::abs(y[j]));
    }
    return scale > 0.0 ? diff / scale : diff;
  };
  return std::max(relative(stepped.phi, phi), relative(stepped.phi_dot, phi_dot));
}

std::vector<double> coefficient_sweep_modes(double eps) {
  return {0.0, std::numbers::pi / 32.0, 1.0, 4.0, (1.0 - 1e-6) / eps, (1.0 + 1e-6) / eps};
}

ValidationReport run_validation(const ExperimentConfig& config, const Logger& log) {
  ValidationReport report;
  for (double eps : {1.0, 0.5, 0.25, 0.125}) {
    for (double mu : coefficient_sweep_modes(eps)) {
      for (double tau : {0.2, 0.05, 0.0125}) {
        const auto f = mode_frequencies(eps, mu);
        const double dev = max_abs_deviation(closed_form_coefficients(f, tau), coeff_quadrature_oracle(f, tau));
        report.coefficient_max_deviation = std::max(report.coefficient_max_deviation, dev);
        ++report.coefficient_cases;
      }
    }
  }
  say(log, "validate: coefficient sweep, " + std::to_string(report.coefficient_cases) +
               " cases, max deviation " + sci(report.coefficient_max_deviation));

  std::mt19937_64 rng(config.seed);
  const Grid grid = make_grid(-32.0, 32.0, 64);
  for (double eps : config.eps) {
    for (double tau : config.tau) {
      const CoefficientTable table(grid, eps, tau);
      for (int k = 0; k < config.samples; ++k) {
        const double d = scheme_equivalence_defect(random_state(grid, eps, rng), table);
        report.equivalence_max_defect = std::max(report.equivalence_max_defect, d);
        ++report.equivalence_cases;
      }
    }
  }
  say(log, "validate: scheme equivalence, " + std::to_string(report.equivalence_cases) +
               " random states, max relative defect " + sci(report.equivalence_max_defect));
  report.passed = report.coefficient_max_deviation <= coefficient_tolerance &&
                  report.equivalence_max_defect <= equivalence_tolerance;
  return report;
}

} // namespace kgs
