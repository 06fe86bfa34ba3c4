#include "kgs/config.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace kgs {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

double parse_literal(const std::string& text) {
  const std::string s = trim(text);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ConfigError("not a number: '" + text + "'");
  }
  if (used != s.size()) throw ConfigError("not a number: '" + text + "'");
  return v;
}

double parse_power(const std::string& text) {
  const auto caret = text.find('^');
  if (caret == std::string::npos) return parse_literal(text);
  return std::pow(parse_literal(text.substr(0, caret)), parse_literal(text.substr(caret + 1)));
}

bool parse_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("not a boolean: '" + v + "'");
}

long parse_count(const std::string& v) {
  const double x = parse_number(v);
  if (x != std::floor(x) || x < 0 || x > 1e15) throw ConfigError("not a nonnegative integer: '" + v + "'");
  return static_cast<long>(x);
}

std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + format_number(v[i]);
  return out;
}

std::vector<double> geometric(double first, double factor, int count) {
  std::vector<double> v;
  for (int k = 0; k < count; ++k) v.push_back(first / std::pow(factor, k));
  return v;
}

} // namespace

std::string format_number(double v) {
  // shortest %g form that reads back exactly
  char buf[32];
  for (int precision = 6; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

double parse_number(const std::string& text) {
  const std::string s = trim(text);
  if (s.empty()) throw ConfigError("empty number");
  const auto slash = s.find('/');
  if (slash == std::string::npos) return parse_power(s);
  const double den = parse_power(s.substr(slash + 1));
  if (den == 0.0) throw ConfigError("division by zero in '" + text + "'");
  return parse_power(s.substr(0, slash)) / den;
}

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number(item));
  if (out.empty()) throw ConfigError("empty list");
  return out;
}

ExperimentConfig default_config(const std::string& command, bool full) {
  ExperimentConfig c;
  c.full = full;
  if (command == "solve") {
    c.eps = {0.5};
    c.diag_every = 10;
  } else if (command == "converge-space") {
    c.mesh = {1.0, 0.5, 0.25, 0.125, 1.0 / 16.0};
    c.tau = {full ? 5e-6 : 2e-5};
    c.tau_ref = c.tau[0];
    c.eps = full ? std::vector<double>{1, 0.5, 0.25, 0.125, 1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128, 1.0 / 256,
                                       1.0 / 512, 1.0 / 2048, 1.0 / 8192}
                 : std::vector<double>{1.0, 0.25, 1.0 / 64.0};
  } else if (command == "converge-time") {
    c.mesh = {1.0 / 16.0};
    c.h_ref = 1.0 / 16.0;
    c.tau = geometric(0.2, 4.0, full ? 7 : 6);
    c.eps = geometric(1.0, 2.0, 10);
    if (full) {
      c.eps.push_back(1.0 / 2048.0);
      c.eps.push_back(1.0 / 8192.0);
    }
  } else if (command == "limit-study") {
    c.a = -512.0;
    c.b = 512.0;
    c.mesh = {1.0 / 16.0};
    c.tau = {1e-4};
    c.eps = full ? std::vector<double>{1.0, 0.25, 0.125, 1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128}
                 : std::vector<double>{1.0, 0.125, 1.0 / 16, 1.0 / 32};
    c.max_memory_mb = 2048.0;
  } else if (command == "validate") {
    c.eps = {1.0, 0.25, 1.0 / 16.0};
    c.tau = {0.1, 0.01};
    c.samples = 100;
  } else {
    throw ConfigError("unknown command '" + command + "'");
  }
  return c;
}

void apply_setting(ExperimentConfig& c, const std::string& key, const std::string& value) {
  static const std::map<std::string, std::function<void(ExperimentConfig&, const std::string&)>> setters{
      {"a", [](auto& c, const auto& v) { c.a = parse_number(v); }},
      {"b", [](auto& c, const auto& v) { c.b = parse_number(v); }},
      {"mesh", [](auto& c, const auto& v) { c.mesh = parse_number_list(v); }},
      {"tau", [](auto& c, const auto& v) { c.tau = parse_number_list(v); }},
      {"eps", [](auto& c, const auto& v) { c.eps = parse_number_list(v); }},
      {"t_final", [](auto& c, const auto& v) { c.t_final = parse_number(v); }},
      {"initial_data", [](auto& c, const auto& v) { c.initial_data = v; }},
      {"h_ref", [](auto& c, const auto& v) { c.h_ref = parse_number(v); }},
      {"tau_ref", [](auto& c, const auto& v) { c.tau_ref = parse_number(v); }},
      {"output_dir", [](auto& c, const auto& v) { c.output_dir = v; }},
      {"threads", [](auto& c, const auto& v) { c.threads = static_cast<int>(parse_count(v)); }},
      {"seed", [](auto& c, const auto& v) { c.seed = static_cast<std::uint64_t>(parse_count(v)); }},
      {"snapshot_every", [](auto& c, const auto& v) { c.snapshot_every = parse_count(v); }},
      {"diag_every", [](auto& c, const auto& v) { c.diag_every = parse_count(v); }},
      {"samples", [](auto& c, const auto& v) { c.samples = static_cast<int>(parse_count(v)); }},
      {"max_memory_mb", [](auto& c, const auto& v) { c.max_memory_mb = parse_number(v); }},
      {"full", [](auto& c, const auto& v) { c.full = parse_bool(v); }},
  };
  const auto it = setters.find(key);
  if (it == setters.end()) throw ConfigError("unknown config key '" + key + "'");
  try {
    it->second(c, trim(value));
  } catch (const ConfigError& e) {
    throw ConfigError("config key '" + key + "': " + e.what());
  }
}

ExperimentConfig parse_config(std::istream& in, ExperimentConfig base) {
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    try {
      apply_setting(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return base;
}

ExperimentConfig load_config(const std::string& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in, std::move(base));
}

int grid_size_for(double a, double b, double h) {
  if (!(b > a)) throw ConfigError("domain must satisfy b > a");
  if (!(h > 0.0)) throw ConfigError("mesh size must be positive");
  const double n = (b - a) / h;
  const double rounded = std::round(n);
  if (std::abs(n - rounded) > 1e-9 * n || rounded < 4 || static_cast<long>(rounded) % 2 != 0 || rounded > 1 << 26) {
    throw ConfigError("mesh size " + format_number(h) + " does not give an even grid size >= 4 on [" +
                      format_number(a) + ", " + format_number(b) + "]");
  }
  return static_cast<int>(rounded);
}

void validate_config(const ExperimentConfig& c) {
  if (c.mesh.empty() || c.tau.empty() || c.eps.empty()) throw ConfigError("mesh, tau and eps lists must be nonempty");
  for (double h : c.mesh) grid_size_for(c.a, c.b, h);
  grid_size_for(c.a, c.b, c.h_ref);
  for (double e : c.eps) {
    if (!(e > 0.0 && e <= 1.0)) throw ConfigError("eps values must lie in (0, 1]");
  }
  auto check_tau = [&](double t) {
    if (!(t > 0.0) || !std::isfinite(t)) throw ConfigError("time steps must be positive");
    const double r = c.t_final / t;
    if (std::abs(r - std::round(r)) > 1e-9 * std::max(1.0, r)) {
      throw ConfigError("t_final is not an integer multiple of tau = " + format_number(t));
    }
  };
  if (!(c.t_final >= 0.0) || !std::isfinite(c.t_final)) throw ConfigError("t_final must be nonnegative");
  for (double t : c.tau) check_tau(t);
  check_tau(c.tau_ref);
  if (c.threads < 1) throw ConfigError("threads must be at least 1");
  if (c.diag_every < 1) throw ConfigError("diag_every must be at least 1");
  if (c.samples < 1) throw ConfigError("samples must be at least 1");
  if (!(c.max_memory_mb > 0.0)) throw ConfigError("max_memory_mb must be positive");
  if (c.initial_data != "paper_default" && c.initial_data != "narrow_sech" &&
      c.initial_data.rfind("snapshot:", 0) != 0) {
    throw ConfigError("initial_data must be 'paper_default', 'narrow_sech' or 'snapshot:<path>'");
  }
}

std::vector<std::string> describe_config(const ExperimentConfig& c) {
  return {
      "a = " + format_number(c.a),
      "b = " + format_number(c.b),
      "mesh = " + join(c.mesh),
      "tau = " + join(c.tau),
      "eps = " + join(c.eps),
      "t_final = " + format_number(c.t_final),
      "initial_data = " + c.initial_data,
      "h_ref = " + format_number(c.h_ref),
      "tau_ref = " + format_number(c.tau_ref),
      "output_dir = " + c.output_dir,
      "threads = " + std::to_string(c.threads),
      "seed = " + std::to_string(c.seed),
      "snapshot_every = " + std::to_string(c.snapshot_every),
      "diag_every = " + std::to_string(c.diag_every),
      "samples = " + std::to_string(c.samples),
      "max_memory_mb = " + format_number(c.max_memory_mb),
      std::string("full = ") + (c.full ? "true" : "false"),
  };
}

} // namespace kgs
