#include "kgs/experiments.hpp"
#include "kgs/snapshot.hpp"
#include "support/test_support.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

using namespace kgs;
using namespace kgs::testing;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() / ("kgs_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

FieldState sample_state(int n, double eps, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  FieldState s = random_state(make_grid(-32, 32, n), eps, rng);
  s.t = 0.375;
  return s;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

} // namespace

TEST_SUITE("experiments") {

TEST_CASE("numbers in config files") {
  CHECK(parse_number("1/16") == 0.0625);
  CHECK(parse_number("2^-9") == std::ldexp(1.0, -9));
  CHECK(parse_number("0.2/2^10") == 0.2 / 1024);
  CHECK(parse_number(" 5e-6 ") == 5e-6);
  CHECK(parse_number("-32") == -32.0);
  CHECK_THROWS_AS(parse_number("abc"), ConfigError);
  CHECK_THROWS_AS(parse_number("1/0"), ConfigError);
  CHECK_THROWS_AS(parse_number(""), ConfigError);
  CHECK(parse_number_list("1, 1/4,2^-6") == std::vector<double>{1.0, 0.25, 1.0 / 64});
}

TEST_CASE("config parsing") {
  std::istringstream in("# comment\n"
                        "eps = 1, 1/2  # trailing\n"
                        "\n"
                        "tau = 0.2/2^4\n"
                        "t_final = 0.5\n"
                        "threads = 3\n"
                        "full = true\n");
  const auto c = parse_config(in, ExperimentConfig{});
  CHECK(c.eps == std::vector<double>{1.0, 0.5});
  CHECK(c.tau == std::vector<double>{0.0125});
  CHECK(c.t_final == 0.5);
  CHECK(c.threads == 3);
  CHECK(c.full);
  CHECK(c.a == -32.0);
}

TEST_CASE("config errors name the line") {
  std::istringstream unknown("eps = 1\nbogus = 2\n");
  try {
    parse_config(unknown, ExperimentConfig{});
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    CHECK(std::string(e.what()).find("bogus") != std::string::npos);
  }
  std::istringstream no_equals("eps 1\n");
  CHECK_THROWS_AS(parse_config(no_equals, ExperimentConfig{}), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/kgs.cfg", ExperimentConfig{}), ConfigError);
}

TEST_CASE("config validation") {
  auto c = default_config("converge-time");
  CHECK_NOTHROW(validate_config(c));
  c.eps = {1.5};
  CHECK_THROWS_AS(validate_config(c), ConfigError);
  c = default_config("solve");
  c.mesh = {3.0};
  CHECK_THROWS_AS(validate_config(c), ConfigError);
  c = default_config("solve");
  c.tau = {};
  CHECK_THROWS_AS(validate_config(c), ConfigError);
  CHECK(grid_size_for(-32, 32, 1.0 / 16) == 1024);
  CHECK_THROWS_AS(grid_size_for(-32, 32, 0.3), ConfigError);
  CHECK_THROWS_AS(default_config("nonsense"), ConfigError);
}

TEST_CASE("config description reads back") {
  const auto c = default_config("converge-space");
  std::ostringstream text;
  for (const auto& line : describe_config(c)) text << line << '\n';
  std::istringstream in(text.str());
  const auto back = parse_config(in, ExperimentConfig{});
  CHECK(back.mesh == c.mesh);
  CHECK(back.eps == c.eps);
  CHECK(back.tau == c.tau);
  CHECK(back.h_ref == c.h_ref);
  CHECK(back.seed == c.seed);
  CHECK(format_number(0.05) == "0.05");
  CHECK(parse_number(format_number(0.1 / 3)) == 0.1 / 3);
}

TEST_CASE("snapshot round trip is bit exact") {
  TempDir dir;
  const auto s = sample_state(32, 0.25, 71);
  const auto path = (dir.path / "s.kgs").string();
  save_snapshot(path, s, 0.125);
  const auto back = load_snapshot(path);
  CHECK(back.state.grid == s.grid);
  CHECK(back.state.eps == s.eps);
  CHECK(back.state.t == s.t);
  CHECK(back.tau == 0.125);
  CHECK(back.scheme == default_scheme_tag);
  CHECK(back.state.phi == s.phi);
  CHECK(back.state.phi_dot == s.phi_dot);
  CHECK(back.state.psi == s.psi);
  CHECK(load_snapshot(path, s.grid).state.psi == s.psi);
}

TEST_CASE("snapshot corruption is detected") {
  const auto s = sample_state(16, 0.5, 72);
  const auto bytes = encode_snapshot(s, 0.1);

  auto flipped = bytes;
  flipped[bytes.size() - 20] ^= 0x01;
  CHECK_THROWS_WITH_AS(decode_snapshot(flipped), doctest::Contains("checksum"), SnapshotError);

  CHECK_THROWS_WITH_AS(decode_snapshot(bytes.substr(0, bytes.size() - 8)), doctest::Contains("truncated"),
                       SnapshotError);
  CHECK_THROWS_AS(decode_snapshot(bytes.substr(0, 10)), SnapshotError);

  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  CHECK_THROWS_AS(decode_snapshot(bad_magic), SnapshotError);

  auto bad_version = bytes;
  bad_version[4] = 9;
  CHECK_THROWS_WITH_AS(decode_snapshot(bad_version), doctest::Contains("version"), SnapshotError);

  CHECK_THROWS_AS(decode_snapshot(bytes + "x"), SnapshotError);
  CHECK_THROWS_AS(load_snapshot("/nonexistent/s.kgs"), SnapshotError);
}

TEST_CASE("snapshot grid mismatch is reported") {
  TempDir dir;
  const auto s = sample_state(16, 0.5, 73);
  const auto path = (dir.path / "s.kgs").string();
  save_snapshot(path, s, 0.1);
  CHECK_THROWS_WITH_AS(load_snapshot(path, make_grid(-32, 32, 32)), doctest::Contains("grid"), SnapshotError);
}

TEST_CASE("checksum") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("initial data from a snapshot") {
  TempDir dir;
  const Grid fine = make_grid(-32, 32, 64);
  const Grid coarse = make_grid(-32, 32, 32);
  const auto d = benchmark_initial_data(fine);
  const auto s = init_state(d.psi0, d.phi0, d.phi1, fine, 0.5);
  const auto path = (dir.path / "init.kgs").string();
  save_snapshot(path, s, 0.1);
  ExperimentConfig c;
  c.initial_data = "snapshot:" + path;
  const auto on_fine = initial_data_for(c, fine);
  CHECK(on_fine.psi0 == d.psi0);
  CHECK(max_abs_diff(on_fine.phi1, d.phi1) < 1e-15);
  const auto on_coarse = initial_data_for(c, coarse);
  CHECK(on_coarse.phi0 == benchmark_initial_data(coarse).phi0);
  CHECK_THROWS(initial_data_for(c, make_grid(-32, 32, 128)));
  c.initial_data = "narrow_sech";
  const auto narrow = initial_data_for(c, coarse);
  CHECK(narrow.psi0[coarse.index_of_mode(0)] == Complex(0.5, 0.5));
  CHECK(std::abs(narrow.psi0[coarse.index_of_mode(0) + 1]) < std::abs(benchmark_initial_data(coarse).psi0[coarse.index_of_mode(0) + 1]));
  CHECK(narrow.phi0 == benchmark_initial_data(coarse).phi0);
  c.initial_data = "something_else";
  CHECK_THROWS_AS(initial_data_for(c, fine), ConfigError);
}

TEST_CASE("parallel_for covers every index and rethrows the first failure") {
  std::vector<int> hits(37, 0);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
  CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
  CHECK_THROWS_WITH(parallel_for(10, 3,
                                 [](std::size_t i) {
                                   if (i == 3 || i == 7) throw std::runtime_error("job " + std::to_string(i));
                                 }),
                    "job 3");
}

TEST_CASE("convergence tables do not depend on the thread count") {
  auto c = default_config("converge-time");
  c.mesh = {1.0};
  c.h_ref = 1.0;
  c.eps = {1.0, 0.5, 0.25};
  c.tau = {0.05, 0.0125};
  c.tau_ref = 0.05 / 64;
  c.t_final = 0.1;
  c.threads = 1;
  const auto one = converge_time(c);
  c.threads = 3;
  const auto three = converge_time(c);
  REQUIRE(one.records.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(one.psi_errors(i) == three.psi_errors(i));
    CHECK(one.phi_errors(i) == three.phi_errors(i));
  }
  CHECK(one.refinement_factor == doctest::Approx(4.0));
  CHECK(one.parameter == "tau");
  const auto m = one.max_psi_errors();
  for (std::size_t j = 0; j < 2; ++j) {
    double expect = 0.0;
    for (std::size_t i = 0; i < 3; ++i) expect = std::max(expect, one.psi_errors(i)[j]);
    CHECK(m[j] == expect);
  }
}

TEST_CASE("convergence CSV layout") {
  auto c = default_config("converge-space");
  c.mesh = {2.0, 1.0};
  c.h_ref = 0.5;
  c.tau = {1e-2};
  c.tau_ref = 1e-2;
  c.eps = {1.0};
  c.t_final = 0.02;
  const auto table = converge_space(c);
  std::ostringstream out;
  write_convergence_csv(out, table, "converge-space", c);
  std::vector<std::string> data;
  for (const auto& line : lines_of(out.str())) {
    if (!line.empty() && line[0] != '#') data.push_back(line);
  }
  REQUIRE(data.size() == 9);
  CHECK(data[0].rfind("kind,field,eps,h=", 0) == 0);
  CHECK(data[1].rfind("error,psi,", 0) == 0);
  CHECK(data[2].rfind("rate,psi,", 0) == 0);
  CHECK(data[3].rfind("max_error,psi,max,", 0) == 0);
  CHECK(data[5].rfind("error,phi,", 0) == 0);
  CHECK(std::count(data[1].begin(), data[1].end(), ',') == 4);
  CHECK(std::count(data[2].begin(), data[2].end(), ',') == 4);
}

TEST_CASE("single-column tables have no rate rows") {
  auto c = default_config("converge-space");
  c.mesh = {1.0};
  c.h_ref = 0.5;
  c.tau = {1e-2};
  c.tau_ref = 1e-2;
  c.eps = {0.5};
  c.t_final = 0.02;
  const auto table = converge_space(c);
  std::ostringstream out;
  write_convergence_csv(out, table, "converge-space", c);
  CHECK(out.str().find("rate,") == std::string::npos);
  CHECK(out.str().find("error,psi,") != std::string::npos);
}

TEST_CASE("solve with zero final time writes one snapshot") {
  TempDir dir;
  auto c = default_config("solve");
  c.mesh = {1.0};
  c.eps = {0.5};
  c.t_final = 0.0;
  c.output_dir = dir.path.string();
  const auto files = run_solve(c);
  int snapshots = 0;
  for (const auto& f : files) snapshots += f.ends_with(".kgs") ? 1 : 0;
  CHECK(snapshots == 1);
  std::ifstream csv(dir.path / "solve_eps0.csv");
  std::string all((std::istreambuf_iterator<char>(csv)), {});
  CHECK(all.find("step,t,mass,energy,phi_x0") != std::string::npos);
  const auto snap = load_snapshot((dir.path / "solve_eps0_step0.kgs").string());
  CHECK(snap.state.t == 0.0);
}

TEST_CASE("solve output is reproducible") {
  TempDir dir;
  auto c = default_config("solve");
  c.mesh = {1.0};
  c.eps = {0.5};
  c.tau = {0.01};
  c.t_final = 0.05;
  c.snapshot_every = 2;
  c.output_dir = (dir.path / "a").string();
  fs::create_directories(c.output_dir);
  const auto first = run_solve(c);
  c.output_dir = (dir.path / "b").string();
  fs::create_directories(c.output_dir);
  const auto second = run_solve(c);
  REQUIRE(first.size() == second.size());
  CHECK(first.size() == 1 + 4); // csv, steps 0, 2, 4, 5
  for (std::size_t i = 0; i < first.size(); ++i) {
    std::ifstream x(first[i], std::ios::binary), y(second[i], std::ios::binary);
    std::string bx((std::istreambuf_iterator<char>(x)), {}), by((std::istreambuf_iterator<char>(y)), {});
    if (first[i].ends_with(".csv")) {
      // the header records the output directory
      auto strip = [](const std::string& text) {
        std::string out;
        for (const auto& line : lines_of(text)) {
          if (line.rfind("# output_dir", 0) != 0) out += line + '\n';
        }
        return out;
      };
      bx = strip(bx);
      by = strip(by);
    }
    CHECK(bx == by);
  }
}

TEST_CASE("limit study memory guard") {
  auto c = default_config("limit-study");
  c.max_memory_mb = 1.0;
  CHECK_THROWS_WITH(limit_study(c), doctest::Contains("max_memory_mb"));
  CHECK(limit_study_memory_bytes(2048) == 2 * limit_study_memory_bytes(1024));
}

TEST_CASE("small limit study") {
  auto c = default_config("limit-study");
  c.a = -16;
  c.b = 16;
  c.mesh = {1.0 / 4};
  c.tau = {1e-3};
  c.eps = {0.5, 0.25};
  c.t_final = 0.1;
  c.samples = 3;
  const auto study = limit_study(c);
  REQUIRE(study.times.size() == 3);
  CHECK(study.times.back() == doctest::Approx(0.1));
  CHECK(study.eta[0][0].eta_sw < 1e-14);
  CHECK(study.eta[0][2].eta_sw > 0.0);
  std::ostringstream csv, ratios;
  write_limit_csv(csv, study, c);
  write_limit_ratio_csv(ratios, study, c);
  CHECK(csv.str().find("t,eps,eta_sw,eta_s") != std::string::npos);
  CHECK(ratios.str().find("eps_from,eps_to,ratio_sw,ratio_s") != std::string::npos);
}

TEST_CASE("validation command on a reduced sweep") {
  auto c = default_config("validate");
  c.eps = {0.5};
  c.tau = {0.1};
  c.samples = 5;
  const auto r = run_validation(c);
  CHECK(r.passed);
  // the coefficient sweep is fixed: 4 eps values x 6 modes x 3 steps
  CHECK(r.coefficient_cases == 72);
  CHECK(coefficient_sweep_modes(0.5).size() == 6);
  CHECK(r.equivalence_cases == 5);
  CHECK(r.coefficient_max_deviation <= coefficient_tolerance);
  CHECK(r.equivalence_max_defect <= equivalence_tolerance);
}

} // TEST_SUITE
