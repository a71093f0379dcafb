#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "memheat/config.hpp"
#include "memheat/io.hpp"

using namespace memheat;

namespace {

const char* kMinimal = R"(
[domain]
length = 1.0
n_modes = 2

[kernel]
spec = exp(1,1)
n_nodes = 32

[time]
dt = 1e-3
T = 0.1
)";

const char* kFull = R"(
# full configuration
[domain]
length = 2.0
n_modes = 3
n_collocation = 9
forcing = 0.5 0 -0.1

[kernel]
spec = singular(1.5,0.25)
n_nodes = 64
s_max = 20
gamma_safety = 0.4

[f]
coeffs = 1 0 -1 0

[a]
kind = clamped_affine
base = 1.0
slope = 0.5
m = 0.5
m_tilde = 2.0
l_weight = 1 0 0

[initial]
u0 = 0.7 -0.2 0
phi1 = 0.5:1.0 0.2:0.3
phi3 = -0.1:0.8

[time]
dt = 5e-4
T = 0.25
scheme = imex
sample_stride = 10

[output]
dir = out
prefix = demo
)";

}  // namespace

TEST_CASE("minimal config parses with defaults") {
  const auto parsed = parse_config_text(kMinimal);
  REQUIRE(parsed.ok());
  const RunConfig& c = *parsed.config;
  CHECK(c.length == 1.0);
  CHECK(c.n_modes == 2);
  CHECK(c.kernel_spec == "exp(1,1)");
  CHECK(c.gamma_safety == 0.5);
  CHECK(c.scheme == "imex");
  const auto built = build_problem(c);
  CHECK(built.problem.basis.n_modes() == 2);
  CHECK(built.problem.gamma == doctest::Approx(0.5));  // min(lam1, delta)=1
}

TEST_CASE("full config round trips through the canonical echo") {
  const auto parsed = parse_config_text(kFull);
  REQUIRE(parsed.ok());
  const std::string echo1 = parsed.config->echo();
  const auto reparsed = parse_config_text(echo1);
  REQUIRE(reparsed.ok());
  CHECK(reparsed.config->echo() == echo1);
  CHECK(reparsed.config->hash() == parsed.config->hash());
  // hash is sensitive to content
  auto tweaked = *parsed.config;
  tweaked.dt *= 2.0;
  CHECK(tweaked.hash() != parsed.config->hash());
}

TEST_CASE("errors are aggregated, not fail-fast") {
  const char* bad = R"(
[domain]
length = -1
n_modes = 0

[kernel]
spec = exp(0,1)
n_nodes = 7

[time]
dt = -2
T = 1
typo_key = 3
)";
  const auto parsed = parse_config_text(bad);
  CHECK_FALSE(parsed.ok());
  CHECK(parsed.errors.size() >= 5);
  bool found_unknown = false, found_delta = false;
  for (const auto& e : parsed.errors) {
    if (e.find("typo_key") != std::string::npos) found_unknown = true;
    if (e.find("kernel.spec") != std::string::npos) found_delta = true;
  }
  CHECK(found_unknown);
  CHECK(found_delta);
}

TEST_CASE("unknown sections and duplicate keys rejected") {
  const char* bad = R"(
[domain]
length = 1
length = 2
n_modes = 1

[kernel]
spec = exp(1,1)

[time]
dt = 1e-3
T = 0.1

[mystery]
x = 1
)";
  const auto parsed = parse_config_text(bad);
  CHECK_FALSE(parsed.ok());
  bool dup = false, unknown = false;
  for (const auto& e : parsed.errors) {
    if (e.find("duplicate") != std::string::npos) dup = true;
    if (e.find("[mystery]") != std::string::npos) unknown = true;
  }
  CHECK(dup);
  CHECK(unknown);
}

TEST_CASE("built problem carries the declared pieces") {
  const auto parsed = parse_config_text(kFull);
  REQUIRE(parsed.ok());
  const auto built = build_problem(*parsed.config);
  CHECK(built.problem.kernel.family() == KernelFamily::singular_exp);
  CHECK(built.problem.a.kind() == NonlocalKind::clamped_affine);
  CHECK(built.problem.f.has_value());
  CHECK(built.problem.forcing[0] == doctest::Approx(0.5));
  CHECK(built.u0[0] == doctest::Approx(0.7));
  CHECK(built.phi.exp_terms()[0].size() == 2);
  CHECK(built.phi.exp_terms()[1].empty());
  CHECK(built.phi.exp_terms()[2].size() == 1);
  // gamma respects 0 < gamma < min(m lam1, delta) with the declared safety
  const double lam1 = built.problem.basis.lambda1();
  CHECK(built.problem.gamma ==
        doctest::Approx(0.4 * std::min(0.5 * lam1, 1.5)));
}

TEST_CASE("trajectory and history CSV emission") {
  namespace fs = std::filesystem;
  const auto parsed = parse_config_text(kMinimal);
  REQUIRE(parsed.ok());
  auto built = build_problem(*parsed.config);
  const auto run = solve(built.problem, built.u0, built.phi);
  const std::string dir = fs::temp_directory_path() / "memheat_io_test";
  fs::create_directories(dir);
  write_trajectory_csv(dir + "/traj.csv", run, 10);
  write_history_csv(dir + "/hist.csv", run.final_state.eta);

  std::ifstream in(dir + "/traj.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header ==
        "t,b_1,b_2,u_h,u_v,eta_mu,energy,lv2,dissipation_residual");
  int rows = 0;
  std::string line;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 11);  // 101 records at stride 10, last row kept

  std::ifstream hin(dir + "/hist.csv");
  std::getline(hin, header);
  CHECK(header == "s,omega,e_1,e_2");
  fs::remove_all(dir);
}

TEST_CASE("checkpoint round trip") {
  namespace fs = std::filesystem;
  const auto parsed = parse_config_text(kFull);
  REQUIRE(parsed.ok());
  auto built = build_problem(*parsed.config);
  const auto run = solve(built.problem, built.u0, built.phi);
  const std::string path =
      (fs::temp_directory_path() / "memheat_ckpt_test.bin").string();
  write_checkpoint(path, run.final_state, built.problem.kernel,
                   built.problem.gamma);
  const Checkpoint cp = read_checkpoint(path);
  CHECK(cp.t == run.final_state.t);
  CHECK(cp.gamma == built.problem.gamma);
  CHECK(cp.kernel.spec_string() == built.problem.kernel.spec_string());
  REQUIRE(cp.u.size() == run.final_state.u.size());
  for (std::size_t j = 0; j < cp.u.size(); ++j)
    CHECK(cp.u[j] == run.final_state.u[j]);
  REQUIRE(cp.eta.values.size() == run.final_state.eta.values.size());
  for (std::size_t i = 0; i < cp.eta.values.size(); ++i) {
    CHECK(cp.eta.values[i] == run.final_state.eta.values[i]);
    CHECK(cp.eta.slopes[i] == run.final_state.eta.slopes[i]);
  }
  for (std::size_t i = 0; i < cp.rule->size(); ++i) {
    CHECK(cp.rule->nodes[i] == run.final_state.eta.rule->nodes[i]);
    CHECK(cp.rule->weights[i] == run.final_state.eta.rule->weights[i]);
  }
  fs::remove(path);
  CHECK_THROWS_AS(read_checkpoint(path + ".missing"), std::runtime_error);
}

TEST_CASE("phi_csv sampled history") {
  namespace fs = std::filesystem;
  const std::string path =
      (fs::temp_directory_path() / "memheat_phi_test.csv").string();
  {
    std::ofstream out(path);
    out << "r,b_1,b_2\n";
    for (int k = 0; k <= 100; ++k) {
      const double r = -1.0 + 0.01 * k;
      out << r << "," << std::exp(r) << "," << 0.5 * r << "\n";
    }
  }
  std::string text = std::string(kMinimal) + "\n[initial]\nphi_csv = " + path + "\n";
  const auto parsed = parse_config_text(text);
  REQUIRE(parsed.ok());
  const auto built = build_problem(*parsed.config);
  CHECK(built.phi.has_window());
  CHECK(built.phi.t_window() == doctest::Approx(1.0));
  CHECK(built.phi.eval(0, -0.5) == doctest::Approx(std::exp(-0.5)).epsilon(1e-4));
  CHECK(built.phi.eval(1, -0.25) == doctest::Approx(-0.125).epsilon(1e-10));
  fs::remove(path);
}

TEST_CASE("json report wrapper carries a format version") {
  namespace fs = std::filesystem;
  const std::string path =
      (fs::temp_directory_path() / "memheat_report_test.json").string();
  write_json_report(path, "{\"x\": 1}");
  std::ifstream in(path);
  std::string body((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  CHECK(body.find("\"format_version\": 1") != std::string::npos);
  CHECK(body.find("\"x\": 1") != std::string::npos);
  fs::remove(path);
}
