#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <sys/wait.h>

#include <json.hpp>

#include "bkern/config.hpp"
#include "bkern/error.hpp"
#include "bkern/pipelines.hpp"
#include "bkern/report.hpp"

using namespace bkern;
namespace fs = std::filesystem;

namespace {

std::optional<ErrorKind> kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return std::nullopt;
}

Config from_text(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in, "test");
}

int run_cli(const std::string& args) {
  std::string cmd = std::string(BKERN_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string config_file(const std::string& name) { return std::string(BKERN_SOURCE_DIR) + "/configs/" + name; }

Check make_check(const std::string& name, CheckRole role, bool pass) {
  Check c;
  c.name = name;
  c.role = role;
  c.pass = pass;
  return c;
}

}  // namespace

TEST_CASE("config parsing") {
  auto cfg = from_text(R"(
# comment
[surface]
kind = torus
lattice = rect 3 2.5
degree = 5
point = 0.2 -0.1   ; trailing comment
resolution = 96
[solver]
lambda = 1.5
override_seshadri_boundary = true
[tolerances]
flow = 0.03
)");
  CHECK(cfg.kind == "torus");
  CHECK(cfg.degree == 5.0);
  CHECK(cfg.point == cplx(0.2, -0.1));
  CHECK(cfg.resolution == 96);
  CHECK(cfg.lambda == 1.5);
  CHECK(cfg.override_seshadri_boundary);
  CHECK(cfg.tol_flow == 0.03);
  CHECK(cfg.tol_kernel == 0.005);
  auto s = cfg.surface();
  CHECK(!s.is_projective_line());
  CHECK(std::abs(s.omega1()) == doctest::Approx(3.0));
  CHECK(cfg.echo().at("surface.kind") == "torus");

  auto p1 = from_text("[surface]\nkind = p1\nc = 8\nperturbation = 0.2*exp(-r2)\n");
  CHECK(p1.surface().perturbed());

  for (const char* bad : {"[surface]\nspeed = 3\n", "[nowhere]\n", "[surface]\nc = abc\n",
                          "[surface]\nlattice = hexagonal\n", "c = 2\n", "[surface]\nresolution = 12x\n"}) {
    CHECK(kind_of([&] { from_text(bad); }) == ErrorKind::Parse);
  }
  CHECK(kind_of([] { load_config("/nonexistent/file.ini"); }).has_value());
  auto shipped = load_config(config_file("p1_c8.ini"));
  CHECK(shipped.c == 8.0);
}

TEST_CASE("report status and exit codes") {
  VerificationReport r;
  r.pipeline = "demo";
  CHECK(r.status() == Status::Pass);
  r.add(make_check("w", CheckRole::Warning, false));
  CHECK(r.status() == Status::Pass);
  r.add(make_check("h", CheckRole::Hypothesis, false));
  CHECK(r.status() == Status::Skip);
  r.add(make_check("b", CheckRole::Bound, false));
  CHECK(r.status() == Status::Fail);
  CHECK(exit_code(Status::Pass) == 0);
  CHECK(exit_code(Status::Fail) == 1);
  CHECK(exit_code(Status::Skip) == 2);

  VerificationReport outer;
  outer.pipeline = "report";
  outer.merge(r);
  CHECK(outer.checks.size() == 3);
  CHECK(outer.checks[0].name == "demo/w");

  std::ostringstream csv;
  write_checks_csv(csv, r);
  CHECK(csv.str().rfind("name,role,value,target,relation,tolerance,pass,anchor,note", 0) == 0);
  std::ostringstream summary;
  write_summary(summary, r);
  CHECK(summary.str().find("FAIL") != std::string::npos);
  CHECK(make_run_id("x") != make_run_id("x"));
}

TEST_CASE("reports are deterministic apart from run id and timing") {
  Config cfg;
  cfg.resolution = 128;
  auto strip = [](const VerificationReport& r) {
    auto j = nlohmann::json::parse(report_json(r));
    CHECK(j.contains("run_id"));
    CHECK(j.contains("elapsed_seconds"));
    j.erase("run_id");
    j.erase("elapsed_seconds");
    return j.dump();
  };
  auto a = run_theorem_A(cfg), b = run_theorem_A(cfg);
  CHECK(a.status() == Status::Pass);
  CHECK(strip(a) == strip(b));
}

TEST_CASE("hypothesis failures skip") {
  auto c2 = load_config(config_file("p1_c2.ini"));
  c2.resolution = 128;
  CHECK(run_theorem_CD(c2).status() == Status::Skip);
  CHECK(run_theorem_B(c2).status() == Status::Skip);
  CHECK(run_envelope(c2).status() == Status::Skip);
  c2.override_seshadri_boundary = true;
  CHECK(run_envelope(c2).status() != Status::Skip);
}

TEST_CASE("Tian pipeline is fast for small m") {
  auto cfg = load_config(config_file("p1_c2.ini"));
  auto t0 = std::chrono::steady_clock::now();
  auto r = run_tian(cfg, 4);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CHECK(secs < 60.0);
  CHECK(r.status() == Status::Pass);
  bool has_table = false;
  for (const auto& a : r.artifacts) has_table = has_table || a.filename == "tian.csv";
  CHECK(has_table);
  CHECK(kind_of([&] { run_tian(cfg, 3); }) == ErrorKind::Usage);
}

TEST_CASE("command line") {
  fs::path out = fs::temp_directory_path() / "bkern_cli_test";
  fs::remove_all(out);
  std::string c2 = config_file("p1_c2.ini");
  CHECK(run_cli("theorem-a --config " + c2 + " --resolution 128 --out " + out.string()) == 0);
  CHECK(fs::exists(out / "report.json"));
  CHECK(fs::exists(out / "checks.csv"));
  std::ifstream in(out / "report.json");
  auto j = nlohmann::json::parse(in);
  CHECK(j["pipeline"] == "theorem-a");

  CHECK(run_cli("theorem-cd --config " + c2 + " --resolution 128") == 2);
  CHECK(run_cli("theorem-b --config " + c2 + " --resolution 128") == 2);
  CHECK(run_cli("tian --config " + c2 + " --m-max 4 --format csv --out " + out.string()) == 0);
  CHECK(fs::exists(out / "report.csv"));
  CHECK(fs::exists(out / "tian.csv"));
  CHECK(run_cli("envelope --config " + c2 + " --resolution 128 --override-seshadri-boundary") == 0);

  CHECK(run_cli("") != 0);
  CHECK(run_cli("no-such-command") != 0);
  CHECK(run_cli("theorem-a --resolution 4") != 0);
  CHECK(run_cli("theorem-a --format xml") != 0);
  fs::path bad = out / "bad.ini";
  std::ofstream(bad) << "[surface]\nspeed = 3\n";
  CHECK(run_cli("theorem-a --config " + bad.string()) == 1);
  fs::remove_all(out);
}
