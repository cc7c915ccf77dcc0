#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <omp.h>

#include <CLI11.hpp>

#include "bkern/error.hpp"
#include "bkern/pipelines.hpp"

namespace fs = std::filesystem;
using namespace bkern;

namespace {

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorKind::Usage, "cannot write " + path.string());
  os << text;
}

void emit(const VerificationReport& r, const std::string& out, const std::string& format) {
  write_summary(std::cout, r);
  if (out.empty()) return;
  fs::path dir(out);
  fs::create_directories(dir);
  std::ostringstream checks;
  write_checks_csv(checks, r);
  if (format == "json") write_file(dir / "report.json", report_json(r));
  else write_file(dir / "report.csv", checks.str());
  write_file(dir / "checks.csv", checks.str());
  for (const auto& a : r.artifacts) write_file(dir / a.filename, a.content);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bergman kernel lower bounds on model Riemann surfaces: verification pipelines"};
  app.require_subcommand(1);
  std::string config_path, out, format = "json";
  int resolution = 0, m_max = 8;
  bool override_boundary = false;
  app.add_option("--config", config_path, "configuration file")->check(CLI::ExistingFile);
  app.add_option("--resolution", resolution, "grid resolution (overrides the config)")->check(CLI::Range(16, 1 << 14));
  app.add_option("--m-max", m_max, "largest tensor power for the tian pipeline")->check(CLI::PositiveNumber);
  app.add_option("--out", out, "output directory for reports and data files");
  app.add_option("--format", format, "main report format")->check(CLI::IsMember({"csv", "json"}));
  app.add_flag("--override-seshadri-boundary", override_boundary,
               "allow lambda equal to the Seshadri constant");

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"theorem-a", "K/MA >= 1/(8 pi) under Ric <= omega, L0 >= 2 pi"},
      {"theorem-b", "B >= 1/(16 pi) under |Ric| <= omega/2, L0 >= 2 pi sqrt 2"},
      {"theorem-cd", "volume variants through the extremal envelope"},
      {"tian", "deviation of 2 pi B_{m phi} from 1 for m <= m-max"},
      {"comparison", "i ddbar psi + omega/2 >= 0 margin"},
      {"envelope", "extremal envelope diagnostics"},
      {"report", "every pipeline"},
  };
  for (const auto& [name, help] : commands) app.add_subcommand(name, help)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    Config cfg = config_path.empty() ? Config{} : load_config(config_path);
    if (resolution > 0) cfg.resolution = resolution;
    cfg.override_seshadri_boundary = cfg.override_seshadri_boundary || override_boundary;
    if (cfg.threads > 0) omp_set_num_threads(cfg.threads);

    const std::string cmd = app.get_subcommands().front()->get_name();
    VerificationReport r;
    if (cmd == "theorem-a") r = run_theorem_A(cfg);
    else if (cmd == "theorem-b") r = run_theorem_B(cfg);
    else if (cmd == "theorem-cd") r = run_theorem_CD(cfg);
    else if (cmd == "tian") r = run_tian(cfg, m_max);
    else if (cmd == "comparison") r = run_comparison(cfg);
    else if (cmd == "envelope") r = run_envelope(cfg);
    else r = run_report(cfg, m_max);
    emit(r, out, format);
    return exit_code(r.status());
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
