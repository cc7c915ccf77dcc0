#include "bkern/report.hpp"

#include <chrono>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

#include <json.hpp>

namespace bkern {

namespace {

const char* role_name(CheckRole r) {
  switch (r) {
    case CheckRole::Hypothesis: return "hypothesis";
    case CheckRole::Bound: return "bound";
    case CheckRole::Warning: return "warning";
  }
  return "?";
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::string num(double x) {
  std::ostringstream os;
  os << std::setprecision(10) << x;
  return os.str();
}

}  // namespace

const char* to_string(Status s) {
  switch (s) {
    case Status::Pass: return "PASS";
    case Status::Fail: return "FAIL";
    case Status::Skip: return "SKIP";
  }
  return "?";
}

Check& VerificationReport::add(Check c) {
  checks.push_back(std::move(c));
  return checks.back();
}

Status VerificationReport::status() const {
  bool hyp_failed = false;
  for (const auto& c : checks) {
    if (c.pass || c.role == CheckRole::Warning) continue;
    if (c.role == CheckRole::Bound) return Status::Fail;
    hyp_failed = true;
  }
  return hyp_failed ? Status::Skip : Status::Pass;
}

void VerificationReport::merge(const VerificationReport& other) {
  for (auto c : other.checks) {
    c.name = other.pipeline + "/" + c.name;
    checks.push_back(std::move(c));
  }
  for (auto a : other.artifacts) {
    a.filename = other.pipeline + "_" + a.filename;
    artifacts.push_back(std::move(a));
  }
}

int exit_code(Status s) {
  switch (s) {
    case Status::Pass: return 0;
    case Status::Skip: return 2;
    case Status::Fail: return 1;
  }
  return 1;
}

std::string report_json(const VerificationReport& r) {
  nlohmann::ordered_json j;
  j["run_id"] = r.run_id;
  j["pipeline"] = r.pipeline;
  j["status"] = to_string(r.status());
  j["elapsed_seconds"] = r.elapsed_seconds;
  j["config"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.config) j["config"][k] = v;
  j["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : r.checks) {
    nlohmann::ordered_json e;
    e["name"] = c.name;
    e["role"] = role_name(c.role);
    e["value"] = c.value;
    if (c.target) e["target"] = *c.target;
    else e["target"] = nullptr;
    e["relation"] = c.relation;
    e["tolerance"] = c.tolerance;
    e["pass"] = c.pass;
    e["anchor"] = c.anchor;
    e["note"] = c.note;
    j["checks"].push_back(std::move(e));
  }
  j["artifacts"] = nlohmann::ordered_json::array();
  for (const auto& a : r.artifacts) j["artifacts"].push_back(a.filename);
  return j.dump(2) + "\n";
}

void write_checks_csv(std::ostream& os, const VerificationReport& r) {
  os << "name,role,value,target,relation,tolerance,pass,anchor,note\n";
  for (const auto& c : r.checks) {
    os << csv_field(c.name) << ',' << role_name(c.role) << ',' << num(c.value) << ','
       << (c.target ? num(*c.target) : "") << ',' << c.relation << ',' << num(c.tolerance) << ','
       << (c.pass ? "true" : "false") << ',' << csv_field(c.anchor) << ',' << csv_field(c.note)
       << '\n';
  }
}

void write_summary(std::ostream& os, const VerificationReport& r) {
  os << r.pipeline << ": " << to_string(r.status()) << '\n';
  for (const auto& c : r.checks) {
    const char* tag = c.pass ? "ok  " : (c.role == CheckRole::Warning ? "warn" : "FAIL");
    if (!c.pass && c.role == CheckRole::Hypothesis) tag = "skip";
    os << "  [" << tag << "] " << c.name << " = " << num(c.value);
    if (c.target) os << ' ' << c.relation << ' ' << num(*c.target) << " (tol " << num(c.tolerance) << ')';
    if (!c.note.empty()) os << "  (" << c.note << ')';
    os << '\n';
  }
}

std::string make_run_id(const std::string& pipeline) {
  auto now = std::chrono::system_clock::now().time_since_epoch();
  auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now).count();
  std::random_device rd;
  std::ostringstream os;
  os << pipeline << '-' << ms << '-' << std::hex << (rd() & 0xffff);
  return os.str();
}

}  // namespace bkern
