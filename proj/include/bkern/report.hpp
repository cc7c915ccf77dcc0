#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace bkern {

enum class Status { Pass, Fail, Skip };
const char* to_string(Status s);

enum class CheckRole {
  Hypothesis,  // failure makes the pipeline SKIP
  Bound,       // failure makes the pipeline FAIL
  Warning,     // reported, never decides the status
};

struct Check {
  std::string name;
  CheckRole role = CheckRole::Bound;
  double value = 0.0;
  std::optional<double> target;
  std::string relation;  // ">=", "<=", "~="
  double tolerance = 0.0;
  bool pass = false;
  std::string anchor;  // statement being verified
  std::string note;    // provenance
};

struct Artifact {
  std::string filename;
  std::string content;
};

struct VerificationReport {
  std::string run_id;
  std::string pipeline;
  std::map<std::string, std::string> config;
  std::vector<Check> checks;
  std::vector<Artifact> artifacts;
  double elapsed_seconds = 0.0;

  Check& add(Check c);
  // PASS iff every Bound and Hypothesis check passes; a failed Bound gives FAIL,
  // otherwise a failed Hypothesis gives SKIP.
  Status status() const;
  void merge(const VerificationReport& other);
};

// 0 PASS, 2 SKIP, 1 FAIL
int exit_code(Status s);

// Hierarchical JSON (run id and timing are the only non-deterministic fields).
std::string report_json(const VerificationReport& r);
// name,role,value,target,relation,tolerance,pass,anchor,note
void write_checks_csv(std::ostream& os, const VerificationReport& r);
// Human summary, one line per check.
void write_summary(std::ostream& os, const VerificationReport& r);

std::string make_run_id(const std::string& pipeline);

}  // namespace bkern
