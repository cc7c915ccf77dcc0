#pragma once

#include <stdexcept>
#include <string>

namespace bkern {

enum class ErrorKind {
  PositivityViolation,
  ChartBoundary,
  IntegrationFailure,
  Coverage,
  Unsupported,
  HypothesisViolation,
  EmptySpace,
  Conditioning,
  SolverFailure,
  Usage,
  UnreliableLimit,
  Seam,
  Parse,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::PositivityViolation: return "positivity-violation";
    case ErrorKind::ChartBoundary: return "chart-boundary";
    case ErrorKind::IntegrationFailure: return "integration-failure";
    case ErrorKind::Coverage: return "coverage";
    case ErrorKind::Unsupported: return "unsupported-configuration";
    case ErrorKind::HypothesisViolation: return "hypothesis-violation";
    case ErrorKind::EmptySpace: return "empty-space";
    case ErrorKind::Conditioning: return "conditioning";
    case ErrorKind::SolverFailure: return "solver-failure";
    case ErrorKind::Usage: return "usage";
    case ErrorKind::UnreliableLimit: return "unreliable-limit";
    case ErrorKind::Seam: return "seam";
    case ErrorKind::Parse: return "parse";
  }
  return "unknown";
}

}  // namespace bkern
