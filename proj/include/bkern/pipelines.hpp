#pragma once

#include "bkern/config.hpp"
#include "bkern/report.hpp"

namespace bkern {

// Each pipeline records hypothesis checks first; when they fail the remaining
// checks are not run and the report status is SKIP. Computational errors are
// recorded as failed checks (status FAIL). Only configuration errors throw.

// Ric <= omega, L0 >= 2 pi  =>  K/MA >= 1/(8 pi): direct kernel minimum and the
// psi route (comparison margin, sublevel limit, transport bound).
VerificationReport run_theorem_A(const Config& cfg);
// -omega/2 <= Ric <= omega/2, L0 >= 2 pi sqrt 2  =>  B >= 1/(16 pi).
VerificationReport run_theorem_B(const Config& cfg);
// Volume variants: envelope, sublevel flow, isoperimetry, monotonicity, bound.
VerificationReport run_theorem_CD(const Config& cfg);
VerificationReport run_tian(const Config& cfg, int m_max);
VerificationReport run_comparison(const Config& cfg);
VerificationReport run_envelope(const Config& cfg);
// All of the above; hypothesis failures of individual pipelines become warnings.
VerificationReport run_report(const Config& cfg, int m_max);

}  // namespace bkern
