#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "bkern/envelope.hpp"
#include "bkern/grid.hpp"

namespace bkern {

struct SublevelProfile {
  std::vector<double> t, A, sigma, dAdt;
  double ell_hat = 0.0;        // fitted lim e^{-t} A(t)
  double ell_stderr = 0.0;
  double ell_fit_residual = 0.0;  // rms of the fit
  bool touches_open_edge = false;
  std::vector<std::string> warnings;
};

// 40 levels with |t| geometrically spaced between the pole-resolution floor
// max(log(16 * cell area at the pole), G eight cells from the pole) and 0.05.
std::vector<double> default_t_grid(const PatchField& G, int levels = 40);

// A(t) = int_{G<t} omega and sigma(t) = length of {G = t} on a cylinder or
// torus-cell field with a single log pole.
SublevelProfile sublevel_profile(const PatchField& G, std::vector<double> t_grid);

struct BzRow {
  double t, A, sigma, dAdt, rhs, margin, scale;
  bool pass;
};
struct BzReport {
  std::vector<BzRow> rows;
  double worst_relative_margin = 0.0;  // min margin / scale
  double slack = 0.02;
  bool pass = false;
};
// margin(t) = dA/dt - sigma^2 / (4 pi - (2/lambda) A); pass if margin >= -slack * scale.
BzReport bz_check(const SublevelProfile& p, double lambda, double slack = 0.02);

struct ChainRow {
  double t, lhs, rhs;  // lhs = int_{G<t} i ddbar G, rhs = (4 pi - (2/lambda) A(t)) / 2
  bool pass;
};
std::vector<ChainRow> chain_audit(const EnvelopeSolution& sol, const SublevelProfile& p,
                                  double slack = 0.02);

struct IsoResult {
  double area = 0.0, sigma = 0.0;
  double lhs = 0.0, rhs = 0.0;  // sigma^2, min{L0^2, A (4 pi - k A)}
  double ratio = 0.0;           // lhs / rhs
  bool pass = false;
};
// U = {F < level}; hypotheses A <= int omega / 2 and curvature <= k are checked.
IsoResult iso_check(const SurfaceModel& surface, const PatchField& F, double level, double k,
                    double slack = 0.02);

struct OtBound {
  double bound = 0.0;  // ((lambda - 1)/lambda) / ell_hat, compared with K/MA
  double ell_hat = 0.0;
  double direct = 0.0;  // kernel_K_ratio at x when supplied
  bool dominated = true;  // bound <= direct + tolerance
};
// Throws HypothesisViolation for lambda <= 1 and UnreliableLimit when the
// relative standard error of ell_hat exceeds max_rel_stderr.
OtBound ot_bound(const SublevelProfile& p, double lambda, double max_rel_stderr = 1e-2);

struct MonotonicityResult {
  double worst_ratio = 1.0;  // min (e^{-t}A)(t_{i+1}) / (e^{-t}A)(t_i)
  double ell_hat = 0.0, limit_bound = 0.0;
  bool nondecreasing = true, limit_ok = true, pass = true;
  std::string warning;
};
MonotonicityResult monotonicity_check(const SublevelProfile& p, double lambda, double slack = 0.01);

// t,A,sigma,dAdt,margin
void write_profile_csv(std::ostream& os, const SublevelProfile& p, const BzReport* bz = nullptr);
// two columns: x y
void write_plot_file(std::ostream& os, const std::vector<double>& x, const std::vector<double>& y);

}  // namespace bkern
