#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bkern/grid.hpp"
#include "bkern/obstacle.hpp"
#include "bkern/surface.hpp"

namespace bkern {

struct SeshadriValue {
  double value = 0.0;
  double degree = 0.0;
};

// (1/2pi) int omega by quadrature.
SeshadriValue seshadri(const SurfaceModel& surface, int resolution = 128);

struct EnvelopeOptions {
  bool override_seshadri_boundary = false;
  double half_length = 8.0;  // P^1 cylinder: s in [-S, S]
  LcpOptions solver{};
};

enum class NodeState : std::uint8_t { Open = 0, Contact = 1 };

// Discrete extremal function G <= 0 with a log pole at x and
// omega + lambda i ddbar G >= 0.
//   P^1:   log-polar cylinder about x; the pole sits at s = -infinity and enters
//          through the flux G_s -> 2 below the grid.
//   torus: periodic cell with x at node (0, 0); G = chi log|z - x|^2 + h.
struct EnvelopeSolution {
  ChartPoint pole;
  double lambda = 0.0;
  bool boundary_case = false;  // lambda = seshadri value (override)
  PatchField G;                // pole node (torus) holds -1e300
  std::vector<double> regular; // h = G - chi log|z - x|^2 (torus) or G - log|z - x|^2 (P^1)
  std::vector<NodeState> state;
  // cylinder: exact radial flux at the bottom face, per theta node
  std::vector<double> bottom_flux;
  int pole_node = -1;          // torus only
  double cutoff_inner = 0.0, cutoff_outer = 0.0;

  int sweeps = 0, active_set_iterations = 0;
  double obstacle_residual = 0, dual_residual = 0, complementarity_residual = 0;
  double open_measure_residual = 0;  // max |omega + lambda i ddbar G| / cell on open nodes
  std::vector<double> residual_history;
  bool converged = false;

  int contact_count() const;
};

EnvelopeSolution solve_envelope(const SurfaceModel& surface, const ChartPoint& x, double lambda,
                                int resolution, const EnvelopeOptions& opt = {});

struct MassAudit {
  double pole_mass = 0.0;
  double open_volume = 0.0;
  double target = 0.0;  // 2 pi lambda
  bool pole_ok = false, volume_ok = false;
};
MassAudit mass_audit(const EnvelopeSolution& sol);

// Oscillation of the regular part over the nodes nearest the pole, and the
// local grid increment of G there.
struct PoleRegularity {
  double oscillation = 0.0;
  double grid_increment = 0.0;
};
PoleRegularity pole_regularity(const EnvelopeSolution& sol);

// Hierarchical diagnostics (iterations, residuals, active-set size) as JSON text.
std::string envelope_diagnostics_json(const EnvelopeSolution& sol, const MassAudit& audit);

// chart,re,im,value,state
void write_envelope_csv(std::ostream& os, const EnvelopeSolution& sol);

}  // namespace bkern
