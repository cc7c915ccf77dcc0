#pragma once

#include <iosfwd>
#include <map>
#include <string>

#include "bkern/obstacle.hpp"
#include "bkern/surface.hpp"

namespace bkern {

// INI-style configuration:
//
//   [surface]
//   kind = p1 | torus
//   c = 2                     # P^1 scale, deg L = c
//   lattice = square          # torus: square | rect W H | general a1 b1 a2 b2
//   degree = 8                # torus deg L
//   perturbation = 0.05*exp(-r2)
//   l0 = 7.5                  # certified L0 for perturbed metrics
//   point = 0.3 0.1           # base point x (chart 0)
//   resolution = 256
//
//   [solver]
//   lambda = 2
//   tolerance = 1e-8
//   max_sweeps = 400
//   relaxation = 1.8
//   half_length = 8
//   threads = 0               # 0: OpenMP default
//
//   [tolerances]
//   kernel = 0.005            # relative slack on kernel bounds
//   flow = 0.02               # BZ, transport and isoperimetric slack
//   monotone = 0.01
//   hessian = 1e-3
//
// Lines starting with # or ; are comments.
struct Config {
  std::string kind = "p1";
  double c = 2.0;
  std::string lattice = "square";
  double degree = 8.0;
  std::string perturbation;
  double l0 = 0.0;
  cplx point{0.3, 0.1};
  int resolution = 256;

  double lambda = 2.0;
  double half_length = 8.0;
  LcpOptions solver{};
  int threads = 0;
  bool override_seshadri_boundary = false;

  double tol_kernel = 0.005;
  double tol_flow = 0.02;
  double tol_monotone = 0.01;
  double tol_hessian = 1e-3;

  std::string source = "<defaults>";

  SurfaceModel surface() const;
  ChartPoint base_point() const { return {0, point}; }
  // ordered key/value echo
  std::map<std::string, std::string> echo() const;
};

Config parse_config(std::istream& in, const std::string& source = "<stream>");
Config load_config(const std::string& path);

}  // namespace bkern
