#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "bkern/parallel.hpp"
#include "bkern/surface.hpp"

namespace bkern {

enum class Twist { Plain, Canonical };

const char* to_string(Twist t);

// Integration cell in parameter coordinates (a, b).
//   P^1:   a = radius, b = angle in the chart's unit disk.
//   torus: z = a omega1 + b omega2.
struct QuadCell {
  int chart = 0;
  double a0 = 0, a1 = 0, b0 = 0, b1 = 0;
  int first = 0, count = 0;  // node range
};

// Nodes carry weights for dx dy in the owning chart.
struct Quadrature {
  SurfaceKind kind = SurfaceKind::ProjectiveLine;
  int resolution = 0;
  std::vector<ChartPoint> nodes;
  std::vector<double> weights;
  std::vector<QuadCell> cells;

  std::size_t size() const { return nodes.size(); }
};

// P^1: per chart, composite radial Gauss-Legendre (8-point panels, resolution/2
// nodes) times a uniform angular rule with `resolution` nodes on the unit disk.
// Torus: periodic trapezoid rule with resolution^2 nodes on the fundamental cell.
Quadrature build_quadrature(const SurfaceModel& surface, int resolution);

// Replace every cell on which `field - level` changes sign by a 2^depth x 2^depth
// tensor refinement with 4-point Gauss-Legendre in both directions.
Quadrature refine_near_level(const SurfaceModel& surface, const Quadrature& q,
                             const std::function<double(const ChartPoint&)>& field, double level,
                             int depth, int* refined_cells = nullptr);

// int f omega over the surface.
double integrate_area(const SurfaceModel& surface, const Quadrature& q,
                      const std::function<double(const ChartPoint&)>& f);

class SectionBasis {
 public:
  static SectionBasis build(const SurfaceModel& surface, int m, Twist twist);

  const SurfaceModel& surface() const { return surface_; }
  int level() const { return m_; }
  Twist twist() const { return twist_; }
  int dimension() const { return dim_; }

  // Weighted representatives s_k(p) e^{-m phi(p)/2} in the chart of p (canonical
  // twist: coefficient of dz). |.|^2 is chart independent; phases may differ by
  // a factor common to all k.
  void weighted_values(const ChartPoint& p, cplx* out) const;
  Eigen::VectorXcd weighted_values(const ChartPoint& p) const;

  // Density, with respect to dx dy, of the measure used by the inner product:
  //   plain: MA_{m phi} = 2 m g;  canonical: i u ^ conj(u) -> 2 |f|^2.
  double measure_density(const ChartPoint& p) const;

  // Density of MA_{m phi} at p with respect to dx dy.
  double monge_ampere(const ChartPoint& p) const;

 private:
  SurfaceModel surface_;
  int m_ = 1;
  Twist twist_ = Twist::Plain;
  int dim_ = 0;
  int poly_degree_ = 0;      // P^1 monomial degree bound
  double weight_power_ = 0;  // P^1: (1 + |z|^2)^{-weight_power}
  std::vector<double> binom_;
  int level_N_ = 0;  // torus theta level m D
};

// Rows of sqrt(weight * measure) * weighted section values at every quadrature node.
// Built once per (basis, quadrature) pair.
struct SampledBasis {
  Eigen::MatrixXcd rows;  // nodes x dimension
};
SampledBasis sample_basis(const SectionBasis& basis, const Quadrature& q,
                          Execution exec = Execution::Parallel);

// <u, v> for coefficient vectors over the given bases.
cplx inner_product(const SectionBasis& bu, const Eigen::VectorXcd& u, const SectionBasis& bv,
                   const Eigen::VectorXcd& v, const Quadrature& q);

// node,chart,re,im,k,re_value,im_value
void write_basis_csv(std::ostream& os, const SectionBasis& basis, const Quadrature& q);

}  // namespace bkern
