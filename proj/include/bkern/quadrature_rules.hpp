#pragma once

#include <vector>

namespace bkern {

// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
  std::vector<double> x, w;
};

const GaussRule& gauss_legendre(int n);

}  // namespace bkern
