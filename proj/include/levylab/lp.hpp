#pragma once

#include <vector>

#include "levylab/spectral.hpp"

namespace levylab {

struct EmpiricalMeasure {
  std::vector<Vec> points;
  std::vector<double> weights;

  /// Equal-weight measure from raw samples; bitwise-identical points are
  /// merged and the support is sorted, so the representation is canonical.
  static EmpiricalMeasure from_samples(const std::vector<Vec>& samples);
};

/// Dual bounded-Lipschitz distance: the best expectation gap over test
/// functions whose Lipschitz constant and sup norm together stay within one.
///
/// For fixed Lipschitz budget L the inner problem is a partial optimal
/// transport (move mass at L per unit distance, or pay 1-L to create and
/// destroy it), solved exactly; the budget split is then located by golden
/// section, which is safe because the inner value is concave in L.
/// golden_iters <= 0 picks a default based on the support size.
double bl_distance(const EmpiricalMeasure& p, const EmpiricalMeasure& q,
                   int golden_iters = 0);

}  // namespace levylab
