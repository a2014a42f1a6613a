#pragma once

#include <cstdint>

#include "levylab/scenario.hpp"

namespace levylab {

struct KernelNorms {
  double b1_l1;    ///< L1 norm of the drift memory kernel
  double b2_l1;    ///< L1 norm of the noise memory kernel
  double b2_l2sq;  ///< squared L2 norm of the noise memory kernel
};

KernelNorms kernel_norms(const Scenario& sc);

/// Joint kernel/jump budget constant entering the invariant-ball inequality.
double theta_constant(const KernelNorms& kn, double large_jump_rate);

/// int_{-inf}^t exp(-a (t-s)) m(s) ds in closed form.
double damped_integral_at(const QuadraticModulus& m, double a, double t);

/// Supremum of the damped integral over t, scanned on a long grid; for the
/// constant modulus this is exact.
double damped_sup_integral(const QuadraticModulus& m, double a);

struct ContractionBreakdown {
  double L_g = 0, L_f = 0, L_h = 0, L_F = 0, L_G = 0;
  double theta = 1;
  double vartheta = 0;
};

ContractionBreakdown contraction_breakdown(const Scenario& sc);
double contraction_bound(const Scenario& sc);

/// Smallest coefficient scale at which the contraction bound reaches one,
/// located by bisection on a doubling bracket.
double critical_delta(const Scenario& sc, double tol = 1e-6);

struct RadiusCheck {
  bool feasible = false;
  bool upward_closed = false;
  double r_min = 0;           ///< smallest grid radius satisfying the budget
  double slack_at_rmin = 0;   ///< rhs - lhs there
};

Vec default_radius_grid();
RadiusCheck radius_budget(const Scenario& sc, const Vec& r_grid);

/// Randomized audit that the declared moduli really dominate coefficient
/// differences; returns the worst relative excess (0 when conforming).
double max_lipschitz_violation(const Scenario& sc, const ModulusSet& m,
                               std::uint64_t seed, int trials);

struct HypothesisReport {
  bool semigroup_ok = false;
  double stability_K = 0, stability_omega = 0;
  double semigroup_max_excess = 0;

  bool kernels_ok = false;
  KernelNorms norms{0, 0, 0};
  double theta = 0;

  bool moduli_ok = false;
  double L_g = 0, L_f = 0, L_h = 0, L_F = 0, L_G = 0;
  double lipschitz_excess = 0;

  bool contraction_ok = false;
  double vartheta = 0;
  double critical_delta = 0;

  bool radius_ok = false;
  double r_min = 0;

  bool all_ok() const {
    return semigroup_ok && kernels_ok && moduli_ok && contraction_ok && radius_ok;
  }
};

HypothesisReport check_hypotheses(const Scenario& sc, std::uint64_t seed = 1234,
                                  int lip_trials = 50);

}  // namespace levylab
