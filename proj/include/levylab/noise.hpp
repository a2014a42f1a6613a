#pragma once

#include <cstdint>
#include <vector>

#include "levylab/rng.hpp"
#include "levylab/spectral.hpp"

namespace levylab {

/// Covariance of the driving Q-Wiener process, diagonal in the mode basis.
struct QWienerConfig {
  Vec q;  ///< per-mode variances q_n >= 0

  double trace() const;
  double max_entry() const;
  void validate() const;
};

enum class JumpFamily { truncated_power_law, finite_atoms };
enum class JumpDirection { fixed_mode, random_mode };

/// Scalar jump-size measure pushed into the mode basis along a direction rule.
///
/// truncated_power_law: density c_pm |y|^(-1-alpha) on rho <= |y| <= y_max,
/// with c_plus on the positive side and c_minus on the negative one.  Mass
/// below the sampling cutoff rho is dropped from path sampling but still
/// enters the closed-form moment functionals where the definition asks for
/// the full region |y| < 1.
struct JumpMeasureConfig {
  JumpFamily family = JumpFamily::truncated_power_law;
  double small_cutoff = 0.1;  ///< rho in (0,1); jumps below it are discarded

  // truncated_power_law parameters
  double alpha = 0.5;
  double c_plus = 0.25;
  double c_minus = 0.25;
  double y_max = 2.0;

  // finite_atoms parameters
  std::vector<double> atom_sizes;
  std::vector<double> atom_rates;

  JumpDirection direction = JumpDirection::fixed_mode;
  int direction_mode = 1;  ///< 1-based mode index for fixed_mode

  void validate() const;

  /// nu(|y| >= 1), the intensity "b" of large jumps.
  double large_jump_rate() const;
  /// nu(rho <= |y|), the total intensity actually sampled.
  double sampling_rate() const;
  /// signed first moment over rho <= |y| < 1 (compensator of small jumps).
  double compensator_scalar() const;
  /// second moment over |y| < 1 (includes mass below rho).
  double second_moment_small() const;
  /// second moment over 1 <= |y|.
  double second_moment_large() const;
  /// absolute first moment over |y| < 1; +inf when the integral diverges.
  double abs_moment_small() const;
  /// absolute first moment over 1 <= |y|.
  double abs_moment_large() const;
};

struct JumpEvent {
  double time;
  int cell;     ///< index of the grid step containing the event
  double size;  ///< signed scalar jump size
  int mode;     ///< 0-based target mode
};

/// One sampled noise path restricted to a uniform grid window.
struct LevyPathSegment {
  double t0 = 0.0;
  double dt = 0.0;
  int steps = 0;
  int modes = 0;
  Vec wiener;  ///< steps x modes, row-major Wiener increments
  std::vector<JumpEvent> small_events;  ///< rho <= |size| < 1, time-sorted
  std::vector<JumpEvent> large_events;  ///< |size| >= 1, time-sorted

  const double* wiener_row(int j) const { return wiener.data() + std::size_t(j) * modes; }
};

struct SegmentRequest {
  double t0 = 0.0;
  double dt = 0.01;
  int steps = 0;
  std::uint64_t seed = 0;
  std::uint64_t path = 0;
  std::uint64_t salt = 0;  ///< distinguishes windows sharing a (seed, path)
};

/// Wiener increments over an arbitrary nondecreasing grid.  Increment j uses
/// counter block j regardless of the grid values, so two grids with the same
/// step count share the underlying normals.
std::vector<Vec> sample_wiener_increments(const QWienerConfig& q,
                                          const std::vector<double>& grid,
                                          RngStream& stream);

LevyPathSegment sample_segment(const QWienerConfig& q, const JumpMeasureConfig& jumps,
                               const SegmentRequest& req);

/// Mode-space drift vector int_{rho <= |y| < 1} y nu(dy) used to compensate
/// the small-jump integral.
Vec compensator_drift(const JumpMeasureConfig& jumps, int modes);

/// Merge blocks of `factor` consecutive steps; the same noise seen on a grid
/// coarsened by that factor.
LevyPathSegment coarsen(const LevyPathSegment& seg, int factor);

}  // namespace levylab
