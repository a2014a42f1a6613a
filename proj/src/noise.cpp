#include "levylab/noise.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace levylab {

double QWienerConfig::trace() const {
  double s = 0;
  for (double v : q) s += v;
  return s;
}

double QWienerConfig::max_entry() const {
  double m = 0;
  for (double v : q) m = std::max(m, v);
  return m;
}

void QWienerConfig::validate() const {
  if (q.empty()) throw std::invalid_argument("wiener covariance needs at least one mode");
  for (double v : q) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument("wiener covariance entries must be finite and nonnegative");
    }
  }
}

void JumpMeasureConfig::validate() const {
  if (!(small_cutoff > 0.0) || !(small_cutoff < 1.0)) {
    throw std::invalid_argument("small-jump cutoff must lie strictly inside (0,1)");
  }
  if (family == JumpFamily::truncated_power_law) {
    if (!(alpha > 0.0) || !(alpha < 2.0)) {
      throw std::invalid_argument("power-law exponent must lie in (0,2)");
    }
    if (c_plus < 0.0 || c_minus < 0.0) {
      throw std::invalid_argument("power-law weights must be nonnegative");
    }
    if (!(y_max >= 1.0) || !std::isfinite(y_max)) {
      throw std::invalid_argument("power-law truncation must be finite and at least 1");
    }
  } else {
    if (atom_sizes.size() != atom_rates.size()) {
      throw std::invalid_argument("atom sizes and rates must have equal length");
    }
    for (double s : atom_sizes) {
      if (s == 0.0 || !std::isfinite(s)) throw std::invalid_argument("atom sizes must be finite and nonzero");
    }
    for (double r : atom_rates) {
      if (!(r >= 0.0) || !std::isfinite(r)) throw std::invalid_argument("atom rates must be finite and nonnegative");
    }
  }
  if (direction == JumpDirection::fixed_mode && direction_mode < 1) {
    throw std::invalid_argument("fixed direction mode is 1-based");
  }
}

namespace {

// int_a^b x^(-p) dx for 0 < a <= b, handling the log case
double power_integral(double a, double b, double p) {
  if (b <= a) return 0.0;
  if (p == 1.0) return std::log(b / a);
  return (std::pow(b, 1.0 - p) - std::pow(a, 1.0 - p)) / (1.0 - p);
}

}  // namespace

double JumpMeasureConfig::large_jump_rate() const {
  if (family == JumpFamily::truncated_power_law) {
    return (c_plus + c_minus) * power_integral(1.0, y_max, 1.0 + alpha);
  }
  double s = 0;
  for (std::size_t i = 0; i < atom_sizes.size(); ++i) {
    if (std::fabs(atom_sizes[i]) >= 1.0) s += atom_rates[i];
  }
  return s;
}

double JumpMeasureConfig::sampling_rate() const {
  if (family == JumpFamily::truncated_power_law) {
    return (c_plus + c_minus) * power_integral(small_cutoff, y_max, 1.0 + alpha);
  }
  double s = 0;
  for (std::size_t i = 0; i < atom_sizes.size(); ++i) {
    if (std::fabs(atom_sizes[i]) >= small_cutoff) s += atom_rates[i];
  }
  return s;
}

double JumpMeasureConfig::compensator_scalar() const {
  if (family == JumpFamily::truncated_power_law) {
    return (c_plus - c_minus) * power_integral(small_cutoff, 1.0, alpha);
  }
  double s = 0;
  for (std::size_t i = 0; i < atom_sizes.size(); ++i) {
    double a = std::fabs(atom_sizes[i]);
    if (a >= small_cutoff && a < 1.0) s += atom_sizes[i] * atom_rates[i];
  }
  return s;
}

double JumpMeasureConfig::second_moment_small() const {
  if (family == JumpFamily::truncated_power_law) {
    // converges at zero for every alpha < 2, so the cutoff plays no role here
    return (c_plus + c_minus) / (2.0 - alpha);
  }
  double s = 0;
  for (std::size_t i = 0; i < atom_sizes.size(); ++i) {
    if (std::fabs(atom_sizes[i]) < 1.0) s += atom_sizes[i] * atom_sizes[i] * atom_rates[i];
  }
  return s;
}

double JumpMeasureConfig::second_moment_large() const {
  if (family == JumpFamily::truncated_power_law) {
    return (c_plus + c_minus) * power_integral(1.0, y_max, alpha - 1.0);
  }
  double s = 0;
  for (std::size_t i = 0; i < atom_sizes.size(); ++i) {
    if (std::fabs(atom_sizes[i]) >= 1.0) s += atom_sizes[i] * atom_sizes[i] * atom_rates[i];
  }
  return s;
}

double JumpMeasureConfig::abs_moment_small() const {
  if (family == JumpFamily::truncated_power_law) {
    if (alpha >= 1.0) return std::numeric_limits<double>::infinity();
    return (c_plus + c_minus) / (1.0 - alpha);
  }
  double s = 0;
  for (std::size_t i = 0; i < atom_sizes.size(); ++i) {
    double a = std::fabs(atom_sizes[i]);
    if (a < 1.0) s += a * atom_rates[i];
  }
  return s;
}

double JumpMeasureConfig::abs_moment_large() const {
  if (family == JumpFamily::truncated_power_law) {
    return (c_plus + c_minus) * power_integral(1.0, y_max, alpha);
  }
  double s = 0;
  for (std::size_t i = 0; i < atom_sizes.size(); ++i) {
    double a = std::fabs(atom_sizes[i]);
    if (a >= 1.0) s += a * atom_rates[i];
  }
  return s;
}

std::vector<Vec> sample_wiener_increments(const QWienerConfig& q,
                                          const std::vector<double>& grid,
                                          RngStream& stream) {
  q.validate();
  if (grid.size() < 2) throw std::invalid_argument("grid needs at least two points");
  const int modes = int(q.q.size());
  std::vector<Vec> out(grid.size() - 1, Vec(modes));
  for (std::size_t j = 0; j + 1 < grid.size(); ++j) {
    double dt = grid[j + 1] - grid[j];
    if (dt < 0.0) throw std::invalid_argument("grid must be nondecreasing");
    for (int n = 0; n < modes; ++n) {
      out[j][n] = stream.normal(std::uint64_t(j) * modes + n) * std::sqrt(q.q[n] * dt);
    }
  }
  return out;
}

namespace {

struct RawEvent {
  double time;
  double size;
  int mode;
};

double power_law_magnitude(const JumpMeasureConfig& j, double u) {
  double lo = std::pow(j.small_cutoff, -j.alpha);
  double hi = std::pow(j.y_max, -j.alpha);
  return std::pow(lo - u * (lo - hi), -1.0 / j.alpha);
}

}  // namespace

LevyPathSegment sample_segment(const QWienerConfig& q, const JumpMeasureConfig& jumps,
                               const SegmentRequest& req) {
  q.validate();
  jumps.validate();
  if (req.steps < 0) throw std::invalid_argument("segment step count must be nonnegative");
  if (!(req.dt > 0.0)) throw std::invalid_argument("segment step must be positive");

  LevyPathSegment seg;
  seg.t0 = req.t0;
  seg.dt = req.dt;
  seg.steps = req.steps;
  seg.modes = int(q.q.size());
  seg.wiener.resize(std::size_t(req.steps) * seg.modes);

  RngStream wstream(req.seed, req.path, rng_purpose::wiener, req.salt);
  for (int j = 0; j < req.steps; ++j) {
    for (int n = 0; n < seg.modes; ++n) {
      seg.wiener[std::size_t(j) * seg.modes + n] =
          wstream.normal(std::uint64_t(j) * seg.modes + n) * std::sqrt(q.q[n] * req.dt);
    }
  }

  const double horizon = req.steps * req.dt;
  const double rate = jumps.sampling_rate();
  if (!std::isfinite(rate)) throw std::invalid_argument("jump intensity above the cutoff must be finite");
  if (rate > 0.0 && horizon > 0.0) {
    SequentialRng counts(RngStream(req.seed, req.path, rng_purpose::jump_counts, req.salt));
    const std::uint64_t total = counts.poisson(rate * horizon);
    RngStream times(req.seed, req.path, rng_purpose::jump_times, req.salt);
    RngStream sizes(req.seed, req.path, rng_purpose::jump_sizes, req.salt);
    RngStream modes(req.seed, req.path, rng_purpose::jump_modes, req.salt);

    // atom selection table restricted to the sampled region
    std::vector<double> cum;
    std::vector<double> cut_sizes;
    if (jumps.family == JumpFamily::finite_atoms) {
      double acc = 0;
      for (std::size_t i = 0; i < jumps.atom_sizes.size(); ++i) {
        if (std::fabs(jumps.atom_sizes[i]) >= jumps.small_cutoff) {
          acc += jumps.atom_rates[i];
          cum.push_back(acc);
          cut_sizes.push_back(jumps.atom_sizes[i]);
        }
      }
    }

    std::vector<RawEvent> raw(total);
    for (std::uint64_t k = 0; k < total; ++k) {
      raw[k].time = req.t0 + times.uniform(k) * horizon;
      double ua = sizes.uniform(2 * k);
      double ub = sizes.uniform(2 * k + 1);
      if (jumps.family == JumpFamily::truncated_power_law) {
        double mag = power_law_magnitude(jumps, ua);
        double p_plus = jumps.c_plus / (jumps.c_plus + jumps.c_minus);
        raw[k].size = (ub < p_plus) ? mag : -mag;
      } else {
        double target = ua * cum.back();
        std::size_t idx = std::size_t(
            std::lower_bound(cum.begin(), cum.end(), target) - cum.begin());
        if (idx >= cut_sizes.size()) idx = cut_sizes.size() - 1;
        raw[k].size = cut_sizes[idx];
      }
      if (jumps.direction == JumpDirection::fixed_mode) {
        raw[k].mode = jumps.direction_mode - 1;
      } else {
        raw[k].mode = std::min(seg.modes - 1, int(modes.uniform(k) * seg.modes));
      }
    }
    std::stable_sort(raw.begin(), raw.end(),
                     [](const RawEvent& a, const RawEvent& b) { return a.time < b.time; });
    for (const auto& e : raw) {
      JumpEvent ev;
      ev.time = e.time;
      ev.cell = std::min(req.steps - 1, int((e.time - req.t0) / req.dt));
      ev.size = e.size;
      ev.mode = e.mode;
      if (std::fabs(e.size) < 1.0) {
        seg.small_events.push_back(ev);
      } else {
        seg.large_events.push_back(ev);
      }
    }
  }
  return seg;
}

Vec compensator_drift(const JumpMeasureConfig& jumps, int modes) {
  jumps.validate();
  if (modes < 1) throw std::invalid_argument("mode count must be positive");
  Vec v(modes, 0.0);
  double scalar = jumps.compensator_scalar();
  if (jumps.direction == JumpDirection::fixed_mode) {
    if (jumps.direction_mode > modes) {
      throw std::invalid_argument("fixed jump mode exceeds the mode count");
    }
    v[jumps.direction_mode - 1] = scalar;
  } else {
    for (int n = 0; n < modes; ++n) v[n] = scalar / modes;
  }
  return v;
}

LevyPathSegment coarsen(const LevyPathSegment& seg, int factor) {
  if (factor < 1) throw std::invalid_argument("coarsening factor must be positive");
  if (seg.steps % factor != 0) {
    throw std::invalid_argument("coarsening factor must divide the step count");
  }
  LevyPathSegment out;
  out.t0 = seg.t0;
  out.dt = seg.dt * factor;
  out.steps = seg.steps / factor;
  out.modes = seg.modes;
  out.wiener.assign(std::size_t(out.steps) * out.modes, 0.0);
  for (int j = 0; j < seg.steps; ++j) {
    int jj = j / factor;
    for (int n = 0; n < seg.modes; ++n) {
      out.wiener[std::size_t(jj) * out.modes + n] += seg.wiener[std::size_t(j) * seg.modes + n];
    }
  }
  out.small_events = seg.small_events;
  out.large_events = seg.large_events;
  for (auto& e : out.small_events) e.cell /= factor;
  for (auto& e : out.large_events) e.cell /= factor;
  return out;
}

}  // namespace levylab
