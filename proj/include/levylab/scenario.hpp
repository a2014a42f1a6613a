#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>

#include "levylab/noise.hpp"
#include "levylab/spectral.hpp"

namespace levylab {

enum class CoefficientFamily { quasi_periodic_sine, zero, linear_test };

/// Shared shape of the five coefficient maps.
///
/// quasi_periodic_sine composes a sine nonlinearity with incommensurate time
/// tones: g(t,u) = delta * chi_g(t) * P[sin(u) + base], and similarly for f
/// and the common noise multiplier, each with its own tone pair.  P is the
/// projection back onto the mode basis.  base_amplitude = 0 recovers maps
/// that vanish at the origin; a positive base keeps the fixed point away from
/// zero without changing any Lipschitz modulus.
struct CoefficientSet {
  CoefficientFamily family = CoefficientFamily::quasi_periodic_sine;
  double delta = 0.05;
  double base_amplitude = 0.0;
  /// tone table: chi_g pairs (0,1), chi_f (0,2), noise (0,3); slot 4 is spare
  std::array<double, 5> frequencies{1.0, 1.4142135623730951, 1.7320508075688772,
                                    2.23606797749979, 3.141592653589793};
};

struct Scenario {
  std::string name;
  SpaceConfig space;
  Vec decay_rates;             ///< abstract_diagonal only
  double stability_K = 1.0;    ///< abstract_diagonal only
  double stability_omega = 0;  ///< abstract_diagonal only
  double b1_rate = 9.869604401089358;  ///< exp kernel rate of the drift memory
  double b2_rate = 9.869604401089358;  ///< exp kernel rate of the noise memory
  QWienerConfig wiener;
  JumpMeasureConfig jumps;
  CoefficientSet coeffs;

  Semigroup semigroup() const;
  void validate() const;
};

Scenario builtin_scenario(const std::string& name);
Scenario load_scenario_json(const std::string& text);
Scenario load_scenario_file(const std::string& path);
std::string canonical_json(const Scenario& sc);
std::uint64_t scenario_hash(const Scenario& sc);

struct CoefficientValues {
  Vec g;      ///< additive forcing
  Vec f;      ///< integrand of the drift memory term
  Vec noise;  ///< shared diagonal multiplier for wiener and jump terms
};

class CoefficientEvaluator {
 public:
  explicit CoefficientEvaluator(const Scenario& sc);

  CoefficientValues values(double t, const Vec& x) const;
  double chi_g(double t) const;
  double chi_f(double t) const;
  double chi_noise(double t) const;
  int modes() const { return modes_; }

 private:
  CoefficientSet coeffs_;
  int modes_;
  std::shared_ptr<SineTransform> transform_;  // quasi family only
  mutable Vec phys_;                          // scratch
  Vec nemytskii(const Vec& x) const;
};

/// Squared Lipschitz modulus scale * (sin(omega1 t) + sin(omega2 t))^2, or a
/// constant when the map does not depend on the state.
struct QuadraticModulus {
  double scale = 0.0;
  double omega1 = 0.0;
  double omega2 = 0.0;
  bool constant = true;

  double operator()(double t) const;
  double sup() const;
};

struct ModulusSet {
  QuadraticModulus g, f, h, small_jump, large_jump;
  double envelope_slope = 0.0;   ///< coefficient of min(r,1)
  double envelope_offset = 0.0;  ///< constant part

  /// joint sup-norm bound for all five maps on the ball of radius r
  double envelope(double r) const;
};

ModulusSet scenario_moduli(const Scenario& sc);

}  // namespace levylab
