#pragma once

#include <string>
#include <vector>

namespace levylab {

using Vec = std::vector<double>;

enum class Basis { dirichlet_sine, abstract_diagonal };

struct SpaceConfig {
  int modes = 64;
  Basis basis = Basis::dirichlet_sine;
};

// Diagonal C0-semigroup on the truncated basis: T(t) scales mode n by
// exp(-lambda_n t). Stability constants satisfy |T(t)v| <= K exp(-omega t)|v|.
struct Semigroup {
  std::vector<double> decay_rates;
  double stability_K = 1.0;
  double stability_omega = 0.0;

  static Semigroup dirichlet(int modes);
  static Semigroup diagonal(std::vector<double> rates, double K, double omega);

  void apply(double t, const Vec& in, Vec& out) const;
  Vec apply(double t, const Vec& v) const;
};

double vector_norm(const Vec& v);
double vector_dist(const Vec& a, const Vec& b);

// Bridge between coefficients and point values of sum c_n sqrt(2) sin(n pi r)
// on a fixed midpoint quadrature grid. The midpoint grid makes the discrete
// sine system exactly orthonormal as long as modes < quad_points, so
// project(synthesize(c)) == c to machine precision.
class SineTransform {
 public:
  explicit SineTransform(int modes, int quad_points = 512);

  void synthesize(const Vec& coeff, std::vector<double>& phys) const;
  void project(const std::vector<double>& phys, Vec& coeff) const;

  int modes() const { return modes_; }
  int quad_points() const { return points_; }
  const std::vector<double>& nodes() const { return nodes_; }

 private:
  int modes_;
  int points_;
  std::vector<double> nodes_;
  std::vector<double> table_;  // table_[n * points_ + k] = sqrt(2) sin((n+1) pi r_k)
};

}  // namespace levylab
