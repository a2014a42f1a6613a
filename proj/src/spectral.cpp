#include "levylab/spectral.hpp"

#include <cmath>
#include <stdexcept>

namespace levylab {

namespace {
constexpr double kPi = 3.141592653589793238462643383279;
}

Semigroup Semigroup::dirichlet(int modes) {
  if (modes < 1) throw std::invalid_argument("semigroup: modes must be positive");
  Semigroup sg;
  sg.decay_rates.resize(modes);
  for (int n = 0; n < modes; ++n) {
    double m = double(n) + 1.0;
    sg.decay_rates[n] = m * m * kPi * kPi;
  }
  sg.stability_K = 1.0;
  sg.stability_omega = kPi * kPi;
  return sg;
}

Semigroup Semigroup::diagonal(std::vector<double> rates, double K, double omega) {
  if (rates.empty()) throw std::invalid_argument("semigroup: decay_rates must be nonempty");
  if (K < 1.0) throw std::invalid_argument("semigroup: K must be >= 1");
  if (omega <= 0.0) throw std::invalid_argument("semigroup: omega must be positive");
  for (double r : rates) {
    if (!(r >= omega)) {
      throw std::invalid_argument(
          "semigroup: every decay rate must be >= omega for the stability bound");
    }
  }
  Semigroup sg;
  sg.decay_rates = std::move(rates);
  sg.stability_K = K;
  sg.stability_omega = omega;
  return sg;
}

void Semigroup::apply(double t, const Vec& in, Vec& out) const {
  if (in.size() != decay_rates.size()) throw std::invalid_argument("semigroup: dimension mismatch");
  if (t < 0.0) throw std::invalid_argument("semigroup: t must be nonnegative");
  out.resize(in.size());
  if (t == 0.0) {
    out = in;
    return;
  }
  for (std::size_t n = 0; n < in.size(); ++n) {
    out[n] = in[n] * std::exp(-decay_rates[n] * t);
  }
}

Vec Semigroup::apply(double t, const Vec& v) const {
  Vec out;
  apply(t, v, out);
  return out;
}

double vector_norm(const Vec& v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc);
}

double vector_dist(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("vector_dist: dimension mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    acc += d * d;
  }
  return std::sqrt(acc);
}

SineTransform::SineTransform(int modes, int quad_points)
    : modes_(modes), points_(quad_points) {
  if (modes < 1) throw std::invalid_argument("sine transform: modes must be positive");
  if (quad_points <= modes) {
    throw std::invalid_argument("sine transform: quadrature grid must exceed mode count");
  }
  nodes_.resize(points_);
  for (int k = 0; k < points_; ++k) nodes_[k] = (double(k) + 0.5) / points_;
  table_.resize(std::size_t(modes_) * points_);
  const double sqrt2 = std::sqrt(2.0);
  for (int n = 0; n < modes_; ++n) {
    double freq = (double(n) + 1.0) * kPi;
    for (int k = 0; k < points_; ++k) {
      table_[std::size_t(n) * points_ + k] = sqrt2 * std::sin(freq * nodes_[k]);
    }
  }
}

void SineTransform::synthesize(const Vec& coeff, std::vector<double>& phys) const {
  if (int(coeff.size()) != modes_) throw std::invalid_argument("sine transform: dimension mismatch");
  phys.assign(points_, 0.0);
  for (int n = 0; n < modes_; ++n) {
    double c = coeff[n];
    if (c == 0.0) continue;
    const double* row = &table_[std::size_t(n) * points_];
    for (int k = 0; k < points_; ++k) phys[k] += c * row[k];
  }
}

void SineTransform::project(const std::vector<double>& phys, Vec& coeff) const {
  if (int(phys.size()) != points_) throw std::invalid_argument("sine transform: grid mismatch");
  coeff.assign(modes_, 0.0);
  const double w = 1.0 / points_;
  for (int n = 0; n < modes_; ++n) {
    const double* row = &table_[std::size_t(n) * points_];
    double acc = 0.0;
    for (int k = 0; k < points_; ++k) acc += phys[k] * row[k];
    coeff[n] = acc * w;
  }
}

}  // namespace levylab
