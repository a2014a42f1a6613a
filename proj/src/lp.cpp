#include "levylab/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace levylab {

EmpiricalMeasure EmpiricalMeasure::from_samples(const std::vector<Vec>& samples) {
  if (samples.empty()) throw std::invalid_argument("a measure needs at least one sample");
  std::vector<Vec> pts = samples;
  std::sort(pts.begin(), pts.end());
  EmpiricalMeasure out;
  const double unit = 1.0 / double(samples.size());
  for (const auto& v : pts) {
    if (!out.points.empty() && out.points.back() == v) {
      out.weights.back() += unit;
    } else {
      out.points.push_back(v);
      out.weights.push_back(unit);
    }
  }
  return out;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Exact partial-transport value for a fixed Lipschitz budget: move mass at
// L per unit distance or pay 1-L per unit created or destroyed.  Solved as a
// balanced transportation problem with a dummy source/sink pair, by
// successive shortest augmenting paths on reduced costs.
double partial_transport(const std::vector<double>& D, int n1, int n2,
                         const std::vector<double>& pw, const std::vector<double>& qw,
                         double L) {
  const int ns = n1 + 1;
  const int nt = n2 + 1;
  const int V = ns + nt;
  const double dump = 1.0 - L;
  auto cost = [&](int s, int t) -> double {
    if (s < n1 && t < n2) return L * D[std::size_t(s) * n2 + t];
    if (s == n1 && t == n2) return 0.0;
    return dump;
  };
  std::vector<double> supply(pw);
  supply.push_back(1.0);
  std::vector<double> demand(qw);
  demand.push_back(1.0);
  std::vector<double> flow(std::size_t(ns) * nt, 0.0);
  std::vector<double> pot(V, 0.0);  // sources then sinks
  std::vector<double> dist(V);
  std::vector<int> parent(V);
  std::vector<char> done(V);

  double remaining = 2.0;
  while (remaining > 1e-12) {
    std::fill(dist.begin(), dist.end(), kInf);
    std::fill(parent.begin(), parent.end(), -1);
    std::fill(done.begin(), done.end(), 0);
    for (int s = 0; s < ns; ++s) {
      if (supply[s] > 1e-15) dist[s] = 0.0;
    }
    int target = -1;
    for (;;) {
      int x = -1;
      double dmin = kInf;
      for (int v = 0; v < V; ++v) {
        if (!done[v] && dist[v] < dmin) {
          dmin = dist[v];
          x = v;
        }
      }
      if (x < 0) break;
      done[x] = 1;
      if (x >= ns && demand[x - ns] > 1e-15) {
        target = x;
        break;
      }
      if (x < ns) {
        const double base = dmin + pot[x];
        for (int t = 0; t < nt; ++t) {
          const int node = ns + t;
          if (done[node]) continue;
          double rc = base + cost(x, t) - pot[node];
          if (rc < dmin) rc = dmin;  // clip roundoff below the invariant
          if (rc < dist[node]) {
            dist[node] = rc;
            parent[node] = x;
          }
        }
      } else {
        const int t = x - ns;
        const double base = dmin + pot[x];
        const double* frow = flow.data() + t;
        for (int s = 0; s < ns; ++s) {
          if (done[s] || frow[std::size_t(s) * nt] <= 1e-18) continue;
          double rc = base - cost(s, t) - pot[s];
          if (rc < dmin) rc = dmin;
          if (rc < dist[s]) {
            dist[s] = rc;
            parent[s] = x;
          }
        }
      }
    }
    if (target < 0) break;
    const double dcap = dist[target];
    for (int v = 0; v < V; ++v) pot[v] += std::min(dist[v], dcap);

    double amt = demand[target - ns];
    int origin = -1;
    for (int node = target; node >= 0; node = parent[node]) {
      int up = parent[node];
      if (up < 0) {
        origin = node;
      } else if (up >= ns && node < ns) {
        amt = std::min(amt, flow[std::size_t(node) * nt + (up - ns)]);
      }
    }
    amt = std::min(amt, supply[origin]);
    for (int node = target; parent[node] >= 0; node = parent[node]) {
      int up = parent[node];
      if (up < ns) {
        flow[std::size_t(up) * nt + (node - ns)] += amt;
      } else {
        flow[std::size_t(node) * nt + (up - ns)] -= amt;
      }
    }
    supply[origin] -= amt;
    demand[target - ns] -= amt;
    remaining -= amt;
  }

  double total = 0.0;
  for (int s = 0; s < ns; ++s) {
    for (int t = 0; t < nt; ++t) {
      double fl = flow[std::size_t(s) * nt + t];
      if (fl > 0.0) total += fl * cost(s, t);
    }
  }
  return total;
}

}  // namespace

double bl_distance(const EmpiricalMeasure& p, const EmpiricalMeasure& q, int golden_iters) {
  if (p.points.empty() || q.points.empty()) {
    throw std::invalid_argument("measures must have nonempty support");
  }
  const std::size_t dim = p.points.front().size();
  for (const auto& v : p.points) {
    if (v.size() != dim) throw std::invalid_argument("inconsistent point dimensions");
  }
  for (const auto& v : q.points) {
    if (v.size() != dim) throw std::invalid_argument("inconsistent point dimensions");
  }
  auto check_weights = [](const EmpiricalMeasure& m) {
    double s = 0;
    for (double w : m.weights) {
      if (!(w >= 0.0)) throw std::invalid_argument("weights must be nonnegative");
      s += w;
    }
    if (std::fabs(s - 1.0) > 1e-9) throw std::invalid_argument("weights must sum to one");
  };
  check_weights(p);
  check_weights(q);

  const int n1 = int(p.points.size());
  const int n2 = int(q.points.size());
  std::vector<double> D(std::size_t(n1) * n2);
  for (int i = 0; i < n1; ++i) {
    for (int j = 0; j < n2; ++j) {
      double s = 0;
      for (std::size_t k = 0; k < dim; ++k) {
        double e = p.points[i][k] - q.points[j][k];
        s += e * e;
      }
      D[std::size_t(i) * n2 + j] = std::sqrt(s);
    }
  }
  auto value = [&](double L) { return partial_transport(D, n1, n2, p.weights, q.weights, L); };

  if (golden_iters <= 0) golden_iters = (n1 + n2 <= 160) ? 64 : 24;
  const double invphi = 0.6180339887498949;
  double a = 0.0, b = 1.0;
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = value(x1);
  double f2 = value(x2);
  double best = std::max(f1, f2);
  for (int it = 0; it < golden_iters; ++it) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = value(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = value(x1);
    }
    best = std::max({best, f1, f2});
  }
  return best;
}

}  // namespace levylab
