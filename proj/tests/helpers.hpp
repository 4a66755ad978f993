#pragma once

// Shared fixtures for the unit tests.

#include <cmath>
#include <cstdint>
#include <vector>

#include "resnet/network.hpp"
#include "resnet/rng.hpp"

namespace testing {

using namespace resnet;

inline Network single_edge(double c = 1.0) { return Network::from_edges(2, {{0, 1, c}}); }

inline Network unit_triangle() { return Network::from_edges(3, {{0, 1, 1}, {1, 2, 1}, {0, 2, 1}}); }

// x - y - z
inline Network unit_path3() { return Network::from_edges(3, {{0, 1, 1}, {1, 2, 1}}); }

inline Network star123() { return Network::from_edges(4, {{0, 1, 1}, {0, 2, 2}, {0, 3, 3}}); }

// Random spanning tree plus extra edges, conductances log-uniform in [lo, hi].
inline Network random_network(RandomStream& rng, std::size_t n, double extra_p = 0.3, double lo = 1e-3,
                              double hi = 1e3) {
  auto cond = [&] { return std::exp(std::log(lo) + rng.uniform() * (std::log(hi) - std::log(lo))); };
  std::vector<Edge> edges;
  for (VertexId v = 1; v < n; ++v) edges.push_back({rng.below(v), v, cond()});
  for (VertexId u = 0; u < n; ++u) {
    for (VertexId v = u + 1; v < n; ++v) {
      if (rng.uniform() < extra_p) edges.push_back({u, v, cond()});
    }
  }
  return Network::from_edges(n, std::move(edges));
}

inline VertexMeasure random_measure(RandomStream& rng, std::size_t n) {
  std::vector<double> w(n);
  for (auto& x : w) x = 0.1 + 2.0 * rng.uniform();
  return VertexMeasure(std::move(w));
}

inline PotentialFunction random_function(RandomStream& rng, std::size_t n) {
  PotentialFunction f(static_cast<long>(n));
  for (long i = 0; i < f.size(); ++i) f[i] = rng.normal();
  return f;
}

// Dense grounded-Laplacian solve, independent of the library's sparse path.
inline double dense_resistance(const Network& net, VertexId x, VertexId y) {
  const long n = static_cast<long>(net.size());
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
  for (const Edge& e : net.edges()) {
    const long u = static_cast<long>(e.u), v = static_cast<long>(e.v);
    l(u, u) += e.conductance;
    l(v, v) += e.conductance;
    l(u, v) -= e.conductance;
    l(v, u) -= e.conductance;
  }
  // Remove row/column y, inject unit current at x.
  std::vector<long> keep;
  for (long i = 0; i < n; ++i) {
    if (i != static_cast<long>(y)) keep.push_back(i);
  }
  const long m = static_cast<long>(keep.size());
  Eigen::MatrixXd a(m, m);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
  long xi = 0;
  for (long i = 0; i < m; ++i) {
    if (keep[i] == static_cast<long>(x)) xi = i;
    for (long j = 0; j < m; ++j) a(i, j) = l(keep[i], keep[j]);
  }
  b[xi] = 1.0;
  const Eigen::VectorXd v = a.fullPivLu().solve(b);
  return v[xi];
}

}  // namespace testing
