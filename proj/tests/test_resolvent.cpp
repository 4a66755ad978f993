#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "resnet/errors.hpp"
#include "resnet/resolvent.hpp"
#include "resnet/walk.hpp"

using namespace resnet;
using namespace testing;

namespace {

// E_y int_0^sigma_A f(X_s) ds by solving the killed Poisson problem
// -Delta u = f off A, u = 0 on A, directly in the generator.
double killed_expectation(const Network& net, const VertexMeasure& mu, const VertexSet& a,
                          const PotentialFunction& f, VertexId y) {
  const long n = static_cast<long>(net.size());
  std::vector<char> dead(net.size(), 0);
  for (VertexId v : a) dead[v] = 1;
  std::vector<long> alive;
  std::vector<long> pos(n, -1);
  for (long v = 0; v < n; ++v) {
    if (!dead[v]) {
      pos[v] = static_cast<long>(alive.size());
      alive.push_back(v);
    }
  }
  if (dead[y]) return 0.0;
  const long m = static_cast<long>(alive.size());
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(m, m);
  Eigen::VectorXd rhs(m);
  for (long i = 0; i < m; ++i) {
    const auto x = static_cast<VertexId>(alive[i]);
    q(i, i) = net.total_conductance(x) / mu[x];
    for (const Neighbor& nb : net.neighbors(x)) {
      if (!dead[nb.vertex]) q(i, pos[nb.vertex]) -= nb.conductance / mu[x];
    }
    rhs[i] = f[alive[i]];
  }
  return q.fullPivLu().solve(rhs)[pos[y]];
}

}  // namespace

TEST_CASE("resolvent kernel examples") {
  const ResistanceMatrix r = resistance_matrix(unit_triangle());
  CHECK(resolvent_kernel(r, 0, 1, 1) == doctest::Approx(r(0, 1)));
  CHECK(resolvent_kernel(r, 0, 0, 2) == 0.0);
  CHECK(resolvent_kernel(r, 0, 1, 2) == doctest::Approx(1.0 / 3.0));
  CHECK_THROWS_AS(resolvent_kernel(r, 0, 1, 7), DomainError);
}

TEST_CASE("kernel symmetry, positivity and singleton consistency") {
  RandomStream rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 2 + rng.below(10);
    const Network net = random_network(rng, n);
    const ResistanceMatrix r = resistance_matrix(net);
    const VertexId x = rng.below(n);
    for (VertexId y = 0; y < n; ++y) {
      CHECK(resolvent_kernel(r, x, y, y) == doctest::Approx(r(x, y)));
      for (VertexId z = 0; z < n; ++z) {
        const double g = resolvent_kernel(r, x, y, z);
        CHECK(g == resolvent_kernel(r, x, z, y));
        CHECK(g >= -1e-12 * r.diameter());
        CHECK(std::abs(shorted_kernel(net, {x}, y, z) - g) <= 1e-12 * std::max(1.0, r.diameter()) * 1e3);
      }
    }
  }
}

TEST_CASE("shorted kernel") {
  CHECK(shorted_kernel(unit_path3(), {0}, 1, 1) == doctest::Approx(1.0));
  CHECK(shorted_kernel(unit_path3(), {0, 2}, 0, 1) == 0.0);
  CHECK(shorted_kernel(unit_path3(), {0, 2}, 1, 2) == 0.0);
  CHECK_THROWS_AS(shorted_kernel(unit_path3(), {}, 0, 1), DomainError);

  RandomStream rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 3 + rng.below(8);
    const Network net = random_network(rng, n);
    const VertexSet a{0, n - 1};
    const VertexMeasure mu = VertexMeasure::uniform(n);
    for (VertexId y = 1; y + 1 < n; ++y) {
      for (VertexId z = 1; z + 1 < n; ++z) {
        CHECK(shorted_kernel(net, a, y, z) == doctest::Approx(shorted_kernel(net, a, z, y)).epsilon(1e-10));
        // Oracle: expected time at z before hitting A, over mu(z).
        PotentialFunction f = PotentialFunction::Zero(static_cast<long>(n));
        f[static_cast<long>(z)] = 1.0;
        CHECK(shorted_kernel(net, a, y, z) == doctest::Approx(killed_expectation(net, mu, a, f, y)).epsilon(1e-8));
      }
    }
  }
}

TEST_CASE("resolvent apply") {
  const Network net = unit_triangle();
  const ResistanceMatrix r = resistance_matrix(net);
  const VertexMeasure mu = VertexMeasure::uniform(3);
  CHECK(resolvent_apply(r, mu, 0, PotentialFunction::Zero(3), 1) == 0.0);
  CHECK(resolvent_apply(r, mu, 0, PotentialFunction::Ones(3), 0) == 0.0);
  CHECK(resolvent_apply(r, mu, 0, PotentialFunction::Ones(3), 1) == doctest::Approx(1.0));
  CHECK_THROWS_AS(resolvent_apply(r, mu, 0, PotentialFunction::Ones(2), 1), DomainError);

  RandomStream rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 2 + rng.below(10);
    const Network net2 = random_network(rng, n);
    const VertexMeasure mu2 = random_measure(rng, n);
    const PotentialFunction f = random_function(rng, n).cwiseAbs();
    const ResistanceMatrix r2 = resistance_matrix(net2);
    for (VertexId y = 0; y < n; ++y) {
      CHECK(resolvent_apply(r2, mu2, 0, f, y) ==
            doctest::Approx(killed_expectation(net2, mu2, {0}, f, y)).epsilon(1e-8));
    }
  }
}

TEST_CASE("monte carlo estimators") {
  const Network tri = unit_triangle();
  const VertexMeasure mu = VertexMeasure::uniform(3);
  const MCEstimate at_x = mc_resolvent(tri, mu, 0, PotentialFunction::Ones(3), 0, 100, 1);
  CHECK(at_x.mean == 0.0);
  CHECK(at_x.std_error == 0.0);
  CHECK(mc_resolvent(tri, mu, 0, PotentialFunction::Zero(3), 1, 100, 1).mean == 0.0);

  const MCEstimate g = mc_resolvent(tri, mu, 0, PotentialFunction::Ones(3), 1, 100000, 2);
  CHECK(g.n_samples == 100000);
  CHECK(std::abs(g.mean - 1.0) <= 4 * g.std_error);

  const MCEstimate l = mc_local_time(unit_path3(), mu, {0}, 1, 1, 100000, 3);
  CHECK(std::abs(l.mean - 1.0) <= 4 * l.std_error);
  CHECK(mc_local_time(unit_path3(), mu, {0}, 1, 0, 1000, 3).mean == 0.0);
  CHECK(mc_local_time(unit_path3(), mu, {0}, 0, 1, 1000, 3).mean == 0.0);

  // Same seed, same answer.
  const MCEstimate again = mc_resolvent(tri, mu, 0, PotentialFunction::Ones(3), 1, 100000, 2);
  CHECK(again.mean == g.mean);

  CHECK_THROWS_AS(mc_local_time(unit_path3(), mu, {}, 1, 1, 10, 1), DomainError);
  CHECK_THROWS_AS(mc_resolvent(tri, mu, 0, PotentialFunction::Ones(3), 1, 0, 1), DomainError);
}

TEST_CASE("jump cap aborts are counted") {
  // A long path: from the far end the walk needs hundreds of jumps.
  std::vector<Edge> edges;
  for (VertexId i = 0; i < 30; ++i) edges.push_back({i, i + 1, 1.0});
  const Network path = Network::from_edges(31, edges);
  const VertexMeasure mu = VertexMeasure::uniform(31);
  CHECK_THROWS_AS(mc_resolvent(path, mu, 0, PotentialFunction::Ones(31), 30, 50, 1, 5), McBudgetAbort);
  const MCEstimate partial = mc_resolvent(path, mu, 0, PotentialFunction::Ones(31), 1, 200, 1, 3);
  CHECK(partial.aborted > 0);
  CHECK(partial.n_samples + partial.aborted == 200);
}
