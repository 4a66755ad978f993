#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "helpers.hpp"
#include "resnet/errors.hpp"
#include "resnet/mm_compare.hpp"
#include "resnet/spaces.hpp"
#include "resnet/walk.hpp"

using namespace resnet;
using namespace testing;

namespace {

FiniteMMSpace line_space(const std::vector<double>& xs, std::vector<double> mass, std::size_t root = 0) {
  const long n = static_cast<long>(xs.size());
  Eigen::MatrixXd d(n, n);
  std::vector<std::string> names;
  for (long i = 0; i < n; ++i) {
    names.push_back(std::to_string(i));
    for (long j = 0; j < n; ++j) d(i, j) = std::abs(xs[i] - xs[j]);
  }
  return FiniteMMSpace(names, d, std::move(mass), root);
}

FiniteMMSpace random_space(RandomStream& rng, std::size_t n) {
  const Network net = random_network(rng, n, 0.3, 0.5, 2.0);
  std::vector<double> w(n);
  double total = 0.0;
  for (double& x : w) total += x = 0.1 + rng.uniform();
  for (double& x : w) x /= total;
  return as_mm_space(net, VertexMeasure(w), 0);
}

// Brute force: every relation containing the root pair whose projections are
// onto. The mass term uses max-flow = min-cut over subsets S of the first
// space, F = min_S mu1(X \ S) + mu2(N(S)).
double ghp_oracle(const FiniteMMSpace& a, const FiniteMMSpace& b) {
  const std::size_t n1 = a.size(), n2 = b.size();
  const std::size_t pairs = n1 * n2;
  const double m1 = a.total_mass(), m2 = b.total_mass();
  double best = std::numeric_limits<double>::infinity();
  for (std::uint64_t rel = 0; rel < (std::uint64_t{1} << pairs); ++rel) {
    auto in = [&](std::size_t i, std::size_t j) { return (rel >> (i * n2 + j)) & 1u; };
    if (!in(a.root(), b.root())) continue;
    bool onto = true;
    for (std::size_t i = 0; i < n1 && onto; ++i) {
      bool any = false;
      for (std::size_t j = 0; j < n2; ++j) any = any || in(i, j);
      onto = any;
    }
    for (std::size_t j = 0; j < n2 && onto; ++j) {
      bool any = false;
      for (std::size_t i = 0; i < n1; ++i) any = any || in(i, j);
      onto = any;
    }
    if (!onto) continue;
    double dis = 0.0;
    for (std::size_t p = 0; p < pairs; ++p) {
      if (!((rel >> p) & 1u)) continue;
      for (std::size_t q = 0; q < pairs; ++q) {
        if (!((rel >> q) & 1u)) continue;
        dis = std::max(dis, std::abs(a.distance(p / n2, q / n2) - b.distance(p % n2, q % n2)));
      }
    }
    double flow = std::numeric_limits<double>::infinity();
    for (std::uint64_t s = 0; s < (std::uint64_t{1} << n1); ++s) {
      double cut = 0.0;
      for (std::size_t i = 0; i < n1; ++i) {
        if (!((s >> i) & 1u)) cut += a.measure()[i];
      }
      for (std::size_t j = 0; j < n2; ++j) {
        bool reached = false;
        for (std::size_t i = 0; i < n1; ++i) reached = reached || (((s >> i) & 1u) && in(i, j));
        if (reached) cut += b.measure()[j];
      }
      flow = std::min(flow, cut);
    }
    best = std::min(best, std::max(dis / 2, std::max(m1, m2) - flow));
  }
  return best;
}

}  // namespace

TEST_CASE("hausdorff distance") {
  const FiniteMMSpace s = line_space({0, 1, 3, 7}, {1, 1, 1, 1});
  CHECK(hausdorff_distance(s, {0}, {0}) == 0.0);
  CHECK(hausdorff_distance(s, {0}, {1}) == 1.0);
  CHECK(hausdorff_distance(s, {0, 3}, {1}) == 6.0);
  CHECK(hausdorff_distance(s, {0, 1, 2, 3}, {0, 3}) == 3.0);
  CHECK(hausdorff_distance(s, {2}, {0, 3}) == hausdorff_distance(s, {0, 3}, {2}));
  CHECK_THROWS_AS(hausdorff_distance(s, {}, {1}), DomainError);
  CHECK_THROWS_AS(hausdorff_distance(s, {9}, {1}), DomainError);
}

TEST_CASE("prohorov distance") {
  const FiniteMMSpace s = line_space({0, 0.2, 1.2, 4.2}, {1, 1, 1, 1});
  const std::vector<double> half{0.25, 0.25, 0.25, 0.25};
  CHECK(prohorov_distance(s, half, half) == 0.0);
  // Dirac masses d apart.
  CHECK(prohorov_distance(s, {1, 0, 0, 0}, {0, 1, 0, 0}) == doctest::Approx(0.2));
  CHECK(prohorov_distance(s, {0, 1, 0, 0}, {0, 0, 1, 0}) == doctest::Approx(1.0));
  CHECK(prohorov_distance(s, {0, 0, 1, 0}, {0, 0, 0, 1}) == doctest::Approx(1.0));

  // Moving mass m a distance d costs at most min(m, d).
  RandomStream rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> mu(4), nu;
    double total = 0.0;
    for (double& x : mu) total += x = rng.uniform();
    for (double& x : mu) x /= total;
    nu = mu;
    const std::size_t from = rng.below(4), to = rng.below(4);
    const double m = mu[from] * rng.uniform();
    nu[from] -= m;
    nu[to] += m;
    const double d = prohorov_distance(s, mu, nu);
    CHECK(d <= std::min(m, s.distance(from, to)) + 1e-12);
    CHECK(d == doctest::Approx(prohorov_distance(s, nu, mu)));
  }
}

TEST_CASE("prohorov capacity") {
  std::vector<double> xs(21);
  std::iota(xs.begin(), xs.end(), 0.0);
  const FiniteMMSpace s = line_space(xs, std::vector<double>(21, 1.0));
  CHECK_THROWS_AS(prohorov_distance(s, s.measure(), s.measure()), CapacityError);
}

TEST_CASE("ghp examples") {
  const GasketGraph g = gasket_graph(1);
  const FiniteMMSpace a = as_mm_space(g.net, VertexMeasure::uniform(6), 0, 1.0, 1.0 / 6);
  CHECK(ghp_distance(a, a) == 0.0);

  // The same space with its points listed in another order.
  const std::vector<std::size_t> order{3, 5, 0, 1, 4, 2};
  const FiniteMMSpace b = a.restrict_to(order);
  CHECK(b.root() == 2);
  CHECK(ghp_distance(a, b) == doctest::Approx(0.0).epsilon(1e-15));

  const double eps = 0.3;
  const FiniteMMSpace p1 = line_space({0, 1}, {0.5, 0.5});
  const FiniteMMSpace p2 = line_space({0, 1 + eps}, {0.5, 0.5});
  CHECK(ghp_distance(p1, p2) == doctest::Approx(eps / 2));

  // A mass defect alone.
  const FiniteMMSpace q1 = line_space({0, 1}, {0.5, 0.5});
  const FiniteMMSpace q2 = line_space({0, 1}, {0.7, 0.3});
  CHECK(ghp_distance(q1, q2) == doctest::Approx(0.2));

  std::vector<double> xs(9);
  std::iota(xs.begin(), xs.end(), 0.0);
  const FiniteMMSpace nine = line_space(xs, std::vector<double>(9, 1.0));
  CHECK_THROWS_AS(ghp_distance(nine, nine), CapacityError);
}

TEST_CASE("ghp matches brute force") {
  RandomStream rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    const FiniteMMSpace a = random_space(rng, 1 + rng.below(3));
    const FiniteMMSpace b = random_space(rng, 1 + rng.below(3));
    CHECK(ghp_distance(a, b) == doctest::Approx(ghp_oracle(a, b)).epsilon(1e-12));
  }
  // Unequal total masses.
  const FiniteMMSpace a = line_space({0, 1, 2}, {0.2, 0.5, 0.4});
  const FiniteMMSpace b = line_space({0, 0.9}, {0.6, 0.3});
  CHECK(ghp_distance(a, b) == doctest::Approx(ghp_oracle(a, b)).epsilon(1e-12));
}

TEST_CASE("ghp is a pseudometric") {
  RandomStream rng(13);
  for (int trial = 0; trial < 30; ++trial) {
    const FiniteMMSpace a = random_space(rng, 2 + rng.below(3));
    const FiniteMMSpace b = random_space(rng, 2 + rng.below(3));
    const FiniteMMSpace c = random_space(rng, 2 + rng.below(3));
    const double ab = ghp_distance(a, b), bc = ghp_distance(b, c), ac = ghp_distance(a, c);
    CHECK(std::abs(ab - ghp_distance(b, a)) <= 1e-12);
    CHECK(ac <= ab + bc + 1e-12);
    CHECK(ab >= 0.0);
  }
}

TEST_CASE("covering numbers") {
  Eigen::MatrixXd d = Eigen::MatrixXd::Ones(3, 3) - Eigen::MatrixXd::Identity(3, 3);
  const FiniteMMSpace equi({"a", "b", "c"}, d, {1, 1, 1}, 0);
  CHECK(covering_number(equi, 1.0).count == 3);
  CHECK(covering_number(equi, 1.0001).count == 1);
  CHECK(covering_number(equi, 1.0).exact);

  const FiniteMMSpace s = line_space({0, 1, 2, 3, 4, 5}, std::vector<double>(6, 1.0));
  CHECK(covering_number(s, 6.0).count == 1);
  CHECK(covering_number(s, 0.5).count == 6);
  CHECK(covering_number(s, 1.5).count == 2);  // balls at 1 and 4
  CHECK_THROWS_AS(covering_number(s, 0.0), DomainError);

  RandomStream rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    const FiniteMMSpace r = random_space(rng, 2 + rng.below(10));
    std::size_t previous = r.size() + 1;
    for (double eps = 0.01; eps < 2 * r.diameter() + 0.02; eps *= 1.3) {
      const CoveringNumber c = covering_number(r, eps);
      CHECK(c.count <= previous);
      CHECK(c.count >= 1);
      previous = c.count;
    }
    CHECK(previous == 1);
  }

  const GasketGraph g = gasket_graph(3);
  const FiniteMMSpace big = as_mm_space(g.net, VertexMeasure::uniform(g.net.size()), 0);
  const CoveringNumber greedy = covering_number(big, 0.3);
  CHECK_FALSE(greedy.exact);
  CHECK(greedy.count >= 1);
  CHECK(greedy.count <= big.size());
}

TEST_CASE("ball measures and the exit bound") {
  const FiniteMMSpace s = line_space({0, 1, 2}, {0.5, 0.2, 0.3});
  CHECK(min_ball_measure(s, 0.5) == doctest::Approx(0.2));
  CHECK(min_ball_measure(s, 1.0) == doctest::Approx(0.2));  // open balls
  CHECK(min_ball_measure(s, 1.5) == doctest::Approx(0.5));  // ball {1, 2}
  CHECK(min_ball_measure(s, 3.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(min_ball_measure(s, 0.0), DomainError);

  double previous = 0.0;
  for (double delta = 0.1; delta < 4; delta += 0.1) {
    const double m = min_ball_measure(s, delta);
    CHECK(m >= previous);
    previous = m;
  }

  // N(eps/4) = 3 at eps = 1: bound = 96 * (delta + t / 0.2).
  CHECK(exit_time_bound(s, 1.0, 0.5, 0.1) == doctest::Approx(96.0 * (0.5 + 0.5)));
  double last = 0.0;
  for (double t : {0.01, 0.1, 1.0}) {
    const double b = exit_time_bound(s, 1.0, 0.5, t);
    CHECK(b > last);
    last = b;
  }
  CHECK_THROWS_AS(exit_time_bound(s, 1.0, 0.5, 0.0), DomainError);

  const std::vector<double> grid = delta_grid(s, 5);
  CHECK(grid.size() == 5);
  CHECK(grid.front() == doctest::Approx(0.5));
  CHECK(grid.back() == doctest::Approx(2.0));
  const ExitBound best = best_exit_time_bound(s, 1.0, 0.1, grid);
  for (double d : grid) CHECK(best.bound <= exit_time_bound(s, 1.0, d, 0.1));
  CHECK_THROWS_AS(best_exit_time_bound(s, 1.0, 0.1, {}), DomainError);
}

TEST_CASE("monte carlo exit probabilities") {
  const GasketGraph g = gasket_graph(2);
  const VertexMeasure mu = VertexMeasure::uniform(g.net.size());
  const ResistanceMatrix r = resistance_matrix(g.net);

  const ExitProbability far = mc_exit_prob(g.net, mu, r, 2 * r.diameter(), 1.0, 50, 1);
  CHECK(far.sup.mean == 0.0);
  const ExitProbability instant = mc_exit_prob(g.net, mu, r, 0.1, 0.0, 50, 1);
  CHECK(instant.sup.mean == 0.0);

  const double eps = 0.5, t = 0.05;
  const ExitProbability p = mc_exit_prob(g.net, mu, r, eps, t, 2000, 7);
  CHECK(p.per_start.size() == g.net.size());
  CHECK(p.sup.mean == p.per_start[p.argmax].mean);
  for (const MCEstimate& e : p.per_start) CHECK(e.mean <= p.sup.mean);
  const FiniteMMSpace space = as_mm_space(g.net, mu, 0);
  const ExitBound bound = best_exit_time_bound(space, eps, t, delta_grid(space));
  CHECK(p.sup.mean <= bound.bound + 4 * p.sup.std_error);

  const ExitProbability again = mc_exit_prob(g.net, mu, r, eps, t, 2000, 7);
  CHECK(again.sup.mean == p.sup.mean);
  CHECK_THROWS_AS(mc_exit_prob(g.net, mu, r, eps, t, 0, 7), DomainError);
}
