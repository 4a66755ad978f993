#include <algorithm>
#include <cmath>
#include <map>

#include <boost/math/distributions/chi_squared.hpp>

#include "doctest.h"
#include "helpers.hpp"
#include "resnet/errors.hpp"
#include "resnet/resolvent.hpp"
#include "resnet/spaces.hpp"

using namespace resnet;
using namespace testing;

namespace {

std::size_t height(const TreeGraph& t) { return *std::max_element(t.depth.begin(), t.depth.end()); }

// Breadth-first offspring sequence, which identifies a plane tree.
std::vector<std::size_t> shape(const TreeGraph& t) {
  std::vector<std::size_t> kids(t.size(), 0);
  for (VertexId v = 1; v < t.size(); ++v) ++kids[t.parent[v]];
  return kids;
}

double chi_square_pvalue(const std::map<std::vector<std::size_t>, int>& counts, std::size_t shapes, int samples) {
  double stat = 0.0;
  const double expected = static_cast<double>(samples) / static_cast<double>(shapes);
  for (const auto& [s, c] : counts) stat += (c - expected) * (c - expected) / expected;
  const boost::math::chi_squared dist(static_cast<double>(shapes - 1));
  return boost::math::cdf(boost::math::complement(dist, stat));
}

}  // namespace

TEST_CASE("gasket sizes and corners") {
  CHECK(gasket_graph(0).net.size() == 3);
  CHECK(gasket_graph(1).net.size() == 6);
  CHECK(gasket_graph(2).net.size() == 15);
  for (unsigned n = 0; n <= 7; ++n) {
    const GasketGraph g = gasket_graph(n);
    CHECK(g.net.size() == gasket_vertex_count(n));
    CHECK(g.net.edge_count() == gasket_edge_count(n));
    CHECK(g.coords.size() == g.net.size());
    for (VertexId c : g.corners) CHECK(g.net.neighbors(c).size() == 2);
    for (const Edge& e : g.net.edges()) CHECK(e.conductance == 1.0);
    // Every other vertex has degree 4.
    std::size_t four = 0;
    for (VertexId v = 0; v < g.net.size(); ++v) four += g.net.neighbors(v).size() == 4;
    CHECK(four == g.net.size() - 3);
  }
  const GasketGraph g2 = gasket_graph(2);
  CHECK(g2.net.label(g2.corners[0]) == "0:0");
  CHECK(g2.net.label(g2.corners[1]) == "4:0");
  CHECK(g2.net.label(g2.corners[2]) == "0:4");
  CHECK(g2.coords[g2.corners[1]].first == doctest::Approx(1.0));
  CHECK_THROWS_AS(gasket_graph(13), DomainError);
}

TEST_CASE("gasket renormalisation") {
  CHECK(effective_resistance(gasket_graph(0).net, 0, 1) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  double previous = 0.0;
  for (unsigned n = 0; n <= 6; ++n) {
    const GasketGraph g = gasket_graph(n);
    const double r = effective_resistance(g.net, g.corners[0], g.corners[1]);
    CHECK(r == doctest::Approx(effective_resistance(g.net, g.corners[1], g.corners[2])).epsilon(1e-10));
    if (n > 0 && n <= 5) CHECK(std::abs(r / previous - 5.0 / 3.0) <= 1e-9);
    previous = r;
  }
}

TEST_CASE("path graphs") {
  const Network one = path_graph(1, 1.0);
  CHECK(one.edge_count() == 1);
  CHECK(one.conductance(0, 1) == 1.0);
  const Network four = path_graph(4, 1.0);
  CHECK(std::abs(effective_resistance(four, 0, 4) - 1.0) <= 1e-12);
  for (VertexId i = 1; i <= 4; ++i) CHECK(std::abs(effective_resistance(four, 0, i) - i / 4.0) <= 1e-12);
  CHECK(effective_resistance(path_graph(5, 3.0), 0, 5) == doctest::Approx(3.0));
  CHECK_THROWS_AS(path_graph(0), DomainError);
}

TEST_CASE("alpha interval spaces") {
  const Network euclid = alpha_interval_space(6, 2.0);
  CHECK(euclid.edge_count() == 5);
  for (VertexId i = 0; i < 5; ++i) CHECK(euclid.conductance(i, i + 1) == doctest::Approx(5.0));

  for (double alpha : {1.25, 1.5, 2.0}) {
    const Network two = alpha_interval_space(2, alpha);
    CHECK(two.edge_count() == 1);
    CHECK(two.conductance(0, 1) == doctest::Approx(1.0));
  }

  const Network five = alpha_interval_space(5, 1.5);
  const ResistanceMatrix r = resistance_matrix(five);
  for (VertexId i = 0; i < 5; ++i) {
    for (VertexId j = 0; j < 5; ++j) {
      if (i == j) continue;
      const double target = std::pow(std::abs(static_cast<double>(i) - static_cast<double>(j)) / 4.0, 0.5);
      CHECK(std::abs(r(i, j) - target) <= 1e-8 * target);
    }
  }
  CHECK_THROWS_AS(alpha_interval_space(5, 1.0), DomainError);
  CHECK_THROWS_AS(alpha_interval_space(5, 2.5), DomainError);
  CHECK_THROWS_AS(alpha_interval_space(1, 1.5), DomainError);
}

TEST_CASE("offspring laws") {
  CHECK(OffspringLaw::parse("geometric").name() == "geometric");
  CHECK(OffspringLaw::parse("poisson").name() == "poisson");
  CHECK_NOTHROW(OffspringLaw::parse("0.5,0,0.5"));
  CHECK_THROWS_AS(OffspringLaw::parse("0.5,0.5"), DomainError);  // mean 1/2
  CHECK_THROWS_AS(OffspringLaw::parse("0.2,0.2"), DomainError);  // sums to 0.4
  CHECK_THROWS_AS(OffspringLaw::parse("binomial"), DomainError);
  CHECK_THROWS_AS(OffspringLaw::from_pmf({-0.5, 2.0, -0.5}), DomainError);

  RandomStream rng(3);
  for (const OffspringLaw& law : {OffspringLaw::geometric_half(), OffspringLaw::poisson_one(),
                                  OffspringLaw::parse("0.25,0.5,0.25")}) {
    std::vector<double> xs;
    for (int i = 0; i < 100000; ++i) xs.push_back(static_cast<double>(law.sample(rng)));
    const MCEstimate est = summarize(xs);
    CHECK(std::abs(est.mean - 1.0) <= 4 * est.std_error);
  }
}

TEST_CASE("galton-watson trees") {
  const TreeGraph one = gw_tree(OffspringLaw::geometric_half(), 1, 5);
  CHECK(one.size() == 1);
  const TreeGraph two = gw_tree(OffspringLaw::poisson_one(), 2, 5);
  CHECK(two.size() == 2);
  CHECK(two.parent[1] == 0);

  for (std::size_t n : {3, 10, 57}) {
    const TreeGraph t = gw_tree(OffspringLaw::geometric_half(), n, 9);
    CHECK(t.size() == n);
    CHECK(t.net.edge_count() == n - 1);
    const TreeGraph again = gw_tree(OffspringLaw::geometric_half(), n, 9);
    CHECK(again.parent == t.parent);
  }

  // Binary-or-nothing offspring only produce odd sizes.
  CHECK_THROWS_AS(gw_tree(OffspringLaw::parse("0.5,0,0.5"), 4, 1, 1000), RejectionBudgetExceeded);
  try {
    gw_tree(OffspringLaw::parse("0.5,0,0.5"), 4, 1, 1000);
  } catch (const RejectionBudgetExceeded& e) {
    CHECK(e.attempts() == 1000);
  }
  CHECK_THROWS_AS(gw_tree(OffspringLaw::geometric_half(), 0, 1), DomainError);

  const TreeGraph built = tree_from_offspring({2, 1, 0, 0});
  CHECK(built.parent == std::vector<VertexId>{0, 0, 0, 1});
  CHECK(built.depth == std::vector<std::size_t>{0, 1, 1, 2});
  CHECK_THROWS_AS(tree_from_offspring({2, 0}), DomainError);
  CHECK_THROWS_AS(tree_from_offspring({1, 0, 0}), DomainError);
}

TEST_CASE("conditioned geometric trees are uniform over shapes") {
  // Catalan numbers: 2 plane trees on 3 vertices, 5 on 4.
  for (const auto& [n, shapes] : std::vector<std::pair<std::size_t, std::size_t>>{{3, 2}, {4, 5}}) {
    std::map<std::vector<std::size_t>, int> counts;
    const int samples = 10000;
    for (int i = 0; i < samples; ++i) {
      ++counts[shape(gw_tree(OffspringLaw::geometric_half(), n, derive_seed(n, static_cast<std::uint64_t>(i))))];
    }
    CHECK(counts.size() == shapes);
    CHECK(chi_square_pvalue(counts, shapes, samples) > 0.001);
  }
}

TEST_CASE("tree height scales like the square root of size") {
  auto mean_height = [](std::size_t n) {
    double total = 0.0;
    for (std::uint64_t i = 0; i < 1000; ++i) {
      total += static_cast<double>(height(gw_tree(OffspringLaw::geometric_half(), n, derive_seed(n, i))));
    }
    return total / 1000.0;
  };
  const double ratio = mean_height(400) / mean_height(100);
  CHECK(ratio >= 1.6);
  CHECK(ratio <= 2.4);
}

TEST_CASE("erdos-renyi components") {
  const Network complete = er_giant_component(12, 1.0, 1);
  CHECK(complete.size() == 12);
  CHECK(complete.edge_count() == 66);

  const Network sparse = er_giant_component(50, 1e-6, 3);
  CHECK(sparse.size() <= 2);

  const Network a = er_giant_component(500, 2.0 / 500, 7);
  const Network b = er_giant_component(500, 2.0 / 500, 7);
  CHECK(a.labels() == b.labels());
  CHECK(a.edge_count() == b.edge_count());
  for (std::size_t i = 1; i < a.size(); ++i) CHECK(std::stoul(a.label(i - 1)) < std::stoul(a.label(i)));

  // Ties: with no edges every component is a singleton, vertex 0 wins.
  CHECK(er_giant_component(5, 1e-300, 1).label(0) == "0");

  const double n = 1e4;
  std::vector<double> sizes;
  for (std::uint64_t s = 0; s < 30; ++s) {
    sizes.push_back(static_cast<double>(er_giant_component(10000, 1.0 / n, derive_seed(11, s)).size()));
  }
  std::sort(sizes.begin(), sizes.end());
  const double median = 0.5 * (sizes[14] + sizes[15]);
  CHECK(median >= std::pow(n, 2.0 / 3.0) / 10);
  CHECK(median <= std::pow(n, 2.0 / 3.0) * 10);

  CHECK_THROWS_AS(er_giant_component(1, 0.5, 1), DomainError);
  CHECK_THROWS_AS(er_giant_component(10, 0.0, 1), DomainError);
}

TEST_CASE("heavy-tailed conductances") {
  const Network path = path_graph(100000, 100000.0);
  const Network heavy = heavy_tailed_conductances(path, 0.5, 5);
  std::vector<double> c;
  std::vector<double> over2;
  for (const Edge& e : heavy.edges()) {
    CHECK(e.conductance >= 1.0);
    c.push_back(e.conductance);
    over2.push_back(e.conductance >= 2.0 ? 1.0 : 0.0);
  }
  const MCEstimate tail = summarize(over2);
  CHECK(std::abs(tail.mean - std::pow(2.0, -0.5)) <= 4 * tail.std_error);
  std::nth_element(c.begin(), c.begin() + 50000, c.end());
  CHECK(std::abs(c[50000] - 4.0) <= 0.4);

  const Network same = heavy_tailed_conductances(path, 0.5, 5);
  CHECK(same.edges().front().conductance == heavy.edges().front().conductance);
  CHECK_THROWS_AS(heavy_tailed_conductances(path, 1.0, 5), DomainError);
  CHECK_THROWS_AS(heavy_tailed_conductances(path, 0.0, 5), DomainError);
}

TEST_CASE("metric measure packaging") {
  const Network tri = unit_triangle();
  const FiniteMMSpace s = as_mm_space(tri, VertexMeasure::uniform(3), 1);
  CHECK(s.root() == 1);
  CHECK(s.distance(0, 2) == doctest::Approx(2.0 / 3.0));
  CHECK(s.total_mass() == 3.0);

  const FiniteMMSpace p = as_mm_space(path_graph(8, 8.0), VertexMeasure::uniform(9), 0, 1.0 / 8.0, 0.5);
  CHECK(p.distance(0, 8) == doctest::Approx(1.0));
  CHECK(p.measure()[3] == 0.5);

  for (unsigned n = 0; n <= 4; ++n) {
    const GasketGraph g = gasket_graph(n);
    const FiniteMMSpace gs =
        as_mm_space(g.net, VertexMeasure::uniform(g.net.size()), g.corners[0], std::pow(0.6, n), 1.0);
    CHECK(gs.distance(g.corners[0], g.corners[1]) == doctest::Approx(2.0 / 3.0).epsilon(1e-10));
  }

  CHECK_THROWS_AS(as_mm_space(tri, VertexMeasure::uniform(3), 0, 0.0, 1.0), DomainError);
  CHECK_THROWS_AS(as_mm_space(tri, VertexMeasure::uniform(3), 3), DomainError);

  const FiniteMMSpace sub = s.restrict_to({2, 1});
  CHECK(sub.size() == 2);
  CHECK(sub.root() == 1);
  CHECK_THROWS_AS(s.restrict_to({0, 2}), DomainError);

  Eigen::MatrixXd bad(3, 3);
  bad << 0, 1, 5, 1, 0, 1, 5, 1, 0;
  CHECK_THROWS_AS(FiniteMMSpace({"a", "b", "c"}, bad, {1, 1, 1}, 0), DomainError);
  CHECK_THROWS_AS(FiniteMMSpace({"a", "b", "c"}, Eigen::MatrixXd::Zero(3, 3), {1, 1, 1}, 0), DomainError);
  CHECK_THROWS_AS(s.with_measure({1, 0, 1}), DomainError);
}
