#pragma once

// Generators for the model spaces: Sierpinski gasket graphs, path and
// fractional-power interval approximations, critical Galton-Watson trees,
// Erdos-Renyi components, and heavy-tailed conductance decorations.

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "resnet/mm_space.hpp"
#include "resnet/network.hpp"
#include "resnet/rng.hpp"

namespace resnet {

// Level-n Sierpinski gasket graph. Vertices sit on the triangular lattice
// i*e1 + j*e2 (0 <= i, j, i + j <= 2^n) and are ordered by (j, i); corners
// are (0,0), (2^n,0), (0,2^n). coords holds planar positions in the unit
// triangle.
struct GasketGraph {
  unsigned level = 0;
  Network net;
  std::array<VertexId, 3> corners{};
  std::vector<std::pair<double, double>> coords;
};

GasketGraph gasket_graph(unsigned level);
std::size_t gasket_vertex_count(unsigned level);  // 3(3^n + 1)/2
std::size_t gasket_edge_count(unsigned level);    // 3^(n+1)

// k + 1 vertices in a line, each edge with conductance k / total_resistance.
Network path_graph(std::size_t k, double total_resistance = 1.0);

// Realises R(x_i, x_j) = |x_i - x_j|^(alpha - 1) on k evenly spaced points of
// [0, 1] as a network. Requires k >= 2 and alpha in (1, 2].
Network alpha_interval_space(std::size_t k, double alpha, double tolerance = 1e-9);

// Offspring distribution of a Galton-Watson tree.
class OffspringLaw {
 public:
  static OffspringLaw geometric_half();  // P(k) = 2^-(k+1)
  static OffspringLaw poisson_one();     // P(k) = e^-1 / k!
  // Explicit pmf over {0, 1, ...}; must sum to 1 and have mean 1 (tolerance).
  static OffspringLaw from_pmf(std::vector<double> pmf, double tolerance = 1e-9);
  // "geometric", "poisson", or a comma-separated pmf such as "0.5,0,0.5".
  static OffspringLaw parse(const std::string& text);

  const std::string& name() const { return name_; }
  std::uint64_t sample(RandomStream& rng) const;

 private:
  enum class Kind { kGeometric, kPoisson, kFinite };
  OffspringLaw(Kind kind, std::string name, std::vector<double> cdf)
      : kind_(kind), name_(std::move(name)), cdf_(std::move(cdf)) {}

  Kind kind_;
  std::string name_;
  std::vector<double> cdf_;
};

struct TreeGraph {
  Network net;  // unit conductances, vertices in breadth-first order
  VertexId root = 0;
  std::vector<VertexId> parent;  // parent[root] == root
  std::vector<std::size_t> depth;
  std::size_t size() const { return net.size(); }
};

inline constexpr std::uint64_t kDefaultRejectionBudget = 10'000'000;

// Galton-Watson tree conditioned on exactly n vertices, by rejection. Each
// attempt draws offspring counts in breadth-first order and is abandoned as
// soon as the tree dies out early or exceeds n vertices. Throws
// RejectionBudgetExceeded after `budget` failed attempts.
TreeGraph gw_tree(const OffspringLaw& law, std::size_t n, std::uint64_t seed,
                  std::uint64_t budget = kDefaultRejectionBudget);

// Builds the tree whose breadth-first offspring counts are `offspring`.
TreeGraph tree_from_offspring(const std::vector<std::uint64_t>& offspring);

// Largest connected component of G(n, p), p in (0, 1], as a unit-conductance
// network whose labels are the original vertex numbers in increasing order.
// Ties go to the component containing the smallest vertex number.
Network er_giant_component(std::size_t n, double p, std::uint64_t seed);

// Same topology with i.i.d. Pareto conductances c = U^(-1/alpha), one per edge
// in edges() order, so that P(c >= u) = u^-alpha for u >= 1.
Network heavy_tailed_conductances(const Network& net, double alpha, std::uint64_t seed);

// (V, metric_scale * R, measure_scale * mu, root) with R the effective
// resistance of `net`.
FiniteMMSpace as_mm_space(const Network& net, const VertexMeasure& mu, VertexId root, double metric_scale = 1.0,
                          double measure_scale = 1.0);

}  // namespace resnet
