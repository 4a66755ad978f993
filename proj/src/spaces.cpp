#include "resnet/spaces.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "resnet/errors.hpp"

namespace resnet {

// ---------------------------------------------------------------------------
// FiniteMMSpace

FiniteMMSpace::FiniteMMSpace(std::vector<std::string> points, Eigen::MatrixXd metric, std::vector<double> measure,
                             std::size_t root)
    : points_(std::move(points)), metric_(std::move(metric)), measure_(std::move(measure)), root_(root) {
  const auto n = static_cast<long>(points_.size());
  if (n == 0) throw DomainError("metric measure space needs at least one point");
  if (metric_.rows() != n || metric_.cols() != n || static_cast<long>(measure_.size()) != n) {
    throw DomainError("metric/measure shape does not match the point list");
  }
  if (root_ >= points_.size()) throw DomainError("root out of range");
  for (double w : measure_) {
    if (!(w > 0.0) || !std::isfinite(w)) throw DomainError("measure weights must be positive and finite");
  }
  double diam = 0.0;
  for (long i = 0; i < n; ++i) {
    if (metric_(i, i) != 0.0) throw DomainError("metric diagonal must be zero");
    for (long j = i + 1; j < n; ++j) {
      if (!(metric_(i, j) > 0.0) || !std::isfinite(metric_(i, j)) || metric_(i, j) != metric_(j, i)) {
        throw DomainError("metric must be symmetric with positive off-diagonal entries");
      }
      diam = std::max(diam, metric_(i, j));
    }
  }
  const double slack = 1e-9 * diam;
  for (long x = 0; x < n; ++x) {
    for (long y = 0; y < n; ++y) {
      for (long z = 0; z < n; ++z) {
        if (metric_(x, z) > metric_(x, y) + metric_(y, z) + slack) {
          throw DomainError("metric violates the triangle inequality");
        }
      }
    }
  }
}

double FiniteMMSpace::diameter() const { return metric_.size() ? metric_.maxCoeff() : 0.0; }

double FiniteMMSpace::total_mass() const { return std::accumulate(measure_.begin(), measure_.end(), 0.0); }

FiniteMMSpace FiniteMMSpace::restrict_to(const std::vector<std::size_t>& subset) const {
  const auto m = static_cast<long>(subset.size());
  std::vector<std::string> pts;
  std::vector<double> mass;
  Eigen::MatrixXd d(m, m);
  std::size_t new_root = subset.size();
  for (long a = 0; a < m; ++a) {
    if (subset[a] >= size()) throw DomainError("restrict_to: point out of range");
    pts.push_back(points_[subset[a]]);
    mass.push_back(measure_[subset[a]]);
    if (subset[a] == root_) new_root = static_cast<std::size_t>(a);
    for (long b = 0; b < m; ++b) d(a, b) = metric_(subset[a], subset[b]);
  }
  if (new_root == subset.size()) throw DomainError("restrict_to: subset must contain the root");
  return FiniteMMSpace(std::move(pts), std::move(d), std::move(mass), new_root);
}

FiniteMMSpace FiniteMMSpace::with_measure(std::vector<double> measure) const {
  return FiniteMMSpace(points_, metric_, std::move(measure), root_);
}

// ---------------------------------------------------------------------------
// Gasket

std::size_t gasket_vertex_count(unsigned level) {
  std::size_t p = 1;
  for (unsigned i = 0; i < level; ++i) p *= 3;
  return 3 * (p + 1) / 2;
}

std::size_t gasket_edge_count(unsigned level) {
  std::size_t p = 3;
  for (unsigned i = 0; i < level; ++i) p *= 3;
  return p;
}

GasketGraph gasket_graph(unsigned level) {
  if (level > 12) throw DomainError("gasket level must be at most 12");
  const long side = 1L << level;
  using Point = std::pair<long, long>;  // (j, i), the vertex order

  // Unit triangles of the level-n graph: three half-size copies of the parent
  // triangle glued at their shared corners.
  std::vector<Point> triangles;
  auto subdivide = [&](auto&& self, long i0, long j0, long size) -> void {
    if (size == 1) {
      triangles.push_back({j0, i0});
      return;
    }
    const long half = size / 2;
    self(self, i0, j0, half);
    self(self, i0 + half, j0, half);
    self(self, i0, j0 + half, half);
  };
  subdivide(subdivide, 0, 0, side);

  std::vector<Point> points;
  points.reserve(3 * triangles.size());
  for (const auto& [j, i] : triangles) {
    points.push_back({j, i});
    points.push_back({j, i + 1});
    points.push_back({j + 1, i});
  }
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  auto id = [&](long i, long j) {
    return static_cast<VertexId>(std::lower_bound(points.begin(), points.end(), Point{j, i}) - points.begin());
  };

  std::vector<Edge> edges;
  edges.reserve(3 * triangles.size());
  for (const auto& [j, i] : triangles) {
    const VertexId a = id(i, j);
    const VertexId b = id(i + 1, j);
    const VertexId c = id(i, j + 1);
    edges.push_back({a, b, 1.0});
    edges.push_back({a, c, 1.0});
    edges.push_back({b, c, 1.0});
  }

  std::vector<std::string> labels;
  std::vector<std::pair<double, double>> coords;
  labels.reserve(points.size());
  coords.reserve(points.size());
  const double scale = 1.0 / static_cast<double>(side);
  for (const auto& [j, i] : points) {
    labels.push_back(std::to_string(i) + ":" + std::to_string(j));
    coords.push_back({(static_cast<double>(i) + 0.5 * static_cast<double>(j)) * scale,
                      static_cast<double>(j) * scale * std::sqrt(3.0) / 2.0});
  }

  GasketGraph g{level, Network(std::move(labels), std::move(edges)), {}, std::move(coords)};
  g.corners = {id(0, 0), id(side, 0), id(0, side)};
  return g;
}

// ---------------------------------------------------------------------------
// Interval approximations

Network path_graph(std::size_t k, double total_resistance) {
  if (k < 1) throw DomainError("path_graph needs at least one edge");
  if (!(total_resistance > 0.0)) throw DomainError("path_graph total resistance must be positive");
  const double c = static_cast<double>(k) / total_resistance;
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < k; ++i) edges.push_back({i, i + 1, c});
  return Network::from_edges(k + 1, std::move(edges));
}

Network alpha_interval_space(std::size_t k, double alpha, double tolerance) {
  if (k < 2) throw DomainError("alpha_interval_space needs at least two points");
  if (!(alpha > 1.0 && alpha <= 2.0)) throw DomainError("alpha must lie in (1, 2]");
  const auto n = static_cast<long>(k);
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(n, n);
  for (long i = 0; i < n; ++i) {
    for (long j = 0; j < n; ++j) {
      if (i != j) r(i, j) = std::pow(std::abs(static_cast<double>(i - j)) / static_cast<double>(n - 1), alpha - 1.0);
    }
  }
  std::vector<std::string> labels(k);
  for (std::size_t i = 0; i < k; ++i) labels[i] = std::to_string(i);
  ReconstructionOptions options;
  options.tolerance = tolerance;
  return network_from_resistance(ResistanceMatrix(std::move(labels), std::move(r)), options);
}

// ---------------------------------------------------------------------------
// Galton-Watson trees

OffspringLaw OffspringLaw::geometric_half() { return OffspringLaw(Kind::kGeometric, "geometric", {}); }

OffspringLaw OffspringLaw::poisson_one() { return OffspringLaw(Kind::kPoisson, "poisson", {}); }

OffspringLaw OffspringLaw::from_pmf(std::vector<double> pmf, double tolerance) {
  if (pmf.empty()) throw DomainError("offspring pmf is empty");
  double total = 0.0;
  double mean = 0.0;
  std::vector<double> cdf;
  for (std::size_t k = 0; k < pmf.size(); ++k) {
    if (!(pmf[k] >= 0.0)) throw DomainError("offspring pmf entries must be nonnegative");
    total += pmf[k];
    mean += static_cast<double>(k) * pmf[k];
    cdf.push_back(total);
  }
  if (std::abs(total - 1.0) > tolerance) throw DomainError("offspring pmf must sum to 1");
  if (std::abs(mean - 1.0) > tolerance) throw DomainError("offspring law must be critical (mean 1)");
  cdf.back() = 1.0;
  std::ostringstream name;
  name << "pmf(";
  for (std::size_t k = 0; k < pmf.size(); ++k) name << (k ? "," : "") << pmf[k];
  name << ")";
  return OffspringLaw(Kind::kFinite, name.str(), std::move(cdf));
}

OffspringLaw OffspringLaw::parse(const std::string& text) {
  if (text == "geometric") return geometric_half();
  if (text == "poisson") return poisson_one();
  std::vector<double> pmf;
  std::istringstream in(text);
  std::string field;
  while (std::getline(in, field, ',')) {
    try {
      std::size_t used = 0;
      pmf.push_back(std::stod(field, &used));
      if (used != field.size()) throw std::invalid_argument(field);
    } catch (const std::exception&) {
      throw DomainError("offspring law must be 'geometric', 'poisson' or a comma-separated pmf");
    }
  }
  return from_pmf(std::move(pmf));
}

std::uint64_t OffspringLaw::sample(RandomStream& rng) const {
  switch (kind_) {
    case Kind::kGeometric: {
      // Failures before the first success of a fair coin: trailing one bits.
      std::uint64_t k = 0;
      for (;;) {
        const std::uint64_t bits = rng.next();
        const int ones = std::countr_one(bits);
        k += static_cast<std::uint64_t>(ones);
        if (ones < 64) return k;
      }
    }
    case Kind::kPoisson: {
      const double u = rng.uniform();
      double p = std::exp(-1.0);
      double cdf = p;
      std::uint64_t k = 0;
      while (u > cdf && k < 200) {
        ++k;
        p /= static_cast<double>(k);
        cdf += p;
      }
      return k;
    }
    case Kind::kFinite: {
      const double u = rng.uniform();
      const auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
      return static_cast<std::uint64_t>(std::min<long>(it - cdf_.begin(), static_cast<long>(cdf_.size()) - 1));
    }
  }
  return 0;
}

TreeGraph tree_from_offspring(const std::vector<std::uint64_t>& offspring) {
  const std::size_t n = offspring.size();
  if (n == 0) throw DomainError("tree needs at least one vertex");
  TreeGraph tree{Network::from_edges(1, {}), 0, std::vector<VertexId>(n, 0), std::vector<std::size_t>(n, 0)};
  std::vector<Edge> edges;
  edges.reserve(n - 1);
  std::size_t next = 1;
  for (std::size_t v = 0; v < n; ++v) {
    for (std::uint64_t c = 0; c < offspring[v]; ++c) {
      if (next >= n) throw DomainError("offspring counts describe more vertices than given");
      tree.parent[next] = v;
      tree.depth[next] = tree.depth[v] + 1;
      edges.push_back({v, next, 1.0});
      ++next;
    }
  }
  if (next != n) throw DomainError("offspring counts do not describe a tree of the given size");
  tree.net = Network::from_edges(n, std::move(edges));
  return tree;
}

TreeGraph gw_tree(const OffspringLaw& law, std::size_t n, std::uint64_t seed, std::uint64_t budget) {
  if (n < 1) throw DomainError("tree size must be at least 1");
  RandomStream rng(seed);
  std::vector<std::uint64_t> offspring;
  offspring.reserve(n);
  for (std::uint64_t attempt = 0; attempt < budget; ++attempt) {
    offspring.clear();
    std::size_t born = 1;  // vertices created so far, including the root
    bool accepted = false;
    for (std::size_t v = 0; v < born; ++v) {
      const std::uint64_t k = law.sample(rng);
      if (k > n - born) break;  // the tree already exceeds n vertices
      born += k;
      offspring.push_back(k);
      if (v + 1 == born) accepted = (born == n);
    }
    if (accepted) return tree_from_offspring(offspring);
  }
  throw RejectionBudgetExceeded("Galton-Watson rejection sampler exhausted its budget of " + std::to_string(budget) +
                                    " attempts for n = " + std::to_string(n),
                                budget);
}

// ---------------------------------------------------------------------------
// Erdos-Renyi

namespace {

struct DisjointSets {
  explicit DisjointSets(std::size_t n) : parent(n), size(n, 1) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t v) {
    while (parent[v] != v) {
      parent[v] = parent[parent[v]];
      v = parent[v];
    }
    return v;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (size[a] < size[b]) std::swap(a, b);
    parent[b] = a;
    size[a] += size[b];
  }
  std::vector<std::size_t> parent;
  std::vector<std::size_t> size;
};

}  // namespace

Network er_giant_component(std::size_t n, double p, std::uint64_t seed) {
  if (n < 2) throw DomainError("er_giant_component needs n >= 2");
  if (!(p > 0.0 && p <= 1.0)) throw DomainError("edge probability must lie in (0, 1]");
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  if (p >= 1.0) {
    for (std::size_t v = 1; v < n; ++v) {
      for (std::size_t w = 0; w < v; ++w) pairs.push_back({w, v});
    }
  } else {
    // Geometric skips over the pairs (w, v), w < v, in lexicographic order of v.
    RandomStream rng(seed);
    const double log_q = std::log1p(-p);
    std::size_t v = 1;
    double w = -1.0;
    while (v < n) {
      w += 1.0 + std::floor(std::log(rng.uniform()) / log_q);
      while (v < n && w >= static_cast<double>(v)) {
        w -= static_cast<double>(v);
        ++v;
      }
      if (v < n) pairs.push_back({static_cast<std::size_t>(w), v});
    }
  }

  DisjointSets sets(n);
  for (const auto& [a, b] : pairs) sets.unite(a, b);
  std::size_t best_root = sets.find(0);
  for (std::size_t v = 1; v < n; ++v) {
    const std::size_t r = sets.find(v);
    if (sets.size[r] > sets.size[best_root]) best_root = r;
  }

  std::vector<std::size_t> local(n, n);
  std::vector<std::string> labels;
  for (std::size_t v = 0; v < n; ++v) {
    if (sets.find(v) == best_root) {
      local[v] = labels.size();
      labels.push_back(std::to_string(v));
    }
  }
  std::vector<Edge> edges;
  for (const auto& [a, b] : pairs) {
    if (local[a] < n) edges.push_back({local[a], local[b], 1.0});
  }
  return Network(std::move(labels), std::move(edges));
}

// ---------------------------------------------------------------------------
// Heavy tails and packaging

Network heavy_tailed_conductances(const Network& net, double alpha, std::uint64_t seed) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
  RandomStream rng(seed);
  std::vector<double> c(net.edge_count());
  for (double& value : c) value = std::pow(rng.uniform(), -1.0 / alpha);
  return net.with_conductances(c);
}

FiniteMMSpace as_mm_space(const Network& net, const VertexMeasure& mu, VertexId root, double metric_scale,
                          double measure_scale) {
  if (!(metric_scale > 0.0) || !(measure_scale > 0.0)) throw DomainError("scales must be positive");
  if (mu.size() != net.size()) throw DomainError("as_mm_space: measure size mismatch");
  if (root >= net.size()) throw DomainError("as_mm_space: root out of range");
  const ResistanceMatrix r = resistance_matrix(net);
  std::vector<double> mass(mu.weights());
  for (double& m : mass) m *= measure_scale;
  return FiniteMMSpace(net.labels(), r.values() * metric_scale, std::move(mass), root);
}

}  // namespace resnet
