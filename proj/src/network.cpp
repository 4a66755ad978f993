#include "resnet/network.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "extended.hpp"
#include "resnet/errors.hpp"

namespace resnet {

namespace {

void require_vertex(const Network& net, VertexId v, const char* what) {
  if (v >= net.size()) {
    throw DomainError(std::string(what) + ": vertex index " + std::to_string(v) +
                      " out of range (network has " + std::to_string(net.size()) + " vertices)");
  }
}

void require_function(const Network& net, const PotentialFunction& f, const char* what) {
  if (static_cast<std::size_t>(f.size()) != net.size()) {
    throw DomainError(std::string(what) + ": function has " + std::to_string(f.size()) +
                      " values but the network has " + std::to_string(net.size()) + " vertices");
  }
}

// Laplacian with the rows and columns of `ground` removed. `slot[v]` is the
// row of v, or -1 for the ground vertex.
Eigen::SparseMatrix<double> grounded_laplacian(const Network& net, VertexId ground,
                                               std::vector<long>& slot) {
  const std::size_t n = net.size();
  slot.assign(n, -1);
  long next = 0;
  for (VertexId v = 0; v < n; ++v) {
    if (v != ground) slot[v] = next++;
  }
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(n + 2 * net.edge_count());
  for (VertexId v = 0; v < n; ++v) {
    if (slot[v] >= 0) triplets.emplace_back(slot[v], slot[v], net.total_conductance(v));
  }
  for (const Edge& e : net.edges()) {
    if (slot[e.u] >= 0 && slot[e.v] >= 0) {
      triplets.emplace_back(slot[e.u], slot[e.v], -e.conductance);
      triplets.emplace_back(slot[e.v], slot[e.u], -e.conductance);
    }
  }
  Eigen::SparseMatrix<double> lap(next, next);
  lap.setFromTriplets(triplets.begin(), triplets.end());
  return lap;
}

// Potential v with v(ground) = 0 and unit current injected at `source`, so that
// v(source) = R(source, ground).
PotentialFunction unit_current_potential(const Network& net, VertexId source, VertexId ground) {
  std::vector<long> slot;
  const Eigen::SparseMatrix<double> lap = grounded_laplacian(net, ground, slot);
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(lap);
  if (solver.info() != Eigen::Success) {
    throw InternalError("grounded Laplacian factorisation failed");
  }
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(lap.rows());
  rhs(slot[source]) = 1.0;
  const Eigen::VectorXd sol = solver.solve(rhs);
  if (solver.info() != Eigen::Success || !sol.allFinite()) {
    throw InternalError("grounded Laplacian solve failed");
  }
  PotentialFunction v = PotentialFunction::Zero(static_cast<long>(net.size()));
  for (VertexId u = 0; u < net.size(); ++u) {
    if (slot[u] >= 0) v(u) = sol(slot[u]);
  }
  return v;
}

}  // namespace

// ---------------------------------------------------------------------------
// Network

Network::Network(std::vector<std::string> labels, std::vector<Edge> edges) : labels_(std::move(labels)) {
  const std::size_t n = labels_.size();
  if (n == 0) throw DomainError("network needs at least one vertex");
  index_.reserve(n);
  for (VertexId v = 0; v < n; ++v) {
    if (!index_.emplace(labels_[v], v).second) {
      throw DomainError("duplicate vertex label '" + labels_[v] + "'");
    }
  }

  for (Edge& e : edges) {
    if (e.u >= n || e.v >= n) throw DomainError("edge endpoint out of range");
    if (e.u == e.v) throw DomainError("self-loop at vertex '" + labels_[e.u] + "'");
    if (!(e.conductance > 0.0) || !std::isfinite(e.conductance)) {
      throw DomainError("conductance on edge '" + labels_[e.u] + "'-'" + labels_[e.v] +
                        "' must be positive and finite");
    }
    if (e.u > e.v) std::swap(e.u, e.v);
  }
  std::sort(edges.begin(), edges.end(),
            [](const Edge& a, const Edge& b) { return a.u != b.u ? a.u < b.u : a.v < b.v; });
  for (const Edge& e : edges) {
    if (!edges_.empty() && edges_.back().u == e.u && edges_.back().v == e.v) {
      edges_.back().conductance += e.conductance;
    } else {
      edges_.push_back(e);
    }
  }

  std::vector<std::size_t> degree(n, 0);
  for (const Edge& e : edges_) {
    ++degree[e.u];
    ++degree[e.v];
  }
  offsets_.assign(n + 1, 0);
  for (VertexId v = 0; v < n; ++v) offsets_[v + 1] = offsets_[v] + degree[v];
  adjacency_.resize(offsets_[n]);
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  vertex_conductance_.assign(n, 0.0);
  for (const Edge& e : edges_) {
    adjacency_[fill[e.u]++] = {e.v, e.conductance};
    adjacency_[fill[e.v]++] = {e.u, e.conductance};
    vertex_conductance_[e.u] += e.conductance;
    vertex_conductance_[e.v] += e.conductance;
  }
  for (VertexId v = 0; v < n; ++v) {
    std::sort(adjacency_.begin() + offsets_[v], adjacency_.begin() + offsets_[v + 1],
              [](const Neighbor& a, const Neighbor& b) { return a.vertex < b.vertex; });
  }

  std::vector<char> seen(n, 0);
  std::queue<VertexId> frontier;
  frontier.push(0);
  seen[0] = 1;
  std::size_t reached = 1;
  while (!frontier.empty()) {
    const VertexId v = frontier.front();
    frontier.pop();
    for (const Neighbor& nb : neighbors(v)) {
      if (!seen[nb.vertex]) {
        seen[nb.vertex] = 1;
        ++reached;
        frontier.push(nb.vertex);
      }
    }
  }
  if (reached != n) {
    throw DomainError("network is disconnected (" + std::to_string(reached) + " of " +
                      std::to_string(n) + " vertices reachable from '" + labels_[0] + "')");
  }
}

Network Network::from_edges(std::size_t vertex_count, std::vector<Edge> edges) {
  std::vector<std::string> labels(vertex_count);
  for (std::size_t i = 0; i < vertex_count; ++i) labels[i] = std::to_string(i);
  return Network(std::move(labels), std::move(edges));
}

VertexId Network::index(const std::string& label) const {
  const auto it = index_.find(label);
  if (it == index_.end()) throw DomainError("unknown vertex '" + label + "'");
  return it->second;
}

bool Network::contains(const std::string& label) const { return index_.count(label) != 0; }

std::span<const Neighbor> Network::neighbors(VertexId v) const {
  return {adjacency_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
}

double Network::conductance(VertexId u, VertexId v) const {
  const auto nbrs = neighbors(u);
  const auto it = std::lower_bound(nbrs.begin(), nbrs.end(), v,
                                   [](const Neighbor& a, VertexId b) { return a.vertex < b; });
  return (it != nbrs.end() && it->vertex == v) ? it->conductance : 0.0;
}

Network Network::with_conductances(std::span<const double> conductances) const {
  if (conductances.size() != edges_.size()) {
    throw DomainError("expected " + std::to_string(edges_.size()) + " conductances, got " +
                      std::to_string(conductances.size()));
  }
  std::vector<Edge> edges = edges_;
  for (std::size_t i = 0; i < edges.size(); ++i) edges[i].conductance = conductances[i];
  return Network(labels_, std::move(edges));
}

// ---------------------------------------------------------------------------
// VertexMeasure

VertexMeasure::VertexMeasure(std::vector<double> weights) : weights_(std::move(weights)) {
  for (std::size_t v = 0; v < weights_.size(); ++v) {
    if (!(weights_[v] > 0.0) || !std::isfinite(weights_[v])) {
      throw DomainError("measure weight at vertex " + std::to_string(v) + " must be positive and finite");
    }
  }
}

VertexMeasure VertexMeasure::uniform(std::size_t n, double weight) {
  return VertexMeasure(std::vector<double>(n, weight));
}

double VertexMeasure::total() const { return std::accumulate(weights_.begin(), weights_.end(), 0.0); }

// ---------------------------------------------------------------------------
// ResistanceMatrix

ResistanceMatrix::ResistanceMatrix(std::vector<std::string> labels, Eigen::MatrixXd values)
    : labels_(std::move(labels)), values_(std::move(values)) {
  const auto n = static_cast<long>(labels_.size());
  if (values_.rows() != n || values_.cols() != n) {
    throw DomainError("resistance matrix shape does not match its labels");
  }
  for (long i = 0; i < n; ++i) {
    if (values_(i, i) != 0.0) throw DomainError("resistance matrix diagonal must be zero");
    for (long j = i + 1; j < n; ++j) {
      const double a = values_(i, j);
      const double b = values_(j, i);
      if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
        throw DomainError("off-diagonal resistances must be positive and finite");
      }
      if (std::abs(a - b) > 1e-12 * std::max(a, b)) {
        throw DomainError("resistance matrix is not symmetric");
      }
    }
  }
}

double ResistanceMatrix::diameter() const { return values_.size() == 0 ? 0.0 : values_.maxCoeff(); }

double ResistanceMatrix::triangle_violation() const {
  const auto n = values_.rows();
  double worst = 0.0;
  for (long x = 0; x < n; ++x) {
    for (long y = 0; y < n; ++y) {
      for (long z = 0; z < n; ++z) {
        worst = std::max(worst, values_(x, z) - values_(x, y) - values_(y, z));
      }
    }
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Forms and resistances

double energy(const Network& net, const PotentialFunction& f, const PotentialFunction& g) {
  require_function(net, f, "energy");
  require_function(net, g, "energy");
  // Each undirected edge once; the 1/2 in the form cancels the double count.
  double total = 0.0;
  for (const Edge& e : net.edges()) {
    total += e.conductance * (f(e.u) - f(e.v)) * (g(e.u) - g(e.v));
  }
  return total;
}

PotentialFunction laplacian_apply(const Network& net, const VertexMeasure& mu, const PotentialFunction& f) {
  require_function(net, f, "laplacian_apply");
  if (mu.size() != net.size()) throw DomainError("laplacian_apply: measure size mismatch");
  PotentialFunction out(f.size());
  for (VertexId x = 0; x < net.size(); ++x) {
    double acc = 0.0;
    for (const Neighbor& nb : net.neighbors(x)) acc += nb.conductance * (f(nb.vertex) - f(x));
    out(x) = acc / mu[x];
  }
  return out;
}

PotentialFunction harmonic_potential(const Network& net, VertexId x, VertexId y) {
  require_vertex(net, x, "harmonic_potential");
  require_vertex(net, y, "harmonic_potential");
  if (x == y) throw DomainError("harmonic_potential: boundary vertices must differ");
  PotentialFunction v = unit_current_potential(net, x, y);
  return v / v(x);
}

double effective_resistance(const Network& net, VertexId x, VertexId y) {
  require_vertex(net, x, "effective_resistance");
  require_vertex(net, y, "effective_resistance");
  if (x == y) return 0.0;
  const double r = unit_current_potential(net, x, y)(x);
  if (!(r > 0.0) || !std::isfinite(r)) throw InternalError("non-positive effective resistance");
  return r;
}

namespace {

// Ground vertex 0. The inverse of the grounded Laplacian is the Green matrix
// g_0, a generalised inverse of L, so the pseudo-inverse formula applies with
// g_0(0, .) = 0. The diagonal is summed from the edges in Scalar, since a
// double-rounded c(x) already perturbs small conductances.
template <class Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> grounded_resistances(const Network& net) {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const auto n = static_cast<long>(net.size());
  Matrix r = Matrix::Zero(n, n);
  if (n == 1) return r;
  Matrix lap = Matrix::Zero(n - 1, n - 1);
  for (const Edge& e : net.edges()) {
    const Scalar c = e.conductance;
    if (e.u != 0) {
      lap(e.u - 1, e.u - 1) += c;
      lap(e.u - 1, e.v - 1) -= c;
      lap(e.v - 1, e.u - 1) -= c;
    }
    lap(e.v - 1, e.v - 1) += c;
  }
  Eigen::LLT<Matrix> llt(lap);
  if (llt.info() != Eigen::Success) throw InternalError("grounded Laplacian is not positive definite");
  const Matrix green = llt.solve(Matrix::Identity(n - 1, n - 1));
  auto g = [&](long a, long b) { return (a == 0 || b == 0) ? Scalar(0) : green(a - 1, b - 1); };
  for (long i = 0; i < n; ++i) {
    for (long j = i + 1; j < n; ++j) {
      const Scalar value = g(i, i) + g(j, j) - g(i, j) - g(j, i);
      r(i, j) = value;
      r(j, i) = value;
    }
  }
  return r;
}

}  // namespace

ResistanceMatrix resistance_matrix(const Network& net) {
  if (net.size() <= kQuadPrecisionLimit) {
    auto extended = std::make_shared<ResistanceMatrix::Extended>();
    extended->values = grounded_resistances<Quad>(net);
    ResistanceMatrix r(net.labels(), extended->values.cast<double>());
    r.extended_ = std::move(extended);
    return r;
  }
  if (net.size() <= kLongDoubleLimit) {
    return ResistanceMatrix(net.labels(), grounded_resistances<long double>(net).cast<double>());
  }
  return ResistanceMatrix(net.labels(), grounded_resistances<double>(net));
}

ShortedNetwork short_set(const Network& net, const VertexSet& a) {
  if (a.empty()) throw DomainError("shorted set must be nonempty");
  std::vector<char> in_set(net.size(), 0);
  for (VertexId v : a) {
    require_vertex(net, v, "short_set");
    in_set[v] = 1;
  }
  const VertexId representative = *std::min_element(a.begin(), a.end());

  std::vector<VertexId> image(net.size());
  std::vector<std::string> labels;
  for (VertexId v = 0; v < net.size(); ++v) {
    if (in_set[v] && v != representative) continue;
    image[v] = labels.size();
    labels.push_back(net.label(v));
  }
  for (VertexId v = 0; v < net.size(); ++v) {
    if (in_set[v]) image[v] = image[representative];
  }
  std::vector<Edge> edges;
  for (const Edge& e : net.edges()) {
    if (image[e.u] != image[e.v]) edges.push_back({image[e.u], image[e.v], e.conductance});
  }
  const VertexId shorted = image[representative];
  return {Network(std::move(labels), std::move(edges)), std::move(image), shorted};
}

double shorted_resistance(const Network& net, const VertexSet& a, VertexId y, VertexId z) {
  require_vertex(net, y, "shorted_resistance");
  require_vertex(net, z, "shorted_resistance");
  const ShortedNetwork s = short_set(net, a);
  return effective_resistance(s.net, s.image[y], s.image[z]);
}

double resistance_to_set(const Network& net, VertexId y, const VertexSet& a) {
  require_vertex(net, y, "resistance_to_set");
  const ShortedNetwork s = short_set(net, a);
  return effective_resistance(s.net, s.image[y], s.shorted_vertex);
}

// ---------------------------------------------------------------------------
// Reconstruction

namespace {

// Green matrix g_b on V \ {b}, inverted. Entry (i, j) of the result is the
// grounded Laplacian at (vertex_of[i], vertex_of[j]).
template <class Scalar, class Entry>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> grounded_laplacian(long n, long b,
                                                                      const std::vector<long>& vertex_of,
                                                                      Entry r) {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Matrix green(n - 1, n - 1);
  for (long i = 0; i < n - 1; ++i) {
    for (long j = 0; j < n - 1; ++j) {
      const long y = vertex_of[i];
      const long z = vertex_of[j];
      green(i, j) = (r(b, y) + r(b, z) - r(y, z)) / 2;
    }
  }
  Eigen::LLT<Matrix> llt(green);
  if (llt.info() != Eigen::Success) {
    throw NotAResistanceMetric("Green matrix is not positive definite");
  }
  return llt.solve(Matrix::Identity(n - 1, n - 1));
}

}  // namespace

Network network_from_resistance(const ResistanceMatrix& r, const ReconstructionOptions& options) {
  const auto n = static_cast<long>(r.size());
  if (options.base >= r.size()) throw DomainError("reconstruction base vertex out of range");
  if (n == 1) return Network(r.labels(), {});

  const auto b = static_cast<long>(options.base);
  std::vector<long> vertex_of(n - 1);
  for (long v = 0, k = 0; v < n; ++v) {
    if (v != b) vertex_of[k++] = v;
  }
  // Recovered conductances: off-diagonal -L(y,z), and row sums toward the base.
  Eigen::MatrixXd off(n - 1, n - 1);
  Eigen::VectorXd to_base(n - 1);
  auto collect = [&](const auto& lap) {
    for (long i = 0; i < n - 1; ++i) {
      to_base[i] = static_cast<double>(lap.row(i).sum());
      for (long j = 0; j < n - 1; ++j) off(i, j) = static_cast<double>(-(lap(i, j) + lap(j, i)) / 2);
    }
  };
  if (const auto* ext = r.extended()) {
    collect(grounded_laplacian<Quad>(n, b, vertex_of, [&](long i, long j) { return ext->values(i, j); }));
  } else {
    // Extended precision still helps: the Green matrix of a network with
    // widely spread conductances is ill-conditioned.
    collect(grounded_laplacian<long double>(n, b, vertex_of,
                                            [&](long i, long j) { return static_cast<long double>(r(i, j)); }));
  }
  if (!off.allFinite() || !to_base.allFinite()) throw NotAResistanceMetric("Green matrix is numerically singular");

  std::vector<Edge> edges;
  auto keep = [&](long u, long v, double c) {
    if (c < -options.tolerance) {
      throw NotAResistanceMetric("recovered conductance " + std::to_string(c) + " between '" +
                                 r.labels()[u] + "' and '" + r.labels()[v] + "' is negative");
    }
    if (std::abs(c) >= options.tolerance) {
      edges.push_back({static_cast<VertexId>(u), static_cast<VertexId>(v), c});
    }
  };
  for (long i = 0; i < n - 1; ++i) {
    keep(vertex_of[i], b, to_base[i]);
    for (long j = i + 1; j < n - 1; ++j) keep(vertex_of[i], vertex_of[j], off(i, j));
  }
  try {
    return Network(r.labels(), std::move(edges));
  } catch (const DomainError& e) {
    throw NotAResistanceMetric(std::string("recovered network is invalid: ") + e.what());
  }
}

MetricDecision is_resistance_metric(const ResistanceMatrix& r, const ReconstructionOptions& options) {
  MetricDecision decision;
  try {
    decision.witness = network_from_resistance(r, options);
    decision.accepted = true;
  } catch (const NotAResistanceMetric& e) {
    decision.reason = e.what();
  }
  return decision;
}

}  // namespace resnet
