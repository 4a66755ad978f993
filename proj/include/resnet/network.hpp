#pragma once

// Electrical calculus on finite weighted graphs: energy forms, generators,
// effective resistance, shorting, and the reconstruction of a network from its
// resistance matrix.

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

namespace resnet {

using VertexId = std::size_t;
using VertexSet = std::vector<VertexId>;

// Function on the vertex set, indexed like Network::label().
using PotentialFunction = Eigen::VectorXd;

struct Edge {
  VertexId u;  // u < v
  VertexId v;
  double conductance;
};

struct Neighbor {
  VertexId vertex;
  double conductance;
};

// Finite connected graph with strictly positive symmetric edge conductances.
//
// Vertex order is the order of the label list given at construction and never
// changes, so matrices and exported files are reproducible. Parallel edges are
// merged by adding their conductances; self-loops and non-positive or
// non-finite conductances are rejected, as is a disconnected graph.
class Network {
 public:
  Network(std::vector<std::string> labels, std::vector<Edge> edges);

  // Unlabelled convenience constructor; vertices are named "0".."n-1".
  static Network from_edges(std::size_t vertex_count, std::vector<Edge> edges);

  std::size_t size() const { return labels_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  const std::string& label(VertexId v) const { return labels_.at(v); }
  const std::vector<std::string>& labels() const { return labels_; }
  // Throws DomainError for an unknown label.
  VertexId index(const std::string& label) const;
  bool contains(const std::string& label) const;

  // Edges sorted by (u, v) with u < v.
  const std::vector<Edge>& edges() const { return edges_; }
  std::span<const Neighbor> neighbors(VertexId v) const;

  // c(u, v); zero when there is no edge.
  double conductance(VertexId u, VertexId v) const;
  // c(x) = sum_y c(x, y).
  double total_conductance(VertexId v) const { return vertex_conductance_[v]; }

  // Same topology, new conductances given in edges() order.
  Network with_conductances(std::span<const double> conductances) const;

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, VertexId> index_;
  std::vector<Edge> edges_;
  std::vector<std::size_t> offsets_;
  std::vector<Neighbor> adjacency_;
  std::vector<double> vertex_conductance_;
};

// Full-support finite measure on the vertices.
class VertexMeasure {
 public:
  explicit VertexMeasure(std::vector<double> weights);
  static VertexMeasure uniform(std::size_t n, double weight = 1.0);

  std::size_t size() const { return weights_.size(); }
  double operator[](VertexId v) const { return weights_[v]; }
  const std::vector<double>& weights() const { return weights_; }
  double total() const;

 private:
  std::vector<double> weights_;
};

// Dense symmetric matrix of pairwise effective resistances.
//
// Construction checks symmetry (to a relative 1e-12), a zero diagonal and
// strictly positive finite off-diagonal entries. The triangle inequality is
// a property of genuine resistance matrices but is not enforced here, so that
// candidate metrics can be handed to is_resistance_metric().
class ResistanceMatrix {
 public:
  ResistanceMatrix(std::vector<std::string> labels, Eigen::MatrixXd values);

  std::size_t size() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  const Eigen::MatrixXd& values() const { return values_; }
  double operator()(VertexId x, VertexId y) const { return values_(x, y); }
  double diameter() const;

  // Largest violation max(R(x,z) - R(x,y) - R(y,z), 0) over all triples.
  double triangle_violation() const;

  // Quad-precision copy of the entries, kept when resistance_matrix() works in
  // quad precision. Reconstruction reads it when present: rounding R to double
  // alone costs up to ~1e-5 relative error in recovered conductances once
  // they span six decades.
  struct Extended;
  const Extended* extended() const { return extended_.get(); }

 private:
  friend ResistanceMatrix resistance_matrix(const Network& net);

  std::vector<std::string> labels_;
  Eigen::MatrixXd values_;
  std::shared_ptr<const Extended> extended_;
};

// E(f, g) = 1/2 sum_{x~y} c(x,y) (f(x)-f(y)) (g(x)-g(y)).
double energy(const Network& net, const PotentialFunction& f, const PotentialFunction& g);

// (Delta f)(x) = mu(x)^-1 sum_y c(x,y) (f(y) - f(x)).
PotentialFunction laplacian_apply(const Network& net, const VertexMeasure& mu,
                                  const PotentialFunction& f);

// The harmonic function with h(x) = 1, h(y) = 0 and Delta h = 0 elsewhere,
// i.e. the minimiser of E(f, f) under those boundary values. Requires x != y.
PotentialFunction harmonic_potential(const Network& net, VertexId x, VertexId y);

double effective_resistance(const Network& net, VertexId x, VertexId y);

// All pairs from one factorisation of the grounded Laplacian: quad precision
// up to kQuadPrecisionLimit vertices, long double up to kLongDoubleLimit,
// double above.
inline constexpr std::size_t kQuadPrecisionLimit = 64;
inline constexpr std::size_t kLongDoubleLimit = 400;
ResistanceMatrix resistance_matrix(const Network& net);

// Network with the vertex set A glued into one vertex. Edges inside A vanish,
// parallel edges merge. The glued vertex keeps the label of the smallest index
// in A and sits at that position in the vertex order.
struct ShortedNetwork {
  Network net;
  std::vector<VertexId> image;  // original vertex -> vertex of `net`
  VertexId shorted_vertex;
};
ShortedNetwork short_set(const Network& net, const VertexSet& a);

// R_A(y, z): resistance between y and z when A is held at a common potential.
double shorted_resistance(const Network& net, const VertexSet& a, VertexId y, VertexId z);

// R(y, A): resistance between y and the glued vertex A.
double resistance_to_set(const Network& net, VertexId y, const VertexSet& a);

struct ReconstructionOptions {
  double tolerance = 1e-9;  // absolute, on recovered conductances
  VertexId base = 0;
};

// Inverts the correspondence network -> resistance matrix through the Green
// matrix g(y,z) = (R(b,y) + R(b,z) - R(y,z)) / 2 grounded at the base vertex b.
// Throws NotAResistanceMetric when the Green matrix is not positive definite,
// a recovered conductance is below -tolerance, or the recovered graph is
// disconnected. Conductances with magnitude below tolerance are dropped.
Network network_from_resistance(const ResistanceMatrix& r, const ReconstructionOptions& options = {});

struct MetricDecision {
  bool accepted = false;
  std::optional<Network> witness;
  std::string reason;  // empty when accepted
};
MetricDecision is_resistance_metric(const ResistanceMatrix& r, const ReconstructionOptions& options = {});

}  // namespace resnet
