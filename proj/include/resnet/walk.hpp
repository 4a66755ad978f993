#pragma once

// Continuous-time random walk with generator Delta: from x the walk jumps to y
// at rate c(x,y)/mu(x). Holding times at x are Exp(c(x)/mu(x)) and the next
// state is drawn from the jump chain P(x,y) = c(x,y)/c(x).

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "resnet/network.hpp"
#include "resnet/rng.hpp"

namespace resnet {

// Row-stochastic transition matrix of the jump chain.
Eigen::MatrixXd jump_chain_matrix(const Network& net);

// mu(x) = c(x): unit-rate holding times.
VertexMeasure csrw_measure(const Network& net);
// mu(x) = 1: holding rate c(x).
VertexMeasure vsrw_measure(const Network& net);

// Cadlag path on [0, end_time]. states[i] is occupied from jump_times[i] until
// jump_times[i+1]; the last state is held. end_time is the horizon, or the
// entry time into the stop set when `stopped` is set.
struct Trajectory {
  std::vector<VertexId> states;
  std::vector<double> jump_times;
  double horizon = 0.0;
  double end_time = 0.0;
  bool stopped = false;

  std::size_t size() const { return states.size(); }
  VertexId state_at(double t) const;
};

// Runs until `horizon` or the first entry into `stop`, whichever comes first.
// Starting inside `stop` yields a single-state path of duration 0.
Trajectory simulate(const Network& net, const VertexMeasure& mu, VertexId start, double horizon,
                    const std::optional<VertexSet>& stop, std::uint64_t seed);

// First time the path is in A; nullopt if A is not visited.
std::optional<double> hitting_time(const Trajectory& traj, const VertexSet& a);

// L_t(x) = (time spent at x up to t) / mu(x), so that sum_x L_t(x) mu(x) = t.
// The final state is held past end_time, which lets t range over [0, horizon].
struct LocalTimeField {
  std::vector<double> values;
  double elapsed = 0.0;
};
LocalTimeField local_times(const Trajectory& traj, const VertexMeasure& mu, double t);

// Precomputed jump tables for Monte Carlo loops that do not need the full
// trajectory. Immutable after construction and safe to share across threads.
class WalkEngine {
 public:
  WalkEngine(const Network& net, const VertexMeasure& mu);

  std::size_t size() const { return rate_.size(); }
  // Total jump rate c(x)/mu(x).
  double rate(VertexId x) const { return rate_[x]; }

  double holding_time(VertexId x, RandomStream& rng) const { return rng.exponential(rate_[x]); }
  VertexId jump(VertexId x, RandomStream& rng) const;

  // Runs the walk from `start`, calling visit(state, entry_time, holding_time)
  // for every sojourn before jumping. The walk stops when visit returns false
  // or after max_jumps jumps. Returns false when the jump cap was hit.
  template <class Visit>
  bool run(VertexId start, RandomStream& rng, std::uint64_t max_jumps, Visit&& visit) const {
    VertexId x = start;
    double t = 0.0;
    for (std::uint64_t jumps = 0;; ++jumps) {
      const double h = holding_time(x, rng);
      if (!visit(x, t, h)) return true;
      if (jumps == max_jumps) return false;
      t += h;
      x = jump(x, rng);
    }
  }

  // Time spent at each vertex during [0, horizon] starting from `start`.
  //
  // With `accelerate`, excursions on a mutually dominant edge {x, y} (each is
  // the other's heaviest neighbour and a round trip x -> y -> x has
  // probability at least 0.9) are sampled in one block: the number of round
  // trips is geometric, the summed holding times are Gamma, and a horizon that
  // falls inside the block is located by Beta bisection of those sums. The
  // result has the same law as step-by-step simulation, at a cost independent
  // of how heavy the edge is.
  std::vector<double> occupation(VertexId start, double horizon, RandomStream& rng, bool accelerate = true) const;

 private:
  VertexId draw(std::size_t begin, std::size_t end, RandomStream& rng) const;
  VertexId exit_jump(VertexId x, RandomStream& rng) const;

  std::vector<double> rate_;
  std::vector<std::size_t> offsets_;
  std::vector<VertexId> targets_;
  std::vector<double> cumulative_;  // per-vertex CDF over targets_

  // Dominant-pair data for accelerated occupation.
  std::vector<VertexId> partner_;
  std::vector<double> partner_probability_;
  std::vector<std::size_t> exit_offsets_;
  std::vector<VertexId> exit_targets_;
  std::vector<double> exit_cumulative_;
};

}  // namespace resnet
