#include "resnet/walk.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "resnet/errors.hpp"

namespace resnet {

namespace {

constexpr double kPairThreshold = 0.9;

std::vector<char> membership(std::size_t n, const VertexSet& a, const char* what) {
  if (a.empty()) throw DomainError(std::string(what) + ": vertex set must be nonempty");
  std::vector<char> mask(n, 0);
  for (VertexId v : a) {
    if (v >= n) throw DomainError(std::string(what) + ": vertex index out of range");
    mask[v] = 1;
  }
  return mask;
}

}  // namespace

Eigen::MatrixXd jump_chain_matrix(const Network& net) {
  const auto n = static_cast<long>(net.size());
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
  for (VertexId x = 0; x < net.size(); ++x) {
    for (const Neighbor& nb : net.neighbors(x)) p(x, nb.vertex) = nb.conductance / net.total_conductance(x);
  }
  return p;
}

VertexMeasure csrw_measure(const Network& net) {
  if (net.size() == 1) return VertexMeasure::uniform(1);
  std::vector<double> w(net.size());
  for (VertexId x = 0; x < net.size(); ++x) w[x] = net.total_conductance(x);
  return VertexMeasure(std::move(w));
}

VertexMeasure vsrw_measure(const Network& net) { return VertexMeasure::uniform(net.size()); }

// ---------------------------------------------------------------------------
// Trajectories

VertexId Trajectory::state_at(double t) const {
  const auto it = std::upper_bound(jump_times.begin(), jump_times.end(), t);
  return states[static_cast<std::size_t>(it - jump_times.begin()) - 1];
}

Trajectory simulate(const Network& net, const VertexMeasure& mu, VertexId start, double horizon,
                    const std::optional<VertexSet>& stop, std::uint64_t seed) {
  if (start >= net.size()) throw DomainError("simulate: start vertex not in network");
  if (!(horizon > 0.0)) throw DomainError("simulate: horizon must be positive");
  if (mu.size() != net.size()) throw DomainError("simulate: measure size mismatch");
  std::vector<char> stop_mask;
  if (stop) stop_mask = membership(net.size(), *stop, "simulate");

  Trajectory traj;
  traj.horizon = horizon;
  traj.states.push_back(start);
  traj.jump_times.push_back(0.0);
  if (stop && stop_mask[start]) {
    traj.stopped = true;
    traj.end_time = 0.0;
    return traj;
  }
  traj.end_time = horizon;
  if (net.size() == 1) return traj;

  const WalkEngine engine(net, mu);
  RandomStream rng(seed);
  VertexId x = start;
  double t = 0.0;
  for (;;) {
    const double h = engine.holding_time(x, rng);
    if (t + h > horizon) break;
    t += h;
    x = engine.jump(x, rng);
    traj.states.push_back(x);
    traj.jump_times.push_back(t);
    if (stop && stop_mask[x]) {
      traj.stopped = true;
      traj.end_time = t;
      break;
    }
  }
  return traj;
}

std::optional<double> hitting_time(const Trajectory& traj, const VertexSet& a) {
  if (a.empty()) throw DomainError("hitting_time: vertex set must be nonempty");
  const std::unordered_set<VertexId> target(a.begin(), a.end());
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    if (target.count(traj.states[i])) return traj.jump_times[i];
  }
  return std::nullopt;
}

LocalTimeField local_times(const Trajectory& traj, const VertexMeasure& mu, double t) {
  if (t < 0.0 || t > traj.horizon) throw DomainError("local_times: t must lie in [0, horizon]");
  LocalTimeField field;
  field.values.assign(mu.size(), 0.0);
  field.elapsed = t;
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    const double begin = traj.jump_times[i];
    if (begin >= t) break;
    const double end = (i + 1 < traj.states.size()) ? std::min(traj.jump_times[i + 1], t) : t;
    const VertexId x = traj.states[i];
    if (x >= mu.size()) throw DomainError("local_times: measure does not cover the trajectory");
    field.values[x] += end - begin;
  }
  for (std::size_t x = 0; x < field.values.size(); ++x) field.values[x] /= mu[x];
  return field;
}

// ---------------------------------------------------------------------------
// WalkEngine

WalkEngine::WalkEngine(const Network& net, const VertexMeasure& mu) {
  const std::size_t n = net.size();
  if (mu.size() != n) throw DomainError("WalkEngine: measure size mismatch");
  rate_.resize(n);
  offsets_.assign(n + 1, 0);
  partner_.assign(n, n);
  partner_probability_.assign(n, 0.0);
  exit_offsets_.assign(n + 1, 0);
  for (VertexId x = 0; x < n; ++x) {
    const double cx = net.total_conductance(x);
    rate_[x] = cx / mu[x];
    double acc = 0.0;
    double best = 0.0;
    for (const Neighbor& nb : net.neighbors(x)) {
      acc += nb.conductance;
      targets_.push_back(nb.vertex);
      cumulative_.push_back(acc / cx);
      if (nb.conductance > best) {
        best = nb.conductance;
        partner_[x] = nb.vertex;
      }
    }
    if (!cumulative_.empty() && offsets_[x] < targets_.size()) cumulative_.back() = 1.0;
    offsets_[x + 1] = targets_.size();
    if (cx > 0.0) partner_probability_[x] = best / cx;

    const double rest = cx - best;
    double exit_acc = 0.0;
    for (const Neighbor& nb : net.neighbors(x)) {
      if (nb.vertex == partner_[x]) continue;
      exit_acc += nb.conductance;
      exit_targets_.push_back(nb.vertex);
      exit_cumulative_.push_back(exit_acc / rest);
    }
    if (exit_offsets_[x] < exit_targets_.size()) exit_cumulative_.back() = 1.0;
    exit_offsets_[x + 1] = exit_targets_.size();
  }
}

VertexId WalkEngine::draw(std::size_t begin, std::size_t end, RandomStream& rng) const {
  const double u = rng.uniform();
  const auto first = cumulative_.begin() + static_cast<long>(begin);
  const auto last = cumulative_.begin() + static_cast<long>(end);
  auto it = std::lower_bound(first, last, u);
  if (it == last) --it;
  return targets_[static_cast<std::size_t>(it - cumulative_.begin())];
}

VertexId WalkEngine::jump(VertexId x, RandomStream& rng) const {
  const std::size_t begin = offsets_[x];
  const std::size_t end = offsets_[x + 1];
  if (end - begin == 1) return targets_[begin];
  return draw(begin, end, rng);
}

VertexId WalkEngine::exit_jump(VertexId x, RandomStream& rng) const {
  const std::size_t begin = exit_offsets_[x];
  const std::size_t end = exit_offsets_[x + 1];
  if (end - begin == 1) return exit_targets_[begin];
  const double u = rng.uniform();
  const auto first = exit_cumulative_.begin() + static_cast<long>(begin);
  const auto last = exit_cumulative_.begin() + static_cast<long>(end);
  auto it = std::lower_bound(first, last, u);
  if (it == last) --it;
  return exit_targets_[static_cast<std::size_t>(it - exit_cumulative_.begin())];
}

std::vector<double> WalkEngine::occupation(VertexId start, double horizon, RandomStream& rng,
                                           bool accelerate) const {
  const std::size_t n = size();
  if (start >= n) throw DomainError("occupation: start vertex out of range");
  if (!(horizon >= 0.0)) throw DomainError("occupation: horizon must be nonnegative");
  std::vector<double> occ(n, 0.0);
  if (n == 1) {
    occ[0] = horizon;
    return occ;
  }

  auto compressible = [&](VertexId x) {
    if (!accelerate) return false;
    const VertexId y = partner_[x];
    if (y >= n || partner_[y] != x) return false;
    const double r = partner_probability_[x] * partner_probability_[y];
    return r >= kPairThreshold && r < 1.0;
  };

  VertexId x = start;
  double remaining = horizon;
  for (;;) {
    if (!compressible(x)) {
      const double h = holding_time(x, rng);
      if (h >= remaining) {
        occ[x] += remaining;
        return occ;
      }
      occ[x] += h;
      remaining -= h;
      x = jump(x, rng);
      continue;
    }

    const VertexId y = partner_[x];
    const double px = partner_probability_[x];
    const double py = partner_probability_[y];
    const double round_trip = px * py;
    const std::uint64_t trips = rng.geometric_failures(1.0 - round_trip);
    if (trips > 0) {
      const auto k = static_cast<double>(trips);
      double tx = rng.gamma(k) / rate_[x];
      double ty = rng.gamma(k) / rate_[y];
      if (tx + ty >= remaining) {
        // The horizon falls inside the block. Halve the block until one round
        // trip is left, splitting each Gamma sum with an independent Beta.
        std::uint64_t m = trips;
        while (m > 1) {
          const std::uint64_t half = m / 2;
          const double a = static_cast<double>(half);
          const double b = static_cast<double>(m - half);
          const double fx = tx * rng.beta(a, b);
          const double fy = ty * rng.beta(a, b);
          if (fx + fy >= remaining) {
            m = half;
            tx = fx;
            ty = fy;
          } else {
            occ[x] += fx;
            occ[y] += fy;
            remaining -= fx + fy;
            m -= half;
            tx -= fx;
            ty -= fy;
          }
        }
        if (remaining <= tx) {
          occ[x] += remaining;
        } else {
          occ[x] += tx;
          occ[y] += remaining - tx;
        }
        return occ;
      }
      occ[x] += tx;
      occ[y] += ty;
      remaining -= tx + ty;
    }

    // The failed round trip: hold at x, then leave from x or from y.
    const double hx = holding_time(x, rng);
    if (hx >= remaining) {
      occ[x] += remaining;
      return occ;
    }
    occ[x] += hx;
    remaining -= hx;
    if (rng.uniform() * (1.0 - round_trip) < 1.0 - px) {
      x = exit_jump(x, rng);
      continue;
    }
    const double hy = holding_time(y, rng);
    if (hy >= remaining) {
      occ[y] += remaining;
      return occ;
    }
    occ[y] += hy;
    remaining -= hy;
    x = exit_jump(y, rng);
  }
}

}  // namespace resnet
