#include "resnet/mm_compare.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

#include "resnet/errors.hpp"
#include "resnet/parallel.hpp"
#include "resnet/rng.hpp"
#include "resnet/walk.hpp"

namespace resnet {

namespace {

void require_points(const FiniteMMSpace& space, const PointSet& s, const char* what) {
  if (s.empty()) throw DomainError(std::string(what) + ": point set must be nonempty");
  for (std::size_t p : s) {
    if (p >= space.size()) throw DomainError(std::string(what) + ": point index out of range");
  }
}

double directed_hausdorff(const FiniteMMSpace& space, const PointSet& from, const PointSet& to) {
  double worst = 0.0;
  for (std::size_t a : from) {
    double nearest = std::numeric_limits<double>::infinity();
    for (std::size_t b : to) nearest = std::min(nearest, space.distance(a, b));
    worst = std::max(worst, nearest);
  }
  return worst;
}

std::vector<double> distinct_distances(const Eigen::MatrixXd& d) {
  std::vector<double> values(d.data(), d.data() + d.size());
  values.push_back(0.0);
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  return values;
}

// Mass of a point mask via two 10-bit lookup tables.
class MaskMass {
 public:
  MaskMass(const std::vector<double>& w) : low_(1024, 0.0), high_(1024, 0.0) {
    for (std::uint32_t m = 0; m < 1024; ++m) {
      for (std::size_t i = 0; i < w.size() && i < 10; ++i) {
        if (m >> i & 1U) low_[m] += w[i];
      }
      for (std::size_t i = 10; i < w.size(); ++i) {
        if (m >> (i - 10) & 1U) high_[m] += w[i];
      }
    }
  }
  double operator()(std::uint32_t mask) const { return low_[mask & 1023U] + high_[mask >> 10]; }

 private:
  std::vector<double> low_, high_;
};

// ---------------------------------------------------------------------------
// GHP helpers

// Maximum flow from mu1 to mu2 through the pairs of `relation` (bit p stands
// for the pair (p / n2, p % n2)).
double transport_flow(const FiniteMMSpace& s1, const FiniteMMSpace& s2, std::uint64_t relation) {
  const std::size_t n1 = s1.size();
  const std::size_t n2 = s2.size();
  const std::size_t nodes = n1 + n2 + 2;
  const std::size_t source = n1 + n2;
  const std::size_t sink = source + 1;
  std::vector<double> cap(nodes * nodes, 0.0);
  auto c = [&](std::size_t a, std::size_t b) -> double& { return cap[a * nodes + b]; };
  const double inf = s1.total_mass() + s2.total_mass() + 1.0;
  for (std::size_t x = 0; x < n1; ++x) c(source, x) = s1.measure()[x];
  for (std::size_t y = 0; y < n2; ++y) c(n1 + y, sink) = s2.measure()[y];
  for (std::uint64_t rest = relation; rest; rest &= rest - 1) {
    const auto p = static_cast<std::size_t>(std::countr_zero(rest));
    c(p / n2, n1 + p % n2) = inf;
  }

  double flow = 0.0;
  std::vector<std::size_t> prev(nodes);
  for (;;) {
    std::fill(prev.begin(), prev.end(), nodes);
    prev[source] = source;
    std::queue<std::size_t> q;
    q.push(source);
    while (!q.empty() && prev[sink] == nodes) {
      const std::size_t u = q.front();
      q.pop();
      for (std::size_t v = 0; v < nodes; ++v) {
        if (prev[v] == nodes && c(u, v) > 0.0) {
          prev[v] = u;
          q.push(v);
        }
      }
    }
    if (prev[sink] == nodes) break;
    double push = inf;
    for (std::size_t v = sink; v != source; v = prev[v]) push = std::min(push, c(prev[v], v));
    for (std::size_t v = sink; v != source; v = prev[v]) {
      c(prev[v], v) -= push;
      c(v, prev[v]) += push;
    }
    flow += push;
  }
  return flow;
}

class CorrespondenceSearch {
 public:
  CorrespondenceSearch(const FiniteMMSpace& s1, const FiniteMMSpace& s2) : s1_(s1), s2_(s2) {
    n1_ = s1.size();
    n2_ = s2.size();
    pairs_ = n1_ * n2_;
    for (std::size_t x = 0; x < n1_; ++x) {
      std::uint64_t m = 0;
      for (std::size_t y = 0; y < n2_; ++y) m |= 1ULL << (x * n2_ + y);
      row_.push_back(m);
    }
    for (std::size_t y = 0; y < n2_; ++y) {
      std::uint64_t m = 0;
      for (std::size_t x = 0; x < n1_; ++x) m |= 1ULL << (x * n2_ + y);
      col_.push_back(m);
    }
    root_pair_ = s1.root() * n2_ + s2.root();
    heavier_ = std::max(s1.total_mass(), s2.total_mass());
  }

  // Candidate distortion levels.
  std::vector<double> thresholds() const {
    std::vector<double> t;
    t.reserve(pairs_ * pairs_);
    for (std::size_t x = 0; x < n1_; ++x)
      for (std::size_t x2 = 0; x2 < n1_; ++x2)
        for (std::size_t y = 0; y < n2_; ++y)
          for (std::size_t y2 = 0; y2 < n2_; ++y2) t.push_back(std::abs(s1_.distance(x, x2) - s2_.distance(y, y2)));
    std::sort(t.begin(), t.end());
    t.erase(std::unique(t.begin(), t.end()), t.end());
    return t;
  }

  // Smallest transport discrepancy over correspondences with distortion at
  // most `tau` that contain the root pair; infinity if there is none.
  double best_discrepancy(double tau) {
    compat_.assign(pairs_, 0);
    for (std::size_t p = 0; p < pairs_; ++p) {
      const std::size_t x = p / n2_, y = p % n2_;
      for (std::size_t q = 0; q < pairs_; ++q) {
        const std::size_t x2 = q / n2_, y2 = q % n2_;
        if (std::abs(s1_.distance(x, x2) - s2_.distance(y, y2)) <= tau) compat_[p] |= 1ULL << q;
      }
    }
    best_ = std::numeric_limits<double>::infinity();
    const std::uint64_t root_bit = 1ULL << root_pair_;
    expand(root_bit, compat_[root_pair_] & ~root_bit, 0);
    return best_;
  }

 private:
  bool total(std::uint64_t rel) const {
    for (std::uint64_t m : row_)
      if (!(rel & m)) return false;
    for (std::uint64_t m : col_)
      if (!(rel & m)) return false;
    return true;
  }

  // Bron-Kerbosch with pivoting, restricted to cliques containing the root.
  void expand(std::uint64_t clique, std::uint64_t candidates, std::uint64_t excluded) {
    if (best_ <= 0.0) return;
    if (!candidates && !excluded) {
      if (total(clique)) {
        // Flow sums can miss the total mass by rounding; snap that to zero.
        double d = heavier_ - transport_flow(s1_, s2_, clique);
        if (d < 1e-12 * heavier_) d = 0.0;
        best_ = std::min(best_, d);
      }
      return;
    }
    // A maximal clique must reach every row and column; prune when it cannot.
    if (!total(clique | candidates)) return;
    const std::uint64_t either = candidates | excluded;
    std::uint64_t pivot_mask = 0;
    int pivot_hits = -1;
    for (std::uint64_t rest = either; rest; rest &= rest - 1) {
      const int u = std::countr_zero(rest);
      const std::uint64_t others = compat_[u] & ~(1ULL << u);
      const int hits = std::popcount(candidates & others);
      if (hits > pivot_hits) {
        pivot_hits = hits;
        pivot_mask = others;
      }
    }
    for (std::uint64_t rest = candidates & ~pivot_mask; rest; rest &= rest - 1) {
      const int v = std::countr_zero(rest);
      const std::uint64_t bit = 1ULL << v;
      expand(clique | bit, candidates & compat_[v] & ~bit, excluded & compat_[v]);
      candidates &= ~bit;
      excluded |= bit;
    }
  }

  const FiniteMMSpace& s1_;
  const FiniteMMSpace& s2_;
  std::size_t n1_ = 0, n2_ = 0, pairs_ = 0, root_pair_ = 0;
  std::vector<std::uint64_t> row_, col_, compat_;
  double heavier_ = 0.0;
  double best_ = 0.0;
};

}  // namespace

double hausdorff_distance(const FiniteMMSpace& space, const PointSet& a, const PointSet& b) {
  require_points(space, a, "hausdorff_distance");
  require_points(space, b, "hausdorff_distance");
  return std::max(directed_hausdorff(space, a, b), directed_hausdorff(space, b, a));
}

double prohorov_distance(const FiniteMMSpace& space, const std::vector<double>& mu, const std::vector<double>& nu) {
  const std::size_t n = space.size();
  if (n > kMaxProhorovPoints) {
    throw CapacityError("prohorov_distance enumerates subsets; at most " + std::to_string(kMaxProhorovPoints) +
                        " points supported, got " + std::to_string(n));
  }
  if (mu.size() != n || nu.size() != n) throw DomainError("prohorov_distance: measure size mismatch");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(mu[i] >= 0.0) || !(nu[i] >= 0.0)) throw DomainError("prohorov_distance: masses must be nonnegative");
  }
  const MaskMass mass_mu(mu), mass_nu(nu);
  const std::vector<double> radii = distinct_distances(space.metric());
  const std::uint32_t subsets = 1U << n;
  std::vector<std::uint32_t> hull(subsets);
  std::vector<std::uint32_t> ball(n);

  // Below the k-th distance the worst deficit over subsets is constant; the
  // distance is the smallest max(radius, deficit) over the radii.
  double best = std::numeric_limits<double>::infinity();
  for (double radius : radii) {
    if (radius >= best) break;
    for (std::size_t i = 0; i < n; ++i) {
      ball[i] = 0;
      for (std::size_t j = 0; j < n; ++j) {
        if (space.distance(i, j) <= radius) ball[i] |= 1U << j;
      }
    }
    double deficit = 0.0;
    hull[0] = 0;
    for (std::uint32_t a = 1; a < subsets; ++a) {
      const std::uint32_t low = a & (~a + 1U);
      hull[a] = hull[a ^ low] | ball[std::countr_zero(low)];
      deficit = std::max(deficit, mass_mu(a) - mass_nu(hull[a]));
      deficit = std::max(deficit, mass_nu(a) - mass_mu(hull[a]));
    }
    best = std::min(best, std::max(radius, deficit));
  }
  return best;
}

double ghp_distance(const FiniteMMSpace& s1, const FiniteMMSpace& s2) {
  if (s1.size() * s2.size() > kMaxGhpPairs) {
    throw CapacityError("ghp_distance: " + std::to_string(s1.size()) + " x " + std::to_string(s2.size()) +
                        " point pairs exceed the enumeration budget of " + std::to_string(kMaxGhpPairs));
  }
  CorrespondenceSearch search(s1, s2);
  const std::vector<double> taus = search.thresholds();

  // D(tau) is nonincreasing, so the first tau with D(tau) <= tau/2 is found by
  // bisection and the answer is min(tau_k / 2, D(tau_{k-1})).
  std::size_t lo = 0, hi = taus.size();
  std::vector<double> cache(taus.size(), -1.0);
  auto discrepancy = [&](std::size_t k) {
    if (cache[k] < 0.0) cache[k] = search.best_discrepancy(taus[k]);
    return cache[k];
  };
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (discrepancy(mid) <= 0.5 * taus[mid]) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  if (lo == taus.size()) return discrepancy(taus.size() - 1);
  double answer = 0.5 * taus[lo];
  if (lo > 0) answer = std::min(answer, discrepancy(lo - 1));
  return answer;
}

CoveringNumber covering_number(const FiniteMMSpace& space, double eps) {
  if (!(eps > 0.0)) throw DomainError("covering_number: eps must be positive");
  const std::size_t n = space.size();
  std::vector<std::vector<char>> ball(n, std::vector<char>(n, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) ball[i][j] = space.distance(i, j) < eps;

  std::vector<char> covered(n, 0);
  std::size_t remaining = n;
  std::size_t greedy = 0;
  while (remaining > 0) {
    std::size_t best = 0, best_gain = 0;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t gain = 0;
      for (std::size_t j = 0; j < n; ++j) gain += ball[i][j] && !covered[j];
      if (gain > best_gain) {
        best_gain = gain;
        best = i;
      }
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (ball[best][j] && !covered[j]) {
        covered[j] = 1;
        --remaining;
      }
    }
    ++greedy;
  }
  if (n > kMaxExactCoverPoints) return {greedy, false};

  std::vector<std::uint32_t> mask(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (ball[i][j]) mask[i] |= 1U << j;
  const std::uint32_t all = (n == 32) ? ~0U : ((1U << n) - 1U);
  // Any k-subset of centres, k < greedy, in increasing k.
  for (std::size_t k = 1; k < greedy; ++k) {
    std::vector<std::size_t> pick(k);
    std::iota(pick.begin(), pick.end(), 0);
    for (;;) {
      std::uint32_t cover = 0;
      for (std::size_t i : pick) cover |= mask[i];
      if (cover == all) return {k, true};
      std::size_t pos = k;
      while (pos > 0 && pick[pos - 1] == n - k + pos - 1) --pos;
      if (pos == 0) break;
      ++pick[pos - 1];
      for (std::size_t i = pos; i < k; ++i) pick[i] = pick[i - 1] + 1;
    }
  }
  return {greedy, true};
}

double min_ball_measure(const FiniteMMSpace& space, double delta) {
  if (!(delta > 0.0)) throw DomainError("min_ball_measure: delta must be positive");
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t x = 0; x < space.size(); ++x) {
    double m = 0.0;
    for (std::size_t y = 0; y < space.size(); ++y) {
      if (space.distance(x, y) < delta) m += space.measure()[y];
    }
    best = std::min(best, m);
  }
  return best;
}

double exit_time_bound(const FiniteMMSpace& space, double eps, double delta, double t) {
  if (!(eps > 0.0) || !(delta > 0.0) || !(t > 0.0)) {
    throw DomainError("exit_time_bound: eps, delta and t must be positive");
  }
  const double cover = static_cast<double>(covering_number(space, eps / 4.0).count);
  return 32.0 * cover / eps * (delta + t / min_ball_measure(space, delta));
}

ExitBound best_exit_time_bound(const FiniteMMSpace& space, double eps, double t, const std::vector<double>& deltas) {
  if (deltas.empty()) throw DomainError("best_exit_time_bound: no deltas given");
  ExitBound best{std::numeric_limits<double>::infinity(), 0.0};
  for (double d : deltas) {
    const double b = exit_time_bound(space, eps, d, t);
    if (b < best.bound) best = {b, d};
  }
  return best;
}

std::vector<double> delta_grid(const FiniteMMSpace& space, std::size_t count) {
  double smallest = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < space.size(); ++i)
    for (std::size_t j = i + 1; j < space.size(); ++j) smallest = std::min(smallest, space.distance(i, j));
  const double diam = space.diameter();
  if (space.size() < 2 || count < 2) return {diam > 0.0 ? diam : 1.0};
  const double lo = std::log(0.5 * smallest);
  const double hi = std::log(diam);
  std::vector<double> grid(count);
  for (std::size_t i = 0; i < count; ++i) {
    grid[i] = std::exp(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1));
  }
  return grid;
}

ExitProbability mc_exit_prob(const Network& net, const VertexMeasure& mu, const ResistanceMatrix& r, double eps,
                             double t, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw DomainError("mc_exit_prob: sample count must be at least 1");
  if (!(eps > 0.0) || t < 0.0) throw DomainError("mc_exit_prob: eps must be positive and t nonnegative");
  if (r.size() != net.size()) throw DomainError("mc_exit_prob: resistance matrix size mismatch");
  const WalkEngine engine(net, mu);
  ExitProbability out;
  out.per_start.resize(net.size());
  for (VertexId x = 0; x < net.size(); ++x) {
    const std::uint64_t start_seed = derive_seed(seed, x);
    std::vector<double> hits(n, 0.0);
    std::vector<char> aborted(n, 0);
    if (net.size() > 1) {
      parallel_for(n, [&](std::size_t i) {
        RandomStream rng(derive_seed(start_seed, i));
        bool exceeded = false;
        const bool finished = engine.run(x, rng, kDefaultMaxJumps, [&](VertexId v, double entry, double h) {
          if (entry > t) return false;
          if (r(x, v) >= eps) {
            exceeded = true;
            return false;
          }
          return entry + h <= t;
        });
        hits[i] = exceeded ? 1.0 : 0.0;
        aborted[i] = !finished;
      });
    }
    std::vector<double> kept;
    for (std::size_t i = 0; i < n; ++i) {
      if (!aborted[i]) kept.push_back(hits[i]);
    }
    const std::size_t dropped = n - kept.size();
    if (kept.empty()) throw McBudgetAbort("mc_exit_prob: every replicate hit the jump cap", dropped);
    out.per_start[x] = summarize(kept, dropped);
    if (x == 0 || out.per_start[x].mean > out.sup.mean) {
      out.sup = out.per_start[x];
      out.argmax = x;
    }
  }
  return out;
}

}  // namespace resnet
