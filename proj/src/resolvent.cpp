#include "resnet/resolvent.hpp"

#include <algorithm>
#include <cmath>

#include "extended.hpp"
#include "resnet/errors.hpp"
#include "resnet/parallel.hpp"
#include "resnet/rng.hpp"
#include "resnet/walk.hpp"

namespace resnet {

namespace {

void require_index(std::size_t size, VertexId v, const char* what) {
  if (v >= size) throw DomainError(std::string(what) + ": vertex index out of range");
}

// Integral of `weight` along the path from `start` until it enters `killing`,
// one replicate per index. Replicates that reach the jump cap are marked NaN.
template <class Weight>
MCEstimate killed_integral(const Network& net, const VertexMeasure& mu, const std::vector<char>& killing,
                           VertexId start, std::size_t n, std::uint64_t seed, std::uint64_t max_jumps,
                           Weight weight) {
  if (n == 0) throw DomainError("sample count must be at least 1");
  if (killing[start]) return summarize(std::vector<double>(n, 0.0));
  const WalkEngine engine(net, mu);
  std::vector<double> values(n);
  parallel_for(n, [&](std::size_t i) {
    RandomStream rng(derive_seed(seed, i));
    double acc = 0.0;
    const bool finished = engine.run(start, rng, max_jumps, [&](VertexId x, double, double h) {
      if (killing[x]) return false;
      acc += weight(x) * h;
      return true;
    });
    values[i] = finished ? acc : std::nan("");
  });
  std::vector<double> kept;
  kept.reserve(n);
  for (double v : values) {
    if (!std::isnan(v)) kept.push_back(v);
  }
  const std::size_t aborted = n - kept.size();
  if (kept.empty()) throw McBudgetAbort("every replicate hit the jump cap", aborted);
  return summarize(kept, aborted);
}

}  // namespace

MCEstimate summarize(const std::vector<double>& samples, std::size_t aborted) {
  MCEstimate est;
  est.n_samples = samples.size();
  est.aborted = aborted;
  if (samples.empty()) throw DomainError("summarize: no samples");
  double sum = 0.0;
  for (double v : samples) sum += v;
  est.mean = sum / static_cast<double>(samples.size());
  if (samples.size() > 1) {
    double ss = 0.0;
    for (double v : samples) ss += (v - est.mean) * (v - est.mean);
    const double var = ss / static_cast<double>(samples.size() - 1);
    est.std_error = std::sqrt(var / static_cast<double>(samples.size()));
  }
  return est;
}

double resolvent_kernel(const ResistanceMatrix& r, VertexId x, VertexId y, VertexId z) {
  require_index(r.size(), x, "resolvent_kernel");
  require_index(r.size(), y, "resolvent_kernel");
  require_index(r.size(), z, "resolvent_kernel");
  // The kernel is a nonnegative expected local time; cancellation can leave a
  // rounding residue below zero when x separates y from z.
  if (const ResistanceMatrix::Extended* ext = r.extended()) {
    const QuadMatrix& q = ext->values;
    const Quad g = (q(x, y) + q(x, z) - q(y, z)) / 2;
    return std::max(0.0, static_cast<double>(g));
  }
  return std::max(0.0, 0.5 * (r(x, y) + r(x, z) - r(y, z)));
}

double shorted_kernel(const Network& net, const VertexSet& a, VertexId y, VertexId z) {
  const ShortedNetwork s = short_set(net, a);
  require_index(net.size(), y, "shorted_kernel");
  require_index(net.size(), z, "shorted_kernel");
  const VertexId sy = s.image[y];
  const VertexId sz = s.image[z];
  const VertexId hub = s.shorted_vertex;
  if (sy == hub || sz == hub) return 0.0;
  const double ry = effective_resistance(s.net, sy, hub);
  const double rz = y == z ? ry : effective_resistance(s.net, sz, hub);
  const double ryz = effective_resistance(s.net, sy, sz);
  return std::max(0.0, 0.5 * (ry + rz - ryz));
}

double resolvent_apply(const ResistanceMatrix& r, const VertexMeasure& mu, VertexId x, const PotentialFunction& f,
                       VertexId y) {
  if (static_cast<std::size_t>(f.size()) != r.size() || mu.size() != r.size()) {
    throw DomainError("resolvent_apply: function or measure size mismatch");
  }
  double acc = 0.0;
  for (VertexId z = 0; z < r.size(); ++z) acc += resolvent_kernel(r, x, y, z) * f(z) * mu[z];
  return acc;
}

MCEstimate mc_resolvent(const Network& net, const VertexMeasure& mu, VertexId x, const PotentialFunction& f,
                        VertexId y, std::size_t n, std::uint64_t seed, std::uint64_t max_jumps) {
  require_index(net.size(), x, "mc_resolvent");
  require_index(net.size(), y, "mc_resolvent");
  if (static_cast<std::size_t>(f.size()) != net.size()) throw DomainError("mc_resolvent: function size mismatch");
  std::vector<char> killing(net.size(), 0);
  killing[x] = 1;
  return killed_integral(net, mu, killing, y, n, seed, max_jumps, [&](VertexId v) { return f(v); });
}

MCEstimate mc_local_time(const Network& net, const VertexMeasure& mu, const VertexSet& a, VertexId y, VertexId z,
                         std::size_t n, std::uint64_t seed, std::uint64_t max_jumps) {
  if (a.empty()) throw DomainError("mc_local_time: killing set must be nonempty");
  require_index(net.size(), y, "mc_local_time");
  require_index(net.size(), z, "mc_local_time");
  std::vector<char> killing(net.size(), 0);
  for (VertexId v : a) {
    require_index(net.size(), v, "mc_local_time");
    killing[v] = 1;
  }
  const double inv_mass = 1.0 / mu[z];
  return killed_integral(net, mu, killing, y, n, seed, max_jumps,
                         [&](VertexId v) { return v == z ? inv_mass : 0.0; });
}

}  // namespace resnet
