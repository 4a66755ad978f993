#include "resnet/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <queue>

#include "resnet/errors.hpp"
#include "resnet/mm_compare.hpp"
#include "resnet/network_io.hpp"
#include "resnet/parallel.hpp"
#include "resnet/resolvent.hpp"
#include "resnet/rng.hpp"
#include "resnet/walk.hpp"

namespace resnet {

namespace {

Report make_report(const std::string& name, std::optional<std::uint64_t> seed, Report parameters) {
  Report r;
  r["experiment"] = name;
  r["version"] = library_version();
  if (seed) {
    r["seed"] = *seed;
  } else {
    r["seed"] = nullptr;
  }
  r["parameters"] = std::move(parameters);
  r["table"] = Report::array();
  r["summary"] = Report::object();
  return r;
}

// Distribution-free standard error of a sample quantile: half the spread of
// the quantiles one binomial standard deviation of rank either side.
double quantile_se(const std::vector<double>& sorted_values, double q) {
  const double n = static_cast<double>(sorted_values.size());
  if (n < 2) return 0.0;
  const double step = std::sqrt(q * (1.0 - q) / n);
  const double lo = std::clamp(q - step, 0.0, 1.0);
  const double hi = std::clamp(q + step, 0.0, 1.0);
  return 0.5 * (quantile(sorted_values, hi) - quantile(sorted_values, lo));
}

// Standard error of a / b by the delta method.
double ratio_se(double a, double a_se, double b, double b_se) {
  if (a == 0.0 || b == 0.0) return 0.0;
  const double ratio = a / b;
  return std::abs(ratio) * std::sqrt((a_se / a) * (a_se / a) + (b_se / b) * (b_se / b));
}

double ipow(double base, unsigned e) {
  double r = 1.0;
  for (unsigned i = 0; i < e; ++i) r *= base;
  return r;
}

std::string cell(const Report& v) {
  if (v.is_null()) return "";
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer()) return v.dump();
  if (v.is_number()) return format_double(v.get<double>());
  return v.dump();
}

}  // namespace

std::string library_version() { return RESNET_VERSION; }

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw DomainError("quantile of an empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw DomainError("quantile: q must lie in [0, 1]");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

// ---------------------------------------------------------------------------

Report run_gasket_scaling(const GasketScalingConfig& config) {
  if (config.max_level > 7) throw DomainError("gasket-scaling: max level is 7");
  if (config.heavy_alpha && config.seeds < 2) throw DomainError("gasket-scaling: heavy mode needs at least 2 seeds");
  Report params;
  params["max_level"] = config.max_level;
  params["conductances"] = config.heavy_alpha ? "heavy" : "unit";
  if (config.heavy_alpha) {
    params["alpha"] = *config.heavy_alpha;
    params["seeds"] = config.seeds;
  }
  Report report = make_report("gasket-scaling", config.heavy_alpha ? std::optional(config.seed) : std::nullopt,
                              std::move(params));

  double base = 0.0;
  double worst_deviation = 0.0;
  Report spread = Report::array();
  for (unsigned level = 0; level <= config.max_level; ++level) {
    const GasketGraph g = gasket_graph(level);
    const double scale = ipow(0.6, level);
    const double r = effective_resistance(g.net, g.corners[0], g.corners[1]);
    Report row;
    row["level"] = level;
    row["vertices"] = g.net.size();
    row["edges"] = g.net.edge_count();
    row["resistance"] = r;
    row["scaled_resistance"] = scale * r;
    if (level == 0) base = scale * r;
    worst_deviation = std::max(worst_deviation, std::abs(scale * r - base) / base);

    if (config.heavy_alpha) {
      std::vector<double> values(config.seeds);
      const std::uint64_t level_seed = derive_seed(config.seed, level);
      parallel_for(config.seeds, [&](std::size_t s) {
        const Network heavy = heavy_tailed_conductances(g.net, *config.heavy_alpha, derive_seed(level_seed, s));
        values[s] = scale * effective_resistance(heavy, g.corners[0], g.corners[1]);
      });
      const MCEstimate est = summarize(values);
      const double sd = est.std_error * std::sqrt(static_cast<double>(values.size()));
      row["heavy_mean"] = est.mean;
      row["heavy_mean_se"] = est.std_error;
      row["heavy_sd"] = sd;
      // SE of a sample standard deviation, sd / sqrt(2(n-1)), carried over to the ratio.
      const double sd_se = sd / std::sqrt(2.0 * static_cast<double>(values.size() - 1));
      row["heavy_rel_spread"] = sd / est.mean;
      row["heavy_rel_spread_se"] = ratio_se(sd, sd_se, est.mean, est.std_error);
      spread.push_back(sd / est.mean);
    }
    report["table"].push_back(std::move(row));
  }
  report["summary"]["level0_resistance"] = base;
  report["summary"]["max_relative_deviation"] = worst_deviation;
  if (config.heavy_alpha) report["summary"]["heavy_rel_spread_by_level"] = spread;
  return report;
}

// ---------------------------------------------------------------------------

Report run_vsrw_clock(const VsrwClockConfig& config) {
  if (config.samples < 2) throw DomainError("vsrw-clock: need at least 2 samples");
  for (unsigned level : config.levels) {
    if (level > 5) throw DomainError("vsrw-clock: levels must be at most 5");
  }
  Report params;
  params["levels"] = config.levels;
  params["samples"] = config.samples;
  Report report = make_report("vsrw-clock", config.seed, std::move(params));

  std::optional<std::pair<double, double>> previous;  // median, se
  Report ratios = Report::array();
  std::size_t total_aborted = 0;
  for (unsigned level : config.levels) {
    const GasketGraph g = gasket_graph(level);
    const VertexMeasure mu = vsrw_measure(g.net);
    const WalkEngine engine(g.net, mu);
    const VertexId start = g.corners[0];
    const VertexId target = g.corners[1];
    const double clock = ipow(5.0, level);

    std::vector<double> times(config.samples);
    std::vector<char> aborted(config.samples, 0);
    const std::uint64_t level_seed = derive_seed(config.seed, level);
    parallel_for(config.samples, [&](std::size_t i) {
      RandomStream rng(derive_seed(level_seed, i));
      double hit = 0.0;
      const bool finished = engine.run(start, rng, kDefaultMaxJumps, [&](VertexId v, double entry, double) {
        if (v == target) {
          hit = entry;
          return false;
        }
        return true;
      });
      times[i] = hit / clock;
      aborted[i] = !finished;
    });
    std::vector<double> kept;
    for (std::size_t i = 0; i < times.size(); ++i) {
      if (!aborted[i]) kept.push_back(times[i]);
    }
    const std::size_t dropped = times.size() - kept.size();
    total_aborted += dropped;
    if (kept.size() < 2) throw McBudgetAbort("vsrw-clock: replicates hit the jump cap", dropped);
    std::sort(kept.begin(), kept.end());

    const ResistanceMatrix r = resistance_matrix(g.net);
    const double exact =
        resolvent_apply(r, mu, target, PotentialFunction::Ones(static_cast<long>(g.net.size())), start) / clock;
    const MCEstimate mean = summarize(kept, dropped);
    const double median = quantile(kept, 0.5);
    const double median_se = quantile_se(kept, 0.5);

    Report row;
    row["level"] = level;
    row["vertices"] = g.net.size();
    row["median"] = median;
    row["median_se"] = median_se;
    row["q25"] = quantile(kept, 0.25);
    row["q25_se"] = quantile_se(kept, 0.25);
    row["q75"] = quantile(kept, 0.75);
    row["q75_se"] = quantile_se(kept, 0.75);
    row["mean"] = mean.mean;
    row["mean_se"] = mean.std_error;
    row["exact_mean"] = exact;
    row["z_score"] = mean.std_error > 0.0 ? (mean.mean - exact) / mean.std_error : 0.0;
    if (previous) {
      const double ratio = median / previous->first;
      row["median_ratio"] = ratio;
      row["median_ratio_se"] = ratio_se(median, median_se, previous->first, previous->second);
      ratios.push_back({{"level", level}, {"ratio", ratio}});
    } else {
      row["median_ratio"] = nullptr;
      row["median_ratio_se"] = nullptr;
    }
    row["aborted"] = dropped;
    previous = {median, median_se};
    report["table"].push_back(std::move(row));
  }
  report["summary"]["median_ratios"] = ratios;
  report["summary"]["aborted"] = total_aborted;
  return report;
}

// ---------------------------------------------------------------------------

Report run_fin(const FinConfig& config) {
  if (!(config.alpha > 0.0 && config.alpha < 1.0)) throw DomainError("fin: alpha must lie in (0, 1)");
  if (config.level > 5) throw DomainError("fin: level must be at most 5");
  if (config.samples < 2) throw DomainError("fin: need at least 2 samples");
  if (!(config.time > 0.0)) throw DomainError("fin: time must be positive");
  Report params;
  params["level"] = config.level;
  params["alpha"] = config.alpha;
  params["samples"] = config.samples;
  params["time"] = config.time;
  params["top_k"] = config.top_k;
  params["atom_levels"] = config.atom_levels;
  params["atom_samples"] = config.atom_samples;
  Report report = make_report("fin", config.seed, std::move(params));

  const GasketGraph g = gasket_graph(config.level);
  const std::size_t nv = g.net.size();
  const double atom_scale = std::pow(3.0, -static_cast<double>(config.level) / config.alpha);
  const double csrw_horizon =
      config.time * ipow(5.0 / 3.0, config.level) * std::pow(3.0, static_cast<double>(config.level) / config.alpha);
  const double vsrw_horizon = config.time * ipow(5.0, config.level);

  const std::uint64_t env_seed = derive_seed(config.seed, 0);
  const std::uint64_t csrw_seed = derive_seed(config.seed, 1);
  const std::uint64_t vsrw_seed = derive_seed(config.seed, 2);
  std::vector<double> csrw_fraction(config.samples), vsrw_fraction(config.samples);
  parallel_for(config.samples, [&](std::size_t i) {
    const Network env = heavy_tailed_conductances(g.net, config.alpha, derive_seed(env_seed, i));
    VertexId top = 0;
    for (VertexId v = 1; v < nv; ++v) {
      if (env.total_conductance(v) > env.total_conductance(top)) top = v;
    }
    RandomStream csrw_rng(derive_seed(csrw_seed, i));
    RandomStream vsrw_rng(derive_seed(vsrw_seed, i));
    const std::vector<double> csrw =
        WalkEngine(env, csrw_measure(env)).occupation(g.corners[0], csrw_horizon, csrw_rng);
    const std::vector<double> vsrw =
        WalkEngine(env, vsrw_measure(env)).occupation(g.corners[0], vsrw_horizon, vsrw_rng);
    csrw_fraction[i] = csrw[top] / csrw_horizon;
    vsrw_fraction[i] = vsrw[top] / vsrw_horizon;
  });
  const MCEstimate csrw = summarize(csrw_fraction);
  const MCEstimate vsrw = summarize(vsrw_fraction);
  const double share = 1.0 / static_cast<double>(nv);

  // Atoms of nu_n for the first environment.
  const Network env0 = heavy_tailed_conductances(g.net, config.alpha, derive_seed(env_seed, 0));
  std::vector<VertexId> order(nv);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](VertexId a, VertexId b) { return env0.total_conductance(a) > env0.total_conductance(b); });
  double total_atoms = 0.0;
  for (VertexId v = 0; v < nv; ++v) total_atoms += atom_scale * env0.total_conductance(v);
  Report atoms = Report::array();
  for (std::size_t k = 0; k < std::min(config.top_k, nv); ++k) {
    const VertexId v = order[k];
    atoms.push_back({{"vertex", g.net.label(v)}, {"mass", atom_scale * env0.total_conductance(v)}});
  }

  // max atom / total mass of nu_n across levels.
  Report atom_ratio = Report::array();
  for (unsigned level : config.atom_levels) {
    if (level > 7) throw DomainError("fin: atom levels must be at most 7");
    const GasketGraph ga = gasket_graph(level);
    std::vector<double> ratios(config.atom_samples);
    const std::uint64_t level_seed = derive_seed(derive_seed(config.seed, 3), level);
    parallel_for(config.atom_samples, [&](std::size_t i) {
      const Network env = heavy_tailed_conductances(ga.net, config.alpha, derive_seed(level_seed, i));
      double total = 0.0, top = 0.0;
      for (VertexId v = 0; v < env.size(); ++v) {
        total += env.total_conductance(v);
        top = std::max(top, env.total_conductance(v));
      }
      ratios[i] = top / total;
    });
    const MCEstimate est = summarize(ratios);
    atom_ratio.push_back({{"level", level}, {"max_atom_ratio", est.mean}, {"max_atom_ratio_se", est.std_error}});
  }

  auto add_row = [&](const char* walk, double horizon, const MCEstimate& est) {
    Report row;
    row["walk"] = walk;
    row["horizon"] = horizon;
    row["top_fraction"] = est.mean;
    row["top_fraction_se"] = est.std_error;
    row["uniform_share"] = share;
    row["factor"] = est.mean / share;
    row["factor_se"] = est.std_error / share;
    report["table"].push_back(std::move(row));
  };
  add_row("csrw", csrw_horizon, csrw);
  add_row("vsrw", vsrw_horizon, vsrw);

  report["summary"]["vertices"] = nv;
  report["summary"]["csrw_factor"] = csrw.mean / share;
  report["summary"]["csrw_factor_se"] = csrw.std_error / share;
  report["summary"]["vsrw_factor"] = vsrw.mean / share;
  report["summary"]["vsrw_factor_se"] = vsrw.std_error / share;
  report["summary"]["atoms"] = atoms;
  report["summary"]["atom_total_mass"] = total_atoms;
  report["summary"]["max_atom_ratio_by_level"] = atom_ratio;
  return report;
}

// ---------------------------------------------------------------------------

Report run_tree_scaling(const TreeScalingConfig& config) {
  if (config.samples < 2) throw DomainError("tree-scaling: need at least 2 samples");
  if (config.times.empty()) throw DomainError("tree-scaling: need at least one time");
  for (std::size_t n : config.sizes) {
    if (n < 1 || n > 10000) throw DomainError("tree-scaling: sizes must lie in [1, 10000]");
  }
  for (double t : config.times) {
    if (t < 0.0) throw DomainError("tree-scaling: times must be nonnegative");
  }
  const OffspringLaw law = OffspringLaw::parse(config.offspring);
  Report params;
  params["sizes"] = config.sizes;
  params["offspring"] = law.name();
  params["samples"] = config.samples;
  params["times"] = config.times;
  Report report = make_report("tree-scaling", config.seed, std::move(params));

  std::vector<double> times = config.times;
  std::sort(times.begin(), times.end());
  const std::size_t nt = times.size();
  std::vector<MCEstimate> previous;
  Report ratios = Report::array();
  for (std::size_t n : config.sizes) {
    const double space_scale = 1.0 / std::sqrt(static_cast<double>(n));
    const double clock = std::pow(static_cast<double>(n), 1.5);
    // displacement[t][i]
    std::vector<std::vector<double>> displacement(nt, std::vector<double>(config.samples, 0.0));
    const std::uint64_t size_seed = derive_seed(config.seed, n);
    parallel_for(config.samples, [&](std::size_t i) {
      const std::uint64_t sample_seed = derive_seed(size_seed, i);
      const TreeGraph tree = gw_tree(law, n, derive_seed(sample_seed, 0));
      const WalkEngine engine(tree.net, vsrw_measure(tree.net));
      RandomStream rng(derive_seed(sample_seed, 1));
      std::size_t next = 0;
      engine.run(tree.root, rng, std::numeric_limits<std::uint64_t>::max(), [&](VertexId v, double entry, double h) {
        while (next < nt && times[next] * clock < entry + h) {
          displacement[next][i] = space_scale * static_cast<double>(tree.depth[v]);
          ++next;
        }
        return next < nt;
      });
    });
    std::vector<MCEstimate> current;
    for (std::size_t k = 0; k < nt; ++k) {
      const MCEstimate est = summarize(displacement[k]);
      Report row;
      row["size"] = n;
      row["t"] = times[k];
      row["mean_displacement"] = est.mean;
      row["mean_displacement_se"] = est.std_error;
      if (!previous.empty() && previous[k].mean > 0.0) {
        const double ratio = est.mean / previous[k].mean;
        row["ratio_to_previous"] = ratio;
        row["ratio_to_previous_se"] = ratio_se(est.mean, est.std_error, previous[k].mean, previous[k].std_error);
        ratios.push_back({{"size", n}, {"t", times[k]}, {"ratio", ratio}});
      } else {
        row["ratio_to_previous"] = nullptr;
        row["ratio_to_previous_se"] = nullptr;
      }
      report["table"].push_back(std::move(row));
      current.push_back(est);
    }
    previous = std::move(current);
  }
  report["summary"]["ratios"] = ratios;
  return report;
}

// ---------------------------------------------------------------------------

namespace {

// Hop distances from `source`.
std::vector<std::size_t> bfs_distances(const Network& net, VertexId source) {
  std::vector<std::size_t> dist(net.size(), std::numeric_limits<std::size_t>::max());
  std::queue<VertexId> q;
  dist[source] = 0;
  q.push(source);
  while (!q.empty()) {
    const VertexId v = q.front();
    q.pop();
    for (const Neighbor& nb : net.neighbors(v)) {
      if (dist[nb.vertex] == std::numeric_limits<std::size_t>::max()) {
        dist[nb.vertex] = dist[v] + 1;
        q.push(nb.vertex);
      }
    }
  }
  return dist;
}

struct CrgSample {
  double size = 0.0;
  double resistance_diameter = 0.0;
  double graph_diameter = 0.0;
  double rayleigh_violation = 0.0;
  double displacement = 0.0;
};

}  // namespace

Report run_crg(const CrgConfig& config) {
  if (config.samples < 2) throw DomainError("crg: need at least 2 samples");
  for (std::size_t n : config.n_values) {
    if (n < 2 || n > 100000) throw DomainError("crg: n must lie in [2, 100000]");
  }
  Report params;
  params["n_values"] = config.n_values;
  params["samples"] = config.samples;
  params["p_factor"] = config.p_factor;
  params["time"] = config.time;
  Report report = make_report("crg", config.seed, std::move(params));

  std::optional<double> previous_median;
  Report ratios = Report::array();
  double worst_violation = 0.0;
  for (std::size_t n : config.n_values) {
    const double nd = static_cast<double>(n);
    const double p = std::min(1.0, config.p_factor / nd);
    std::vector<CrgSample> samples(config.samples);
    const std::uint64_t n_seed = derive_seed(config.seed, n);
    parallel_for(config.samples, [&](std::size_t i) {
      const std::uint64_t sample_seed = derive_seed(n_seed, i);
      const Network comp = er_giant_component(n, p, derive_seed(sample_seed, 0));
      CrgSample& s = samples[i];
      s.size = static_cast<double>(comp.size()) * std::pow(nd, -2.0 / 3.0);
      if (comp.size() == 1) return;
      const ResistanceMatrix r = resistance_matrix(comp);
      s.resistance_diameter = r.diameter() * std::pow(nd, -1.0 / 3.0);
      std::size_t hop_diameter = 0;
      for (VertexId v = 0; v < comp.size(); ++v) {
        const auto dist = bfs_distances(comp, v);
        for (VertexId w = 0; w < comp.size(); ++w) {
          hop_diameter = std::max(hop_diameter, dist[w]);
          s.rayleigh_violation = std::max(s.rayleigh_violation, r(v, w) - static_cast<double>(dist[w]));
        }
      }
      s.graph_diameter = static_cast<double>(hop_diameter);
      const WalkEngine engine(comp, vsrw_measure(comp));
      RandomStream rng(derive_seed(sample_seed, 1));
      const double horizon = config.time * nd;
      VertexId at = 0;
      engine.run(0, rng, std::numeric_limits<std::uint64_t>::max(), [&](VertexId v, double entry, double h) {
        at = v;
        return entry + h <= horizon;
      });
      s.displacement = r(0, at) * std::pow(nd, -1.0 / 3.0);
    });

    std::vector<double> size, rdiam, gdiam, disp;
    double violation = 0.0;
    for (const CrgSample& s : samples) {
      size.push_back(s.size);
      rdiam.push_back(s.resistance_diameter);
      disp.push_back(s.displacement);
      gdiam.push_back(s.graph_diameter);
      violation = std::max(violation, s.rayleigh_violation);
    }
    worst_violation = std::max(worst_violation, violation);
    std::vector<double> sorted_size = size;
    std::sort(sorted_size.begin(), sorted_size.end());
    const double median = quantile(sorted_size, 0.5);
    const MCEstimate size_est = summarize(size);
    const MCEstimate rdiam_est = summarize(rdiam);
    const MCEstimate gdiam_est = summarize(gdiam);
    const MCEstimate disp_est = summarize(disp);

    Report row;
    row["n"] = n;
    row["p"] = p;
    row["size_median"] = median;
    row["size_median_se"] = quantile_se(sorted_size, 0.5);
    row["size_mean"] = size_est.mean;
    row["size_mean_se"] = size_est.std_error;
    row["resistance_diameter_mean"] = rdiam_est.mean;
    row["resistance_diameter_mean_se"] = rdiam_est.std_error;
    row["graph_diameter_mean"] = gdiam_est.mean;
    row["graph_diameter_mean_se"] = gdiam_est.std_error;
    row["rayleigh_violation"] = violation;
    row["displacement_mean"] = disp_est.mean;
    row["displacement_mean_se"] = disp_est.std_error;
    if (previous_median) {
      row["size_median_ratio"] = median / *previous_median;
      ratios.push_back({{"n", n}, {"ratio", median / *previous_median}});
    } else {
      row["size_median_ratio"] = nullptr;
    }
    previous_median = median;
    report["table"].push_back(std::move(row));
  }
  report["summary"]["size_median_ratios"] = ratios;
  report["summary"]["max_rayleigh_violation"] = worst_violation;
  return report;
}

// ---------------------------------------------------------------------------

namespace {

FiniteMMSpace gasket_corner_space(unsigned level) {
  const GasketGraph g = gasket_graph(level);
  const double scale = ipow(0.6, level);
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(3, 3);
  for (int a = 0; a < 3; ++a) {
    for (int b = a + 1; b < 3; ++b) {
      d(a, b) = d(b, a) = scale * effective_resistance(g.net, g.corners[a], g.corners[b]);
    }
  }
  return FiniteMMSpace({"c0", "c1", "c2"}, d, std::vector<double>(3, 1.0 / 3.0), 0);
}

FiniteMMSpace uniform_space(const Network& net, double metric_scale = 1.0) {
  const double w = 1.0 / static_cast<double>(net.size());
  return as_mm_space(net, VertexMeasure::uniform(net.size(), w), 0, metric_scale, 1.0);
}

}  // namespace

Report run_ghp_check(const GhpCheckConfig& config) {
  if (config.gasket_to > 7 || config.gasket_from > config.gasket_to) {
    throw DomainError("ghp: gasket levels must satisfy from <= to <= 7");
  }
  Report params;
  params["gasket_from"] = config.gasket_from;
  params["gasket_to"] = config.gasket_to;
  params["path_edges"] = config.path_edges;
  Report report = make_report("ghp", std::nullopt, std::move(params));

  auto add = [&](const std::string& kind, const std::string& a, const std::string& b, double d) {
    report["table"].push_back({{"kind", kind}, {"a", a}, {"b", b}, {"ghp", d}});
  };

  const FiniteMMSpace level1 = uniform_space(gasket_graph(1).net);
  std::vector<std::size_t> reversed(level1.size());
  std::iota(reversed.rbegin(), reversed.rend(), 0);
  std::rotate(reversed.begin(), std::find(reversed.begin(), reversed.end(), level1.root()), reversed.end());
  add("identical", "gasket1", "gasket1", ghp_distance(level1, level1));
  add("relabelled", "gasket1", "gasket1-permuted", ghp_distance(level1, level1.restrict_to(reversed)));

  double gasket_max = 0.0;
  for (unsigned level = config.gasket_from; level < config.gasket_to; ++level) {
    const double d = ghp_distance(gasket_corner_space(level), gasket_corner_space(level + 1));
    gasket_max = std::max(gasket_max, d);
    add("gasket-corners", "level" + std::to_string(level), "level" + std::to_string(level + 1), d);
  }

  Report path = Report::array();
  bool decreasing = true;
  double last = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < config.path_edges.size(); ++i) {
    const std::size_t k1 = config.path_edges[i];
    const std::size_t k2 = config.path_edges[i + 1];
    const double d = ghp_distance(uniform_space(path_graph(k1, 1.0)), uniform_space(path_graph(k2, 1.0)));
    add("path", "k" + std::to_string(k1), "k" + std::to_string(k2), d);
    path.push_back(d);
    decreasing = decreasing && d < last;
    last = d;
  }
  report["summary"]["gasket_corner_max"] = gasket_max;
  report["summary"]["path_distances"] = path;
  report["summary"]["path_decreasing"] = decreasing;
  return report;
}

// ---------------------------------------------------------------------------

Report run_exit_bound(const Network& net, const VertexMeasure& mu, const std::string& name,
                      const ExitBoundConfig& config) {
  if (net.size() < 2) throw DomainError("exit-bound: need at least two vertices");
  if (config.eps_fractions.empty() || config.times.empty()) throw DomainError("exit-bound: empty eps or time grid");
  Report params;
  params["space"] = name;
  params["vertices"] = net.size();
  params["eps_fractions"] = config.eps_fractions;
  params["times"] = config.times;
  params["deltas"] = config.deltas;
  params["samples"] = config.samples;
  Report report = make_report("exit-bound", config.seed, std::move(params));

  const ResistanceMatrix r = resistance_matrix(net);
  const FiniteMMSpace space(net.labels(), r.values(), mu.weights(), 0);
  const std::vector<double> deltas = delta_grid(space, config.deltas);
  const double diam = space.diameter();
  Report cells = Report::array();
  bool all_pass = true;
  std::uint64_t cell_index = 0;
  for (double frac : config.eps_fractions) {
    for (double t : config.times) {
      const double eps = frac * diam;
      const ExitBound bound = best_exit_time_bound(space, eps, t, deltas);
      const ExitProbability mc = mc_exit_prob(net, mu, r, eps, t, config.samples, derive_seed(config.seed, cell_index++));
      const bool pass = mc.sup.mean <= bound.bound + 4.0 * mc.sup.std_error;
      all_pass = all_pass && pass;
      Report row;
      row["space"] = name;
      row["eps"] = eps;
      row["delta"] = bound.delta;
      row["t"] = t;
      row["bound"] = bound.bound;
      row["mc_sup"] = mc.sup.mean;
      row["mc_se"] = mc.sup.std_error;
      row["argmax"] = net.label(mc.argmax);
      row["within_bound"] = pass;
      Report per_start = Report::array();
      for (VertexId x = 0; x < net.size(); ++x) {
        per_start.push_back({{"vertex", net.label(x)},
                             {"mc_mean", mc.per_start[x].mean},
                             {"mc_se", mc.per_start[x].std_error}});
      }
      Report cell_report = row;
      cell_report["per_start"] = std::move(per_start);
      cells.push_back(std::move(cell_report));
      report["table"].push_back(std::move(row));
    }
  }
  report["cells"] = std::move(cells);
  report["summary"]["all_within_bound"] = all_pass;
  return report;
}

Report run_resolvent_check(const Network& net, const VertexMeasure& mu, VertexId x, VertexId y, VertexId z,
                           const ResolventCheckConfig& config) {
  if (x >= net.size() || y >= net.size() || z >= net.size()) throw DomainError("resolvent-check: vertex out of range");
  Report params;
  params["vertices"] = net.size();
  params["x"] = net.label(x);
  params["y"] = net.label(y);
  params["z"] = net.label(z);
  params["samples"] = config.samples;
  Report report = make_report("resolvent-check", config.seed, std::move(params));

  const ResistanceMatrix r = resistance_matrix(net);
  const PotentialFunction ones = PotentialFunction::Ones(static_cast<long>(net.size()));
  auto add = [&](const char* quantity, double exact, const MCEstimate& mc) {
    Report row;
    row["quantity"] = quantity;
    row["exact"] = exact;
    row["mc_mean"] = mc.mean;
    row["mc_se"] = mc.std_error;
    row["n"] = mc.n_samples;
    row["aborted"] = mc.aborted;
    row["z_score"] = mc.std_error > 0.0 ? (mc.mean - exact) / mc.std_error : 0.0;
    report["table"].push_back(std::move(row));
  };
  add("mean_hitting_time", resolvent_apply(r, mu, x, ones, y),
      mc_resolvent(net, mu, x, ones, y, config.samples, derive_seed(config.seed, 0)));
  add("local_time", shorted_kernel(net, {x}, y, z),
      mc_local_time(net, mu, {x}, y, z, config.samples, derive_seed(config.seed, 1)));
  return report;
}

// ---------------------------------------------------------------------------

void write_report(std::ostream& out, const Report& report, OutputFormat format) {
  if (format == OutputFormat::kJson) {
    out << report.dump(2) << '\n';
    return;
  }
  out << "# experiment: " << report["experiment"].get<std::string>() << '\n';
  out << "# version: " << report["version"].get<std::string>() << '\n';
  out << "# seed: " << cell(report["seed"]) << '\n';
  out << "# parameters: " << report["parameters"].dump() << '\n';
  const Report& table = report["table"];
  if (table.empty()) return;
  bool first = true;
  for (const auto& [key, value] : table.front().items()) {
    out << (first ? "" : ",") << key;
    first = false;
  }
  out << '\n';
  for (const auto& row : table) {
    first = true;
    for (const auto& [key, value] : table.front().items()) {
      out << (first ? "" : ",") << (row.contains(key) ? cell(row[key]) : "");
      first = false;
    }
    out << '\n';
  }
}

void write_plot_data(std::ostream& out, const Report& report, const std::string& x_column,
                     const std::string& y_column) {
  out << "# " << x_column << ' ' << y_column << '\n';
  for (const auto& row : report["table"]) {
    if (!row.contains(x_column) || !row.contains(y_column)) {
      throw DomainError("plot columns '" + x_column + "', '" + y_column + "' not in the report table");
    }
    if (row[y_column].is_null()) continue;
    out << cell(row[x_column]) << ' ' << cell(row[y_column]) << '\n';
  }
}

}  // namespace resnet
