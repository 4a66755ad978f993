// resnet: command-line front end for the library and the named experiments.
//
// Exit codes: 0 ok, 2 bad input, 3 capacity exceeded, 4 Monte Carlo or
// rejection budget exhausted.

#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "resnet/errors.hpp"
#include "resnet/experiments.hpp"
#include "resnet/mm_compare.hpp"
#include "resnet/network.hpp"
#include "resnet/network_io.hpp"
#include "resnet/resolvent.hpp"
#include "resnet/spaces.hpp"
#include "resnet/walk.hpp"

using namespace resnet;

namespace {

struct Globals {
  std::uint64_t seed = 1;
  std::string out;
  std::string format = "json";
  std::optional<std::size_t> samples;
  std::string plot;  // "x,y:path"
};

// Writes to --out or stdout.
void emit(const Globals& g, const std::function<void(std::ostream&)>& body) {
  if (g.out.empty() || g.out == "-") {
    body(std::cout);
    return;
  }
  std::ofstream file(g.out);
  if (!file) throw DomainError("cannot open output file " + g.out);
  body(file);
}

OutputFormat output_format(const Globals& g) { return g.format == "csv" ? OutputFormat::kCsv : OutputFormat::kJson; }

void emit_report(const Globals& g, const Report& report) {
  emit(g, [&](std::ostream& out) { write_report(out, report, output_format(g)); });
  if (g.plot.empty()) return;
  const auto colon = g.plot.find(':');
  const auto comma = g.plot.find(',');
  if (colon == std::string::npos || comma == std::string::npos || comma > colon) {
    throw DomainError("--plot expects X,Y:PATH");
  }
  std::ofstream file(g.plot.substr(colon + 1));
  if (!file) throw DomainError("cannot open plot file " + g.plot.substr(colon + 1));
  write_plot_data(file, report, g.plot.substr(0, comma), g.plot.substr(comma + 1, colon - comma - 1));
}

std::size_t samples_or(const Globals& g, std::size_t fallback) {
  if (g.samples && *g.samples == 0) throw DomainError("--samples must be positive");
  return g.samples.value_or(fallback);
}

// Measure from a file, or one of the two canonical walks.
VertexMeasure load_measure(const Network& net, const std::string& path, const std::string& walk) {
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open measure file " + path);
    return read_measure(in, net);
  }
  if (walk == "csrw") return csrw_measure(net);
  return vsrw_measure(net);
}

VertexSet vertex_list(const Network& net, const std::vector<std::string>& labels) {
  VertexSet out;
  for (const auto& l : labels) out.push_back(net.index(l));
  return out;
}

// gasket:N, path:K, tree:N[:offspring], or a network file.
struct NamedNetwork {
  Network net;
  std::string name;
};
NamedNetwork load_space(const std::string& text, std::uint64_t seed) {
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  if (colon != std::string::npos && (kind == "gasket" || kind == "path" || kind == "tree")) {
    std::string rest = text.substr(colon + 1);
    std::string law = "geometric";
    if (const auto c2 = rest.find(':'); c2 != std::string::npos) {
      law = rest.substr(c2 + 1);
      rest = rest.substr(0, c2);
    }
    std::size_t value = 0;
    try {
      value = std::stoul(rest);
    } catch (const std::exception&) {
      throw DomainError("bad size in space '" + text + "'");
    }
    if (kind == "gasket") return {gasket_graph(static_cast<unsigned>(value)).net, text};
    if (kind == "path") return {path_graph(value, 1.0), text};
    return {gw_tree(OffspringLaw::parse(law), value, seed).net, text};
  }
  return {read_network_file(text), text};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Resistance networks, random walks and scaling experiments"};
  app.set_version_flag("--version", library_version());
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  Globals g;
  app.add_option("--seed", g.seed, "Master seed")->capture_default_str();
  app.add_option("--out", g.out, "Output file (default stdout)");
  app.add_option("--format", g.format, "json or csv")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
  app.add_option("--samples", g.samples, "Monte Carlo sample count");
  app.add_option("--plot", g.plot, "Also write two table columns X,Y to PATH, as X,Y:PATH");

  std::function<void()> action;

  // resistance
  auto* res = app.add_subcommand("resistance", "Effective resistances of a network file");
  std::string res_net, res_x, res_y;
  res->add_option("network", res_net, "Edge list file")->required();
  res->add_option("--x", res_x, "First vertex");
  res->add_option("--y", res_y, "Second vertex");
  res->callback([&] {
    action = [&] {
      const Network net = read_network_file(res_net);
      if (!res_x.empty() || !res_y.empty()) {
        if (res_x.empty() || res_y.empty()) throw DomainError("give both --x and --y");
        const double r = effective_resistance(net, net.index(res_x), net.index(res_y));
        emit(g, [&](std::ostream& out) {
          if (g.format == "csv") {
            out << "x,y,resistance\n" << res_x << ',' << res_y << ',' << format_double(r) << '\n';
          } else {
            out << Report{{"x", res_x}, {"y", res_y}, {"resistance", r}}.dump(2) << '\n';
          }
        });
        return;
      }
      const ResistanceMatrix r = resistance_matrix(net);
      emit(g, [&](std::ostream& out) {
        if (g.format == "csv") {
          write_resistance_csv(out, r);
          return;
        }
        Report rows = Report::array();
        for (std::size_t i = 0; i < r.size(); ++i) {
          std::vector<double> row(r.values().row(static_cast<long>(i)).begin(), r.values().row(static_cast<long>(i)).end());
          rows.push_back(row);
        }
        out << Report{{"labels", r.labels()}, {"resistance", rows}}.dump(2) << '\n';
      });
    };
  });

  // reconstruct
  auto* rec = app.add_subcommand("reconstruct", "Network realising a resistance matrix CSV");
  std::string rec_matrix, rec_base;
  double rec_tol = 1e-9;
  rec->add_option("matrix", rec_matrix, "Resistance matrix CSV")->required();
  rec->add_option("--tolerance", rec_tol, "Conductance tolerance")->capture_default_str();
  rec->add_option("--base", rec_base, "Base vertex label");
  rec->callback([&] {
    action = [&] {
      std::ifstream in(rec_matrix);
      if (!in) throw DomainError("cannot open " + rec_matrix);
      const ResistanceMatrix r = read_resistance_csv(in);
      ReconstructionOptions opts;
      opts.tolerance = rec_tol;
      if (!rec_base.empty()) {
        const auto it = std::find(r.labels().begin(), r.labels().end(), rec_base);
        if (it == r.labels().end()) throw DomainError("unknown base vertex " + rec_base);
        opts.base = static_cast<VertexId>(it - r.labels().begin());
      }
      const Network net = network_from_resistance(r, opts);
      emit(g, [&](std::ostream& out) { write_network(out, net); });
    };
  });

  // simulate
  auto* sim = app.add_subcommand("simulate", "One walk trajectory as time,vertex rows");
  std::string sim_net, sim_measure, sim_walk = "vsrw", sim_start;
  double sim_horizon = 1.0;
  std::vector<std::string> sim_stop;
  sim->add_option("network", sim_net, "Edge list file")->required();
  sim->add_option("--measure", sim_measure, "Measure file (overrides --walk)");
  sim->add_option("--walk", sim_walk, "csrw or vsrw")->check(CLI::IsMember({"csrw", "vsrw"}))->capture_default_str();
  sim->add_option("--start", sim_start, "Start vertex")->required();
  sim->add_option("--horizon", sim_horizon, "Time horizon")->capture_default_str();
  sim->add_option("--stop", sim_stop, "Stop on entering any of these vertices")->delimiter(',');
  sim->callback([&] {
    action = [&] {
      const Network net = read_network_file(sim_net);
      const VertexMeasure mu = load_measure(net, sim_measure, sim_walk);
      std::optional<VertexSet> stop;
      if (!sim_stop.empty()) stop = vertex_list(net, sim_stop);
      const Trajectory traj = simulate(net, mu, net.index(sim_start), sim_horizon, stop, g.seed);
      emit(g, [&](std::ostream& out) {
        if (g.format == "csv") {
          out << "time,vertex\n";
          for (std::size_t i = 0; i < traj.size(); ++i) {
            out << format_double(traj.jump_times[i]) << ',' << net.label(traj.states[i]) << '\n';
          }
          return;
        }
        Report states = Report::array();
        for (VertexId v : traj.states) states.push_back(net.label(v));
        out << Report{{"seed", g.seed},
                      {"horizon", traj.horizon},
                      {"end_time", traj.end_time},
                      {"stopped", traj.stopped},
                      {"jump_times", traj.jump_times},
                      {"states", states}}
                   .dump(2)
            << '\n';
      });
    };
  });

  // resolvent-check
  auto* rc = app.add_subcommand("resolvent-check", "Exact versus Monte Carlo Green kernels");
  std::string rc_net, rc_measure, rc_walk = "vsrw", rc_x, rc_y, rc_z;
  rc->add_option("network", rc_net, "Edge list file")->required();
  rc->add_option("--measure", rc_measure, "Measure file (overrides --walk)");
  rc->add_option("--walk", rc_walk, "csrw or vsrw")->check(CLI::IsMember({"csrw", "vsrw"}))->capture_default_str();
  rc->add_option("--x", rc_x, "Killing vertex")->required();
  rc->add_option("--y", rc_y, "Start vertex")->required();
  rc->add_option("--z", rc_z, "Local time vertex")->required();
  rc->callback([&] {
    action = [&] {
      const Network net = read_network_file(rc_net);
      const VertexMeasure mu = load_measure(net, rc_measure, rc_walk);
      ResolventCheckConfig cfg;
      cfg.samples = samples_or(g, cfg.samples);
      cfg.seed = g.seed;
      emit_report(g, run_resolvent_check(net, mu, net.index(rc_x), net.index(rc_y), net.index(rc_z), cfg));
    };
  });

  // gasket-scaling
  auto* gs = app.add_subcommand("gasket-scaling", "Rescaled corner resistance by gasket level");
  GasketScalingConfig gs_cfg;
  std::optional<double> gs_alpha;
  gs->add_option("--max-level", gs_cfg.max_level, "Highest level (<= 7)")->capture_default_str();
  gs->add_option("--alpha", gs_alpha, "Heavy-tailed conductances with this index in (0,1)");
  gs->add_option("--seeds", gs_cfg.seeds, "Environments per level in heavy mode")->capture_default_str();
  gs->callback([&] {
    action = [&] {
      gs_cfg.heavy_alpha = gs_alpha;
      gs_cfg.seed = g.seed;
      if (g.samples) gs_cfg.seeds = samples_or(g, gs_cfg.seeds);
      emit_report(g, run_gasket_scaling(gs_cfg));
    };
  });

  // vsrw-clock
  auto* vc = app.add_subcommand("vsrw-clock", "Corner-to-corner hitting times on the 5^n clock");
  VsrwClockConfig vc_cfg;
  vc->add_option("--levels", vc_cfg.levels, "Gasket levels (<= 5)")->delimiter(',');
  vc->callback([&] {
    action = [&] {
      vc_cfg.samples = samples_or(g, vc_cfg.samples);
      vc_cfg.seed = g.seed;
      emit_report(g, run_vsrw_clock(vc_cfg));
    };
  });

  // fin
  auto* fin = app.add_subcommand("fin", "Trapping of the CSRW in heavy-tailed conductances");
  FinConfig fin_cfg;
  fin->add_option("--level", fin_cfg.level, "Gasket level (<= 5)")->capture_default_str();
  fin->add_option("--alpha", fin_cfg.alpha, "Tail index in (0,1)")->capture_default_str();
  fin->add_option("--time", fin_cfg.time, "Rescaled horizon")->capture_default_str();
  fin->add_option("--top-k", fin_cfg.top_k, "Atoms to list")->capture_default_str();
  fin->add_option("--atom-levels", fin_cfg.atom_levels, "Levels for the max-atom ratio")->delimiter(',');
  fin->add_option("--atom-samples", fin_cfg.atom_samples, "Environments per atom level")->capture_default_str();
  fin->callback([&] {
    action = [&] {
      fin_cfg.samples = samples_or(g, fin_cfg.samples);
      fin_cfg.seed = g.seed;
      emit_report(g, run_fin(fin_cfg));
    };
  });

  // tree-scaling
  auto* ts = app.add_subcommand("tree-scaling", "Rescaled walk displacement on conditioned Galton-Watson trees");
  TreeScalingConfig ts_cfg;
  ts->add_option("--sizes", ts_cfg.sizes, "Tree sizes (<= 10000)")->delimiter(',');
  ts->add_option("--offspring", ts_cfg.offspring, "geometric, poisson, or a pmf like 0.5,0,0.5")->capture_default_str();
  ts->add_option("--times", ts_cfg.times, "Rescaled times")->delimiter(',');
  ts->callback([&] {
    action = [&] {
      ts_cfg.samples = samples_or(g, ts_cfg.samples);
      ts_cfg.seed = g.seed;
      emit_report(g, run_tree_scaling(ts_cfg));
    };
  });

  // crg
  auto* crg = app.add_subcommand("crg", "Critical Erdos-Renyi components");
  CrgConfig crg_cfg;
  crg->add_option("--n", crg_cfg.n_values, "Graph sizes (<= 100000)")->delimiter(',');
  crg->add_option("--p-factor", crg_cfg.p_factor, "Edge probability is this over n")->capture_default_str();
  crg->add_option("--time", crg_cfg.time, "Walk runs for time * n")->capture_default_str();
  crg->callback([&] {
    action = [&] {
      crg_cfg.samples = samples_or(g, crg_cfg.samples);
      crg_cfg.seed = g.seed;
      emit_report(g, run_crg(crg_cfg));
    };
  });

  // ghp
  auto* ghp = app.add_subcommand("ghp", "Gromov-Hausdorff-Prohorov distances between coarse-grainings");
  GhpCheckConfig ghp_cfg;
  std::string ghp_a, ghp_b;
  ghp->add_option("--gasket-from", ghp_cfg.gasket_from, "First gasket level")->capture_default_str();
  ghp->add_option("--gasket-to", ghp_cfg.gasket_to, "Last gasket level")->capture_default_str();
  ghp->add_option("--paths", ghp_cfg.path_edges, "Path edge counts")->delimiter(',');
  ghp->add_option("--a", ghp_a, "Compare two spaces instead (gasket:N, path:K, tree:N or a file)");
  ghp->add_option("--b", ghp_b, "Second space for --a");
  ghp->callback([&] {
    action = [&] {
      if (ghp_a.empty() != ghp_b.empty()) throw DomainError("give both --a and --b");
      if (ghp_a.empty()) {
        emit_report(g, run_ghp_check(ghp_cfg));
        return;
      }
      // Uniform probability measures, rooted at the first vertex.
      auto space = [&](const std::string& text, std::uint64_t s) {
        const Network net = load_space(text, s).net;
        return as_mm_space(net, VertexMeasure::uniform(net.size(), 1.0 / static_cast<double>(net.size())), 0);
      };
      const double d = ghp_distance(space(ghp_a, derive_seed(g.seed, 0)), space(ghp_b, derive_seed(g.seed, 1)));
      emit(g, [&](std::ostream& out) {
        if (g.format == "csv") {
          out << "a,b,ghp\n" << ghp_a << ',' << ghp_b << ',' << format_double(d) << '\n';
        } else {
          out << Report{{"a", ghp_a}, {"b", ghp_b}, {"seed", g.seed}, {"ghp", d}}.dump(2) << '\n';
        }
      });
    };
  });

  // exit-bound
  auto* eb = app.add_subcommand("exit-bound", "Exit probabilities against the covering-number bound");
  ExitBoundConfig eb_cfg;
  std::string eb_space = "gasket:2", eb_measure, eb_walk = "vsrw";
  eb->add_option("--space", eb_space, "gasket:N, path:K, tree:N[:law] or a network file")->capture_default_str();
  eb->add_option("--measure", eb_measure, "Measure file (overrides --walk)");
  eb->add_option("--walk", eb_walk, "csrw or vsrw")->check(CLI::IsMember({"csrw", "vsrw"}))->capture_default_str();
  eb->add_option("--eps", eb_cfg.eps_fractions, "Radii as fractions of the diameter")->delimiter(',');
  eb->add_option("--times", eb_cfg.times, "Times t")->delimiter(',');
  eb->add_option("--deltas", eb_cfg.deltas, "Size of the delta grid")->capture_default_str();
  eb->callback([&] {
    action = [&] {
      const NamedNetwork space = load_space(eb_space, g.seed);
      const VertexMeasure mu = load_measure(space.net, eb_measure, eb_walk);
      eb_cfg.samples = samples_or(g, eb_cfg.samples);
      eb_cfg.seed = g.seed;
      emit_report(g, run_exit_bound(space.net, mu, space.name, eb_cfg));
    };
  });

  // generate
  auto* gen = app.add_subcommand("generate", "Write a model network as an edge list");
  std::string gen_kind, gen_coords, gen_offspring = "geometric";
  std::size_t gen_size = 1;
  double gen_param = 0.5;
  gen->add_option("kind", gen_kind, "gasket, path, alpha, tree, er or heavy-gasket")
      ->required()
      ->check(CLI::IsMember({"gasket", "path", "alpha", "tree", "er", "heavy-gasket"}));
  gen->add_option("--size", gen_size, "Level, edge count, point count or vertex count")->capture_default_str();
  gen->add_option("--param", gen_param, "alpha for alpha and heavy-gasket, p for er")->capture_default_str();
  gen->add_option("--offspring", gen_offspring, "Offspring law for tree")->capture_default_str();
  gen->add_option("--coords", gen_coords, "Gasket vertex coordinates CSV");
  gen->callback([&] {
    action = [&] {
      std::optional<Network> net;
      std::optional<GasketGraph> gasket;
      if (gen_kind == "gasket" || gen_kind == "heavy-gasket") {
        gasket = gasket_graph(static_cast<unsigned>(gen_size));
        net = gen_kind == "gasket" ? gasket->net : heavy_tailed_conductances(gasket->net, gen_param, g.seed);
      } else if (gen_kind == "path") {
        net = path_graph(gen_size, 1.0);
      } else if (gen_kind == "alpha") {
        net = alpha_interval_space(gen_size, gen_param);
      } else if (gen_kind == "tree") {
        net = gw_tree(OffspringLaw::parse(gen_offspring), gen_size, g.seed).net;
      } else {
        net = er_giant_component(gen_size, gen_param, g.seed);
      }
      emit(g, [&](std::ostream& out) { write_network(out, *net); });
      if (!gen_coords.empty()) {
        if (!gasket) throw DomainError("--coords is only available for gasket graphs");
        std::ofstream file(gen_coords);
        if (!file) throw DomainError("cannot open " + gen_coords);
        file << "vertex,x,y\n";
        for (VertexId v = 0; v < gasket->net.size(); ++v) {
          file << gasket->net.label(v) << ',' << format_double(gasket->coords[v].first) << ','
               << format_double(gasket->coords[v].second) << '\n';
        }
      }
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    action();
    return 0;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const NotAResistanceMetric& e) {
    std::cerr << "not a resistance metric: " << e.what() << '\n';
    return 2;
  } catch (const CapacityError& e) {
    std::cerr << "capacity exceeded: " << e.what() << '\n';
    return 3;
  } catch (const McBudgetAbort& e) {
    std::cerr << "monte carlo budget exhausted (" << e.aborted() << " replicates): " << e.what() << '\n';
    return 4;
  } catch (const RejectionBudgetExceeded& e) {
    std::cerr << "rejection budget exhausted after " << e.attempts() << " attempts: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 1;
  }
}
