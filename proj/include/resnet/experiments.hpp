#pragma once

// Named experiments. Each returns a report
//
//   { experiment, version, seed, parameters, table: [...], summary: {...} }
//
// where `table` is a list of flat rows (written as CSV on request) and every
// Monte Carlo column has a matching `_se` column. Reports contain no
// timestamps, so a rerun with the same parameters is byte-identical.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "resnet/network.hpp"
#include "resnet/spaces.hpp"

namespace resnet {

using Report = nlohmann::ordered_json;

std::string library_version();

struct GasketScalingConfig {
  unsigned max_level = 5;
  std::optional<double> heavy_alpha;  // unset: unit conductances
  std::size_t seeds = 20;
  std::uint64_t seed = 1;
};
Report run_gasket_scaling(const GasketScalingConfig& config);

struct VsrwClockConfig {
  std::vector<unsigned> levels{0, 1, 2, 3, 4, 5};
  std::size_t samples = 10000;
  std::uint64_t seed = 1;
};
Report run_vsrw_clock(const VsrwClockConfig& config);

struct FinConfig {
  unsigned level = 4;
  double alpha = 0.5;
  std::size_t samples = 1000;  // independent environments, one CSRW and one VSRW walk each
  double time = 1.0;           // horizon in rescaled time units
  std::size_t top_k = 5;
  std::vector<unsigned> atom_levels{2, 3, 4, 5};
  std::size_t atom_samples = 200;
  std::uint64_t seed = 1;
};
Report run_fin(const FinConfig& config);

struct TreeScalingConfig {
  std::vector<std::size_t> sizes{100, 400, 1600};
  std::string offspring = "geometric";
  std::size_t samples = 1000;
  std::vector<double> times{0.0, 0.1, 0.5, 1.0};
  std::uint64_t seed = 1;
};
Report run_tree_scaling(const TreeScalingConfig& config);

struct CrgConfig {
  std::vector<std::size_t> n_values{1000, 10000};
  std::size_t samples = 30;
  double p_factor = 1.0;  // edge probability p_factor / n, capped at 1
  double time = 1.0;      // walk run for time * n
  std::uint64_t seed = 1;
};
Report run_crg(const CrgConfig& config);

struct GhpCheckConfig {
  unsigned gasket_from = 0;
  unsigned gasket_to = 4;
  std::vector<std::size_t> path_edges{1, 2, 4, 8};
};
Report run_ghp_check(const GhpCheckConfig& config);

struct ExitBoundConfig {
  std::vector<double> eps_fractions{0.25, 0.5};  // multiples of the diameter
  std::vector<double> times{0.01, 0.1, 1.0};
  std::size_t deltas = 20;
  std::size_t samples = 2000;
  std::uint64_t seed = 1;
};
// One row per (eps, t) on the given space.
Report run_exit_bound(const Network& net, const VertexMeasure& mu, const std::string& name,
                      const ExitBoundConfig& config);

struct ResolventCheckConfig {
  std::size_t samples = 10000;
  std::uint64_t seed = 1;
};
// Exact versus Monte Carlo for G_x 1(y) and E_y L_{sigma_x}(z).
Report run_resolvent_check(const Network& net, const VertexMeasure& mu, VertexId x, VertexId y, VertexId z,
                           const ResolventCheckConfig& config);

// Sample quantile with linear interpolation between order statistics.
double quantile(std::vector<double> values, double q);

enum class OutputFormat { kJson, kCsv };
void write_report(std::ostream& out, const Report& report, OutputFormat format);
// Two whitespace-separated columns from the table, for gnuplot.
void write_plot_data(std::ostream& out, const Report& report, const std::string& x_column,
                     const std::string& y_column);

}  // namespace resnet
