#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "concord/model.hpp"

namespace concord {

enum class DegeneratePolicy { redraw, drop };

std::string degenerate_policy_name(DegeneratePolicy policy);

struct SimConfig {
  Scenario scenario;
  std::int64_t replicates = 10000;
  std::uint64_t seed = 0;
  DegeneratePolicy policy = DegeneratePolicy::redraw;

  void validate() const;
};

/// One scenario's results: the empirical variance of the N unbiased-variant
/// kappas against the exact asymptotic columns and the averaged plug-in
/// columns. `v_exact` is the delta-engine variance of the kappa_CU
/// functional (a numeric stand-in, reported under method delta_stand_in);
/// `va_exact` comes from the closed-form transformation factor.
struct SimulationCell {
  int K = 0;
  std::int64_t n = 0;
  double kappa_target = 0.0;
  double v_e_hat = 0.0;
  double v_exact = 0.0;
  double va_exact = 0.0;
  double v_bar = 0.0;
  double va_bar = 0.0;
  std::int64_t degenerate_count = 0;
  std::int64_t used_replicates = 0;
  std::optional<double> rel_v;       // v_exact / v_e_hat - 1
  std::optional<double> rel_va;
  std::optional<double> rel_vbar;
  std::optional<double> rel_vabar;
};

/// Across-grid averages of the per-cell relative differences, in percent.
/// Empty when no cell had a positive empirical variance.
struct GridSummary {
  std::optional<double> rel_v_pct;
  std::optional<double> rel_va_pct;
  std::optional<double> rel_vbar_pct;
  std::optional<double> rel_vabar_pct;
  std::int64_t cells_included = 0;
};

struct SimulationReport {
  std::vector<SimulationCell> cells;
  GridSummary summary;
};

/// Runs one scenario cell: exact variances from the population model, N
/// reproducible draws with per-draw plug-in variances, then the aggregates.
/// Replicates run in parallel when OpenMP is enabled; the result is
/// bit-identical for any worker count.
SimulationCell run_cell(const SimConfig& config);

/// Serial reference implementation of run_cell: one plain loop, no OpenMP.
/// Kept for testing and benchmarking; must produce bit-identical cells.
SimulationCell run_cell_reference(const SimConfig& config);

SimulationReport run_grid(const std::vector<SimConfig>& configs);
SimulationReport run_grid_reference(const std::vector<SimConfig>& configs);

/// Lenient summary used by run_grid and the report reader: averages over the
/// cells whose relatives are defined, empty when there are none.
GridSummary summarize_cells(std::span<const SimulationCell> cells);

/// Sample variance with denominator N - 1, compensated summation.
double empirical_variance(std::span<const double> values);

struct RelativeBiasSummary {
  double rel_v_pct;
  double rel_va_pct;
  double rel_vbar_pct;
  double rel_vabar_pct;
};

/// Arithmetic means of the four per-cell relative differences, in percent.
/// Errors if any cell has a zero empirical variance.
RelativeBiasSummary relative_bias_summary(std::span<const SimulationCell> cells);

}  // namespace concord
