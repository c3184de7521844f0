#include "concord/simulation.hpp"

#include <bit>
#include <cmath>
#include <string>

#include "concord/coefficients.hpp"
#include "concord/numerics.hpp"
#include "concord/variance.hpp"

namespace concord {

std::string degenerate_policy_name(DegeneratePolicy policy) {
  return policy == DegeneratePolicy::redraw ? "redraw" : "drop";
}

void SimConfig::validate() const {
  scenario.validate();
  if (replicates < 2) throw InvalidArgument("simulation needs at least 2 replicates");
}

double empirical_variance(std::span<const double> values) {
  if (values.size() < 2) {
    throw InvalidArgument("empirical_variance needs at least two values");
  }
  const double mean = compensated_mean(values);
  CompensatedSum sq;
  for (double v : values) sq.add((v - mean) * (v - mean));
  return sq.value() / static_cast<double>(values.size() - 1);
}

namespace {

constexpr int kMaxRedraws = 100000;

// Stream root for one cell, derived from the config seed and the scenario
// content so results do not depend on grid position or scheduling.
std::uint64_t cell_seed(const SimConfig& config) {
  SampleStream s{config.seed, static_cast<std::uint64_t>(config.scenario.K)};
  s = s.substream(static_cast<std::uint64_t>(config.scenario.n));
  s = s.substream(std::bit_cast<std::uint64_t>(config.scenario.kappa_target));
  return s.mixed_state();
}

struct ReplicateResult {
  double kappa_u = 0.0;
  double v_hat = 0.0;
  double va_hat = 0.0;
  std::int64_t degenerate = 0;
  bool used = false;
  bool exhausted = false;
  std::string failure;  // non-degeneracy failure escaping the worker loop
};

ReplicateResult run_replicate(const MultinomialModel& model, const SimConfig& config,
                              std::uint64_t seed, std::int64_t h) {
  ReplicateResult out;
  SampleStream stream{seed, static_cast<std::uint64_t>(h)};
  SplitMix64 gen = stream.generator();
  for (int attempt = 0; attempt <= kMaxRedraws; ++attempt) {
    const ContingencyTable table = sample_table(model, config.scenario.n, gen);
    try {
      const CoefficientEstimate est = cohen_kappa(table);
      if (!est.value_unbiased) {
        throw DegenerateSampleError("unbiased kappa undefined");
      }
      // The averaged columns are defined as means of plug-in estimates, so
      // take them from the same code path the public plug-in API uses.
      out.va_hat = plugin_variance(PluginFormula::va_transform, table).value;
      out.v_hat = plugin_variance(PluginFormula::delta_numeric, table).value;
      out.kappa_u = *est.value_unbiased;
      out.used = true;
      return out;
    } catch (const Error&) {
      out.degenerate += 1;
      if (config.policy == DegeneratePolicy::drop) {
        out.used = false;
        return out;
      }
      // redraw: continue consuming this replicate's own stream
    } catch (const std::exception& e) {
      // Exceptions must not escape the worker loop (OpenMP would terminate).
      out.failure = e.what();
      return out;
    }
  }
  out.exhausted = true;
  return out;
}

SimulationCell run_cell_impl(const SimConfig& config, bool parallel) {
  config.validate();
  const MultinomialModel model = build_scenario(config.scenario);
  const PopulationSummaries pop = population_summaries(model);
  const std::int64_t n = config.scenario.n;
  const std::int64_t N = config.replicates;

  SimulationCell cell;
  cell.K = config.scenario.K;
  cell.n = n;
  cell.kappa_target = config.scenario.kappa_target;

  const double v_closed = fleiss_cohen_everitt_variance(model, n).value;
  cell.va_exact = va_transform(Family::Cohen, v_closed, pop.kappa, n).value;
  cell.v_exact =
      delta_variance(cohen_kappa_u_functional(config.scenario.K, n, /*with_gradient=*/false),
                     model.cells(), n)
          .value;

  const std::uint64_t seed = cell_seed(config);
  std::vector<ReplicateResult> results(static_cast<std::size_t>(N));
  if (parallel) {
#pragma omp parallel for schedule(static)
    for (std::int64_t h = 0; h < N; ++h) {
      results[static_cast<std::size_t>(h)] = run_replicate(model, config, seed, h);
    }
  } else {
    for (std::int64_t h = 0; h < N; ++h) {
      results[static_cast<std::size_t>(h)] = run_replicate(model, config, seed, h);
    }
  }

  std::vector<double> kappa_u;
  kappa_u.reserve(static_cast<std::size_t>(N));
  CompensatedSum v_sum;
  CompensatedSum va_sum;
  std::int64_t degenerate = 0;
  for (const ReplicateResult& r : results) {
    if (r.exhausted) {
      throw DegenerateSampleError(
          "replicate exhausted " + std::to_string(kMaxRedraws) +
          " redraws without a nondegenerate sample; the scenario is too close to degenerate");
    }
    if (!r.failure.empty()) throw Error("replicate failed: " + r.failure);
    degenerate += r.degenerate;
    if (!r.used) continue;
    kappa_u.push_back(r.kappa_u);
    v_sum.add(r.v_hat);
    va_sum.add(r.va_hat);
  }
  cell.degenerate_count = degenerate;
  cell.used_replicates = static_cast<std::int64_t>(kappa_u.size());
  if (cell.used_replicates < 2) {
    throw DegenerateSampleError("fewer than two usable replicates in cell K=" +
                                std::to_string(cell.K) + ", n=" + std::to_string(n));
  }
  cell.v_e_hat = empirical_variance(kappa_u);
  cell.v_bar = v_sum.value() / static_cast<double>(cell.used_replicates);
  cell.va_bar = va_sum.value() / static_cast<double>(cell.used_replicates);

  if (cell.v_e_hat > 0.0) {
    cell.rel_v = cell.v_exact / cell.v_e_hat - 1.0;
    cell.rel_va = cell.va_exact / cell.v_e_hat - 1.0;
    cell.rel_vbar = cell.v_bar / cell.v_e_hat - 1.0;
    cell.rel_vabar = cell.va_bar / cell.v_e_hat - 1.0;
  }
  return cell;
}

}  // namespace

SimulationCell run_cell(const SimConfig& config) { return run_cell_impl(config, true); }

SimulationCell run_cell_reference(const SimConfig& config) {
  return run_cell_impl(config, false);
}

GridSummary summarize_cells(std::span<const SimulationCell> cells) {
  GridSummary summary;
  CompensatedSum v, va, vbar, vabar;
  std::int64_t included = 0;
  for (const SimulationCell& cell : cells) {
    if (!cell.rel_v) continue;
    v.add(*cell.rel_v);
    va.add(*cell.rel_va);
    vbar.add(*cell.rel_vbar);
    vabar.add(*cell.rel_vabar);
    ++included;
  }
  summary.cells_included = included;
  if (included > 0) {
    const double scale = 100.0 / static_cast<double>(included);
    summary.rel_v_pct = v.value() * scale;
    summary.rel_va_pct = va.value() * scale;
    summary.rel_vbar_pct = vbar.value() * scale;
    summary.rel_vabar_pct = vabar.value() * scale;
  }
  return summary;
}

namespace {

SimulationReport run_grid_impl(const std::vector<SimConfig>& configs, bool parallel) {
  if (configs.empty()) throw InvalidArgument("run_grid needs at least one cell");
  SimulationReport report;
  report.cells.reserve(configs.size());
  for (std::size_t i = 0; i < configs.size(); ++i) {
    try {
      report.cells.push_back(parallel ? run_cell(configs[i])
                                      : run_cell_reference(configs[i]));
    } catch (const Error& e) {
      throw DegenerateSampleError("cell " + std::to_string(i) + " (K=" +
                                  std::to_string(configs[i].scenario.K) + ", n=" +
                                  std::to_string(configs[i].scenario.n) + ", kappa=" +
                                  std::to_string(configs[i].scenario.kappa_target) +
                                  ") failed: " + e.what());
    }
  }
  report.summary = summarize_cells(report.cells);
  return report;
}

}  // namespace

SimulationReport run_grid(const std::vector<SimConfig>& configs) {
  return run_grid_impl(configs, true);
}

SimulationReport run_grid_reference(const std::vector<SimConfig>& configs) {
  return run_grid_impl(configs, false);
}

RelativeBiasSummary relative_bias_summary(std::span<const SimulationCell> cells) {
  if (cells.empty()) throw InvalidArgument("relative_bias_summary needs at least one cell");
  for (const SimulationCell& cell : cells) {
    if (!(cell.v_e_hat > 0.0) || !cell.rel_v) {
      throw InvalidArgument("relative_bias_summary: cell K=" + std::to_string(cell.K) +
                            ", n=" + std::to_string(cell.n) +
                            " has zero empirical variance");
    }
  }
  const GridSummary s = summarize_cells(cells);
  return RelativeBiasSummary{*s.rel_v_pct, *s.rel_va_pct, *s.rel_vbar_pct, *s.rel_vabar_pct};
}

}  // namespace concord
