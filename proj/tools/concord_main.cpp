// concord: agreement coefficients, their asymptotic variances, and the
// Monte Carlo variance-assessment harness, from the command line.

#include <cmath>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "concord/coefficients.hpp"
#include "concord/io.hpp"
#include "concord/model.hpp"
#include "concord/numerics.hpp"
#include "concord/report.hpp"
#include "concord/rng.hpp"
#include "concord/simulation.hpp"
#include "concord/variance.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

using namespace concord;

constexpr double kWaldZ = 1.959964;

enum class OutputFormat { table, csv, json };

OutputFormat parse_output(const std::string& name) {
  if (name == "table") return OutputFormat::table;
  if (name == "csv") return OutputFormat::csv;
  if (name == "json") return OutputFormat::json;
  throw InvalidArgument("unknown output format: " + name);
}

std::string opt_str(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string("na");
}

struct EstimateRow {
  CoefficientEstimate est;
  std::vector<std::string> categories;
};

CoefficientEstimate estimate_for(Family family, const IngestedRatings& input) {
  switch (family) {
    case Family::Cohen:
    case Family::Scott:
    case Family::Krippendorff: {
      if (!input.is_contingency()) {
        throw InvalidArgument(family_name(family) +
                              " needs two-rater data (a contingency table)");
      }
      const ContingencyTable& t = input.contingency();
      if (family == Family::Cohen) return cohen_kappa(t);
      if (family == Family::Scott) return scott_pi(t);
      return krippendorff_alpha(t);
    }
    case Family::Fleiss: {
      if (input.is_contingency()) {
        return fleiss_kappa(MultiRaterTable::from_contingency(input.contingency()));
      }
      return fleiss_kappa(input.multi_rater());
    }
    default:
      throw InvalidArgument("family " + family_name(family) +
                            " takes a caller-supplied base estimate; "
                            "the CLI computes cohen, scott, krippendorff and fleiss");
  }
}

std::string render_estimate(const EstimateRow& row, OutputFormat format) {
  const CoefficientEstimate& e = row.est;
  if (format == OutputFormat::csv) {
    std::string out = "family,n,R,value,value_u,I_o,I_e,I_e_u\n";
    out += family_name(e.family) + "," + std::to_string(e.n) + "," + std::to_string(e.R) +
           "," + format_double(e.value) + "," + opt_str(e.value_unbiased) + "," +
           format_double(e.observed_index) + "," + format_double(e.expected_index) + "," +
           opt_str(e.unbiased_expected_index) + "\n";
    return out;
  }
  if (format == OutputFormat::json) {
    nlohmann::json j;
    j["family"] = family_name(e.family);
    j["n"] = e.n;
    j["R"] = e.R;
    j["value"] = e.value;
    j["value_u"] = e.value_unbiased ? nlohmann::json(*e.value_unbiased) : nlohmann::json(nullptr);
    j["I_o"] = e.observed_index;
    j["I_e"] = e.expected_index;
    j["I_e_u"] = e.unbiased_expected_index ? nlohmann::json(*e.unbiased_expected_index)
                                           : nlohmann::json(nullptr);
    if (!row.categories.empty()) j["categories"] = row.categories;
    return j.dump(2) + "\n";
  }
  std::ostringstream out;
  out << "family:   " << family_name(e.family) << "\n";
  out << "n:        " << e.n << "\n";
  out << "R:        " << e.R << "\n";
  out << "value:    " << format_double(e.value) << "\n";
  out << "value_u:  " << opt_str(e.value_unbiased) << "\n";
  out << "I_o:      " << format_double(e.observed_index) << "\n";
  out << "I_e:      " << format_double(e.expected_index) << "\n";
  out << "I_e_u:    " << opt_str(e.unbiased_expected_index) << "\n";
  if (!row.categories.empty()) {
    out << "categories:";
    for (std::size_t i = 0; i < row.categories.size(); ++i) {
      out << " " << row.categories[i] << "=" << i;
    }
    out << "\n";
  }
  return out.str();
}

struct VarianceRow {
  EstimateRow base;
  double v_plugin = 0.0;
  std::string v_method;
  double va_plugin = 0.0;
  double wald_low = 0.0;
  double wald_high = 0.0;
  bool clamped = false;
};

VarianceRow variance_for(Family family, const IngestedRatings& input,
                         std::uint64_t seed, std::int64_t resamples) {
  VarianceRow row;
  row.base.est = estimate_for(family, input);
  row.base.categories = input.categories;
  const CoefficientEstimate& e = row.base.est;
  if (!e.value_unbiased) {
    throw DegenerateSampleError("unbiased-variant estimate undefined on this data; "
                                "no variance to report");
  }
  const std::int64_t n = e.n;

  switch (family) {
    case Family::Cohen: {
      row.v_plugin = plugin_variance(PluginFormula::delta_numeric, input.contingency()).value;
      row.v_method = "delta_stand_in";
      row.va_plugin = plugin_variance(PluginFormula::va_transform, input.contingency()).value;
      break;
    }
    case Family::Scott:
    case Family::Krippendorff: {
      const ContingencyTable& t = input.contingency();
      const int K = t.K();
      const std::vector<double> p_hat = t.proportions();
      const SmoothFunctional u_fnl = family == Family::Scott
                                         ? scott_pi_u_functional(K, n)
                                         : krippendorff_alpha_u_functional(K, n);
      row.v_plugin = delta_variance(u_fnl, p_hat, n).value;
      row.v_method = "delta_stand_in";
      const double base = delta_variance(scott_pi_functional(K), p_hat, n).value;
      // Substitution analog of the Cohen plug-in rule: the factor is
      // evaluated at the unbiased-variant Scott value.
      const CoefficientEstimate scott = scott_pi(t);
      if (!scott.value_unbiased) {
        throw DegenerateSampleError("unbiased Scott value undefined on this data");
      }
      row.va_plugin = va_transform(family, base, *scott.value_unbiased, n).value;
      break;
    }
    case Family::Fleiss: {
      const MultiRaterTable mr = input.is_contingency()
                                     ? MultiRaterTable::from_contingency(input.contingency())
                                     : input.multi_rater();
      const int R = mr.R();
      const auto base_stat = [](const MultiRaterTable& m) { return fleiss_kappa(m).value; };
      const auto u_stat = [R](const MultiRaterTable& m) {
        const CoefficientEstimate f = fleiss_kappa(m);
        if (!f.value_unbiased) throw DegenerateSampleError("unbiased Fleiss kappa undefined");
        return *f.value_unbiased;
      };
      const VarianceEstimate base =
          bootstrap_variance(Family::Fleiss, base_stat, mr, resamples, SampleStream{seed, 1});
      const VarianceEstimate direct =
          bootstrap_variance(Family::Fleiss, u_stat, mr, resamples, SampleStream{seed, 2});
      row.v_plugin = direct.value;
      row.v_method = "bootstrap(" + std::to_string(direct.used_resamples) + " used)";
      row.va_plugin = va_transform(Family::Fleiss, base.value, *e.value_unbiased, n, R).value;
      break;
    }
    default:
      throw InvalidArgument("variance supports cohen, scott, krippendorff and fleiss");
  }

  const double half = kWaldZ * std::sqrt(row.va_plugin);
  double lo = *e.value_unbiased - half;
  double hi = *e.value_unbiased + half;
  row.clamped = lo < -1.0 || hi > 1.0;
  row.wald_low = std::max(lo, -1.0);
  row.wald_high = std::min(hi, 1.0);
  return row;
}

std::string render_variance(const VarianceRow& row, OutputFormat format) {
  if (format == OutputFormat::csv) {
    const CoefficientEstimate& e = row.base.est;
    std::string out =
        "family,n,R,value,value_u,I_o,I_e,I_e_u,v_plugin,v_method,va_plugin,"
        "wald_low,wald_high,clamped\n";
    out += family_name(e.family) + "," + std::to_string(e.n) + "," + std::to_string(e.R) +
           "," + format_double(e.value) + "," + opt_str(e.value_unbiased) + "," +
           format_double(e.observed_index) + "," + format_double(e.expected_index) + "," +
           opt_str(e.unbiased_expected_index) + "," + format_double(row.v_plugin) + "," +
           row.v_method + "," + format_double(row.va_plugin) + "," +
           format_double(row.wald_low) + "," + format_double(row.wald_high) + "," +
           (row.clamped ? "true" : "false") + "\n";
    return out;
  }
  if (format == OutputFormat::json) {
    nlohmann::json j = nlohmann::json::parse(render_estimate(row.base, OutputFormat::json));
    j["v_plugin"] = row.v_plugin;
    j["v_method"] = row.v_method;
    j["va_plugin"] = row.va_plugin;
    j["wald_95"] = {row.wald_low, row.wald_high};
    j["wald_clamped"] = row.clamped;
    return j.dump(2) + "\n";
  }
  std::ostringstream out;
  out << render_estimate(row.base, OutputFormat::table);
  out << "v_plugin:  " << format_double(row.v_plugin) << "  [" << row.v_method << "]\n";
  out << "va_plugin: " << format_double(row.va_plugin) << "  [va_transform]\n";
  out << "wald_95:   [" << format_double(row.wald_low) << ", " << format_double(row.wald_high)
      << "]" << (row.clamped ? "  (clamped to [-1,1])" : "") << "\n";
  return out.str();
}

struct OracleOutcome {
  double max_bias_cohen = 0.0;
  double max_bias_scott = 0.0;
  std::int64_t models = 0;
};

MultinomialModel random_model(int K, SplitMix64& gen) {
  // Normalized exponentials with a floor, so every cell stays positive.
  const std::size_t cells = static_cast<std::size_t>(K) * K;
  std::vector<double> p(cells);
  double total = 0.0;
  for (double& v : p) {
    v = -std::log(1.0 - gen.next_double()) + 1e-3;
    total += v;
  }
  for (double& v : p) v /= total;
  // Renormalize exactly enough for the model mass check.
  double mass = 0.0;
  for (double v : p) mass += v;
  p.back() += 1.0 - mass;
  return MultinomialModel(K, std::move(p));
}

OracleOutcome run_oracle(const std::vector<int>& Ks, const std::vector<std::int64_t>& ns,
                         int models_per_cell, std::uint64_t seed) {
  OracleOutcome out;
  for (int K : Ks) {
    for (std::int64_t n : ns) {
      for (int m = 0; m < models_per_cell; ++m) {
        SampleStream stream{seed, static_cast<std::uint64_t>(m)};
        SplitMix64 gen = stream.substream(static_cast<std::uint64_t>(K * 1000 + n)).generator();
        const MultinomialModel model = random_model(K, gen);

        double cohen_target = 0.0;
        double scott_target = 0.0;
        for (int i = 0; i < K; ++i) {
          cohen_target += model.row_sum(i) * model.col_sum(i);
          const double avg = 0.5 * (model.row_sum(i) + model.col_sum(i));
          scott_target += avg * avg;
        }

        CompensatedSum cohen_mean;
        CompensatedSum scott_mean;
        for_each_table(model, n, [&](const ContingencyTable& t, double prob) {
          cohen_mean.add(prob * unbiased_expected_index(Family::Cohen, t));
          scott_mean.add(prob * unbiased_expected_index(Family::Scott, t));
        });
        out.max_bias_cohen =
            std::max(out.max_bias_cohen, std::abs(cohen_mean.value() - cohen_target));
        out.max_bias_scott =
            std::max(out.max_bias_scott, std::abs(scott_mean.value() - scott_target));
        ++out.models;
      }
    }
  }
  return out;
}

int run_cli(int argc, char** argv) {
  CLI::App app{"agreement coefficients, variances, and the simulation harness"};
  app.require_subcommand(1);

  std::string family_name_arg = "cohen";
  std::string input_path;
  std::string format_name = "matrix";
  std::string output_name = "table";
  std::string config_path;
  std::string policy_name;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::int64_t resamples = 2000;
  std::int64_t crossover_n = 0;
  int crossover_R = 2;
  int threads = 0;
  std::vector<int> oracle_K;
  std::vector<std::int64_t> oracle_n;
  int oracle_models = 20;

  auto add_common = [&](CLI::App* cmd, bool needs_input) {
    if (needs_input) {
      cmd->add_option("--input", input_path, "ratings file")->required();
      cmd->add_option("--format", format_name, "input format: matrix|long")
          ->check(CLI::IsMember({"matrix", "long"}));
      cmd->add_option("--family", family_name_arg, "coefficient family")
          ->check(CLI::IsMember({"cohen", "scott", "krippendorff", "fleiss"}));
    }
    cmd->add_option("--output", output_name, "output format: table|csv|json")
        ->check(CLI::IsMember({"table", "csv", "json"}));
  };

  CLI::App* estimate = app.add_subcommand("estimate", "point estimates for one data set");
  add_common(estimate, true);

  CLI::App* variance = app.add_subcommand("variance", "estimates plus plug-in variances");
  add_common(variance, true);
  variance->add_option("--seed", seed, "seed for the bootstrap fallback");
  variance->add_option("--resamples", resamples, "bootstrap resamples (fleiss)")
      ->check(CLI::Range(static_cast<std::int64_t>(100), static_cast<std::int64_t>(1000000)));

  CLI::App* simulate = app.add_subcommand("simulate", "run a simulation grid from a config");
  simulate->add_option("--config", config_path, "JSON config file")->required();
  auto* seed_opt = simulate->add_option("--seed", seed, "override the config seed");
  simulate->add_option("--policy", policy_name, "degenerate-sample policy override")
      ->check(CLI::IsMember({"redraw", "drop"}));
  simulate->add_option("--threads", threads, "worker threads (0 = library default)");
  add_common(simulate, false);

  CLI::App* crossover = app.add_subcommand("crossover",
                                           "base kappa where the variance factor is 1");
  crossover->add_option("--family", family_name_arg, "coefficient family")
      ->check(CLI::IsMember({"cohen", "scott", "krippendorff", "hubert", "fleiss",
                             "fleiss2", "krippendorff2"}));
  crossover->add_option("--n", crossover_n, "sample size")->required();
  crossover->add_option("--R", crossover_R, "raters (fleiss)");
  add_common(crossover, false);

  CLI::App* oracle = app.add_subcommand("oracle",
                                        "exhaustive unbiasedness check of the expected index");
  oracle->add_option("--K", oracle_K, "category counts (default 2 3)");
  oracle->add_option("--n", oracle_n, "sample sizes (default 2 3 4)");
  oracle->add_option("--models", oracle_models, "random models per (K, n)");
  oracle->add_option("--seed", seed, "seed for the random models");
  add_common(oracle, false);

  CLI11_PARSE(app, argc, argv);
  const OutputFormat output = parse_output(output_name);
  const RatingsFormat in_format =
      format_name == "matrix" ? RatingsFormat::matrix : RatingsFormat::long_format;
  const std::optional<Family> family = family_from_name(family_name_arg);
  if (!family) throw InvalidArgument("unknown family: " + family_name_arg);
  seed_given = seed_opt->count() > 0;

  std::string report;
  int exit_code = 0;

  if (estimate->parsed()) {
    const IngestedRatings input = ingest_ratings(input_path, in_format);
    EstimateRow row{estimate_for(*family, input), input.categories};
    report = render_estimate(row, output);
  } else if (variance->parsed()) {
    const IngestedRatings input = ingest_ratings(input_path, in_format);
    report = render_variance(variance_for(*family, input, seed, resamples), output);
  } else if (simulate->parsed()) {
#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(threads);
#else
    (void)threads;
#endif
    std::vector<SimConfig> configs = parse_config(config_path);
    for (SimConfig& cfg : configs) {
      if (seed_given) cfg.seed = seed;
      if (policy_name == "redraw") cfg.policy = DegeneratePolicy::redraw;
      if (policy_name == "drop") cfg.policy = DegeneratePolicy::drop;
    }
    const SimulationReport result = run_grid(configs);
    if (output == OutputFormat::csv) report = report_to_csv(result);
    else if (output == OutputFormat::json) report = report_to_json(result);
    else report = report_to_text(result);
  } else if (crossover->parsed()) {
    const double value = crossover_kappa(*family, crossover_n, crossover_R);
    if (output == OutputFormat::csv) {
      report = "family,n,R,crossover\n" + family_name(*family) + "," +
               std::to_string(crossover_n) + "," + std::to_string(crossover_R) + "," +
               format_double(value) + "\n";
    } else if (output == OutputFormat::json) {
      nlohmann::json j;
      j["family"] = family_name(*family);
      j["n"] = crossover_n;
      j["R"] = crossover_R;
      j["crossover"] = value;
      report = j.dump(2) + "\n";
    } else {
      report = "crossover(" + family_name(*family) + ", n=" + std::to_string(crossover_n) +
               ", R=" + std::to_string(crossover_R) + "): " + format_double(value) + "\n";
    }
  } else if (oracle->parsed()) {
    if (oracle_K.empty()) oracle_K = {2, 3};
    if (oracle_n.empty()) oracle_n = {2, 3, 4};
    if (seed == 0) seed = 42;
    const OracleOutcome result = run_oracle(oracle_K, oracle_n, oracle_models, seed);
    const double worst = std::max(result.max_bias_cohen, result.max_bias_scott);
    const bool pass = worst <= 1e-10;
    std::ostringstream out;
    out << "unbiasedness oracle over " << result.models << " models (seed " << seed << ")\n";
    out << "max |bias| cohen: " << format_double(result.max_bias_cohen) << "\n";
    out << "max |bias| scott: " << format_double(result.max_bias_scott) << "\n";
    out << (pass ? "PASS" : "FAIL") << " (tolerance 1e-10)\n";
    report = out.str();
    exit_code = pass ? 0 : 1;
  }

  std::cout << report;
  return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const concord::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
