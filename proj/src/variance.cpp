#include "concord/variance.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "concord/numerics.hpp"

namespace concord {

std::string variance_method_name(VarianceMethod method) {
  switch (method) {
    case VarianceMethod::closed_form: return "closed_form";
    case VarianceMethod::delta_numeric: return "delta_numeric";
    case VarianceMethod::va_transform: return "va_transform";
    case VarianceMethod::plugin: return "plugin";
    case VarianceMethod::bootstrap: return "bootstrap";
  }
  return "unknown";
}

namespace {

std::size_t largest_cell(std::span<const double> p) {
  std::size_t ref = 0;
  for (std::size_t c = 1; c < p.size(); ++c) {
    if (p[c] > p[ref]) ref = c;
  }
  return ref;
}

double eval_at(const SmoothFunctional& f, std::vector<double>& point, std::size_t cell) {
  double value = 0.0;
  try {
    value = f.evaluate(point);
  } catch (const std::exception& e) {
    throw GradientError("functional evaluation failed while perturbing cell " +
                        std::to_string(cell) + ": " + e.what(),
                        static_cast<int>(cell));
  }
  if (!std::isfinite(value)) {
    throw GradientError("functional returned a non-finite value while perturbing cell " +
                        std::to_string(cell), static_cast<int>(cell));
  }
  return value;
}

}  // namespace

std::vector<double> finite_difference_gradient(const SmoothFunctional& f,
                                               std::span<const double> p) {
  const std::size_t m = p.size();
  const std::size_t ref = largest_cell(p);
  std::vector<double> grad(m, 0.0);
  std::vector<double> point(p.begin(), p.end());
  for (std::size_t c = 0; c < m; ++c) {
    if (c == ref || p[c] == 0.0) continue;  // zero-probability cells carry no weight
    const double h = std::max(1e-6, 1e-4 * p[c]);
    point[c] = p[c] + h;
    point[ref] = p[ref] - h;
    const double f_plus = eval_at(f, point, c);
    point[c] = p[c] - h;
    point[ref] = p[ref] + h;
    const double f_minus = eval_at(f, point, c);
    point[c] = p[c];
    point[ref] = p[ref];
    grad[c] = (f_plus - f_minus) / (2.0 * h);
  }
  return grad;
}

namespace {

double centered_component(std::span<const double> g, std::span<const double> p,
                          std::size_t c) {
  CompensatedSum mean;
  for (std::size_t i = 0; i < g.size(); ++i) mean.add(g[i] * p[i]);
  return g[c] - mean.value();
}

}  // namespace

double gradient_check(const SmoothFunctional& f, std::span<const double> p) {
  if (!f.gradient) throw InvalidArgument("gradient_check needs a supplied gradient");
  const std::vector<double> analytic = f.gradient(p);
  const std::vector<double> numeric = finite_difference_gradient(f, p);
  if (analytic.size() != p.size()) {
    throw InvalidArgument("supplied gradient has wrong dimension");
  }
  // The delta formula only sees gradients up to an additive constant, so
  // compare after centering under p.
  double worst = 0.0;
  for (std::size_t c = 0; c < p.size(); ++c) {
    if (p[c] == 0.0) continue;
    const double a = centered_component(analytic, p, c);
    const double b = centered_component(numeric, p, c);
    const double scale = std::max({1.0, std::abs(a), std::abs(b)});
    worst = std::max(worst, std::abs(a - b) / scale);
  }
  return worst;
}

VarianceEstimate delta_variance(const SmoothFunctional& f, std::span<const double> p,
                                std::int64_t n) {
  if (n < 1) throw InvalidArgument("delta_variance needs n >= 1");
  if (p.empty()) throw InvalidArgument("delta_variance needs a nonempty probability vector");
  std::vector<double> grad;
  if (f.gradient) {
    grad = f.gradient(p);
    if (grad.size() != p.size()) {
      throw InvalidArgument("supplied gradient has wrong dimension");
    }
  } else {
    grad = finite_difference_gradient(f, p);
  }
  CompensatedSum second;
  CompensatedSum first;
  for (std::size_t c = 0; c < p.size(); ++c) {
    second.add(grad[c] * grad[c] * p[c]);
    first.add(grad[c] * p[c]);
  }
  const double mean = first.value();
  const double bracket = second.value() - mean * mean;

  VarianceEstimate out;
  out.value = std::max(bracket, 0.0) / static_cast<double>(n);
  out.method = VarianceMethod::delta_numeric;
  out.at.n = n;
  out.at.population = true;
  return out;
}

double fleiss_cohen_everitt_at(const MultinomialModel& p, std::int64_t n,
                               double expected_index, double kappa) {
  if (n < 1) throw InvalidArgument("variance needs n >= 1");
  const int K = p.K();
  const double q = 1.0 - kappa;
  CompensatedSum a_sum;
  for (int i = 0; i < K; ++i) {
    const double w = 1.0 - (p.row_sum(i) + p.col_sum(i)) * q;
    a_sum.add(p.p(i, i) * w * w);
  }
  CompensatedSum b_sum;
  for (int i = 0; i < K; ++i) {
    for (int j = 0; j < K; ++j) {
      if (i == j) continue;
      const double w = p.col_sum(i) + p.row_sum(j);
      b_sum.add(p.p(i, j) * w * w);
    }
  }
  const double A = a_sum.value();
  const double B = q * q * b_sum.value();
  const double c_root = 1.0 - q * (1.0 + expected_index);
  const double C = c_root * c_root;
  const double one_minus_ie = 1.0 - expected_index;
  if (!(one_minus_ie > 0.0)) {
    throw UndefinedCoefficientError("variance undefined: expected index is 1", K, {});
  }
  return (A + B - C) / (static_cast<double>(n) * one_minus_ie * one_minus_ie);
}

VarianceEstimate fleiss_cohen_everitt_variance(const MultinomialModel& p, std::int64_t n) {
  const PopulationSummaries pop = population_summaries(p);
  VarianceEstimate out;
  out.value = std::max(fleiss_cohen_everitt_at(p, n, pop.expected_index, pop.kappa), 0.0);
  out.method = VarianceMethod::closed_form;
  out.family = Family::Cohen;
  out.at.n = n;
  out.at.kappa = pop.kappa;
  out.at.expected_index = pop.expected_index;
  out.at.population = true;
  return out;
}

VarianceEstimate va_transform(Family family, double base_variance, double kappa_base,
                              std::int64_t n, int R) {
  if (base_variance < 0.0) throw InvalidArgument("va_transform needs base_variance >= 0");
  const double slope = transform_derivative(family, kappa_base, n, R);
  VarianceEstimate out;
  out.value = slope * slope * base_variance;
  out.method = VarianceMethod::va_transform;
  out.family = family;
  out.at.n = n;
  out.at.kappa = kappa_base;
  out.at.population = true;
  return out;
}

VarianceEstimate plugin_variance(PluginFormula formula, const ContingencyTable& table) {
  const CoefficientEstimate est = cohen_kappa(table);
  if (!est.unbiased_expected_index || !est.value_unbiased) {
    throw DegenerateSampleError(
        "plug-in variance undefined: unbiased index or kappa not computable on table " +
        table.describe());
  }
  const std::int64_t n = table.n();
  const double ieu = *est.unbiased_expected_index;
  const double k_u = *est.value_unbiased;

  VarianceEstimate out;
  out.method = VarianceMethod::plugin;
  out.family = Family::Cohen;
  out.at.n = n;
  out.at.kappa = k_u;
  out.at.expected_index = ieu;
  out.at.population = false;

  const MultinomialModel sample_point(table.K(), table.proportions());
  switch (formula) {
    case PluginFormula::fleiss_cohen_everitt: {
      out.value = std::max(fleiss_cohen_everitt_at(sample_point, n, ieu, k_u), 0.0);
      return out;
    }
    case PluginFormula::va_transform: {
      // Exact domain check in integers: kappa_CU = (Dn - S) / (n(n-1) - S + D)
      // and the factor needs n - 1 + kappa_CU > 0, i.e.
      // (n-1)(n(n-1) - S + D) + (Dn - S) > 0. Doubles round a boundary case
      // like kappa_CU = -(n-1) into the domain.
      std::int64_t cross = 0;
      for (int i = 0; i < table.K(); ++i) cross += table.row_total(i) * table.col_total(i);
      const std::int64_t diag = table.diagonal_total();
      const std::int64_t den = n * (n - 1) - cross + diag;
      if ((n - 1) * den + (diag * n - cross) <= 0) {
        throw DegenerateSampleError(
            "plug-in variance undefined: unbiased kappa outside the transformation "
            "domain on table " + table.describe());
      }
      const double base = std::max(fleiss_cohen_everitt_at(sample_point, n, ieu, k_u), 0.0);
      const double slope = transform_derivative(Family::Cohen, k_u, n, 2);
      out.value = slope * slope * base;
      return out;
    }
    case PluginFormula::delta_numeric: {
      const VarianceEstimate delta =
          delta_variance(cohen_kappa_u_functional(table.K(), n), sample_point.cells(), n);
      out.value = delta.value;
      return out;
    }
  }
  throw InvalidArgument("unknown plugin formula");
}

namespace {

struct BootstrapAccumulator {
  std::vector<double> values;
  std::vector<unsigned char> ok;
};

VarianceEstimate finish_bootstrap(Family family, BootstrapAccumulator& acc,
                                  std::int64_t resamples, std::int64_t n) {
  std::vector<double> used;
  used.reserve(acc.values.size());
  for (std::size_t b = 0; b < acc.values.size(); ++b) {
    if (acc.ok[b]) used.push_back(acc.values[b]);
  }
  const std::int64_t dropped = resamples - static_cast<std::int64_t>(used.size());
  if (2 * dropped > resamples) {
    throw BootstrapError("more than 50% of bootstrap resamples were degenerate (" +
                         std::to_string(dropped) + " of " + std::to_string(resamples) + ")");
  }
  if (used.size() < 2) {
    throw BootstrapError("bootstrap needs at least two usable resamples");
  }
  CompensatedSum mean_sum;
  for (double v : used) mean_sum.add(v);
  const double mean = mean_sum.value() / static_cast<double>(used.size());
  CompensatedSum sq;
  for (double v : used) sq.add((v - mean) * (v - mean));

  VarianceEstimate out;
  out.value = sq.value() / static_cast<double>(used.size() - 1);
  out.method = VarianceMethod::bootstrap;
  out.family = family;
  out.at.n = n;
  out.at.population = false;
  out.dropped_resamples = dropped;
  out.used_resamples = static_cast<std::int64_t>(used.size());
  return out;
}

}  // namespace

VarianceEstimate bootstrap_variance(Family family,
                                    const std::function<double(const ContingencyTable&)>& stat,
                                    const ContingencyTable& table, std::int64_t resamples,
                                    const SampleStream& stream) {
  if (resamples < 100) throw BootstrapError("bootstrap needs at least 100 resamples");
  try {
    (void)stat(table);
  } catch (const std::exception& e) {
    throw BootstrapError(std::string("estimator undefined on the original data: ") + e.what());
  }
  const MultinomialModel empirical(table.K(), table.proportions());
  const std::int64_t n = table.n();
  const std::uint64_t root = stream.mixed_state();

  BootstrapAccumulator acc;
  acc.values.assign(static_cast<std::size_t>(resamples), 0.0);
  acc.ok.assign(static_cast<std::size_t>(resamples), 0);

#pragma omp parallel for schedule(static)
  for (std::int64_t b = 0; b < resamples; ++b) {
    SampleStream rs{root, static_cast<std::uint64_t>(b)};
    const ContingencyTable resample = sample_table(empirical, n, rs);
    try {
      acc.values[static_cast<std::size_t>(b)] = stat(resample);
      acc.ok[static_cast<std::size_t>(b)] = 1;
    } catch (const std::exception&) {
      // degenerate resample: dropped and counted
    }
  }
  return finish_bootstrap(family, acc, resamples, n);
}

VarianceEstimate bootstrap_variance(Family family,
                                    const std::function<double(const MultiRaterTable&)>& stat,
                                    const MultiRaterTable& mr, std::int64_t resamples,
                                    const SampleStream& stream) {
  if (resamples < 100) throw BootstrapError("bootstrap needs at least 100 resamples");
  try {
    (void)stat(mr);
  } catch (const std::exception& e) {
    throw BootstrapError(std::string("estimator undefined on the original data: ") + e.what());
  }
  const std::int64_t n = mr.n();
  const int K = mr.K();
  const std::uint64_t root = stream.mixed_state();

  BootstrapAccumulator acc;
  acc.values.assign(static_cast<std::size_t>(resamples), 0.0);
  acc.ok.assign(static_cast<std::size_t>(resamples), 0);

#pragma omp parallel for schedule(static)
  for (std::int64_t b = 0; b < resamples; ++b) {
    SampleStream rs{root, static_cast<std::uint64_t>(b)};
    SplitMix64 gen = rs.generator();
    std::vector<std::int64_t> rows(static_cast<std::size_t>(n) * K, 0);
    for (std::int64_t i = 0; i < n; ++i) {
      const auto pick = static_cast<std::int64_t>(gen.next_double() * static_cast<double>(n));
      const std::int64_t src = std::min(pick, n - 1);
      for (int k = 0; k < K; ++k) {
        rows[static_cast<std::size_t>(i) * K + k] = mr.count(src, k);
      }
    }
    const MultiRaterTable resample(K, mr.R(), std::move(rows));
    try {
      acc.values[static_cast<std::size_t>(b)] = stat(resample);
      acc.ok[static_cast<std::size_t>(b)] = 1;
    } catch (const std::exception&) {
    }
  }
  return finish_bootstrap(family, acc, resamples, n);
}

namespace {

struct KappaParts {
  double observed;
  double expected;
  std::vector<double> row;
  std::vector<double> col;
};

KappaParts cohen_parts(int K, std::span<const double> p) {
  KappaParts parts;
  parts.row.assign(K, 0.0);
  parts.col.assign(K, 0.0);
  for (int i = 0; i < K; ++i) {
    for (int j = 0; j < K; ++j) {
      const double v = p[static_cast<std::size_t>(i) * K + j];
      parts.row[i] += v;
      parts.col[j] += v;
    }
  }
  CompensatedSum io;
  CompensatedSum ie;
  for (int i = 0; i < K; ++i) {
    io.add(p[static_cast<std::size_t>(i) * K + i]);
    ie.add(parts.row[i] * parts.col[i]);
  }
  parts.observed = io.value();
  parts.expected = ie.value();
  return parts;
}

double cohen_value(int K, std::span<const double> p) {
  const KappaParts parts = cohen_parts(K, p);
  const double den = 1.0 - parts.expected;
  if (!(den > 0.0)) {
    throw DegenerateSampleError("Cohen kappa functional undefined (expected index = 1)");
  }
  return (parts.observed - parts.expected) / den;
}

double scott_value(int K, std::span<const double> p) {
  const KappaParts parts = cohen_parts(K, p);
  CompensatedSum ie;
  for (int i = 0; i < K; ++i) {
    const double avg = 0.5 * (parts.row[i] + parts.col[i]);
    ie.add(avg * avg);
  }
  const double expected = ie.value();
  const double den = 1.0 - expected;
  if (!(den > 0.0)) {
    throw DegenerateSampleError("Scott pi functional undefined (expected index = 1)");
  }
  return (parts.observed - expected) / den;
}

std::vector<double> cohen_gradient(int K, std::span<const double> p) {
  const KappaParts parts = cohen_parts(K, p);
  const double den = 1.0 - parts.expected;
  if (!(den > 0.0)) {
    throw DegenerateSampleError("Cohen kappa gradient undefined (expected index = 1)");
  }
  const double kappa = (parts.observed - parts.expected) / den;
  std::vector<double> grad(static_cast<std::size_t>(K) * K);
  for (int i = 0; i < K; ++i) {
    for (int j = 0; j < K; ++j) {
      const double diag = i == j ? 1.0 : 0.0;
      grad[static_cast<std::size_t>(i) * K + j] =
          (diag - (1.0 - kappa) * (parts.col[i] + parts.row[j])) / den;
    }
  }
  return grad;
}

}  // namespace

SmoothFunctional cohen_kappa_functional(int K, bool with_gradient) {
  SmoothFunctional f;
  f.evaluate = [K](std::span<const double> p) { return cohen_value(K, p); };
  if (with_gradient) {
    f.gradient = [K](std::span<const double> p) { return cohen_gradient(K, p); };
  }
  return f;
}

SmoothFunctional cohen_kappa_u_functional(int K, std::int64_t n, bool with_gradient) {
  SmoothFunctional f;
  f.evaluate = [K, n](std::span<const double> p) {
    return to_unbiased(Family::Cohen, cohen_value(K, p), n);
  };
  if (with_gradient) {
    f.gradient = [K, n](std::span<const double> p) {
      const double kappa = cohen_value(K, p);
      const double slope = transform_derivative(Family::Cohen, kappa, n);
      std::vector<double> grad = cohen_gradient(K, p);
      for (double& g : grad) g *= slope;
      return grad;
    };
  }
  return f;
}

SmoothFunctional scott_pi_functional(int K) {
  SmoothFunctional f;
  f.evaluate = [K](std::span<const double> p) { return scott_value(K, p); };
  return f;
}

SmoothFunctional scott_pi_u_functional(int K, std::int64_t n) {
  SmoothFunctional f;
  f.evaluate = [K, n](std::span<const double> p) {
    return to_unbiased(Family::Scott, scott_value(K, p), n);
  };
  return f;
}

SmoothFunctional krippendorff_alpha_functional(int K, std::int64_t n) {
  SmoothFunctional f;
  const double nn = static_cast<double>(n);
  f.evaluate = [K, nn](std::span<const double> p) {
    const double pi = scott_value(K, p);
    return pi + (1.0 - pi) / (2.0 * nn);
  };
  return f;
}

SmoothFunctional krippendorff_alpha_u_functional(int K, std::int64_t n) {
  SmoothFunctional f;
  f.evaluate = [K, n](std::span<const double> p) {
    return to_unbiased(Family::Krippendorff, scott_value(K, p), n);
  };
  return f;
}

}  // namespace concord
