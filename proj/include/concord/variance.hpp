#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "concord/coefficients.hpp"
#include "concord/model.hpp"
#include "concord/rng.hpp"
#include "concord/table.hpp"

namespace concord {

enum class VarianceMethod {
  closed_form,
  delta_numeric,
  va_transform,
  plugin,
  bootstrap,
};

std::string variance_method_name(VarianceMethod method);

/// Where a variance was evaluated: population values or sample values.
struct EvalPoint {
  std::int64_t n = 0;
  std::optional<double> kappa;
  std::optional<double> expected_index;
  bool population = true;
};

struct VarianceEstimate {
  double value = 0.0;  // >= 0
  VarianceMethod method = VarianceMethod::closed_form;
  Family family = Family::Cohen;
  EvalPoint at;
  std::int64_t dropped_resamples = 0;  // bootstrap only
  std::int64_t used_resamples = 0;     // bootstrap only
};

/// A smooth functional of a probability vector over M outcomes, with an
/// optional analytic gradient (partials with respect to each cell).
struct SmoothFunctional {
  std::function<double(std::span<const double>)> evaluate;
  std::function<std::vector<double>(std::span<const double>)> gradient;
};

/// First-order multinomial delta-method variance
///   V(f_hat) = [sum_c f_c^2 p_c - (sum_c f_c p_c)^2] / n,
/// using the analytic gradient when supplied, otherwise central finite
/// differences along simplex directions (cell c against the largest cell).
VarianceEstimate delta_variance(const SmoothFunctional& f, std::span<const double> p,
                                std::int64_t n);

/// Finite-difference gradient used by delta_variance (exposed for gradient
/// validation). Component at the reference cell is zero; the vector is
/// determined up to the additive constant the delta formula ignores.
std::vector<double> finite_difference_gradient(const SmoothFunctional& f,
                                               std::span<const double> p);

/// Largest relative mismatch between a functional's supplied gradient and
/// its finite differences, after centering both (the delta formula only
/// sees centered gradients).
double gradient_check(const SmoothFunctional& f, std::span<const double> p);

/// Classic large-sample variance of Cohen's kappa:
///   V = (A + B - C) / (n (1 - I_e)^2).
VarianceEstimate fleiss_cohen_everitt_variance(const MultinomialModel& p, std::int64_t n);

/// Same closed form evaluated at externally chosen (I_e, kappa); used by the
/// plug-in substitution, which pairs sample proportions with the unbiased
/// index and the unbiased-variant kappa.
double fleiss_cohen_everitt_at(const MultinomialModel& p, std::int64_t n,
                               double expected_index, double kappa);

/// Variance of the unbiased-variant estimate: the squared transformation
/// slope times the base-coefficient variance.
VarianceEstimate va_transform(Family family, double base_variance, double kappa_base,
                              std::int64_t n, int R = 2);

enum class PluginFormula {
  fleiss_cohen_everitt,
  va_transform,
  delta_numeric,
};

/// Evaluates the requested population formula at the sample point,
/// substituting the unbiased expected index for I_e and the
/// unbiased-variant kappa for kappa_C. The delta_numeric formula is the
/// numeric stand-in: the delta engine applied to the kappa_CU functional at
/// the sample proportions.
VarianceEstimate plugin_variance(PluginFormula formula, const ContingencyTable& table);

/// Nonparametric bootstrap over subjects (tables are resampled cellwise
/// from the sample proportions). Degenerate resamples are dropped and
/// counted; more than half degenerate is an error.
VarianceEstimate bootstrap_variance(Family family,
                                    const std::function<double(const ContingencyTable&)>& stat,
                                    const ContingencyTable& table, std::int64_t resamples,
                                    const SampleStream& stream);

VarianceEstimate bootstrap_variance(Family family,
                                    const std::function<double(const MultiRaterTable&)>& stat,
                                    const MultiRaterTable& mr, std::int64_t resamples,
                                    const SampleStream& stream);

// Ready-made functionals for the delta engine (flattened K x K input).
SmoothFunctional cohen_kappa_functional(int K, bool with_gradient = true);
SmoothFunctional cohen_kappa_u_functional(int K, std::int64_t n, bool with_gradient = true);
SmoothFunctional scott_pi_functional(int K);
SmoothFunctional scott_pi_u_functional(int K, std::int64_t n);
SmoothFunctional krippendorff_alpha_functional(int K, std::int64_t n);
SmoothFunctional krippendorff_alpha_u_functional(int K, std::int64_t n);

}  // namespace concord
