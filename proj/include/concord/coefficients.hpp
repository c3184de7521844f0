#pragma once

#include <optional>
#include <string>

#include "concord/table.hpp"

namespace concord {

/// The seven coefficient families handled by the transformation machinery.
/// Hubert, Fleiss2 and Krippendorff2 base estimates are supplied by the
/// caller; the other four are computed from data.
enum class Family {
  Cohen,
  Scott,
  Krippendorff,
  Hubert,
  Fleiss,
  Fleiss2,
  Krippendorff2,
};

std::string family_name(Family family);
std::optional<Family> family_from_name(const std::string& name);

struct CoefficientEstimate {
  Family family = Family::Cohen;
  int R = 2;
  std::int64_t n = 0;
  double value = 0.0;            // classic estimate
  double observed_index = 0.0;   // I_o
  double expected_index = 0.0;   // I_e (plug-in)
  std::optional<double> unbiased_expected_index;  // I_eU, when computable
  std::optional<double> value_unbiased;           // kappa_XU, when computable
};

/// Cohen's kappa with the plug-in and unbiased expected indices and both
/// the classic and unbiased-variant estimates.
CoefficientEstimate cohen_kappa(const ContingencyTable& table);

/// Scott's pi (averaged-marginal chance model), same companion fields.
CoefficientEstimate scott_pi(const ContingencyTable& table);

/// Krippendorff's alpha for two raters, defined through the affine relation
/// alpha = pi + (1 - pi) / (2n) to Scott's pi.
CoefficientEstimate krippendorff_alpha(const ContingencyTable& table);

/// Fleiss' kappa for R raters per subject.
CoefficientEstimate fleiss_kappa(const MultiRaterTable& mr);

/// Unbiased estimator of the expected agreement index. Supported for the
/// Cohen and Scott chance models; other families go through to_unbiased.
double unbiased_expected_index(Family family, const ContingencyTable& table);

/// Closed-form map from a classic estimate to its unbiased-variant
/// counterpart. For Krippendorff/Krippendorff2 the input is the Scott-type
/// base value (Scott's pi, resp. kappa_F2), matching the variance factors.
double to_unbiased(Family family, double kappa, std::int64_t n, int R = 2);

/// d kappa_XU / d kappa_X at the given base value.
double transform_derivative(Family family, double kappa, std::int64_t n, int R = 2);

/// The base-coefficient value at which the transformation has unit slope;
/// there the variance factor equals 1 and kappa_XU - kappa_X is extremal.
double crossover_kappa(Family family, std::int64_t n, int R = 2);

/// Lower bound of the transformation domain: to_unbiased is defined for
/// kappa strictly above this value.
double transform_domain_lower_bound(Family family, std::int64_t n, int R = 2);

}  // namespace concord
