#include "concord/coefficients.hpp"

#include <cmath>
#include <string>

namespace concord {

std::string family_name(Family family) {
  switch (family) {
    case Family::Cohen: return "cohen";
    case Family::Scott: return "scott";
    case Family::Krippendorff: return "krippendorff";
    case Family::Hubert: return "hubert";
    case Family::Fleiss: return "fleiss";
    case Family::Fleiss2: return "fleiss2";
    case Family::Krippendorff2: return "krippendorff2";
  }
  return "unknown";
}

std::optional<Family> family_from_name(const std::string& name) {
  if (name == "cohen") return Family::Cohen;
  if (name == "scott") return Family::Scott;
  if (name == "krippendorff") return Family::Krippendorff;
  if (name == "hubert") return Family::Hubert;
  if (name == "fleiss") return Family::Fleiss;
  if (name == "fleiss2") return Family::Fleiss2;
  if (name == "krippendorff2") return Family::Krippendorff2;
  return std::nullopt;
}

namespace {

// Integer building blocks shared by the two-rater coefficients. All index
// arithmetic reduces to exact int64 sums followed by one division.
struct TwoRaterSums {
  std::int64_t n;
  std::int64_t diag;        // sum_i x_ii
  std::int64_t cross;       // sum_i x_i. * x_.i            (Cohen chance model)
  std::int64_t paired_sq;   // sum_i (x_i. + x_.i)^2        (Scott chance model)
  std::int64_t paired;      // sum_i (x_i. + x_.i) = 2n
};

TwoRaterSums two_rater_sums(const ContingencyTable& table) {
  TwoRaterSums s{table.n(), table.diagonal_total(), 0, 0, 0};
  for (int i = 0; i < table.K(); ++i) {
    const std::int64_t r = table.row_total(i);
    const std::int64_t c = table.col_total(i);
    s.cross += r * c;
    s.paired_sq += (r + c) * (r + c);
    s.paired += r + c;
  }
  return s;
}

[[noreturn]] void throw_undefined(const char* what, const ContingencyTable& table) {
  throw UndefinedCoefficientError(std::string(what) + " on table " + table.describe(),
                                  table.K(), table.counts());
}

double checked_ratio(double numerator, double denominator) {
  return numerator / denominator;
}

}  // namespace

CoefficientEstimate cohen_kappa(const ContingencyTable& table) {
  const TwoRaterSums s = two_rater_sums(table);
  const double n = static_cast<double>(s.n);
  const double I_o = static_cast<double>(s.diag) / n;
  const double I_e = static_cast<double>(s.cross) / (n * n);
  if (s.cross == s.n * s.n) throw_undefined("Cohen kappa undefined (I_e = 1)", table);

  CoefficientEstimate est;
  est.family = Family::Cohen;
  est.R = 2;
  est.n = s.n;
  est.observed_index = I_o;
  est.expected_index = I_e;
  est.value = checked_ratio(I_o - I_e, 1.0 - I_e);
  if (s.n >= 2) {
    const std::int64_t pairs = s.n * (s.n - 1);
    est.unbiased_expected_index = static_cast<double>(s.cross - s.diag) / static_cast<double>(pairs);
    if (s.cross - s.diag < pairs) {
      const double ieu = *est.unbiased_expected_index;
      est.value_unbiased = checked_ratio(I_o - ieu, 1.0 - ieu);
    }
  }
  return est;
}

CoefficientEstimate scott_pi(const ContingencyTable& table) {
  const TwoRaterSums s = two_rater_sums(table);
  const double n = static_cast<double>(s.n);
  const double I_o = static_cast<double>(s.diag) / n;
  // I_e = sum_i pi_i^2 with pi_i = (p_i. + p_.i) / 2, so 4 n^2 I_e is integer.
  const std::int64_t four_n_sq = 4 * s.n * s.n;
  const double I_e = static_cast<double>(s.paired_sq) / static_cast<double>(four_n_sq);
  if (s.paired_sq == four_n_sq) throw_undefined("Scott pi undefined (I_e = 1)", table);

  CoefficientEstimate est;
  est.family = Family::Scott;
  est.R = 2;
  est.n = s.n;
  est.observed_index = I_o;
  est.expected_index = I_e;
  est.value = checked_ratio(I_o - I_e, 1.0 - I_e);
  if (s.n >= 2) {
    // Cellwise unbiased assembly: each squared/product marginal term gets the
    // n/(n-1) correction; everything collapses to one integer numerator.
    const std::int64_t numer = s.paired_sq - s.paired - 2 * s.diag;
    const std::int64_t denom = 4 * s.n * (s.n - 1);
    est.unbiased_expected_index = static_cast<double>(numer) / static_cast<double>(denom);
    if (numer < denom) {
      const double ieu = *est.unbiased_expected_index;
      est.value_unbiased = checked_ratio(I_o - ieu, 1.0 - ieu);
    }
  }
  return est;
}

CoefficientEstimate krippendorff_alpha(const ContingencyTable& table) {
  const CoefficientEstimate scott = scott_pi(table);
  const double n = static_cast<double>(scott.n);
  CoefficientEstimate est;
  est.family = Family::Krippendorff;
  est.R = 2;
  est.n = scott.n;
  est.observed_index = scott.observed_index;
  // alpha = (I_o - I_e^K) / (1 - I_e^K) with I_e^K = (2n I_e^S - 1) / (2n - 1).
  est.expected_index = (2.0 * n * scott.expected_index - 1.0) / (2.0 * n - 1.0);
  est.value = scott.value + (1.0 - scott.value) / (2.0 * n);
  if (scott.value_unbiased) {
    est.value_unbiased =
        ((2.0 * n - 1.0) * *scott.value_unbiased + 1.0) / (2.0 * n);
  }
  return est;
}

CoefficientEstimate fleiss_kappa(const MultiRaterTable& mr) {
  const int K = mr.K();
  const int R = mr.R();
  const std::int64_t n = mr.n();
  std::int64_t same_pairs = 0;  // sum_i sum_k c_ik (c_ik - 1)
  std::vector<std::int64_t> totals(K, 0);
  for (std::int64_t i = 0; i < n; ++i) {
    for (int k = 0; k < K; ++k) {
      const std::int64_t c = mr.count(i, k);
      same_pairs += c * (c - 1);
      totals[k] += c;
    }
  }
  const std::int64_t nr = n * R;
  std::int64_t total_sq = 0;
  for (int k = 0; k < K; ++k) total_sq += totals[k] * totals[k];

  const double I_o = static_cast<double>(same_pairs) /
                     static_cast<double>(n * R * (R - 1));
  const double I_e = static_cast<double>(total_sq) / static_cast<double>(nr * nr);
  if (total_sq == nr * nr) {
    throw UndefinedCoefficientError("Fleiss kappa undefined (I_e = 1)", K, {});
  }

  CoefficientEstimate est;
  est.family = Family::Fleiss;
  est.R = R;
  est.n = n;
  est.observed_index = I_o;
  est.expected_index = I_e;
  est.value = checked_ratio(I_o - I_e, 1.0 - I_e);
  if (n >= 2 && est.value > transform_domain_lower_bound(Family::Fleiss, n, R)) {
    est.value_unbiased = to_unbiased(Family::Fleiss, est.value, n, R);
  }
  return est;
}

double unbiased_expected_index(Family family, const ContingencyTable& table) {
  if (table.n() < 2) {
    throw InvalidArgument("unbiased_expected_index needs n >= 2; no unbiased correction exists");
  }
  const TwoRaterSums s = two_rater_sums(table);
  switch (family) {
    case Family::Cohen:
      return static_cast<double>(s.cross - s.diag) / static_cast<double>(s.n * (s.n - 1));
    case Family::Scott:
      return static_cast<double>(s.paired_sq - s.paired - 2 * s.diag) /
             static_cast<double>(4 * s.n * (s.n - 1));
    default:
      throw InvalidArgument("unbiased_expected_index supports Cohen and Scott only; "
                            "use to_unbiased for the " + family_name(family) + " family");
  }
}

namespace {

void check_transform_args(Family family, std::int64_t n, int R) {
  if (n < 2) throw InvalidArgument("transformation needs n >= 2");
  if (family == Family::Fleiss && R < 2) {
    throw InvalidArgument("Fleiss transformation needs R >= 2");
  }
}

[[noreturn]] void throw_domain(Family family, double kappa, std::int64_t n, int R,
                               double denominator) {
  throw TransformDomainError(
      "transformation undefined for " + family_name(family) + ": kappa = " +
      std::to_string(kappa) + " with n = " + std::to_string(n) + ", R = " +
      std::to_string(R) + " gives denominator " + std::to_string(denominator) +
      " <= 0 (domain: kappa > " +
      std::to_string(transform_domain_lower_bound(family, n, R)) + ")");
}

}  // namespace

double transform_domain_lower_bound(Family family, std::int64_t n, int R) {
  const double nn = static_cast<double>(n);
  switch (family) {
    case Family::Cohen:
    case Family::Hubert:
      return -(nn - 1.0);
    case Family::Scott:
    case Family::Fleiss2:
    case Family::Krippendorff:
    case Family::Krippendorff2:
      return -(2.0 * nn - 1.0);
    case Family::Fleiss:
      return -(static_cast<double>(R) * (nn - 1.0) + 1.0) / (R - 1.0);
  }
  return 0.0;
}

double to_unbiased(Family family, double kappa, std::int64_t n, int R) {
  check_transform_args(family, n, R);
  const double nn = static_cast<double>(n);
  switch (family) {
    case Family::Cohen:
    case Family::Hubert: {
      const double den = nn - 1.0 + kappa;
      if (!(den > 0.0)) throw_domain(family, kappa, n, R, den);
      return nn * kappa / den;
    }
    case Family::Scott:
    case Family::Fleiss2: {
      const double den = 2.0 * nn - 1.0 + kappa;
      if (!(den > 0.0)) throw_domain(family, kappa, n, R, den);
      return ((2.0 * nn - 1.0) * kappa + 1.0) / den;
    }
    case Family::Fleiss: {
      const double rr = static_cast<double>(R);
      const double den = rr * (nn - 1.0) + 1.0 + (rr - 1.0) * kappa;
      if (!(den > 0.0)) throw_domain(family, kappa, n, R, den);
      return ((rr * nn - 1.0) * kappa + 1.0) / den;
    }
    case Family::Krippendorff:
    case Family::Krippendorff2: {
      const Family base = family == Family::Krippendorff ? Family::Scott : Family::Fleiss2;
      const double scott_like_u = to_unbiased(base, kappa, n, 2);
      return ((2.0 * nn - 1.0) * scott_like_u + 1.0) / (2.0 * nn);
    }
  }
  throw InvalidArgument("unknown family");
}

double transform_derivative(Family family, double kappa, std::int64_t n, int R) {
  check_transform_args(family, n, R);
  const double nn = static_cast<double>(n);
  switch (family) {
    case Family::Cohen:
    case Family::Hubert: {
      const double den = nn - 1.0 + kappa;
      if (!(den > 0.0)) throw_domain(family, kappa, n, R, den);
      return nn * (nn - 1.0) / (den * den);
    }
    case Family::Scott:
    case Family::Fleiss2: {
      const double den = 2.0 * nn - 1.0 + kappa;
      if (!(den > 0.0)) throw_domain(family, kappa, n, R, den);
      return 4.0 * nn * (nn - 1.0) / (den * den);
    }
    case Family::Fleiss: {
      const double rr = static_cast<double>(R);
      const double den = rr * (nn - 1.0) + 1.0 + (rr - 1.0) * kappa;
      if (!(den > 0.0)) throw_domain(family, kappa, n, R, den);
      return rr * rr * nn * (nn - 1.0) / (den * den);
    }
    case Family::Krippendorff:
    case Family::Krippendorff2: {
      const double den = 2.0 * nn - 1.0 + kappa;
      if (!(den > 0.0)) throw_domain(family, kappa, n, R, den);
      return 2.0 * (2.0 * nn - 1.0) * (nn - 1.0) / (den * den);
    }
  }
  throw InvalidArgument("unknown family");
}

double crossover_kappa(Family family, std::int64_t n, int R) {
  check_transform_args(family, n, R);
  const double nn = static_cast<double>(n);
  switch (family) {
    case Family::Cohen:
    case Family::Hubert:
      return std::sqrt(nn * (nn - 1.0)) - (nn - 1.0);
    case Family::Scott:
    case Family::Fleiss2:
      return 2.0 * std::sqrt(nn * (nn - 1.0)) - (2.0 * nn - 1.0);
    case Family::Fleiss: {
      const double rr = static_cast<double>(R);
      return (rr * std::sqrt(nn * (nn - 1.0)) - (rr * (nn - 1.0) + 1.0)) / (rr - 1.0);
    }
    case Family::Krippendorff:
    case Family::Krippendorff2:
      return std::sqrt(2.0 * (2.0 * nn - 1.0) * (nn - 1.0)) - (2.0 * nn - 1.0);
  }
  throw InvalidArgument("unknown family");
}

}  // namespace concord
