#include <doctest.h>

#include <cmath>

#include "concord/coefficients.hpp"
#include "oracle_helpers.hpp"

using namespace concord;
using concord::testing::central_difference;
using concord::testing::for_each_count_table;
using concord::testing::krippendorff_alpha_oracle;
using concord::testing::random_table;

namespace {

ContingencyTable make_table(int K, std::vector<std::int64_t> counts) {
  return ContingencyTable(K, std::move(counts));
}

}  // namespace

TEST_CASE("cohen_kappa on the worked examples") {
  const CoefficientEstimate perfect = cohen_kappa(make_table(2, {5, 0, 0, 5}));
  CHECK(perfect.value == doctest::Approx(1.0).epsilon(1e-14));

  const CoefficientEstimate indep = cohen_kappa(make_table(2, {3, 3, 2, 2}));
  CHECK(indep.observed_index == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(indep.expected_index == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(indep.value == doctest::Approx(0.0).epsilon(1e-14));

  const CoefficientEstimate mid = cohen_kappa(make_table(2, {4, 1, 2, 3}));
  CHECK(mid.observed_index == doctest::Approx(0.7).epsilon(1e-14));
  CHECK(mid.expected_index == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(mid.value == doctest::Approx(0.4).epsilon(1e-13));
  REQUIRE(mid.unbiased_expected_index.has_value());
  CHECK(*mid.unbiased_expected_index == doctest::Approx(4.3 / 9.0).epsilon(1e-14));
  REQUIRE(mid.value_unbiased.has_value());
  CHECK(*mid.value_unbiased == doctest::Approx(4.0 / 9.4).epsilon(1e-13));
}

TEST_CASE("cohen_kappa: expected index of 1 is a typed error carrying the table") {
  try {
    cohen_kappa(make_table(2, {10, 0, 0, 0}));
    FAIL("expected UndefinedCoefficientError");
  } catch (const UndefinedCoefficientError& e) {
    CHECK(e.table_K() == 2);
    CHECK(e.table_counts()[0] == 10);
  }
}

TEST_CASE("scott_pi on the worked examples") {
  CHECK(scott_pi(make_table(2, {1, 0, 0, 1})).value == doctest::Approx(1.0).epsilon(1e-14));

  const CoefficientEstimate skew = scott_pi(make_table(2, {1, 1, 0, 0}));
  CHECK(skew.expected_index == doctest::Approx(0.625).epsilon(1e-14));
  CHECK(skew.observed_index == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(skew.value == doctest::Approx(-1.0 / 3.0).epsilon(1e-13));
  REQUIRE(skew.unbiased_expected_index.has_value());
  CHECK(*skew.unbiased_expected_index == doctest::Approx(0.5).epsilon(1e-14));
  REQUIRE(skew.value_unbiased.has_value());
  CHECK(*skew.value_unbiased == doctest::Approx(0.0).epsilon(1e-14));

  const CoefficientEstimate anti = scott_pi(make_table(2, {0, 2, 0, 0}));
  CHECK(anti.observed_index == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(anti.expected_index == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(anti.value == doctest::Approx(-1.0).epsilon(1e-14));
}

TEST_CASE("krippendorff_alpha on the worked examples") {
  CHECK(krippendorff_alpha(make_table(2, {1, 0, 0, 1})).value ==
        doctest::Approx(1.0).epsilon(1e-14));
  CHECK(krippendorff_alpha(make_table(2, {0, 2, 0, 0})).value ==
        doctest::Approx(-0.5).epsilon(1e-14));
  CHECK(krippendorff_alpha(make_table(2, {1, 1, 0, 0})).value ==
        doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("krippendorff_alpha equals the coincidence-matrix oracle") {
  // Frozen example first: pooled values {1,1,2,2} give 1 - 1/(2/3) = -0.5.
  CHECK(krippendorff_alpha_oracle(make_table(2, {0, 2, 0, 0})) ==
        doctest::Approx(-0.5).epsilon(1e-14));

  SplitMix64 gen(555);
  int checked = 0;
  for (int rep = 0; rep < 300; ++rep) {
    const int K = 2 + static_cast<int>(gen.next_u64() % 3);
    const std::int64_t n = 2 + static_cast<std::int64_t>(gen.next_u64() % 40);
    const ContingencyTable t = random_table(K, n, gen);
    CoefficientEstimate alpha;
    try {
      alpha = krippendorff_alpha(t);
    } catch (const UndefinedCoefficientError&) {
      continue;
    }
    CHECK(alpha.value == doctest::Approx(krippendorff_alpha_oracle(t)).epsilon(1e-10));
    // The estimate record keeps the kappa-form identity intact.
    CHECK(alpha.value ==
          doctest::Approx((alpha.observed_index - alpha.expected_index) /
                          (1.0 - alpha.expected_index))
              .epsilon(1e-10));
    ++checked;
  }
  CHECK(checked > 250);
}

TEST_CASE("fleiss_kappa on the worked examples") {
  const CoefficientEstimate unanimous =
      fleiss_kappa(MultiRaterTable(2, 3, {3, 0, 0, 3}));
  CHECK(unanimous.observed_index == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(unanimous.expected_index == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(unanimous.value == doctest::Approx(1.0).epsilon(1e-14));

  const CoefficientEstimate two = fleiss_kappa(MultiRaterTable(2, 2, {1, 1, 2, 0}));
  CHECK(two.observed_index == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(two.expected_index == doctest::Approx(0.625).epsilon(1e-14));
  CHECK(two.value == doctest::Approx(-1.0 / 3.0).epsilon(1e-13));

  const CoefficientEstimate three =
      fleiss_kappa(MultiRaterTable(2, 2, {2, 0, 0, 2, 2, 0}));
  CHECK(three.observed_index == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(three.expected_index == doctest::Approx(5.0 / 9.0).epsilon(1e-14));
  CHECK(three.value == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("fleiss_kappa reduces to scott_pi on two-rater data, exhaustively") {
  for (int K : {2, 3}) {
    for (std::int64_t n : {2, 3, 4}) {
      for_each_count_table(K, n, [&](const ContingencyTable& t) {
        CoefficientEstimate scott;
        try {
          scott = scott_pi(t);
        } catch (const UndefinedCoefficientError&) {
          CHECK_THROWS_AS(fleiss_kappa(MultiRaterTable::from_contingency(t)),
                          UndefinedCoefficientError);
          return;
        }
        const CoefficientEstimate fleiss = fleiss_kappa(MultiRaterTable::from_contingency(t));
        CHECK(std::abs(fleiss.value - scott.value) <= 1e-12);
        CHECK(std::abs(fleiss.observed_index - scott.observed_index) <= 1e-12);
        CHECK(std::abs(fleiss.expected_index - scott.expected_index) <= 1e-12);
      });
    }
  }
}

TEST_CASE("unbiased_expected_index argument checks") {
  const ContingencyTable t = make_table(2, {1, 0, 0, 0});
  CHECK_THROWS_AS(unbiased_expected_index(Family::Cohen, t), InvalidArgument);
  const ContingencyTable ok = make_table(2, {4, 1, 2, 3});
  CHECK_THROWS_AS(unbiased_expected_index(Family::Fleiss, ok), InvalidArgument);
  CHECK(unbiased_expected_index(Family::Cohen, make_table(2, {1, 0, 0, 1})) ==
        doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("to_unbiased closed forms on the worked examples") {
  CHECK(to_unbiased(Family::Cohen, 1.0, 37) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(to_unbiased(Family::Cohen, 0.4, 10) == doctest::Approx(4.0 / 9.4).epsilon(1e-14));
  CHECK(to_unbiased(Family::Scott, -1.0 / 3.0, 2) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(to_unbiased(Family::Fleiss, 0.5, 10, 3) ==
        doctest::Approx(15.5 / 29.0).epsilon(1e-14));
}

TEST_CASE("route equality: transform matches the unbiased-index route exhaustively") {
  for (int K : {2, 3}) {
    for (std::int64_t n : {2, 3, 4, 5, 6}) {
      for_each_count_table(K, n, [&](const ContingencyTable& t) {
        for (const Family family : {Family::Cohen, Family::Scott}) {
          CoefficientEstimate est;
          try {
            est = family == Family::Cohen ? cohen_kappa(t) : scott_pi(t);
          } catch (const UndefinedCoefficientError&) {
            return;
          }
          if (!est.value_unbiased) {
            // The index route is undefined exactly when the transform is.
            CHECK_THROWS_AS(to_unbiased(family, est.value, t.n()), TransformDomainError);
            continue;
          }
          const double via_transform = to_unbiased(family, est.value, t.n());
          CHECK(std::abs(via_transform - *est.value_unbiased) <= 1e-12);
        }
      });
    }
  }
}

TEST_CASE("route equality holds on 1000 random larger tables") {
  SplitMix64 gen(20240810);
  int checked = 0;
  while (checked < 1000) {
    const int K = 2 + static_cast<int>(gen.next_u64() % 4);
    const std::int64_t n = 7 + static_cast<std::int64_t>(gen.next_u64() % 194);
    const ContingencyTable t = random_table(K, n, gen);
    CoefficientEstimate cohen, scott;
    try {
      cohen = cohen_kappa(t);
      scott = scott_pi(t);
    } catch (const UndefinedCoefficientError&) {
      continue;
    }
    if (!cohen.value_unbiased || !scott.value_unbiased) continue;
    CHECK(std::abs(to_unbiased(Family::Cohen, cohen.value, t.n()) - *cohen.value_unbiased) <=
          1e-12);
    CHECK(std::abs(to_unbiased(Family::Scott, scott.value, t.n()) - *scott.value_unbiased) <=
          1e-12);
    ++checked;
  }
}

TEST_CASE("fixed points of the transformation family") {
  for (const Family family : {Family::Cohen, Family::Scott, Family::Krippendorff,
                              Family::Hubert, Family::Fleiss, Family::Fleiss2,
                              Family::Krippendorff2}) {
    for (std::int64_t n : {2, 10, 100}) {
      CHECK(to_unbiased(family, 1.0, n, 3) == doctest::Approx(1.0).epsilon(1e-13));
    }
  }
  for (std::int64_t n : {2, 10, 100}) {
    CHECK(to_unbiased(Family::Cohen, 0.0, n) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(to_unbiased(Family::Hubert, 0.0, n) == doctest::Approx(0.0).epsilon(1e-15));
  }
}

TEST_CASE("ordering: Cohen's correction is nonnegative on [0, 1]") {
  for (std::int64_t n : {2, 10, 50}) {
    for (double kappa = 0.0; kappa <= 1.0; kappa += 0.01) {
      const double diff = to_unbiased(Family::Cohen, kappa, n) - kappa;
      CHECK(diff >= -1e-15);
      const double expected = kappa * (1.0 - kappa) / (static_cast<double>(n) - 1.0 + kappa);
      CHECK(diff == doctest::Approx(expected).epsilon(1e-10));
    }
  }
}

TEST_CASE("monotonicity: printed derivatives are positive on the domain") {
  for (const Family family : {Family::Cohen, Family::Scott, Family::Krippendorff,
                              Family::Hubert, Family::Fleiss, Family::Fleiss2,
                              Family::Krippendorff2}) {
    for (std::int64_t n : {2, 10, 100}) {
      for (double kappa : {-0.9, -0.2, 0.0, 0.3, 0.7, 0.99}) {
        if (kappa <= transform_domain_lower_bound(family, n, 3)) continue;
        CHECK(transform_derivative(family, kappa, n, 3) > 0.0);
      }
    }
  }
}

TEST_CASE("transform_derivative matches the printed expressions") {
  CHECK(transform_derivative(Family::Cohen, 1.0, 10) == doctest::Approx(0.9).epsilon(1e-15));
  CHECK(transform_derivative(Family::Scott, 1.0, 10) == doctest::Approx(0.9).epsilon(1e-15));
  // Fleiss with R = 2 collapses onto Scott for every (kappa, n).
  for (std::int64_t n : {2, 10, 100}) {
    for (double kappa : {-0.2, 0.0, 0.3, 0.7, 0.99}) {
      CHECK(transform_derivative(Family::Fleiss, kappa, n, 2) ==
            doctest::Approx(transform_derivative(Family::Scott, kappa, n)).epsilon(1e-15));
    }
  }
}

TEST_CASE("transform_derivative matches finite differences of to_unbiased") {
  for (const Family family : {Family::Cohen, Family::Scott, Family::Krippendorff,
                              Family::Hubert, Family::Fleiss, Family::Fleiss2,
                              Family::Krippendorff2}) {
    for (std::int64_t n : {2, 10, 100}) {
      for (double kappa : {-0.2, 0.0, 0.3, 0.7, 0.99}) {
        const int R = 3;
        const double analytic = transform_derivative(family, kappa, n, R);
        const double numeric = central_difference(
            [&](double k) { return to_unbiased(family, k, n, R); }, kappa);
        CHECK(std::abs(analytic - numeric) / analytic <= 1e-6);
      }
    }
  }
}

TEST_CASE("crossover_kappa closed forms and unit slope") {
  CHECK(crossover_kappa(Family::Cohen, 10) ==
        doctest::Approx(std::sqrt(90.0) - 9.0).epsilon(1e-15));
  CHECK(crossover_kappa(Family::Scott, 10) ==
        doctest::Approx(2.0 * std::sqrt(90.0) - 19.0).epsilon(1e-12));
  CHECK(crossover_kappa(Family::Fleiss, 10, 2) ==
        doctest::Approx(crossover_kappa(Family::Scott, 10)).epsilon(1e-12));
  for (const Family family : {Family::Cohen, Family::Scott, Family::Krippendorff,
                              Family::Hubert, Family::Fleiss, Family::Fleiss2,
                              Family::Krippendorff2}) {
    for (std::int64_t n : {2, 10, 100}) {
      const double cross = crossover_kappa(family, n, 3);
      CHECK(transform_derivative(family, cross, n, 3) == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("transformation domain errors carry diagnostics") {
  CHECK_THROWS_AS(to_unbiased(Family::Cohen, -1.0, 2), TransformDomainError);
  CHECK_THROWS_AS(transform_derivative(Family::Scott, -3.0, 2), TransformDomainError);
  CHECK_THROWS_AS(to_unbiased(Family::Cohen, 0.4, 1), InvalidArgument);
}
