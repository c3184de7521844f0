#include <doctest.h>

#include <cmath>
#include <map>

#include "concord/coefficients.hpp"
#include "concord/model.hpp"
#include "concord/numerics.hpp"
#include "oracle_helpers.hpp"

using namespace concord;

TEST_CASE("build_scenario: independence and perfect agreement") {
  const MultinomialModel indep = build_scenario(2, 0.0);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) CHECK(indep.p(i, j) == doctest::Approx(0.25).epsilon(1e-15));

  const MultinomialModel perfect = build_scenario(2, 1.0);
  CHECK(perfect.p(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(perfect.p(0, 1) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(perfect.p(1, 0) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(perfect.p(1, 1) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("build_scenario: kappa 0.4 uniform gives the 0.35/0.15 table") {
  const MultinomialModel m = build_scenario(2, 0.4);
  CHECK(m.p(0, 0) == doctest::Approx(0.35).epsilon(1e-15));
  CHECK(m.p(0, 1) == doctest::Approx(0.15).epsilon(1e-15));
  const PopulationSummaries pop = population_summaries(m);
  CHECK(pop.observed_index == doctest::Approx(0.7).epsilon(1e-14));
  CHECK(pop.expected_index == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(pop.kappa == doctest::Approx(0.4).epsilon(1e-13));
}

TEST_CASE("population kappa hits the target for the scenario grid") {
  for (int K : {2, 3, 5}) {
    for (double kappa : {0.0, 0.4, 0.8, 1.0}) {
      const MultinomialModel m = build_scenario(K, kappa);
      CHECK(std::abs(population_summaries(m).kappa - kappa) <= 1e-12);
    }
  }
}

TEST_CASE("build_scenario rejects bad inputs") {
  CHECK_THROWS_AS(build_scenario(1, 0.4), InvalidArgument);
  // Negative kappa with skewed marginals drives the rare category's diagonal
  // cell negative.
  CHECK_THROWS_AS(build_scenario(2, -0.5, std::vector<double>{0.9, 0.1}), InvalidArgument);
  CHECK_THROWS_AS(build_scenario(2, 0.4, std::vector<double>{0.9, 0.2}), InvalidArgument);
}

TEST_CASE("population_summaries: degenerate population is an error") {
  std::vector<double> p = {1.0, 0.0, 0.0, 0.0};
  const MultinomialModel m(2, p);
  CHECK_THROWS_AS(population_summaries(m), UndefinedCoefficientError);
}

TEST_CASE("sample_table: support and degenerate distribution") {
  const MultinomialModel degenerate(2, {1.0, 0.0, 0.0, 0.0});
  const ContingencyTable t = sample_table(degenerate, 7, SampleStream{5, 0});
  CHECK(t.x(0, 0) == 7);
  CHECK(t.n() == 7);

  const MultinomialModel m = build_scenario(2, 0.4);
  const ContingencyTable one = sample_table(m, 1, SampleStream{5, 1});
  CHECK(one.n() == 1);
  int nonzero = 0;
  for (std::int64_t c : one.counts()) nonzero += c == 1 ? 1 : 0;
  CHECK(nonzero == 1);

  CHECK_THROWS_AS(sample_table(m, 0, SampleStream{5, 2}), InvalidArgument);
}

TEST_CASE("sample_table: reproducible and stream-sensitive") {
  const MultinomialModel m = build_scenario(3, 0.4);
  const ContingencyTable a = sample_table(m, 500, SampleStream{99, 3});
  const ContingencyTable b = sample_table(m, 500, SampleStream{99, 3});
  const ContingencyTable c = sample_table(m, 500, SampleStream{99, 4});
  CHECK(a.counts() == b.counts());
  CHECK(a.counts() != c.counts());
}

TEST_CASE("sample_table: law of large numbers at n = 1e6") {
  const MultinomialModel m = build_scenario(2, 0.4);
  const std::int64_t n = 1000000;
  const ContingencyTable t = sample_table(m, n, SampleStream{2024, 0});
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const double freq = static_cast<double>(t.x(i, j)) / static_cast<double>(n);
      CHECK(std::abs(freq - m.p(i, j)) < 0.005);
    }
  }
}

TEST_CASE("sample_table: 1e5 draws within 5 binomial standard errors") {
  const MultinomialModel m = build_scenario(3, 0.8);
  const std::int64_t n = 100000;
  const ContingencyTable t = sample_table(m, n, SampleStream{77, 1});
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const double p = m.p(i, j);
      const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(n));
      const double freq = static_cast<double>(t.x(i, j)) / static_cast<double>(n);
      CHECK(std::abs(freq - p) <= 5.0 * se);
    }
  }
}

TEST_CASE("enumerate_tables: counts and exact probabilities") {
  const MultinomialModel m = build_scenario(2, 0.4);
  const auto one = enumerate_tables(m, 1);
  REQUIRE(one.size() == 4);
  for (const auto& [table, prob] : one) {
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        if (table.x(i, j) == 1) CHECK(prob == doctest::Approx(m.p(i, j)).epsilon(1e-14));
      }
    }
  }

  const auto two = enumerate_tables(m, 2);
  CHECK(two.size() == 10);  // C(5, 3) weak compositions of 2 into 4 parts
  CompensatedSum mass;
  for (const auto& [table, prob] : two) mass.add(prob);
  CHECK(std::abs(mass.value() - 1.0) <= 1e-12);
}

TEST_CASE("enumerate_tables: probability mass sums to 1 on the small grid") {
  SplitMix64 gen(314159);
  for (int K : {2, 3}) {
    for (std::int64_t n : {1, 2, 3, 4}) {
      const MultinomialModel m = concord::testing::random_model(K, gen);
      CompensatedSum mass;
      std::uint64_t outcomes = 0;
      for_each_table(m, n, [&](const ContingencyTable&, double prob) {
        mass.add(prob);
        ++outcomes;
      });
      CHECK(outcomes == table_outcome_count(K, n, kDefaultEnumerationCap));
      CHECK(std::abs(mass.value() - 1.0) <= 1e-10);
    }
  }
}

TEST_CASE("enumerate_tables: unbiasedness of the Cohen index at n = 3") {
  const MultinomialModel m = build_scenario(2, 0.4);
  CompensatedSum expectation;
  for_each_table(m, 3, [&](const ContingencyTable& t, double prob) {
    expectation.add(prob * unbiased_expected_index(Family::Cohen, t));
  });
  CHECK(std::abs(expectation.value() - 0.5) <= 1e-12);
}

TEST_CASE("enumerate_tables: cap errors out with guidance") {
  const MultinomialModel m = build_scenario(3, 0.4);
  CHECK_THROWS_AS(enumerate_tables(m, 100, 1000), EnumerationCapError);
}
