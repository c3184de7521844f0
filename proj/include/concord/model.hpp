#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "concord/rng.hpp"
#include "concord/table.hpp"

namespace concord {

/// Population multinomial model over a K x K rating table: p(i, j) is the
/// probability that a random subject lands in cell (i, j).
class MultinomialModel {
 public:
  MultinomialModel(int K, std::vector<double> cell_probabilities);

  int K() const { return k_; }
  double p(int i, int j) const { return p_[static_cast<std::size_t>(i) * k_ + j]; }
  const std::vector<double>& cells() const { return p_; }
  double row_sum(int i) const { return row_[i]; }
  double col_sum(int j) const { return col_[j]; }

 private:
  int k_;
  std::vector<double> p_;
  std::vector<double> row_;
  std::vector<double> col_;
};

struct PopulationSummaries {
  double observed_index;   // I_o = sum_i p_ii
  double expected_index;   // I_e = sum_i p_i. * p_.i
  double kappa;            // (I_o - I_e) / (1 - I_e)
};

/// One simulation scenario: population size-K model with a target kappa.
struct Scenario {
  int K = 2;
  std::int64_t n = 10;
  double kappa_target = 0.0;
  std::optional<std::vector<double>> marginals;  // defaults to uniform

  void validate() const;
};

/// Builds the mixture model p_ij = kappa * delta_ij * pi_i
/// + (1 - kappa) * pi_i * pi_j whose population Cohen kappa equals
/// kappa_target exactly (row and column marginals are both pi).
MultinomialModel build_scenario(int K, double kappa_target,
                                const std::optional<std::vector<double>>& marginals = {});
MultinomialModel build_scenario(const Scenario& scenario);

PopulationSummaries population_summaries(const MultinomialModel& model);

/// One multinomial draw of n subjects; bit-for-bit reproducible for a given
/// (model, n, stream).
ContingencyTable sample_table(const MultinomialModel& model, std::int64_t n,
                              const SampleStream& stream);

/// Same draw fed from an already-positioned generator (used by the
/// simulation redraw policy, which continues the replicate's own stream).
ContingencyTable sample_table(const MultinomialModel& model, std::int64_t n,
                              SplitMix64& gen);

inline constexpr std::uint64_t kDefaultEnumerationCap = 1000000;

/// Visits every K x K table with total n together with its exact multinomial
/// probability. Errors if the number of outcomes would exceed `cap`.
void for_each_table(const MultinomialModel& model, std::int64_t n,
                    const std::function<void(const ContingencyTable&, double)>& visit,
                    std::uint64_t cap = kDefaultEnumerationCap);

/// Materialized variant of for_each_table.
std::vector<std::pair<ContingencyTable, double>> enumerate_tables(
    const MultinomialModel& model, std::int64_t n,
    std::uint64_t cap = kDefaultEnumerationCap);

/// Number of K*K-cell tables with total n (saturates at cap + 1).
std::uint64_t table_outcome_count(int K, std::int64_t n, std::uint64_t cap);

}  // namespace concord
