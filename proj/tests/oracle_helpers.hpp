#pragma once

// Test-only oracles and generators. These stay independent of the library
// code paths they check: the Krippendorff oracle works on the pooled
// coincidence matrix, not the affine relation the library uses.

#include <cmath>
#include <cstdint>
#include <vector>

#include "concord/model.hpp"
#include "concord/rng.hpp"
#include "concord/table.hpp"

namespace concord::testing {

/// Krippendorff's alpha (nominal metric, two raters) from the coincidence
/// matrix: alpha = 1 - D_o / D_e over the 2n pooled values.
inline double krippendorff_alpha_oracle(const ContingencyTable& table) {
  const int K = table.K();
  const double total = 2.0 * static_cast<double>(table.n());
  // o_ck: each subject with values (i, j) contributes the two ordered pairs.
  std::vector<double> coincidence(static_cast<std::size_t>(K) * K, 0.0);
  for (int i = 0; i < K; ++i) {
    for (int j = 0; j < K; ++j) {
      const double c = static_cast<double>(table.x(i, j));
      coincidence[static_cast<std::size_t>(i) * K + j] += c;
      coincidence[static_cast<std::size_t>(j) * K + i] += c;
    }
  }
  std::vector<double> margins(K, 0.0);
  double observed_disagreement = 0.0;
  for (int c = 0; c < K; ++c) {
    for (int k = 0; k < K; ++k) {
      margins[c] += coincidence[static_cast<std::size_t>(c) * K + k];
      if (c != k) observed_disagreement += coincidence[static_cast<std::size_t>(c) * K + k];
    }
  }
  observed_disagreement /= total;
  double expected_disagreement = 0.0;
  for (int c = 0; c < K; ++c) {
    for (int k = 0; k < K; ++k) {
      if (c != k) expected_disagreement += margins[c] * margins[k];
    }
  }
  expected_disagreement /= total * (total - 1.0);
  return 1.0 - observed_disagreement / expected_disagreement;
}

/// Random probability vector with all cells bounded away from zero.
inline std::vector<double> random_simplex(std::size_t cells, SplitMix64& gen,
                                          double floor = 1e-3) {
  std::vector<double> p(cells);
  double total = 0.0;
  for (double& v : p) {
    v = -std::log(1.0 - gen.next_double()) + floor;
    total += v;
  }
  for (double& v : p) v /= total;
  double mass = 0.0;
  for (double v : p) mass += v;
  p.back() += 1.0 - mass;
  return p;
}

inline MultinomialModel random_model(int K, SplitMix64& gen, double floor = 1e-3) {
  return MultinomialModel(K, random_simplex(static_cast<std::size_t>(K) * K, gen, floor));
}

/// Random table with at least `min_n` subjects, cells drawn multinomially.
inline ContingencyTable random_table(int K, std::int64_t n, SplitMix64& gen) {
  return sample_table(random_model(K, gen), n, gen);
}

/// Population Scott pi of a model (averaged-marginal chance model).
inline double population_scott(const MultinomialModel& m) {
  double io = 0.0, ie = 0.0;
  for (int i = 0; i < m.K(); ++i) {
    io += m.p(i, i);
    const double avg = 0.5 * (m.row_sum(i) + m.col_sum(i));
    ie += avg * avg;
  }
  return (io - ie) / (1.0 - ie);
}

/// Plain central difference of a scalar function of one variable.
template <typename F>
double central_difference(const F& f, double x, double h = 1e-6) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

/// Enumerates all K x K contingency tables with total n via the library's
/// enumerator over a uniform model (probabilities unused by callers).
template <typename Visit>
void for_each_count_table(int K, std::int64_t n, const Visit& visit) {
  const std::size_t cells = static_cast<std::size_t>(K) * K;
  const MultinomialModel uniform(K, std::vector<double>(cells, 1.0 / static_cast<double>(cells)));
  for_each_table(uniform, n,
                 [&](const ContingencyTable& t, double) { visit(t); });
}

}  // namespace concord::testing
