#include "concord/model.hpp"

#include <cmath>
#include <string>

#include "concord/numerics.hpp"

namespace concord {

namespace {
constexpr double kMassTolerance = 1e-12;
}

MultinomialModel::MultinomialModel(int K, std::vector<double> cell_probabilities)
    : k_(K), p_(std::move(cell_probabilities)) {
  if (k_ < 2) throw InvalidArgument("model needs K >= 2");
  if (p_.size() != static_cast<std::size_t>(k_) * k_) {
    throw InvalidArgument("model needs K*K cell probabilities");
  }
  CompensatedSum mass;
  for (double v : p_) {
    if (v < 0.0 || !std::isfinite(v)) {
      throw InvalidArgument("cell probabilities must be finite and nonnegative");
    }
    mass.add(v);
  }
  if (std::abs(mass.value() - 1.0) > kMassTolerance) {
    throw InvalidArgument("cell probabilities must sum to 1 (got " +
                          std::to_string(mass.value()) + ")");
  }
  row_.assign(k_, 0.0);
  col_.assign(k_, 0.0);
  for (int i = 0; i < k_; ++i) {
    CompensatedSum r;
    for (int j = 0; j < k_; ++j) r.add(p(i, j));
    row_[i] = r.value();
  }
  for (int j = 0; j < k_; ++j) {
    CompensatedSum c;
    for (int i = 0; i < k_; ++i) c.add(p(i, j));
    col_[j] = c.value();
  }
}

void Scenario::validate() const {
  if (K < 2) throw InvalidArgument("scenario needs K >= 2");
  if (n < 2) throw InvalidArgument("scenario needs n >= 2");
  if (!(kappa_target > -1.0 && kappa_target <= 1.0)) {
    throw InvalidArgument("scenario kappa must lie in (-1, 1]");
  }
  if (marginals) {
    if (static_cast<int>(marginals->size()) != K) {
      throw InvalidArgument("scenario marginals must have K entries");
    }
    CompensatedSum mass;
    for (double m : *marginals) {
      if (!(m > 0.0)) throw InvalidArgument("scenario marginals must be positive");
      mass.add(m);
    }
    if (std::abs(mass.value() - 1.0) > kMassTolerance) {
      throw InvalidArgument("scenario marginals must sum to 1");
    }
  }
}

MultinomialModel build_scenario(int K, double kappa_target,
                                const std::optional<std::vector<double>>& marginals) {
  if (K < 2) throw InvalidArgument("build_scenario needs K >= 2");
  std::vector<double> pi;
  if (marginals) {
    pi = *marginals;
    if (static_cast<int>(pi.size()) != K) {
      throw InvalidArgument("marginals must have K entries");
    }
    CompensatedSum mass;
    for (double m : pi) {
      if (!(m > 0.0)) throw InvalidArgument("marginals must be positive");
      mass.add(m);
    }
    if (std::abs(mass.value() - 1.0) > kMassTolerance) {
      throw InvalidArgument("marginals must sum to 1");
    }
  } else {
    pi.assign(K, 1.0 / K);
  }
  std::vector<double> p(static_cast<std::size_t>(K) * K);
  for (int i = 0; i < K; ++i) {
    for (int j = 0; j < K; ++j) {
      double v = (1.0 - kappa_target) * pi[i] * pi[j];
      if (i == j) v += kappa_target * pi[i];
      if (v < 0.0) {
        throw InvalidArgument(
            "kappa target " + std::to_string(kappa_target) +
            " yields a negative cell probability with these marginals");
      }
      p[static_cast<std::size_t>(i) * K + j] = v;
    }
  }
  return MultinomialModel(K, std::move(p));
}

MultinomialModel build_scenario(const Scenario& scenario) {
  scenario.validate();
  return build_scenario(scenario.K, scenario.kappa_target, scenario.marginals);
}

PopulationSummaries population_summaries(const MultinomialModel& model) {
  const int K = model.K();
  CompensatedSum io;
  CompensatedSum ie;
  for (int i = 0; i < K; ++i) {
    io.add(model.p(i, i));
    ie.add(model.row_sum(i) * model.col_sum(i));
  }
  const double I_o = io.value();
  const double I_e = ie.value();
  if (!(1.0 - I_e > 0.0)) {
    throw UndefinedCoefficientError("kappa undefined: population expected index is 1",
                                    K, {});
  }
  return PopulationSummaries{I_o, I_e, (I_o - I_e) / (1.0 - I_e)};
}

ContingencyTable sample_table(const MultinomialModel& model, std::int64_t n,
                              SplitMix64& gen) {
  if (n < 1) throw InvalidArgument("sample_table needs n >= 1");
  const int K = model.K();
  const std::size_t cells = static_cast<std::size_t>(K) * K;
  std::vector<std::int64_t> counts(cells, 0);
  const std::vector<double>& p = model.cells();
  for (std::int64_t s = 0; s < n; ++s) {
    const double u = gen.next_double();
    double acc = 0.0;
    std::size_t chosen = cells;  // falls back to the last positive cell
    for (std::size_t c = 0; c < cells; ++c) {
      acc += p[c];
      if (u < acc) {
        chosen = c;
        break;
      }
    }
    if (chosen == cells) {
      for (std::size_t c = cells; c-- > 0;) {
        if (p[c] > 0.0) {
          chosen = c;
          break;
        }
      }
    }
    counts[chosen] += 1;
  }
  return ContingencyTable(K, std::move(counts));
}

ContingencyTable sample_table(const MultinomialModel& model, std::int64_t n,
                              const SampleStream& stream) {
  SplitMix64 gen = stream.generator();
  return sample_table(model, n, gen);
}

std::uint64_t table_outcome_count(int K, std::int64_t n, std::uint64_t cap) {
  // C(n + M - 1, M - 1) for M = K*K parts, saturating just past cap.
  const std::uint64_t m = static_cast<std::uint64_t>(K) * static_cast<std::uint64_t>(K);
  long double count = 1.0L;
  for (std::uint64_t i = 1; i < m; ++i) {
    count *= static_cast<long double>(n + i) / static_cast<long double>(i);
    if (count > static_cast<long double>(cap) * 2.0L) return cap + 1;
  }
  std::uint64_t rounded = static_cast<std::uint64_t>(count + 0.5L);
  return rounded > cap ? cap + 1 : rounded;
}

namespace {

// Depth-first walk over weak compositions of n into the K*K cells. The running
// weight is the binomial-chain expansion of the multinomial pmf:
//   n! / prod(x_c!) * prod(p_c^x_c) = prod_c C(remaining_c, x_c) p_c^x_c.
class TableEnumerator {
 public:
  TableEnumerator(const MultinomialModel& model, std::int64_t n,
                  const std::function<void(const ContingencyTable&, double)>& visit)
      : model_(model), n_(n), visit_(visit),
        cells_(static_cast<std::size_t>(model.K()) * model.K()),
        counts_(cells_, 0) {
    // Pascal triangle up to n; exact in double for every n this cap allows.
    binom_.assign(static_cast<std::size_t>(n_ + 1), std::vector<double>());
    for (std::int64_t r = 0; r <= n_; ++r) {
      binom_[r].assign(static_cast<std::size_t>(r + 1), 1.0);
      for (std::int64_t c = 1; c < r; ++c) {
        binom_[r][c] = binom_[r - 1][c - 1] + binom_[r - 1][c];
      }
    }
  }

  void run() { descend(0, n_, 1.0); }

 private:
  void descend(std::size_t cell, std::int64_t remaining, double weight) {
    if (cell + 1 == cells_) {
      counts_[cell] = remaining;
      double w = weight * power(model_.cells()[cell], remaining);
      visit_(ContingencyTable(model_.K(), counts_), w);
      return;
    }
    const double pc = model_.cells()[cell];
    for (std::int64_t x = 0; x <= remaining; ++x) {
      counts_[cell] = x;
      double w = weight * binom_[remaining][x] * power(pc, x);
      descend(cell + 1, remaining - x, w);
    }
    counts_[cell] = 0;
  }

  static double power(double base, std::int64_t e) {
    double out = 1.0;
    for (std::int64_t i = 0; i < e; ++i) out *= base;
    return out;
  }

  const MultinomialModel& model_;
  std::int64_t n_;
  const std::function<void(const ContingencyTable&, double)>& visit_;
  std::size_t cells_;
  std::vector<std::int64_t> counts_;
  std::vector<std::vector<double>> binom_;
};

}  // namespace

void for_each_table(const MultinomialModel& model, std::int64_t n,
                    const std::function<void(const ContingencyTable&, double)>& visit,
                    std::uint64_t cap) {
  if (n < 1) throw InvalidArgument("for_each_table needs n >= 1");
  const std::uint64_t outcomes = table_outcome_count(model.K(), n, cap);
  if (outcomes > cap) {
    throw EnumerationCapError(
        "enumerating K=" + std::to_string(model.K()) + ", n=" + std::to_string(n) +
        " exceeds the outcome cap of " + std::to_string(cap) +
        "; reduce n or K (or raise the cap)");
  }
  TableEnumerator(model, n, visit).run();
}

std::vector<std::pair<ContingencyTable, double>> enumerate_tables(
    const MultinomialModel& model, std::int64_t n, std::uint64_t cap) {
  std::vector<std::pair<ContingencyTable, double>> out;
  for_each_table(model, n,
                 [&out](const ContingencyTable& t, double prob) { out.emplace_back(t, prob); },
                 cap);
  return out;
}

}  // namespace concord
