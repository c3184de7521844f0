#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "concord/errors.hpp"

namespace concord {

/// K x K table of observed counts for two raters; x(i, j) is the number of
/// subjects the first rater put in category i and the second in category j.
class ContingencyTable {
 public:
  ContingencyTable(int K, std::vector<std::int64_t> counts);

  int K() const { return k_; }
  std::int64_t n() const { return n_; }
  std::int64_t x(int i, int j) const { return counts_[static_cast<std::size_t>(i) * k_ + j]; }
  const std::vector<std::int64_t>& counts() const { return counts_; }

  std::int64_t row_total(int i) const { return row_[i]; }
  std::int64_t col_total(int j) const { return col_[j]; }
  std::int64_t diagonal_total() const;

  /// Flattened sample proportions x/n, row-major.
  std::vector<double> proportions() const;

  std::string describe() const;

 private:
  int k_;
  std::int64_t n_;
  std::vector<std::int64_t> counts_;
  std::vector<std::int64_t> row_;
  std::vector<std::int64_t> col_;
};

/// Per-subject category counts for R raters: row i gives how many of the
/// R raters placed subject i in each of the K categories.
class MultiRaterTable {
 public:
  MultiRaterTable(int K, int R, std::vector<std::int64_t> counts);

  int K() const { return k_; }
  int R() const { return r_; }
  std::int64_t n() const { return n_; }
  std::int64_t count(std::int64_t subject, int category) const {
    return counts_[static_cast<std::size_t>(subject) * k_ + category];
  }

  /// Two-rater view of a contingency table: subject in cell (i, j) becomes a
  /// row with one rating in i and one in j (two in i when i == j).
  static MultiRaterTable from_contingency(const ContingencyTable& table);

 private:
  int k_;
  int r_;
  std::int64_t n_;
  std::vector<std::int64_t> counts_;
};

}  // namespace concord
