#include "concord/table.hpp"

#include <numeric>
#include <sstream>

namespace concord {

ContingencyTable::ContingencyTable(int K, std::vector<std::int64_t> counts)
    : k_(K), counts_(std::move(counts)) {
  if (k_ < 2) throw InvalidArgument("contingency table needs K >= 2");
  if (counts_.size() != static_cast<std::size_t>(k_) * k_) {
    throw InvalidArgument("contingency table needs K*K counts");
  }
  n_ = 0;
  for (std::int64_t c : counts_) {
    if (c < 0) throw InvalidArgument("contingency table counts must be nonnegative");
    n_ += c;
  }
  if (n_ < 1) throw InvalidArgument("contingency table must contain at least one subject");
  row_.assign(k_, 0);
  col_.assign(k_, 0);
  for (int i = 0; i < k_; ++i) {
    for (int j = 0; j < k_; ++j) {
      row_[i] += x(i, j);
      col_[j] += x(i, j);
    }
  }
}

std::int64_t ContingencyTable::diagonal_total() const {
  std::int64_t d = 0;
  for (int i = 0; i < k_; ++i) d += x(i, i);
  return d;
}

std::vector<double> ContingencyTable::proportions() const {
  std::vector<double> p(counts_.size());
  const double inv = 1.0 / static_cast<double>(n_);
  for (std::size_t c = 0; c < counts_.size(); ++c) {
    p[c] = static_cast<double>(counts_[c]) * inv;
  }
  return p;
}

std::string ContingencyTable::describe() const {
  std::ostringstream out;
  out << "[";
  for (int i = 0; i < k_; ++i) {
    out << (i ? ";" : "");
    for (int j = 0; j < k_; ++j) out << (j ? "," : "") << x(i, j);
  }
  out << "]";
  return out.str();
}

MultiRaterTable::MultiRaterTable(int K, int R, std::vector<std::int64_t> counts)
    : k_(K), r_(R), counts_(std::move(counts)) {
  if (k_ < 2) throw InvalidArgument("multi-rater table needs K >= 2");
  if (r_ < 2) throw InvalidArgument("multi-rater table needs R >= 2");
  if (counts_.empty() || counts_.size() % static_cast<std::size_t>(k_) != 0) {
    throw InvalidArgument("multi-rater table needs n*K counts");
  }
  n_ = static_cast<std::int64_t>(counts_.size() / static_cast<std::size_t>(k_));
  for (std::int64_t i = 0; i < n_; ++i) {
    std::int64_t row_sum = 0;
    for (int c = 0; c < k_; ++c) {
      std::int64_t v = count(i, c);
      if (v < 0) throw InvalidArgument("multi-rater counts must be nonnegative");
      row_sum += v;
    }
    if (row_sum != r_) {
      throw InvalidArgument("multi-rater row " + std::to_string(i) + " sums to " +
                            std::to_string(row_sum) + ", expected R = " + std::to_string(r_));
    }
  }
}

MultiRaterTable MultiRaterTable::from_contingency(const ContingencyTable& table) {
  const int K = table.K();
  std::vector<std::int64_t> rows;
  rows.reserve(static_cast<std::size_t>(table.n()) * K);
  for (int i = 0; i < K; ++i) {
    for (int j = 0; j < K; ++j) {
      for (std::int64_t s = 0; s < table.x(i, j); ++s) {
        std::vector<std::int64_t> row(K, 0);
        row[i] += 1;
        row[j] += 1;
        rows.insert(rows.end(), row.begin(), row.end());
      }
    }
  }
  return MultiRaterTable(K, 2, std::move(rows));
}

}  // namespace concord
