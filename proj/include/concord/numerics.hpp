#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace concord {

/// Neumaier-compensated accumulator. Cell sums feeding the agreement
/// indices go through this so that results do not depend on summation
/// order noise.
class CompensatedSum {
 public:
  void add(double x) {
    double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }

  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline double compensated_total(std::span<const double> values) {
  CompensatedSum s;
  for (double v : values) s.add(v);
  return s.value();
}

inline double compensated_mean(std::span<const double> values) {
  return compensated_total(values) / static_cast<double>(values.size());
}

}  // namespace concord
