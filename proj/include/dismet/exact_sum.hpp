#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace dismet {

/// Exact floating-point accumulator (Shewchuk partials, same scheme as
/// Python's math.fsum). The returned sum is the correctly rounded value of
/// the exact real sum, so it does not depend on the order in which terms
/// were added. That property is what makes the estimators invariant under
/// permutations of the input rows.
class ExactSum {
 public:
  void add(double x) {
    std::size_t used = 0;
    for (std::size_t j = 0; j < partials_.size(); ++j) {
      double y = partials_[j];
      if (std::fabs(x) < std::fabs(y)) std::swap(x, y);
      double hi = x + y;
      double lo = y - (hi - x);
      if (lo != 0.0) partials_[used++] = lo;
      x = hi;
    }
    partials_.resize(used);
    partials_.push_back(x);
  }

  void add_scaled(double x, double scale) { add(x * scale); }

  /// Correctly rounded sum of everything added so far.
  double value() const {
    std::size_t n = partials_.size();
    if (n == 0) return 0.0;
    double hi = partials_[--n];
    double lo = 0.0;
    while (n > 0) {
      double x = hi;
      double y = partials_[--n];
      hi = x + y;
      double yr = hi - x;
      lo = y - yr;
      if (lo != 0.0) break;
    }
    // Round-half-even correction: if the residual and the next partial pull
    // in the same direction, the plain sum may be off by one ulp.
    if (n > 0 && ((lo < 0.0 && partials_[n - 1] < 0.0) ||
                  (lo > 0.0 && partials_[n - 1] > 0.0))) {
      double y = lo * 2.0;
      double x = hi + y;
      double yr = x - hi;
      if (y == yr) hi = x;
    }
    return hi;
  }

  void reset() { partials_.clear(); }

 private:
  std::vector<double> partials_;
};

/// Order-independent sum of a contiguous range.
inline double exact_sum(const double* data, std::size_t n) {
  ExactSum acc;
  for (std::size_t i = 0; i < n; ++i) acc.add(data[i]);
  return acc.value();
}

inline double exact_sum(const std::vector<double>& v) {
  return exact_sum(v.data(), v.size());
}

}  // namespace dismet
