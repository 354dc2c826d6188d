#pragma once

#include <cmath>
#include <cstdint>

#include <boost/math/distributions/students_t.hpp>

namespace sq2lt {

// Plain (sum, sum of squares) accumulator. Values in this project are O(1)
// and sample counts stay below 1e8, so the naive form is accurate enough and
// keeps shard merging associative-by-construction.
struct RunningStat {
  long long n = 0;
  double sum = 0.0;
  double sum_sq = 0.0;

  void add(double x) {
    ++n;
    sum += x;
    sum_sq += x * x;
  }

  void merge(const RunningStat& o) {
    n += o.n;
    sum += o.sum;
    sum_sq += o.sum_sq;
  }

  double mean() const { return n > 0 ? sum / static_cast<double>(n) : 0.0; }

  double sample_variance() const {
    if (n < 2) return 0.0;
    const double m = mean();
    double v = (sum_sq - static_cast<double>(n) * m * m) / static_cast<double>(n - 1);
    return v > 0.0 ? v : 0.0;
  }

  double std_error() const {
    return n > 0 ? std::sqrt(sample_variance() / static_cast<double>(n)) : 0.0;
  }
};

struct McEstimate {
  double mean = 0.0;
  double half_width_95 = 0.0;
  long long samples = 0;

  static McEstimate from(const RunningStat& s) {
    McEstimate e;
    e.mean = s.mean();
    e.half_width_95 = 1.959963984540054 * s.std_error();
    e.samples = s.n;
    return e;
  }
};

// Two-sided 95% Student-t quantile for df >= 1.
inline double student_t_975(int df) {
  boost::math::students_t_distribution<double> dist(static_cast<double>(df));
  return boost::math::quantile(dist, 0.975);
}

}  // namespace sq2lt
