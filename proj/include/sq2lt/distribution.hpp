#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "sq2lt/errors.hpp"
#include "sq2lt/rng.hpp"

namespace sq2lt {

enum class DistFamily { hyperexponential, exponential, weibull, deterministic };

inline const char* family_name(DistFamily f) {
  switch (f) {
    case DistFamily::hyperexponential: return "hyperexponential";
    case DistFamily::exponential: return "exponential";
    case DistFamily::weibull: return "weibull";
    case DistFamily::deterministic: return "deterministic";
  }
  return "?";
}

// Service-requirement distribution (bytes). Four parametric families, each
// with unit-safe closed-form raw moments p = 1..3, the survival function
// P(sigma > x), and inverse-transform sampling.
//
// Every admissible family here has a finite exponential moment E[e^{t sigma}]
// for some t > 0: hyperexponential/exponential for t below the smallest rate,
// deterministic trivially, and Weibull once shape >= 1 (lighter-than- or
// equal-to-exponential tail). Weibull shapes below 1 are heavy-tailed, break
// that condition, and are rejected at construction.
class ServiceDistribution {
 public:
  static ServiceDistribution exponential(double rate) {
    require(rate > 0 && std::isfinite(rate), errc::non_positive_parameter,
            "exponential rate must be positive");
    ServiceDistribution d(DistFamily::exponential);
    d.rates_ = {rate};
    return d;
  }

  static ServiceDistribution deterministic(double value) {
    require(value > 0 && std::isfinite(value), errc::non_positive_parameter,
            "deterministic value must be positive");
    ServiceDistribution d(DistFamily::deterministic);
    d.scale_ = value;
    return d;
  }

  static ServiceDistribution weibull(double shape, double scale) {
    require(shape > 0 && std::isfinite(shape), errc::non_positive_parameter,
            "weibull shape must be positive");
    require(scale > 0 && std::isfinite(scale), errc::non_positive_parameter,
            "weibull scale must be positive");
    require(shape >= 1.0, errc::parameter_out_of_range,
            "weibull shape < 1 has no finite exponential moment");
    ServiceDistribution d(DistFamily::weibull);
    d.shape_ = shape;
    d.scale_ = scale;
    return d;
  }

  static ServiceDistribution hyperexponential(std::vector<double> weights,
                                              std::vector<double> rates) {
    require(!weights.empty() && weights.size() == rates.size(), errc::non_positive_parameter,
            "hyperexponential needs matching non-empty weights and rates");
    double sum = 0.0;
    for (double w : weights) {
      require(w >= 0 && std::isfinite(w), errc::non_positive_parameter,
              "hyperexponential weights must be nonnegative");
      sum += w;
    }
    require(std::abs(sum - 1.0) <= 1e-12, errc::weights_not_normalized,
            "hyperexponential weights must sum to 1");
    for (double r : rates) {
      require(r > 0 && std::isfinite(r), errc::non_positive_parameter,
              "hyperexponential rates must be positive");
    }
    ServiceDistribution d(DistFamily::hyperexponential);
    d.weights_ = std::move(weights);
    d.rates_ = std::move(rates);
    return d;
  }

  DistFamily family() const { return family_; }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<double>& rates() const { return rates_; }
  double shape() const { return shape_; }
  double scale() const { return scale_; }

  double mean() const { return moment(1); }

  /// Exact p-th raw moment, p in {1, 2, 3}.
  double moment(int p) const {
    require(p >= 1 && p <= 3, errc::unsupported_moment,
            "moments available in closed form only for p = 1..3");
    switch (family_) {
      case DistFamily::exponential:
        return factorial(p) / std::pow(rates_[0], p);
      case DistFamily::hyperexponential: {
        double m = 0.0;
        for (std::size_t i = 0; i < weights_.size(); ++i) {
          m += weights_[i] * factorial(p) / std::pow(rates_[i], p);
        }
        return m;
      }
      case DistFamily::weibull:
        return std::pow(scale_, p) * std::tgamma(1.0 + static_cast<double>(p) / shape_);
      case DistFamily::deterministic:
        return std::pow(scale_, p);
    }
    return 0.0;
  }

  double cv() const {
    const double m1 = moment(1);
    const double var = moment(2) - m1 * m1;
    return var > 0 ? std::sqrt(var) / m1 : 0.0;
  }

  /// P(sigma > x); 1 for x < 0. The deterministic atom uses the
  /// right-continuous CDF convention: survival(value) = 0, survival(value-) = 1.
  double survival(double x) const {
    if (x < 0) return 1.0;
    switch (family_) {
      case DistFamily::exponential:
        return std::exp(-rates_[0] * x);
      case DistFamily::hyperexponential: {
        double s = 0.0;
        for (std::size_t i = 0; i < weights_.size(); ++i) {
          s += weights_[i] * std::exp(-rates_[i] * x);
        }
        return s;
      }
      case DistFamily::weibull:
        return std::exp(-std::pow(x / scale_, shape_));
      case DistFamily::deterministic:
        return x < scale_ ? 1.0 : 0.0;
    }
    return 0.0;
  }

  double sample(RngStream& rng) const {
    switch (family_) {
      case DistFamily::exponential:
        return exponential_variate(rng, rates_[0]);
      case DistFamily::hyperexponential: {
        const double u = rng.u01();
        double acc = 0.0;
        std::size_t branch = weights_.size() - 1;
        for (std::size_t i = 0; i < weights_.size(); ++i) {
          acc += weights_[i];
          if (u < acc) {
            branch = i;
            break;
          }
        }
        return exponential_variate(rng, rates_[branch]);
      }
      case DistFamily::weibull:
        return scale_ * std::pow(-std::log(rng.open01()), 1.0 / shape_);
      case DistFamily::deterministic:
        return scale_;
    }
    return 0.0;
  }

  // Smallest x with survival(x) < eps; the quadrature routines truncate their
  // infinite limits there.
  double support_upper_bound(double eps) const {
    if (family_ == DistFamily::deterministic) return scale_;
    double hi = std::max(moment(1), 1e-300);
    int guard = 0;
    while (survival(hi) >= eps) {
      hi *= 2.0;
      if (++guard > 2000) fail(errc::internal_check_failed, "survival does not decay");
    }
    double lo = 0.0;
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      if (survival(mid) < eps) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    return hi;
  }

  // Locations where survival jumps (deterministic atom); quadrature callers
  // turn these into explicit breakpoints.
  std::vector<double> survival_jumps() const {
    if (family_ == DistFamily::deterministic) return {scale_};
    return {};
  }

  std::string describe() const {
    switch (family_) {
      case DistFamily::exponential:
        return "exponential(rate=" + std::to_string(rates_[0]) + ")";
      case DistFamily::hyperexponential: {
        std::string s = "hyperexponential(";
        for (std::size_t i = 0; i < weights_.size(); ++i) {
          if (i) s += ", ";
          s += std::to_string(weights_[i]) + "*Exp(" + std::to_string(rates_[i]) + ")";
        }
        return s + ")";
      }
      case DistFamily::weibull:
        return "weibull(shape=" + std::to_string(shape_) + ", scale=" + std::to_string(scale_) +
               ")";
      case DistFamily::deterministic:
        return "deterministic(" + std::to_string(scale_) + ")";
    }
    return "?";
  }

  bool operator==(const ServiceDistribution& o) const {
    return family_ == o.family_ && weights_ == o.weights_ && rates_ == o.rates_ &&
           shape_ == o.shape_ && scale_ == o.scale_;
  }

 private:
  explicit ServiceDistribution(DistFamily f) : family_(f) {}
  static double factorial(int p) { return p == 1 ? 1.0 : (p == 2 ? 2.0 : 6.0); }

  DistFamily family_;
  std::vector<double> weights_;
  std::vector<double> rates_;
  double shape_ = 0.0;
  double scale_ = 0.0;
};

}  // namespace sq2lt
