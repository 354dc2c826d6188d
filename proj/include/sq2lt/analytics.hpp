#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "sq2lt/capacity.hpp"
#include "sq2lt/errors.hpp"

namespace sq2lt {

// Raw moments of X, the uniform random variable over the reciprocal
// capacities {1/C_1, ..., 1/C_K}, plus its variance. All three light-traffic
// derivatives are short polynomials in these.
struct XMoments {
  double m1 = 0.0;
  double m2 = 0.0;
  double m3 = 0.0;
  double var = 0.0;
};

/// Gamma = sum_k 1/C_k.
inline double gamma_sum(const CapacityVector& caps) {
  double g = 0.0;
  for (double r : caps.reciprocals()) g += r;
  return g;
}

inline XMoments x_moments(const CapacityVector& caps) {
  const auto& x = caps.reciprocals();
  const double k = static_cast<double>(x.size());
  XMoments m;
  // Identical atoms: the running sum would round m1 off the atom and leave a
  // tiny spurious variance; the degenerate distribution has exact moments.
  const auto [mn, mx] = std::minmax_element(x.begin(), x.end());
  if (*mn == *mx) {
    const double v = *mn;
    m.m1 = v;
    m.m2 = v * v;
    m.m3 = v * v * v;
    m.var = 0.0;
    return m;
  }
  for (double v : x) {
    m.m1 += v;
    m.m2 += v * v;
    m.m3 += v * v * v;
  }
  m.m1 /= k;
  m.m2 /= k;
  m.m3 /= k;
  // Centered second moment; the raw-moment difference m2 - m1^2 cancels badly
  // when the spread is small.
  double var = 0.0;
  for (double v : x) var += (v - m.m1) * (v - m.m1);
  m.var = var / k;
  return m;
}

namespace detail {

inline double central_third_moment(const CapacityVector& caps, double m1) {
  double acc = 0.0;
  for (double v : caps.reciprocals()) {
    const double d = v - m1;
    acc += d * d * d;
  }
  return acc / static_cast<double>(caps.size());
}

inline void check_forms_agree(double a, double b, double scale, double tol, const char* what) {
  if (std::abs(a - b) > tol * std::max({std::abs(a), std::abs(b), scale})) {
    fail(errc::internal_check_failed,
         std::string(what) + " forms disagree: " + std::to_string(a) + " vs " + std::to_string(b));
  }
}

}  // namespace detail

/// R(0+) = (Gamma/K) E[sigma]: mean service time of a job entering the empty
/// system, the server being uniform over all K under the two-choice rule.
inline double r_zero(const CapacityVector& caps, double mean_sigma) {
  require(mean_sigma > 0 && std::isfinite(mean_sigma), errc::non_positive_parameter,
          "mean_sigma must be positive");
  return x_moments(caps).m1 * mean_sigma;
}

/// First light-traffic derivative,
///   R'(0+) = ((Gamma/K)^2 - (1/K) sum 1/C_k^2) E[sigma]^2 / (K-1)
///          = -Var[X] E[sigma]^2 / (K-1).
/// Nonpositive; zero exactly when all capacities are equal. Evaluated through
/// the centered form, cross-checked against the raw-moment form.
inline double r_prime(const CapacityVector& caps, double mean_sigma) {
  require(mean_sigma > 0 && std::isfinite(mean_sigma), errc::non_positive_parameter,
          "mean_sigma must be positive");
  const std::size_t k = caps.size();
  require(k >= 2, errc::single_server, "first derivative needs K >= 2");
  const XMoments m = x_moments(caps);
  const double e2 = mean_sigma * mean_sigma;
  // var == 0 would negate to -0.0, which serializes as "-0".
  const double centered = m.var == 0.0 ? 0.0 : -m.var * e2 / static_cast<double>(k - 1);
  const double direct = (m.m1 * m.m1 - m.m2) * e2 / static_cast<double>(k - 1);
  detail::check_forms_agree(centered, direct, (m.m1 * m.m1 + m.m2) * e2, 1e-13, "r_prime");
  return centered;
}

/// Second light-traffic derivative,
///   R''(0+) = (2 / (K^2 (K-1)^2)) (Gamma^3/K - 2 Gamma sum 1/C_k^2
///             + K sum 1/C_k^3) E[sigma]^3,
/// equivalently (2/(K-1)^2)(E[X]^3 - 2 E[X]E[X^2] + E[X^3]) E[sigma]^3.
/// Evaluated as (2/(K-1)^2)(E[X] Var[X] + E[(X-E[X])^3]) E[sigma]^3, the same
/// polynomial in centered form; both printed forms are cross-checked.
inline double r_double_prime(const CapacityVector& caps, double mean_sigma) {
  require(mean_sigma > 0 && std::isfinite(mean_sigma), errc::non_positive_parameter,
          "mean_sigma must be positive");
  const std::size_t k = caps.size();
  require(k >= 2, errc::single_server, "second derivative needs K >= 2");
  const double kd = static_cast<double>(k);
  const XMoments m = x_moments(caps);
  const double cm3 = detail::central_third_moment(caps, m.m1);
  const double e3 = mean_sigma * mean_sigma * mean_sigma;
  const double km1 = 2.0 / ((kd - 1.0) * (kd - 1.0));

  const double centered = km1 * (m.m1 * m.var + cm3) * e3;
  const double alternate = km1 * (m.m1 * m.m1 * m.m1 - 2.0 * m.m1 * m.m2 + m.m3) * e3;
  const double gamma = kd * m.m1;
  const double s2 = kd * m.m2;
  const double s3 = kd * m.m3;
  const double direct = 2.0 / (kd * kd * (kd - 1.0) * (kd - 1.0)) *
                        (gamma * gamma * gamma / kd - 2.0 * gamma * s2 + kd * s3) * e3;

  const double scale = km1 * (m.m1 * m.m1 * m.m1 + 2.0 * m.m1 * m.m2 + m.m3) * e3;
  detail::check_forms_agree(centered, alternate, scale, 1e-12, "r_double_prime");
  detail::check_forms_agree(centered, direct, scale, 1e-12, "r_double_prime");
  return centered;
}

// The three derivatives bundled with the quadratic evaluator's inputs.
struct LtDerivatives {
  double r0 = 0.0;
  double r1 = 0.0;
  double r2 = 0.0;
  CapacityVector capacities;
  double mean_sigma = 0.0;
};

inline LtDerivatives lt_derivatives(const CapacityVector& caps, double mean_sigma) {
  return LtDerivatives{r_zero(caps, mean_sigma), r_prime(caps, mean_sigma),
                       r_double_prime(caps, mean_sigma), caps, mean_sigma};
}

/// Quadratic light-traffic approximation R(0+) + lambda R'(0+) + lambda^2 R''(0+)/2.
inline double lt_approx(const LtDerivatives& d, double lambda) {
  require(lambda >= 0, errc::non_positive_parameter, "lambda must be nonnegative");
  return d.r0 + lambda * d.r1 + 0.5 * lambda * lambda * d.r2;
}

// Range of Var[X] over capacity vectors with fixed Gamma: the lower bound 0
// is attained by the balanced vector (K/Gamma, ..., K/Gamma); the upper bound
// (K-1)(Gamma/K)^2 is a strict supremum, approached but never attained.
inline std::pair<double, double> var_x_bounds(double gamma_value, std::size_t k) {
  require(gamma_value > 0 && std::isfinite(gamma_value), errc::non_positive_parameter,
          "gamma must be positive");
  require(k >= 2, errc::single_server, "variance range needs K >= 2");
  const double mean = gamma_value / static_cast<double>(k);
  return {0.0, static_cast<double>(k - 1) * mean * mean};
}

/// Near-extremal capacity vector: server k gets 1/(a Gamma), the others
/// (K-1)/((1-a) Gamma). Var[X] increases toward the supremum as a -> 1.
inline CapacityVector extremal_capacities(std::size_t k, double a, double gamma_value,
                                          std::size_t count) {
  require(a > 0 && a < 1, errc::parameter_out_of_range, "a must lie in (0,1)");
  require(gamma_value > 0 && std::isfinite(gamma_value), errc::parameter_out_of_range,
          "gamma must be positive");
  require(count >= 1 && k < count, errc::parameter_out_of_range, "index k out of range");
  std::vector<double> caps(count, static_cast<double>(count - 1) / ((1.0 - a) * gamma_value));
  caps[k] = 1.0 / (a * gamma_value);
  return CapacityVector(std::move(caps));
}

struct IdentityCheck {
  double closed = 0.0;
  double brute = 0.0;
};

/// sum_{a != k} sum_{b < a, b != k} (1/C_a + 1/C_b) against its closed form
/// (K-2)(Gamma - 1/C_k). Indices are 0-based.
inline IdentityCheck identity_sigma_k(const CapacityVector& caps, std::size_t k) {
  const std::size_t n = caps.size();
  require(n >= 2, errc::single_server, "identity needs K >= 2");
  require(k < n, errc::parameter_out_of_range, "index k out of range");
  const auto& x = caps.reciprocals();
  IdentityCheck c;
  c.closed = static_cast<double>(n - 2) * (gamma_sum(caps) - x[k]);
  for (std::size_t a = 0; a < n; ++a) {
    if (a == k) continue;
    for (std::size_t b = 0; b < a; ++b) {
      if (b == k) continue;
      c.brute += x[a] + x[b];
    }
  }
  return c;
}

struct PairIdentityCheck {
  double closed = 0.0;
  double brute = 0.0;
  double sigma_kl_closed = 0.0;
  double sigma_kl_from_brute = 0.0;
};

/// H_{kl} = sum over unordered pairs {a,b} disjoint from {k,l} of
/// (1/C_a + 1/C_b), against (K-3)(Gamma - 1/C_k - 1/C_l); also the derived
/// constant Sigma_{kl} = H_{kl} + 4 Gamma - 3 (1/C_k + 1/C_l), against
/// (K+1) Gamma - K (1/C_k + 1/C_l).
inline PairIdentityCheck identity_h_kl(const CapacityVector& caps, std::size_t k, std::size_t l) {
  const std::size_t n = caps.size();
  require(n >= 2, errc::single_server, "identity needs K >= 2");
  require(k < n && l < n && k != l, errc::parameter_out_of_range, "need distinct k, l < K");
  const auto& x = caps.reciprocals();
  const double gamma = gamma_sum(caps);
  const double u = x[k] + x[l];
  PairIdentityCheck c;
  c.closed = static_cast<double>(n) >= 3 ? (static_cast<double>(n) - 3.0) * (gamma - u) : 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    if (a == k || a == l) continue;
    for (std::size_t b = 0; b < a; ++b) {
      if (b == k || b == l) continue;
      c.brute += x[a] + x[b];
    }
  }
  c.sigma_kl_closed = (static_cast<double>(n) + 1.0) * gamma - static_cast<double>(n) * u;
  c.sigma_kl_from_brute = c.brute + 4.0 * gamma - 3.0 * u;
  return c;
}

}  // namespace sq2lt
