#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sq2lt/analytics.hpp"
#include "sq2lt/capacity.hpp"
#include "sq2lt/distribution.hpp"
#include "sq2lt/errors.hpp"
#include "sq2lt/parallel.hpp"
#include "sq2lt/quadrature.hpp"
#include "sq2lt/rng.hpp"
#include "sq2lt/stats.hpp"

namespace sq2lt {

// Probe-job scenario: a tagged job arrives at time 0 and exactly n other jobs
// (n <= 2) arrive at the given nonzero epochs. For n = 2 the epochs are kept
// in canonical order s < t (the expectation is symmetric in them).
struct TaggedScenario {
  int n = 0;
  double s = 0.0;
  double t = 0.0;
  CapacityVector caps;
  ServiceDistribution dist;

  static TaggedScenario none(CapacityVector caps, ServiceDistribution dist) {
    return TaggedScenario{0, 0.0, 0.0, std::move(caps), std::move(dist)};
  }

  static TaggedScenario one(double t, CapacityVector caps, ServiceDistribution dist) {
    require(t != 0.0, errc::zero_time, "arrival epoch must be nonzero");
    return TaggedScenario{1, 0.0, t, std::move(caps), std::move(dist)};
  }

  static TaggedScenario two(double s, double t, CapacityVector caps, ServiceDistribution dist) {
    require(s != 0.0 && t != 0.0, errc::zero_time, "arrival epochs must be nonzero");
    require(s != t, errc::unordered_times, "arrival epochs must be distinct");
    if (s > t) std::swap(s, t);
    return TaggedScenario{2, s, t, std::move(caps), std::move(dist)};
  }
};

namespace detail {

struct TaggedContext {
  const std::vector<double>& x;  // reciprocal capacities
  double gamma;
  double k;
  double mean_sigma;
  double r0;

  TaggedContext(const CapacityVector& caps, const ServiceDistribution& dist)
      : x(caps.reciprocals()),
        gamma(gamma_sum(caps)),
        k(static_cast<double>(caps.size())),
        mean_sigma(dist.moment(1)),
        r0(x_moments(caps).m1 * dist.moment(1)) {}
};

// h_k evaluated from precomputed survival d_k = P(C_k t + sigma > 0).
inline double h_k_from_survival(const TaggedContext& c, std::size_t k, double dk) {
  return (1.0 - dk) * c.r0 + (c.gamma - c.x[k]) * dk * c.mean_sigma / (c.k - 1.0);
}

}  // namespace detail

/// H_k(t) for t < 0: expected tagged response conditioned on the prior job
/// having been assigned to server k,
///   H_k(t) = P(C_k t + sigma <= 0) R(0+)
///          + (Gamma - 1/C_k) P(C_k t + sigma > 0) E[sigma] / (K-1).
/// The algebraically equivalent form R(0+) + (Gamma/K - 1/C_k) P(...) E[sigma]/(K-1)
/// is evaluated alongside and the two are required to agree to 1e-13.
inline double h_k(double t, std::size_t k, const CapacityVector& caps,
                  const ServiceDistribution& dist) {
  require(t < 0, errc::non_negative_time, "h_k is defined for t < 0");
  require(k < caps.size(), errc::parameter_out_of_range, "server index out of range");
  require(caps.size() >= 2, errc::single_server, "h_k needs K >= 2");
  detail::TaggedContext c(caps, dist);
  const double dk = dist.survival(-t / c.x[k]);  // P(sigma > -C_k t)
  const double direct = detail::h_k_from_survival(c, k, dk);
  const double alternate =
      c.r0 + (c.gamma / c.k - c.x[k]) * dk * c.mean_sigma / (c.k - 1.0);
  detail::check_forms_agree(direct, alternate, c.r0, 1e-13, "h_k");
  return direct;
}

/// E[response of the tagged job | one other job arrives at t]: equals R(0+)
/// for t > 0 and (1/K) sum_k H_k(t) for t < 0.
inline double rhat1(double t, const CapacityVector& caps, const ServiceDistribution& dist) {
  require(t != 0.0, errc::zero_time, "arrival epoch must be nonzero");
  detail::TaggedContext c(caps, dist);
  if (t > 0) return c.r0;
  require(caps.size() >= 2, errc::single_server, "rhat1 needs K >= 2");
  double acc = 0.0;
  for (std::size_t k = 0; k < caps.size(); ++k) {
    const double dk = dist.survival(-t / c.x[k]);
    acc += detail::h_k_from_survival(c, k, dk);
  }
  return acc / c.k;
}

/// E[response of the tagged job | other jobs at s < t]. Piecewise in the sign
/// pattern: R(0+) for 0 < s < t, rhat1(s) for s < 0 < t, and for s < t < 0 the
/// four-term decomposition over which prior jobs are still in service at the
/// relevant epochs. Both published forms of the s < t < 0 expression are
/// evaluated and must agree to 1e-12; the four-term form is returned.
inline double rhat2(double s, double t, const CapacityVector& caps,
                    const ServiceDistribution& dist) {
  require(s != 0.0 && t != 0.0, errc::zero_time, "arrival epochs must be nonzero");
  require(s < t, errc::unordered_times, "epochs must satisfy s < t");
  if (s > 0) return detail::TaggedContext(caps, dist).r0;
  if (t > 0) return rhat1(s, caps, dist);

  require(caps.size() >= 2, errc::single_server, "rhat2 needs K >= 2");
  detail::TaggedContext c(caps, dist);
  const std::size_t n = caps.size();
  const double km1 = c.k - 1.0;

  // Per-server event probabilities. sv_k = P(s-job assigned to k is still in
  // service at t); cs_k, dt_k = P(job assigned to k at s resp. t is still in
  // service at time 0).
  std::vector<double> sv(n), cs(n), dt(n), hk(n);
  for (std::size_t k = 0; k < n; ++k) {
    sv[k] = dist.survival((t - s) / c.x[k]);
    cs[k] = dist.survival(-s / c.x[k]);
    dt[k] = dist.survival(-t / c.x[k]);
    hk[k] = detail::h_k_from_survival(c, k, dt[k]);
  }

  double r1t = 0.0;
  for (std::size_t k = 0; k < n; ++k) r1t += hk[k];
  r1t /= c.k;

  // Four-term form.
  double term1 = 0.0;
  for (std::size_t k = 0; k < n; ++k) term1 += 1.0 - sv[k];
  term1 = term1 / c.k * r1t;

  double term2 = 0.0;
  {
    double b_total = 0.0;
    for (std::size_t k = 0; k < n; ++k) b_total += sv[k] - cs[k];
    for (std::size_t k = 0; k < n; ++k) {
      term2 += (b_total - (sv[k] - cs[k])) * hk[k];
    }
    term2 /= c.k * km1;
  }

  double term3 = 0.0;
  double term4 = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t l = 0; l < n; ++l) {
      if (l == k) continue;
      term3 += (c.gamma - c.x[l]) * cs[l] * (1.0 - dt[k]);
      term4 += ((c.k + 1.0) * c.gamma - c.k * (c.x[k] + c.x[l])) * cs[k] * dt[l];
    }
  }
  term3 *= c.mean_sigma / (c.k * km1 * km1);
  term4 *= c.mean_sigma / (c.k * c.k * km1 * km1);
  const double four_term = term1 + term2 + term3 + term4;

  // Compact form.
  double compact = term1;
  {
    double b_mean = 0.0;
    for (std::size_t k = 0; k < n; ++k) b_mean += sv[k] - cs[k];
    compact += b_mean / c.k * c.r0;
    double third = 0.0;
    for (std::size_t k = 0; k < n; ++k) third += (c.gamma - c.x[k]) * cs[k];
    compact += third * c.mean_sigma / (c.k * km1);
    double sv_total = 0.0;
    for (std::size_t k = 0; k < n; ++k) sv_total += sv[k];
    double h = 0.0;
    for (std::size_t l = 0; l < n; ++l) {
      h += (c.gamma / c.k - c.x[l]) * dt[l] * (sv_total - sv[l]);
    }
    compact += h * c.mean_sigma / (c.k * km1 * km1);
  }

  detail::check_forms_agree(four_term, compact, c.r0, 1e-12, "rhat2");
  return four_term;
}

// Dual Monte-Carlo estimate of the tagged job's expected response time under
// the operational two-choice rules. `assign_only` averages the service time
// at the final assignment, the quantity the closed forms evaluate;
// `full_response` additionally counts FCFS waiting, which can occur only in
// the n = 2, s < t < 0 scenario when the tagged pair equals the two busy
// servers. Reporting both makes any gap between the conventions visible.
struct TaggedMcResult {
  McEstimate assign_only;
  McEstimate full_response;
};

namespace detail {

struct McShard {
  RunningStat assign;
  RunningStat full;
};

inline void mc_tagged_shard(const TaggedScenario& scn, long long count, RngStream& rng,
                            McShard& out) {
  const auto& caps = scn.caps.values();
  const std::size_t k = caps.size();
  for (long long i = 0; i < count; ++i) {
    // Prior jobs in chronological order; each records (server, departure).
    std::size_t busy_server[2];
    double busy_departure[2];
    int busy = 0;

    std::size_t nu_s = 0;
    double dep_s = 0.0;
    bool s_in_service_at_t = false;

    if (scn.n == 2 && scn.s < 0) {
      std::size_t a, b;
      sample_pair(rng, k, a, b);
      nu_s = rng.coin() ? a : b;
      const double sigma = scn.dist.sample(rng);
      dep_s = scn.s + sigma / caps[nu_s];
      s_in_service_at_t = dep_s > scn.t && scn.t < 0;
      if (dep_s > 0) {
        busy_server[busy] = nu_s;
        busy_departure[busy] = dep_s;
        ++busy;
      }
    }

    const double t_epoch = scn.n == 1 ? scn.t : (scn.n == 2 ? scn.t : 0.0);
    if (scn.n >= 1 && t_epoch < 0) {
      std::size_t a, b;
      sample_pair(rng, k, a, b);
      const bool tie = rng.coin();
      std::size_t nu_t;
      if (s_in_service_at_t && (a == nu_s || b == nu_s)) {
        nu_t = a == nu_s ? b : a;
      } else {
        nu_t = tie ? a : b;
      }
      const double sigma = scn.dist.sample(rng);
      const double dep_t = t_epoch + sigma / caps[nu_t];
      if (dep_t > 0) {
        // A prior job still in service at the second arrival blocks its
        // server, so two lingering jobs always sit on distinct servers.
        if (busy == 1 && busy_server[0] == nu_t) {
          fail(errc::internal_check_failed, "two prior jobs stacked on one server");
        }
        busy_server[busy] = nu_t;
        busy_departure[busy] = dep_t;
        ++busy;
      }
    }

    // Tagged job: fewest jobs among its pair, random tie-break; with at most
    // one prior job per server the counts are 0/1.
    std::size_t a, b;
    sample_pair(rng, k, a, b);
    const bool tie = rng.coin();
    const double sigma0 = scn.dist.sample(rng);
    int count_a = 0, count_b = 0;
    double dep_a = 0.0, dep_b = 0.0;
    for (int j = 0; j < busy; ++j) {
      if (busy_server[j] == a) {
        count_a = 1;
        dep_a = busy_departure[j];
      }
      if (busy_server[j] == b) {
        count_b = 1;
        dep_b = busy_departure[j];
      }
    }
    std::size_t nu0;
    double wait;
    if (count_a < count_b) {
      nu0 = a;
      wait = 0.0;
    } else if (count_b < count_a) {
      nu0 = b;
      wait = 0.0;
    } else {
      nu0 = tie ? a : b;
      wait = nu0 == a ? dep_a : dep_b;  // zero unless both candidates busy
    }
    const double service = sigma0 / caps[nu0];
    out.assign.add(service);
    out.full.add(service + wait);
  }
}

}  // namespace detail

inline TaggedMcResult mc_tagged_response(const TaggedScenario& scn, long long samples,
                                         std::uint64_t seed, std::uint64_t stream_base = 0,
                                         unsigned workers = 1) {
  require(samples >= 1, errc::parameter_out_of_range, "samples must be >= 1");
  // Fixed shard size: the shard -> stream map, and therefore every estimate,
  // depends only on (seed, stream_base, samples), never on the worker count.
  constexpr long long kShard = 1 << 16;
  const std::size_t shards = static_cast<std::size_t>((samples + kShard - 1) / kShard);
  std::vector<detail::McShard> partial(shards);
  parallel_for_index(shards, workers, [&](std::size_t i) {
    const long long lo = static_cast<long long>(i) * kShard;
    const long long n = std::min(kShard, samples - lo);
    RngStream rng(seed, stream_base + i);
    detail::mc_tagged_shard(scn, n, rng, partial[i]);
  });
  detail::McShard merged;
  for (const auto& p : partial) {
    merged.assign.merge(p.assign);
    merged.full.merge(p.full);
  }
  return TaggedMcResult{McEstimate::from(merged.assign), McEstimate::from(merged.full)};
}

namespace detail {

inline std::vector<double> negative_axis_breakpoints(const CapacityVector& caps,
                                                     const ServiceDistribution& dist,
                                                     double support) {
  std::vector<double> pts;
  for (double c : caps.values()) {
    pts.push_back(-support / c);
    for (double j : dist.survival_jumps()) pts.push_back(-j / c);
  }
  return pts;
}

}  // namespace detail

/// Quadrature of int_{-inf}^0 (rhat1(t) - R(0+)) dt, the integral producing
/// the first derivative; truncated where the prior job's service cannot reach
/// time zero (survival below 1e-12).
inline double first_derivative_quadrature(const CapacityVector& caps,
                                          const ServiceDistribution& dist, double tol = 1e-9) {
  require(tol > 0, errc::parameter_out_of_range, "tol must be positive");
  require(caps.size() >= 2, errc::single_server, "needs K >= 2");
  detail::TaggedContext c(caps, dist);
  const double support = dist.support_upper_bound(1e-12);
  const double cmin = *std::min_element(caps.values().begin(), caps.values().end());
  const double lower = -support / cmin;
  const auto breaks = detail::negative_axis_breakpoints(caps, dist, support);
  QuadratureOptions opt;
  opt.rel_tol = tol;
  opt.abs_tol = 1e-13 * c.r0 * std::max(1.0, -lower);
  const double r0 = c.r0;
  return integrate([&](double t) { return rhat1(t, caps, dist) - r0; }, lower, 0.0,
                   std::span<const double>(breaks), opt);
}

/// Quadrature of 2 int_{-inf}^0 int_s^0 (rhat2(s,t) - rhat1(s) - rhat1(t)
/// + R(0+)) dt ds, the integral producing the second derivative. The factor 2
/// accounts for the symmetric half-plane s > t. The integrand vanishes once t
/// (resp. t - s) outruns the truncated service support, which bounds both
/// integration limits.
inline double second_derivative_quadrature(const CapacityVector& caps,
                                           const ServiceDistribution& dist, double tol = 1e-7) {
  require(tol > 0, errc::parameter_out_of_range, "tol must be positive");
  require(caps.size() >= 2, errc::single_server, "needs K >= 2");
  detail::TaggedContext c(caps, dist);
  const double support = dist.support_upper_bound(1e-12);
  const double cmin = *std::min_element(caps.values().begin(), caps.values().end());
  const double t_lower = -support / cmin;
  const double s_lower = 2.0 * t_lower;
  const double r0 = c.r0;

  std::vector<double> outer_breaks = detail::negative_axis_breakpoints(caps, dist, support);
  {
    const std::vector<double> base = outer_breaks;
    for (double p : base) {
      outer_breaks.push_back(p + t_lower);
      for (double q : base) outer_breaks.push_back(p + q);
    }
  }

  QuadratureOptions inner_opt;
  inner_opt.rel_tol = std::max(tol * 0.1, 1e-11);
  inner_opt.abs_tol = 1e-13 * r0;
  inner_opt.max_intervals = 800;
  QuadratureOptions outer_opt;
  outer_opt.rel_tol = tol;
  outer_opt.abs_tol = 1e-11 * r0 * std::max(1.0, -s_lower);
  outer_opt.max_intervals = 800;

  const auto inner = [&](double s) {
    const double lo = std::max(s, t_lower);
    if (lo >= 0.0) return 0.0;
    const double r1s = rhat1(s, caps, dist);
    std::vector<double> inner_breaks;
    for (double cap : caps.values()) {
      inner_breaks.push_back(-support / cap);
      for (double j : dist.survival_jumps()) {
        inner_breaks.push_back(-j / cap);
        inner_breaks.push_back(s + j / cap);
      }
      inner_breaks.push_back(s + support / cap);
    }
    return integrate(
        [&](double t) { return rhat2(s, t, caps, dist) - r1s - rhat1(t, caps, dist) + r0; }, lo,
        0.0, std::span<const double>(inner_breaks), inner_opt);
  };
  return 2.0 * integrate(inner, s_lower, 0.0, std::span<const double>(outer_breaks), outer_opt);
}

/// Quadrature of int_{-inf}^0 P(C_k t + sigma > 0) dt, which must equal
/// E[sigma]/C_k; used as an independent check of the survival integrals the
/// derivative computations rest on.
inline double survival_time_integral(std::size_t k, const CapacityVector& caps,
                                     const ServiceDistribution& dist, double tol = 1e-9) {
  require(k < caps.size(), errc::parameter_out_of_range, "server index out of range");
  const double cap = caps.values()[k];
  const double support = dist.support_upper_bound(1e-12);
  const double lower = -support / cap;
  std::vector<double> breaks;
  for (double j : dist.survival_jumps()) breaks.push_back(-j / cap);
  QuadratureOptions opt;
  opt.rel_tol = tol;
  opt.abs_tol = 1e-14 * dist.moment(1) / cap;
  return integrate([&](double t) { return dist.survival(-cap * t); }, lower, 0.0,
                   std::span<const double>(breaks), opt);
}

}  // namespace sq2lt
