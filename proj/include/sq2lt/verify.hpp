#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "sq2lt/analytics.hpp"
#include "sq2lt/scenario.hpp"
#include "sq2lt/serialize.hpp"
#include "sq2lt/tagged.hpp"

namespace sq2lt {

// One cross-check outcome. For Monte-Carlo checks mc_mean/mc_half_width hold
// the estimate; analytic checks (identities, dual forms, quadrature) reuse
// the same fields for the independently computed counterpart, with zero width.
struct VerifyRecord {
  std::string quantity;
  double closed_form = 0.0;
  double mc_mean = 0.0;
  double mc_half_width = 0.0;
  long long samples = 0;
  bool pass = false;
  // Informational records are reported but excluded from the overall verdict;
  // used for the full-FCFS response in the two-prior-job scenario, whose gap
  // against the assignment-only closed form is a finding, not a failure.
  bool informational = false;
};

struct VerifyOptions {
  long long mc_samples = 1'000'000;
  double quad_tol = 1e-9;
  unsigned workers = 1;
  // Added to the closed-form first derivative before the quadrature
  // comparison. Fault-injection hook so the negative-control test can show a
  // corrupted closed form is detected; leave at 0 otherwise.
  double r_prime_bias = 0.0;
};

struct VerifyReport {
  std::vector<VerifyRecord> records;

  // Overall verdict: every analytic check must hold; the Monte-Carlo block
  // uses 3-sigma windows per cell, so a small miss quota (10%) absorbs the
  // expected false-alarm rate without hiding individual cells.
  bool all_pass() const {
    long long mc_total = 0;
    long long mc_passed = 0;
    for (const auto& r : records) {
      if (r.informational) continue;
      if (r.samples > 0) {
        ++mc_total;
        mc_passed += r.pass ? 1 : 0;
      } else if (!r.pass) {
        return false;
      }
    }
    if (mc_total == 0) return true;
    return 10 * mc_passed >= 9 * mc_total;
  }
};

namespace detail {

inline bool close_rel(double a, double b, double tol, double floor_scale = 0.0) {
  return std::abs(a - b) <= tol * std::max({std::abs(a), std::abs(b), floor_scale});
}

struct VerifyBuilder {
  std::vector<VerifyRecord>& records;

  void analytic(const std::string& quantity, double expected, double actual, double tol,
                double floor_scale = 0.0) {
    records.push_back(VerifyRecord{quantity, expected, actual, 0.0, 0,
                                   close_rel(expected, actual, tol, floor_scale), false});
  }

  void mc(const std::string& quantity, double closed, const McEstimate& est, bool informational) {
    // 3-sigma window plus an fp-level floor: a zero-variance estimator (e.g.
    // homogeneous capacities with deterministic service) must not demand
    // bit-exact equality of two rounding paths.
    const double window =
        3.0 * est.half_width_95 / 1.959963984540054 + 1e-12 * std::abs(closed);
    records.push_back(VerifyRecord{quantity, closed, est.mean, est.half_width_95, est.samples,
                                   std::abs(est.mean - closed) <= window, informational});
  }
};

// (s, t) cells spanning the three regimes of the two-prior-job expectation:
// both future, straddling zero, and both past at several depths. Values are
// offset from round numbers so deterministic service atoms never land
// exactly on a case boundary.
inline const std::vector<std::pair<double, double>>& verify_st_grid() {
  static const std::vector<std::pair<double, double>> grid = {
      {0.41, 1.13},   {-0.53, 0.91},  {-0.19, -0.06}, {-0.37, -0.11}, {-0.61, -0.27},
      {-0.83, -0.41}, {-1.13, -0.57}, {-1.51, -0.73}, {-2.09, -0.97}, {-2.87, -1.31},
      {-0.97, -0.13}, {-1.73, -0.29}, {-4.21, -1.87}, {-0.43, -0.37}};
  return grid;
}

inline const std::vector<double>& verify_t_grid() {
  static const std::vector<double> grid = {1.3, -0.07, -0.31, -0.89, -2.03};
  return grid;
}

}  // namespace detail

// Runs the full cross-check battery for one scenario: combinatorial
// identities against brute-force sums, the dual printed forms of each
// quantity, quadrature of the tagged-job integrals against the closed-form
// derivatives, and tagged-job Monte Carlo against the conditional
// expectations.
inline VerifyReport run_verify(const ScenarioConfig& scn, const VerifyOptions& opt = {}) {
  require(scn.d == 2, errc::invalid_field,
          "the closed forms under verification apply to the two-choice policy (d = 2)");
  VerifyReport report;
  detail::VerifyBuilder add{report.records};
  const CapacityVector& caps = scn.capacities;
  const ServiceDistribution& dist = scn.distribution;
  const std::size_t n = caps.size();
  const double mean_sigma = dist.moment(1);

  // Combinatorial identities on the scenario's capacities.
  if (n >= 2) {
    for (std::size_t k = 0; k < std::min<std::size_t>(n, 4); ++k) {
      const auto c = identity_sigma_k(caps, k);
      add.analytic("identity/sigma_k/k=" + std::to_string(k), c.closed, c.brute, 1e-12,
                   gamma_sum(caps) * static_cast<double>(n));
    }
    const auto c = identity_h_kl(caps, 0, 1);
    const double scale = gamma_sum(caps) * static_cast<double>(n);
    add.analytic("identity/h_kl/k=0,l=1", c.closed, c.brute, 1e-12, scale);
    add.analytic("identity/sigma_kl/k=0,l=1", c.sigma_kl_closed, c.sigma_kl_from_brute, 1e-12,
                 scale);
  }

  // Random capacity vectors, K in 2..8.
  {
    RngStream rng(scn.seed, 0xC0FFEEULL);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t kk = 2 + static_cast<std::size_t>(rng.uniform_index(7));
      std::vector<double> values(kk);
      for (auto& v : values) v = 0.25 + 8.0 * rng.u01();
      CapacityVector random_caps(std::move(values));
      const double scale = gamma_sum(random_caps) * static_cast<double>(kk);
      for (std::size_t k = 0; k < kk; ++k) {
        const auto c = identity_sigma_k(random_caps, k);
        worst = std::max(worst, std::abs(c.closed - c.brute) / scale);
        for (std::size_t l = 0; l < kk; ++l) {
          if (l == k) continue;
          const auto h = identity_h_kl(random_caps, k, l);
          worst = std::max(worst, std::abs(h.closed - h.brute) / scale);
          worst = std::max(worst,
                           std::abs(h.sigma_kl_closed - h.sigma_kl_from_brute) / scale);
        }
      }
    }
    report.records.push_back(
        VerifyRecord{"identity/random_caps/max_rel_err", 0.0, worst, 0.0, 0, worst <= 1e-12});
  }

  // Dual printed forms agree (they are also asserted inside the evaluators;
  // these records surface the values).
  if (n >= 2) {
    const XMoments xm = x_moments(caps);
    const double e2 = mean_sigma * mean_sigma;
    const double direct =
        (xm.m1 * xm.m1 - xm.m2) * e2 / static_cast<double>(n - 1);
    add.analytic("forms/r_prime", r_prime(caps, mean_sigma), direct, 1e-13,
                 (xm.m1 * xm.m1 + xm.m2) * e2);
    const double alt = 2.0 / ((static_cast<double>(n) - 1) * (static_cast<double>(n) - 1)) *
                       (xm.m1 * xm.m1 * xm.m1 - 2.0 * xm.m1 * xm.m2 + xm.m3) * e2 * mean_sigma;
    add.analytic("forms/r_double_prime", r_double_prime(caps, mean_sigma), alt, 1e-12,
                 2.0 * (xm.m1 * xm.m1 * xm.m1 + 2.0 * xm.m1 * xm.m2 + xm.m3) * e2 * mean_sigma);
  }

  // Quadrature of the tagged-job integrals against the closed forms.
  if (n >= 2) {
    const double rp = r_prime(caps, mean_sigma) + opt.r_prime_bias;
    const double quad1 = first_derivative_quadrature(caps, dist, opt.quad_tol);
    add.analytic("quadrature/first_derivative", rp, quad1, 1e-6, std::abs(r_zero(caps, mean_sigma)) * 1e-7);
    const double rpp = r_double_prime(caps, mean_sigma);
    const double quad2 = second_derivative_quadrature(caps, dist, std::max(opt.quad_tol, 1e-8));
    add.analytic("quadrature/second_derivative", rpp, quad2, 1e-3,
                 std::abs(r_zero(caps, mean_sigma)) * 1e-7);
    for (std::size_t k = 0; k < std::min<std::size_t>(n, 3); ++k) {
      const double expected = mean_sigma / caps.values()[k];
      add.analytic("quadrature/survival_integral/k=" + std::to_string(k), expected,
                   survival_time_integral(k, caps, dist, opt.quad_tol), 1e-7);
    }
  }

  // Tagged-job Monte Carlo against the conditional expectations. The
  // assignment-only estimator measures the quantity the closed forms
  // evaluate; the full-FCFS estimator is reported alongside, informational in
  // the two-prior-job region where a wait can occur.
  if (n >= 2) {
    std::uint64_t stream_base = 1'000'000;
    const auto run_cell = [&](const std::string& label, double closed,
                              const TaggedScenario& cell, bool wait_possible) {
      const TaggedMcResult mc =
          mc_tagged_response(cell, opt.mc_samples, scn.seed, stream_base, opt.workers);
      stream_base += 1'000'000;
      add.mc("mc/assign_only/" + label, closed, mc.assign_only, false);
      add.mc("mc/full_response/" + label, closed, mc.full_response, wait_possible);
    };

    run_cell("n0", r_zero(caps, mean_sigma), TaggedScenario::none(caps, dist), false);
    for (double t : detail::verify_t_grid()) {
      run_cell("n1/t=" + format_double(t), rhat1(t, caps, dist),
               TaggedScenario::one(t, caps, dist), false);
    }
    for (const auto& [s, t] : detail::verify_st_grid()) {
      run_cell("n2/s=" + format_double(s) + ",t=" + format_double(t), rhat2(s, t, caps, dist),
               TaggedScenario::two(s, t, caps, dist), s < 0 && t < 0);
    }
  }

  return report;
}

inline json to_json(const VerifyRecord& r) {
  return json{{"quantity", r.quantity},   {"closed_form", r.closed_form},
              {"mc_mean", r.mc_mean},     {"mc_half_width", r.mc_half_width},
              {"samples", r.samples},     {"pass", r.pass},
              {"informational", r.informational}};
}

inline json to_json(const VerifyReport& report) {
  json records = json::array();
  for (const auto& r : report.records) records.push_back(to_json(r));
  return json{{"records", std::move(records)}, {"pass", report.all_pass()}};
}

}  // namespace sq2lt
