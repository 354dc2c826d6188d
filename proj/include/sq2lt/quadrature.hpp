#pragma once

#include <algorithm>
#include <cmath>
#include <queue>
#include <span>
#include <vector>

#include "sq2lt/errors.hpp"

namespace sq2lt {

struct QuadratureOptions {
  double rel_tol = 1e-9;
  double abs_tol = 0.0;
  int max_intervals = 2000;
};

namespace detail {

// 15-point Kronrod nodes with the embedded 7-point Gauss rule (QUADPACK dqk15).
inline constexpr double kKronrodNodes[8] = {
    0.9914553711208126, 0.9491079123427585, 0.8648644233597691, 0.7415311855993944,
    0.5860872354676911, 0.4058451513773972, 0.2077849550078985, 0.0};
inline constexpr double kKronrodWeights[8] = {
    0.0229353220105292, 0.0630920926299786, 0.1047900103222502, 0.1406532597155259,
    0.1690047266392679, 0.1903505780647854, 0.2044329400752989, 0.2094821410847278};
inline constexpr double kGaussWeights[4] = {
    0.1294849661688697, 0.2797053914892767, 0.3818300505051189, 0.4179591836734694};

struct IntervalResult {
  double value = 0.0;
  double error = 0.0;
};

template <typename F>
IntervalResult gk15(F&& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double kron = kKronrodWeights[7] * f(center);
  double gauss = kGaussWeights[3] * f(center);
  for (int i = 0; i < 7; ++i) {
    const double dx = half * kKronrodNodes[i];
    const double fsum = f(center - dx) + f(center + dx);
    kron += kKronrodWeights[i] * fsum;
    if (i % 2 == 1) gauss += kGaussWeights[i / 2] * fsum;
  }
  IntervalResult r;
  r.value = kron * half;
  r.error = std::abs((kron - gauss) * half);
  if (!std::isfinite(r.value)) {
    fail(errc::quadrature_nonconvergence, "non-finite integrand value");
  }
  return r;
}

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

}  // namespace detail

// Globally adaptive Gauss-Kronrod integration of f over [a, b]. Breakpoints
// inside (a, b) seed the initial subdivision; pass the integrand's jump or
// kink locations there so refinement never stalls hunting for them.
template <typename F>
double integrate(F&& f, double a, double b, std::span<const double> breakpoints,
                 const QuadratureOptions& opt = {}) {
  if (!(a < b)) return 0.0;
  std::vector<double> interior;
  for (double p : breakpoints) {
    if (p > a && p < b) interior.push_back(p);
  }
  std::sort(interior.begin(), interior.end());
  interior.erase(std::unique(interior.begin(), interior.end()), interior.end());
  // Hints only: past a few hundred the initial segmentation would dwarf the
  // refinement budget, so thin them and let adaptivity find the rest.
  constexpr std::size_t kMaxHints = 512;
  if (interior.size() > kMaxHints) {
    std::vector<double> thinned;
    thinned.reserve(kMaxHints);
    const double stride = static_cast<double>(interior.size()) / kMaxHints;
    for (std::size_t i = 0; i < kMaxHints; ++i) {
      thinned.push_back(interior[static_cast<std::size_t>(i * stride)]);
    }
    interior = std::move(thinned);
  }
  std::vector<double> edges;
  edges.reserve(interior.size() + 2);
  edges.push_back(a);
  edges.insert(edges.end(), interior.begin(), interior.end());
  edges.push_back(b);
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  std::priority_queue<detail::Segment> queue;
  double total = 0.0;
  double total_err = 0.0;
  int count = 0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    auto r = detail::gk15(f, edges[i], edges[i + 1]);
    queue.push({edges[i], edges[i + 1], r.value, r.error});
    total += r.value;
    total_err += r.error;
    ++count;
  }

  // Error mass on intervals already at floating-point resolution; those can
  // no longer be refined and are accepted as-is.
  double frozen_err = 0.0;
  const auto tolerance = [&] { return std::max(opt.abs_tol, opt.rel_tol * std::abs(total)); };
  while (total_err + frozen_err > tolerance()) {
    if (queue.empty() || count >= opt.max_intervals) {
      fail(errc::quadrature_nonconvergence,
           "interval budget exhausted (error " + std::to_string(total_err + frozen_err) + ")");
    }
    detail::Segment worst = queue.top();
    queue.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {
      total_err -= worst.error;
      frozen_err += worst.error;
      continue;
    }
    auto left = detail::gk15(f, worst.a, mid);
    auto right = detail::gk15(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    queue.push({worst.a, mid, left.value, left.error});
    queue.push({mid, worst.b, right.value, right.error});
    ++count;
  }
  return total;
}

template <typename F>
double integrate(F&& f, double a, double b, const QuadratureOptions& opt = {}) {
  return integrate(std::forward<F>(f), a, b, std::span<const double>{}, opt);
}

}  // namespace sq2lt
