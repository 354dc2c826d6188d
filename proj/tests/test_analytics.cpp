#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "sq2lt/analytics.hpp"
#include "sq2lt/rng.hpp"

using namespace sq2lt;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

CapacityVector scenario1_caps() { return CapacityVector{{2, 2, 2, 2, 2, 10, 10, 10, 10, 10}}; }

CapacityVector scenario2_caps() {
  std::vector<double> caps(100, 2.0);
  std::fill(caps.begin() + 50, caps.end(), 10.0);
  return CapacityVector{std::move(caps)};
}

CapacityVector random_caps(RngStream& rng, std::size_t k) {
  std::vector<double> caps(k);
  for (auto& c : caps) c = 0.2 + 8.0 * rng.u01();
  return CapacityVector{std::move(caps)};
}

}  // namespace

TEST_CASE("gamma of the two-speed vectors") {
  REQUIRE_THAT(gamma_sum(scenario1_caps()), WithinRel(3.0, 1e-14));
  REQUIRE_THAT(gamma_sum(scenario2_caps()), WithinRel(30.0, 1e-13));
  REQUIRE(gamma_sum(CapacityVector{{1.0}}) == 1.0);
}

TEST_CASE("x-moments by hand") {
  const XMoments m = x_moments(scenario1_caps());
  REQUIRE_THAT(m.m1, WithinRel(0.3, 1e-14));
  REQUIRE_THAT(m.m2, WithinRel(0.13, 1e-13));
  REQUIRE_THAT(m.m3, WithinRel(0.063, 1e-13));
  REQUIRE_THAT(m.var, WithinRel(0.04, 1e-12));

  const XMoments h = x_moments(CapacityVector{std::vector<double>(10, 10.0)});
  REQUIRE_THAT(h.m1, WithinRel(0.1, 1e-14));
  REQUIRE(h.var == 0.0);

  const XMoments two = x_moments(CapacityVector{{1.0, 2.0}});
  REQUIRE_THAT(two.m1, WithinRel(0.75, 1e-15));
  REQUIRE_THAT(two.m2, WithinRel(0.625, 1e-15));
  REQUIRE_THAT(two.m3, WithinRel(0.5625, 1e-15));
  REQUIRE_THAT(two.var, WithinRel(0.0625, 1e-14));
}

TEST_CASE("derivatives on the reference scenarios") {
  REQUIRE_THAT(r_zero(scenario1_caps(), 1.0), WithinAbs(0.3, 1e-15));
  REQUIRE_THAT(r_zero(CapacityVector{std::vector<double>(10, 10.0)}, 1.0),
               WithinAbs(0.1, 1e-15));
  REQUIRE_THAT(r_zero(CapacityVector{{1.0, 2.0}}, 1.0), WithinAbs(0.75, 1e-15));

  REQUIRE_THAT(r_prime(scenario1_caps(), 1.0), WithinRel(-0.04 / 9.0, 1e-12));
  REQUIRE_THAT(r_prime(scenario2_caps(), 1.0), WithinAbs(-0.04 / 99.0, 1e-8));
  REQUIRE_THAT(r_prime(CapacityVector{{1.0, 2.0}}, 1.0), WithinRel(-0.0625, 1e-13));

  REQUIRE_THAT(r_double_prime(scenario1_caps(), 1.0), WithinRel(2.0 * 1.2 / 8100.0, 1e-11));
  REQUIRE_THAT(r_double_prime(CapacityVector{{1.0, 2.0}}, 1.0), WithinRel(0.09375, 1e-13));
}

TEST_CASE("single server has no derivative formulas") {
  const CapacityVector one{{5.0}};
  REQUIRE(r_zero(one, 1.0) == 0.2);
  REQUIRE_THROWS_MATCHES(r_prime(one, 1.0), Error,
                         Catch::Matchers::Predicate<Error>(
                             [](const Error& e) { return e.code() == errc::single_server; }));
  REQUIRE_THROWS_MATCHES(r_double_prime(one, 1.0), Error,
                         Catch::Matchers::Predicate<Error>(
                             [](const Error& e) { return e.code() == errc::single_server; }));
}

TEST_CASE("homogeneous capacities zero out both derivatives") {
  RngStream rng(555, 0);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t k = 2 + rng.uniform_index(63);
    const double c = 0.05 + 50.0 * rng.u01();
    const CapacityVector caps{std::vector<double>(k, c)};
    const double r0 = r_zero(caps, 1.0);
    REQUIRE(std::abs(r_prime(caps, 1.0)) <= 1e-15 * r0);
    REQUIRE(std::abs(r_double_prime(caps, 1.0)) <= 1e-15 * r0);
  }
}

TEST_CASE("r_prime is nonpositive, zero only for equal capacities") {
  RngStream rng(556, 0);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t k = 2 + rng.uniform_index(15);
    const auto caps = random_caps(rng, k);
    const double rp = r_prime(caps, 1.0);
    REQUIRE(rp <= 0.0);
    const auto [mn, mx] =
        std::minmax_element(caps.values().begin(), caps.values().end());
    if (*mn != *mx) REQUIRE(rp < 0.0);
  }
}

TEST_CASE("direct and alternate forms agree on random vectors") {
  RngStream rng(557, 0);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t k = 2 + rng.uniform_index(31);
    const auto caps = random_caps(rng, k);
    const double sigma = 0.25 + 4.0 * rng.u01();
    const XMoments m = x_moments(caps);
    const double e2 = sigma * sigma;
    const double kd = static_cast<double>(k);

    // The two printed routes share the answer but not the rounding; their
    // difference is eps-level relative to the uncancelled term magnitudes,
    // which is the meaningful comparison scale when the result itself is
    // a near-cancelling difference.
    const double direct1 = (m.m1 * m.m1 - m.m2) * e2 / (kd - 1.0);
    const double alt1 = -m.var * e2 / (kd - 1.0);
    const double scale1 = (m.m1 * m.m1 + m.m2) * e2;
    REQUIRE(std::abs(r_prime(caps, sigma) - direct1) <= 1e-13 * scale1);
    REQUIRE(std::abs(r_prime(caps, sigma) - alt1) <= 1e-13 * scale1);

    const double direct2 = 2.0 / (kd * kd * (kd - 1.0) * (kd - 1.0)) *
                           (std::pow(kd * m.m1, 3) / kd - 2.0 * (kd * m.m1) * (kd * m.m2) +
                            kd * (kd * m.m3)) *
                           e2 * sigma;
    const double alt2 = 2.0 / ((kd - 1.0) * (kd - 1.0)) *
                        (m.m1 * m.m1 * m.m1 - 2.0 * m.m1 * m.m2 + m.m3) * e2 * sigma;
    const double scale2 = (m.m1 * m.m1 * m.m1 + 2.0 * m.m1 * m.m2 + m.m3) * e2 * sigma;
    REQUIRE(std::abs(r_double_prime(caps, sigma) - direct2) <= 1e-12 * scale2);
    REQUIRE(std::abs(r_double_prime(caps, sigma) - alt2) <= 1e-12 * scale2);
  }
}

TEST_CASE("scale covariance in the capacities") {
  RngStream rng(558, 0);
  for (int trial = 0; trial < 200; ++trial) {
    const auto caps = random_caps(rng, 2 + rng.uniform_index(10));
    const double c = 0.1 + 10.0 * rng.u01();
    std::vector<double> scaled = caps.values();
    for (auto& v : scaled) v *= c;
    const CapacityVector caps_c{std::move(scaled)};
    REQUIRE_THAT(r_zero(caps_c, 1.0), WithinRel(r_zero(caps, 1.0) / c, 1e-12));
    REQUIRE_THAT(r_prime(caps_c, 1.0), WithinRel(r_prime(caps, 1.0) / (c * c), 1e-11));
    REQUIRE_THAT(r_double_prime(caps_c, 1.0),
                 WithinRel(r_double_prime(caps, 1.0) / (c * c * c), 1e-10));
  }
}

TEST_CASE("permutation invariance") {
  RngStream rng(559, 0);
  std::mt19937 shuffle_rng(1234);
  for (int trial = 0; trial < 100; ++trial) {
    const auto caps = random_caps(rng, 3 + rng.uniform_index(8));
    std::vector<double> perm = caps.values();
    std::shuffle(perm.begin(), perm.end(), shuffle_rng);
    const CapacityVector caps_p{std::move(perm)};
    REQUIRE_THAT(r_zero(caps_p, 1.0), WithinRel(r_zero(caps, 1.0), 1e-13));
    REQUIRE_THAT(r_prime(caps_p, 1.0), WithinRel(r_prime(caps, 1.0), 1e-12));
    REQUIRE_THAT(r_double_prime(caps_p, 1.0), WithinRel(r_double_prime(caps, 1.0), 1e-11));
  }
}

TEST_CASE("quadratic approximation") {
  const auto d = lt_derivatives(scenario1_caps(), 1.0);
  REQUIRE(lt_approx(d, 0.0) == d.r0);
  REQUIRE_THAT(lt_approx(d, 1.0), WithinAbs(0.2957, 5e-5));
  const auto h = lt_derivatives(CapacityVector{std::vector<double>(10, 10.0)}, 1.0);
  for (double l : {0.1, 1.0, 7.0}) REQUIRE_THAT(lt_approx(h, l), WithinAbs(0.1, 1e-15));
}

TEST_CASE("variance range of X under fixed gamma") {
  const auto [lo1, hi1] = var_x_bounds(3.0, 10);
  REQUIRE(lo1 == 0.0);
  REQUIRE_THAT(hi1, WithinRel(0.81, 1e-14));
  const auto [lo2, hi2] = var_x_bounds(1.5, 2);
  REQUIRE(lo2 == 0.0);
  REQUIRE_THAT(hi2, WithinRel(0.5625, 1e-14));
  // K=2 closes the hand formula (gamma/2)^2.
  REQUIRE_THAT(var_x_bounds(7.0, 2).second, WithinRel(3.5 * 3.5, 1e-14));
}

TEST_CASE("extremal capacity vectors approach the variance supremum") {
  SECTION("symmetric split is balanced") {
    const auto caps = extremal_capacities(0, 0.5, 1.0, 2);
    REQUIRE_THAT(caps[0], WithinRel(2.0, 1e-14));
    REQUIRE_THAT(caps[1], WithinRel(2.0, 1e-14));
    REQUIRE(x_moments(caps).var <= 1e-30);
  }

  SECTION("variance climbs toward the bound as a -> 1") {
    const double gamma = 3.0;
    const std::size_t k = 10;
    const double upper = var_x_bounds(gamma, k).second;
    double prev = -1.0;
    for (double a : {0.9, 0.99, 0.999}) {
      const auto caps = extremal_capacities(0, a, gamma, k);
      const XMoments m = x_moments(caps);
      REQUIRE_THAT(m.m1, WithinRel(gamma / static_cast<double>(k), 1e-13));
      REQUIRE(m.var > prev);
      REQUIRE(m.var < upper);
      prev = m.var;
    }
    // a = 0.99: exact arithmetic gives 0.9 * (0.9801 + 0.0001/9) - 0.09 = 0.7921.
    const auto caps99 = extremal_capacities(0, 0.99, gamma, k);
    REQUIRE_THAT(x_moments(caps99).var, WithinRel(0.7921, 1e-10));
    REQUIRE(prev > 0.995 * upper);
  }

  SECTION("parameter validation") {
    REQUIRE_THROWS_MATCHES(extremal_capacities(0, 1.0, 3.0, 10), Error,
                           Catch::Matchers::Predicate<Error>([](const Error& e) {
                             return e.code() == errc::parameter_out_of_range;
                           }));
    REQUIRE_THROWS_MATCHES(extremal_capacities(10, 0.5, 3.0, 10), Error,
                           Catch::Matchers::Predicate<Error>([](const Error& e) {
                             return e.code() == errc::parameter_out_of_range;
                           }));
  }
}

TEST_CASE("pair-sum identity against brute force") {
  SECTION("K=2 collapses to zero") {
    const CapacityVector caps{{3.0, 7.0}};
    const auto c = identity_sigma_k(caps, 0);
    REQUIRE(c.closed == 0.0);
    REQUIRE(c.brute == 0.0);
  }

  SECTION("K=3 hand enumeration") {
    const CapacityVector caps{{1.0, 2.0, 4.0}};
    const auto c = identity_sigma_k(caps, 0);
    REQUIRE_THAT(c.brute, WithinRel(0.75, 1e-15));
    REQUIRE_THAT(c.closed, WithinRel(0.75, 1e-15));
  }

  SECTION("random vectors") {
    RngStream rng(560, 0);
    for (int trial = 0; trial < 100; ++trial) {
      const auto caps = random_caps(rng, 8);
      for (std::size_t k = 0; k < 8; ++k) {
        const auto c = identity_sigma_k(caps, k);
        REQUIRE_THAT(c.brute, WithinRel(c.closed, 1e-12));
      }
    }
  }
}

TEST_CASE("disjoint-pair identity and the derived constant") {
  SECTION("K=3 collapses to zero") {
    const CapacityVector caps{{1.0, 2.0, 4.0}};
    const auto c = identity_h_kl(caps, 0, 1);
    REQUIRE(c.closed == 0.0);
    REQUIRE(c.brute == 0.0);
  }

  SECTION("K=4 hand enumeration") {
    const CapacityVector caps{{1.0, 2.0, 4.0, 8.0}};
    const auto c = identity_h_kl(caps, 0, 1);
    REQUIRE_THAT(c.brute, WithinRel(0.375, 1e-15));
    REQUIRE_THAT(c.closed, WithinRel(0.375, 1e-15));
  }

  SECTION("random vectors, all ordered pairs, K up to 8") {
    RngStream rng(561, 0);
    for (int trial = 0; trial < 60; ++trial) {
      const std::size_t k = 2 + rng.uniform_index(7);
      const auto caps = random_caps(rng, k);
      for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
          if (i == j) continue;
          const auto c = identity_h_kl(caps, i, j);
          const double scale = gamma_sum(caps) * static_cast<double>(k);
          REQUIRE(std::abs(c.brute - c.closed) <= 1e-12 * scale);
          REQUIRE(std::abs(c.sigma_kl_from_brute - c.sigma_kl_closed) <= 1e-12 * scale);
        }
      }
    }
  }
}
