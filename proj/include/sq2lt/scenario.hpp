#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "sq2lt/capacity.hpp"
#include "sq2lt/distribution.hpp"
#include "sq2lt/errors.hpp"

namespace sq2lt {

// Validated experiment description: capacities, service distribution, choice
// count d, arrival-rate grid, and the replication protocol. Immutable after
// validation and safe to share across worker threads.
struct ScenarioConfig {
  CapacityVector capacities;
  ServiceDistribution distribution;
  int d = 2;
  std::vector<double> lambda_grid;
  int runs = 10;
  long long busy_periods_per_run = 100000;
  std::uint64_t seed = 1;

  bool operator==(const ScenarioConfig& o) const {
    return capacities == o.capacities && distribution == o.distribution && d == o.d &&
           lambda_grid == o.lambda_grid && runs == o.runs &&
           busy_periods_per_run == o.busy_periods_per_run && seed == o.seed;
  }
};

// Raw, pre-validation form as read from a config file. Unset fields fall back
// to the defaults: d = 2, runs = 10, busy_periods_per_run = 1e5, seed = 1.
struct ScenarioSpec {
  std::vector<double> capacities;
  std::optional<ServiceDistribution> distribution;
  std::optional<int> d;
  std::vector<double> lambda_grid;
  std::optional<int> runs;
  std::optional<long long> busy_periods_per_run;
  std::optional<std::uint64_t> seed;
};

inline ScenarioConfig validate_scenario(const ScenarioSpec& spec) {
  CapacityVector caps(spec.capacities);  // throws InvalidCapacity
  require(spec.distribution.has_value(), errc::invalid_field, "distribution is required");
  const int d = spec.d.value_or(2);
  require(d >= 1 && static_cast<std::size_t>(d) <= caps.size(), errc::invalid_choice_count,
          "d must satisfy 1 <= d <= K");
  require(!spec.lambda_grid.empty(), errc::empty_lambda_grid, "lambda_grid must be non-empty");
  for (double l : spec.lambda_grid) {
    require(l > 0 && std::isfinite(l), errc::invalid_field, "lambda values must be positive");
  }
  const int runs = spec.runs.value_or(10);
  require(runs >= 1, errc::invalid_field, "runs must be >= 1");
  const long long bp = spec.busy_periods_per_run.value_or(100000);
  require(bp >= 1, errc::invalid_field, "busy_periods_per_run must be >= 1");
  return ScenarioConfig{std::move(caps), *spec.distribution, d,          spec.lambda_grid,
                        runs,            bp,                 spec.seed.value_or(1)};
}

}  // namespace sq2lt
