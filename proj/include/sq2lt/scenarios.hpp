#pragma once

#include <optional>
#include <span>
#include <string_view>

namespace sq2lt {

// The bundled experiment configs, embedded so the CLI can list and
// materialize them anywhere (`scenarios --write DIR`) and accept them by
// name via --config. The copies under configs/ in the repository hold the
// same bytes; a test keeps them in sync.
struct BundledScenario {
  std::string_view name;
  std::string_view summary;
  std::string_view text;
};

namespace detail {

inline constexpr std::string_view kScenario1 = R"(# Scenario 1: ten heterogeneous servers, five slow (2 bytes/s) and five
# fast (10 bytes/s), two-choice assignment, unit-mean exponential
# service requirements.
capacities = [2, 2, 2, 2, 2, 10, 10, 10, 10, 10]
distribution = { family = "exponential", rate = 1 }
d = 2
lambda_grid = [0.25, 0.5, 1, 2, 3, 4, 5, 6]
runs = 10
busy_periods_per_run = 100000
seed = 101
)";

inline constexpr std::string_view kScenario1Hyper = R"(# Scenario 1 capacities with unit-mean hyperexponential service
# requirements (CV ~ 1.4): Exp(1/2) w.p. 1/3, Exp(2) w.p. 2/3.
capacities = [2, 2, 2, 2, 2, 10, 10, 10, 10, 10]
distribution = { family = "hyperexponential", weights = [0.3333333333333333, 0.6666666666666667], rates = [0.5, 2] }
d = 2
lambda_grid = [0.25, 0.5, 1, 2, 3, 4, 5, 6]
runs = 10
busy_periods_per_run = 100000
seed = 102
)";

inline constexpr std::string_view kScenario1Weibull = R"(# Scenario 1 capacities with unit-mean Weibull service requirements
# (shape 2, scale 2/sqrt(pi), CV ~ 0.52).
capacities = [2, 2, 2, 2, 2, 10, 10, 10, 10, 10]
distribution = { family = "weibull", shape = 2, scale = 1.1283791670955126 }
d = 2
lambda_grid = [0.25, 0.5, 1, 2, 3, 4, 5, 6]
runs = 10
busy_periods_per_run = 100000
seed = 103
)";

inline constexpr std::string_view kScenario1Det = R"(# Scenario 1 capacities with deterministic unit service requirements (CV 0).
capacities = [2, 2, 2, 2, 2, 10, 10, 10, 10, 10]
distribution = { family = "deterministic", value = 1 }
d = 2
lambda_grid = [0.25, 0.5, 1, 2, 3, 4, 5, 6]
runs = 10
busy_periods_per_run = 100000
seed = 104
)";

inline constexpr std::string_view kScenario2 = R"(# Scenario 2: one hundred servers, fifty slow (2 bytes/s) and fifty fast
# (10 bytes/s), two-choice assignment, unit-mean exponential service
# requirements.
capacities = [2, 2, 2, 2, 2, 2, 2, 2, 2, 2,
              2, 2, 2, 2, 2, 2, 2, 2, 2, 2,
              2, 2, 2, 2, 2, 2, 2, 2, 2, 2,
              2, 2, 2, 2, 2, 2, 2, 2, 2, 2,
              2, 2, 2, 2, 2, 2, 2, 2, 2, 2,
              10, 10, 10, 10, 10, 10, 10, 10, 10, 10,
              10, 10, 10, 10, 10, 10, 10, 10, 10, 10,
              10, 10, 10, 10, 10, 10, 10, 10, 10, 10,
              10, 10, 10, 10, 10, 10, 10, 10, 10, 10,
              10, 10, 10, 10, 10, 10, 10, 10, 10, 10]
distribution = { family = "exponential", rate = 1 }
d = 2
lambda_grid = [0.5, 1, 2, 4, 8, 12]
runs = 10
busy_periods_per_run = 100000
seed = 201
)";

inline constexpr std::string_view kScenario3 = R"(# Scenario 3: ten homogeneous servers of capacity 10 bytes/s, two-choice
# assignment, unit-mean exponential service requirements.
capacities = [10, 10, 10, 10, 10, 10, 10, 10, 10, 10]
distribution = { family = "exponential", rate = 1 }
d = 2
lambda_grid = [0.5, 1, 2, 4, 8, 16]
runs = 10
busy_periods_per_run = 100000
seed = 301
)";

inline constexpr BundledScenario kBundled[] = {
    {"scenario1", "K=10 (5 slow / 5 fast), exponential service", kScenario1},
    {"scenario1_hyper", "K=10 (5 slow / 5 fast), hyperexponential service", kScenario1Hyper},
    {"scenario1_weibull", "K=10 (5 slow / 5 fast), Weibull service", kScenario1Weibull},
    {"scenario1_det", "K=10 (5 slow / 5 fast), deterministic service", kScenario1Det},
    {"scenario2", "K=100 (50 slow / 50 fast), exponential service", kScenario2},
    {"scenario3", "K=10 homogeneous, exponential service", kScenario3},
};

}  // namespace detail

inline std::span<const BundledScenario> bundled_scenarios() { return detail::kBundled; }

inline std::optional<std::string_view> bundled_scenario_text(std::string_view name) {
  for (const auto& s : detail::kBundled) {
    if (s.name == name) return s.text;
  }
  return std::nullopt;
}

}  // namespace sq2lt
