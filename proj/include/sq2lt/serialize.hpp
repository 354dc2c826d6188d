#pragma once

#include <charconv>
#include <string>
#include <vector>

#include <json.hpp>

#include "sq2lt/analytics.hpp"
#include "sq2lt/des.hpp"
#include "sq2lt/stats.hpp"

namespace sq2lt {

using json = nlohmann::ordered_json;

inline json to_json(const XMoments& m) {
  return json{{"m1", m.m1}, {"m2", m.m2}, {"m3", m.m3}, {"var", m.var}};
}

inline json to_json(const LtDerivatives& d) {
  return json{{"r0", d.r0},
              {"r1", d.r1},
              {"r2", d.r2},
              {"gamma", gamma_sum(d.capacities)},
              {"x_moments", to_json(x_moments(d.capacities))}};
}

inline json to_json(const SimEstimate& e) {
  return json{{"lambda", e.lambda},
              {"mean_response", e.mean_response},
              {"half_width_95", e.half_width_95},
              {"runs", e.runs},
              {"busy_periods_per_run", e.busy_periods_per_run},
              {"total_jobs", e.total_jobs},
              {"seed", e.seed}};
}

// Locale-independent shortest round-trip formatting; all CSV artifacts go
// through here.
inline std::string format_double(double x) {
  char buf[40];
  auto rc = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, rc.ptr);
}

inline std::string sweep_csv(const std::vector<SimEstimate>& estimates) {
  std::string out = "lambda,mean_response,half_width_95,runs,busy_periods_per_run,total_jobs,seed\n";
  for (const auto& e : estimates) {
    out += format_double(e.lambda) + ',' + format_double(e.mean_response) + ',' +
           format_double(e.half_width_95) + ',' + std::to_string(e.runs) + ',' +
           std::to_string(e.busy_periods_per_run) + ',' + std::to_string(e.total_jobs) + ',' +
           std::to_string(e.seed) + '\n';
  }
  return out;
}

inline std::string approx_csv(const LtDerivatives& d, const std::vector<double>& lambda_grid) {
  std::string out = "lambda,r_app\n";
  for (double l : lambda_grid) {
    out += format_double(l) + ',' + format_double(lt_approx(d, l)) + '\n';
  }
  return out;
}

}  // namespace sq2lt
