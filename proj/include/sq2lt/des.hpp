#pragma once

#include <cmath>
#include <cstdint>
#include <deque>
#include <queue>
#include <span>
#include <vector>

#include "sq2lt/errors.hpp"
#include "sq2lt/parallel.hpp"
#include "sq2lt/rng.hpp"
#include "sq2lt/scenario.hpp"
#include "sq2lt/stats.hpp"

namespace sq2lt {

struct SimEstimate {
  double lambda = 0.0;
  double mean_response = 0.0;
  double half_width_95 = 0.0;
  int runs = 0;
  long long busy_periods_per_run = 0;
  long long total_jobs = 0;
  std::uint64_t seed = 0;
};

struct SimOptions {
  long long event_cap_per_cycle = 100'000'000;
};

/// Index with the fewest jobs in system among the sampled candidates; ties
/// are broken uniformly (single-pass reservoir over the minimizers).
inline std::size_t assign_server(std::span<const int> counts,
                                 std::span<const std::size_t> candidates, RngStream& rng) {
  std::size_t best = candidates[0];
  int best_count = counts[best];
  std::uint64_t ties = 1;
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    const std::size_t cand = candidates[i];
    if (counts[cand] < best_count) {
      best = cand;
      best_count = counts[cand];
      ties = 1;
    } else if (counts[cand] == best_count) {
      ++ties;
      if (rng.uniform_index(ties) == 0) best = cand;
    }
  }
  return best;
}

namespace detail {

struct Replication {
  double response_sum = 0.0;
  long long jobs = 0;
};

// One event-driven replication: runs `target_cycles` regeneration cycles from
// the empty state. Regeneration epochs are the instants the system empties;
// FCFS within each server, non-preemptive, so the in-service job's departure
// time is fixed when service starts.
inline Replication run_replication(const ScenarioConfig& scn, double lambda, RngStream& rng,
                                   const SimOptions& opt) {
  const auto& caps = scn.capacities.values();
  const std::size_t k = caps.size();
  const std::size_t d = static_cast<std::size_t>(scn.d);

  struct Queued {
    double arrival;
    double size;
  };
  std::vector<std::deque<Queued>> fifo(k);
  std::vector<int> counts(k, 0);
  // Pending departures, one per busy server: (time, server). Arrivals exist
  // one at a time as a scalar; a departure at the same timestamp as the next
  // arrival is processed first, so the arrival samples post-departure counts.
  using Departure = std::pair<double, std::size_t>;
  std::priority_queue<Departure, std::vector<Departure>, std::greater<>> departures;

  SubsetSampler subset(k);
  std::vector<std::size_t> candidates;

  Replication rep;
  long long cycles = 0;
  long long in_system = 0;
  long long cycle_arrivals = 0;
  long long cycle_departures = 0;
  long long cycle_events = 0;
  double now = 0.0;
  double next_arrival = exponential_variate(rng, lambda);

  while (cycles < scn.busy_periods_per_run) {
    const bool depart_next = !departures.empty() && departures.top().first <= next_arrival;
    if (++cycle_events > opt.event_cap_per_cycle) {
      fail(errc::degenerate_run, "cycle exceeded event cap at lambda=" + std::to_string(lambda));
    }
    if (depart_next) {
      const auto [time, server] = departures.top();
      departures.pop();
      if (time < now) fail(errc::internal_check_failed, "event time went backwards");
      now = time;
      const Queued job = fifo[server].front();
      fifo[server].pop_front();
      rep.response_sum += now - job.arrival;
      ++rep.jobs;
      ++cycle_departures;
      --counts[server];
      --in_system;
      if (counts[server] != static_cast<int>(fifo[server].size())) {
        fail(errc::internal_check_failed, "job count out of sync with queue");
      }
      if (!fifo[server].empty()) {
        departures.emplace(now + fifo[server].front().size / caps[server], server);
      }
      if (in_system == 0) {
        if (cycle_arrivals != cycle_departures) {
          fail(errc::internal_check_failed, "cycle job conservation violated");
        }
        ++cycles;
        cycle_arrivals = cycle_departures = 0;
        cycle_events = 0;
      }
    } else {
      if (next_arrival < now) fail(errc::internal_check_failed, "event time went backwards");
      now = next_arrival;
      if (d == 2) {
        candidates.resize(2);
        sample_pair(rng, k, candidates[0], candidates[1]);
      } else {
        subset.sample(rng, d, candidates);
      }
      const std::size_t server = assign_server(counts, candidates, rng);
      const double size = scn.distribution.sample(rng);
      fifo[server].push_back({now, size});
      if (counts[server] == 0) {
        departures.emplace(now + size / caps[server], server);
      }
      ++counts[server];
      ++in_system;
      ++cycle_arrivals;
      next_arrival = now + exponential_variate(rng, lambda);
    }
  }
  return rep;
}

}  // namespace detail

/// Regenerative estimate of the stationary mean response time at one arrival
/// rate: `runs` independent replications, each the ratio estimator
/// sum(responses)/sum(jobs) over its busy periods; the across-run 95% interval
/// uses the Student-t quantile with runs-1 degrees of freedom.
inline SimEstimate simulate(const ScenarioConfig& scn, double lambda,
                            std::uint64_t stream_base = 0, unsigned workers = 1,
                            const SimOptions& opt = {}) {
  require(lambda > 0 && std::isfinite(lambda), errc::invalid_field, "lambda must be positive");
  std::vector<detail::Replication> reps(static_cast<std::size_t>(scn.runs));
  parallel_for_index(reps.size(), workers, [&](std::size_t r) {
    RngStream rng(scn.seed, stream_base + r);
    reps[r] = detail::run_replication(scn, lambda, rng, opt);
  });

  RunningStat run_means;
  long long total_jobs = 0;
  for (const auto& rep : reps) {
    run_means.add(rep.response_sum / static_cast<double>(rep.jobs));
    total_jobs += rep.jobs;
  }
  SimEstimate est;
  est.lambda = lambda;
  est.mean_response = run_means.mean();
  // A single run carries no spread information; the interval is reported as 0.
  est.half_width_95 = scn.runs >= 2 ? student_t_975(scn.runs - 1) * run_means.std_error() : 0.0;
  est.runs = scn.runs;
  est.busy_periods_per_run = scn.busy_periods_per_run;
  est.total_jobs = total_jobs;
  est.seed = scn.seed;
  return est;
}

/// One estimate per grid point, in grid order; each lambda owns a disjoint
/// block of RNG streams so estimates are independent and reproducible.
inline std::vector<SimEstimate> sweep(const ScenarioConfig& scn, unsigned workers = 1,
                                      const SimOptions& opt = {}) {
  require(!scn.lambda_grid.empty(), errc::empty_lambda_grid, "lambda_grid must be non-empty");
  std::vector<SimEstimate> out;
  out.reserve(scn.lambda_grid.size());
  for (std::size_t i = 0; i < scn.lambda_grid.size(); ++i) {
    out.push_back(simulate(scn, scn.lambda_grid[i],
                           static_cast<std::uint64_t>(i) * static_cast<std::uint64_t>(scn.runs),
                           workers, opt));
  }
  return out;
}

/// Pollaczek-Khinchine mean response time for a single FCFS server of the
/// given capacity: E[S] + lambda E[S^2] / (2 (1 - rho)) with S = sigma/C.
/// External oracle for the simulator.
inline double mg1_reference(double lambda, const ServiceDistribution& dist, double capacity) {
  require(lambda > 0 && capacity > 0, errc::non_positive_parameter,
          "lambda and capacity must be positive");
  const double es = dist.moment(1) / capacity;
  const double es2 = dist.moment(2) / (capacity * capacity);
  const double rho = lambda * es;
  require(rho < 1.0, errc::unstable_load, "rho >= 1");
  return es + lambda * es2 / (2.0 * (1.0 - rho));
}

}  // namespace sq2lt
