// Acceptance suite: runs every gating criterion end to end and prints one
// PASS/FAIL line each. Usage: acceptance <path-to-cli-binary>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sq2lt/analytics.hpp"
#include "sq2lt/config_text.hpp"
#include "sq2lt/des.hpp"
#include "sq2lt/scenarios.hpp"
#include "sq2lt/tagged.hpp"

namespace {

using namespace sq2lt;
namespace fs = std::filesystem;

int g_failures = 0;
std::string g_cli;
fs::path g_tmp;

void report(int number, const std::string& label, bool pass, double seconds,
            const std::string& detail = "") {
  std::printf("[%s] A%-2d %-38s (%.2f s)%s%s\n", pass ? "PASS" : "FAIL", number, label.c_str(),
              seconds, detail.empty() ? "" : " ", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

void criterion(int number, const std::string& label, const std::function<bool(std::string&)>& fn) {
  const auto start = std::chrono::steady_clock::now();
  std::string detail;
  bool pass = false;
  try {
    pass = fn(detail);
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  report(number, label, pass, seconds, detail);
}

int run_cli(const std::string& args) {
  const std::string cmd = g_cli + " " + args + " 2>>" + (g_tmp / "cli.log").string();
  return std::system(cmd.c_str());
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  out << content;
}

CapacityVector scenario1_caps() { return CapacityVector{{2, 2, 2, 2, 2, 10, 10, 10, 10, 10}}; }

std::vector<ServiceDistribution> four_families() {
  return {ServiceDistribution::hyperexponential({1.0 / 3.0, 2.0 / 3.0}, {0.5, 2.0}),
          ServiceDistribution::exponential(1.0),
          ServiceDistribution::weibull(2.0, 1.1283791670955126),
          ServiceDistribution::deterministic(1.0)};
}

const char* family_label(int i) {
  switch (i) {
    case 0: return "hyper";
    case 1: return "exp";
    case 2: return "weibull";
    default: return "det";
  }
}

bool a1_closed_form(std::string& detail) {
  const fs::path out1 = g_tmp / "a1_s1.json";
  const auto start = std::chrono::steady_clock::now();
  if (run_cli("analyze --config scenario1 --out " + out1.string()) != 0) {
    detail = "analyze scenario1 failed";
    return false;
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const auto doc1 = nlohmann::json::parse(read_file(out1));
  const double r0 = doc1["r0"].get<double>();
  const double r1 = doc1["r1"].get<double>();
  char printed[16];
  std::snprintf(printed, sizeof printed, "%.4f", r0);

  const fs::path out2 = g_tmp / "a1_s2.json";
  if (run_cli("analyze --config scenario2 --out " + out2.string()) != 0) {
    detail = "analyze scenario2 failed";
    return false;
  }
  const double r1_s2 = nlohmann::json::parse(read_file(out2))["r1"].get<double>();

  std::ostringstream d;
  d << "r0=" << r0 << " r1=" << r1 << " r1(s2)=" << r1_s2;
  detail = d.str();
  return std::abs(r0 - 0.3) <= 1e-13 && std::string(printed) == "0.3000" &&
         std::abs(r1 - (-0.04 / 9.0)) <= 1e-12 && std::abs(r1_s2 - (-0.04 / 99.0)) <= 1e-8 &&
         elapsed < 1.0;
}

bool a2_homogeneous(std::string& detail) {
  RngStream rng(20240901, 0);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t k = 2 + rng.uniform_index(63);
    const double c = 0.05 + 50.0 * rng.u01();
    const CapacityVector caps{std::vector<double>(k, c)};
    const double r0 = r_zero(caps, 1.0);
    worst = std::max(worst, std::abs(r_prime(caps, 1.0)) / r0);
    worst = std::max(worst, std::abs(r_double_prime(caps, 1.0)) / r0);
  }
  detail = "max residue/r0 = " + std::to_string(worst);
  return worst <= 1e-15;
}

bool a3_quadrature(std::string& detail) {
  const std::vector<CapacityVector> cap_sets = {scenario1_caps(), CapacityVector{{1.0, 2.0}}};
  double worst1 = 0.0, worst2 = 0.0;
  for (const auto& caps : cap_sets) {
    for (const auto& dist : four_families()) {
      const double mean = dist.moment(1);
      const double q1 = first_derivative_quadrature(caps, dist, 1e-9);
      const double c1 = r_prime(caps, mean);
      worst1 = std::max(worst1, std::abs(q1 - c1) / std::abs(c1));
      const double q2 = second_derivative_quadrature(caps, dist, 1e-7);
      const double c2 = r_double_prime(caps, mean);
      worst2 = std::max(worst2, std::abs(q2 - c2) / std::abs(c2));
    }
  }
  std::ostringstream d;
  d << "max rel err: first " << worst1 << ", second " << worst2;
  detail = d.str();
  return worst1 <= 1e-6 && worst2 <= 1e-3;
}

bool a4_monte_carlo(std::string& detail) {
  const auto caps = scenario1_caps();
  const auto dists = four_families();
  struct Cell {
    int family;
    int n;
    double s, t;
  };
  // 20 cells over the four families, spanning: no prior job, a prior job in
  // the future / past, and the two-job regimes 0 < s < t, s < 0 < t,
  // s < t < 0 at several depths.
  const std::vector<Cell> cells = {
      {1, 0, 0, 0},          {1, 1, 0, -0.31},       {1, 2, 0.41, 1.13},
      {1, 2, -0.61, -0.27},  {1, 2, -2.09, -0.97},   {0, 1, 0, 1.3},
      {0, 1, 0, -0.89},      {0, 2, -0.53, 0.91},    {0, 2, -0.19, -0.06},
      {0, 2, -1.51, -0.73},  {2, 0, 0, 0},           {2, 1, 0, -0.07},
      {2, 2, -0.53, 0.91},   {2, 2, -1.13, -0.57},   {2, 2, -0.97, -0.13},
      {3, 1, 0, 1.3},        {3, 1, 0, -2.03},       {3, 2, 0.41, 1.13},
      {3, 2, -0.37, -0.11},  {3, 2, -1.73, -0.29}};
  const long long samples = 1'000'000;
  int hits = 0;
  std::uint64_t stream = 0;
  for (const auto& cell : cells) {
    const auto& dist = dists[cell.family];
    double closed = 0.0;
    TaggedScenario scn = TaggedScenario::none(caps, dist);
    if (cell.n == 0) {
      closed = r_zero(caps, dist.moment(1));
    } else if (cell.n == 1) {
      closed = rhat1(cell.t, caps, dist);
      scn = TaggedScenario::one(cell.t, caps, dist);
    } else {
      closed = rhat2(cell.s, cell.t, caps, dist);
      scn = TaggedScenario::two(cell.s, cell.t, caps, dist);
    }
    const auto mc = mc_tagged_response(scn, samples, 77001, stream, 1);
    stream += 1'000'000;
    const double stderr_est = mc.assign_only.half_width_95 / 1.959963984540054;
    if (std::abs(mc.assign_only.mean - closed) <= 3.0 * stderr_est) ++hits;
  }
  detail = std::to_string(hits) + "/20 cells within 3 stderr";
  return hits >= 18;
}

bool a5_identities(std::string& detail) {
  RngStream rng(31337, 0);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t k = 2 + rng.uniform_index(7);
    std::vector<double> values(k);
    for (auto& v : values) v = 0.2 + 9.0 * rng.u01();
    const CapacityVector caps{std::move(values)};
    const double scale = gamma_sum(caps) * static_cast<double>(k);
    for (std::size_t i = 0; i < k; ++i) {
      const auto c = identity_sigma_k(caps, i);
      worst = std::max(worst, std::abs(c.closed - c.brute) / scale);
      for (std::size_t j = 0; j < k; ++j) {
        if (i == j) continue;
        const auto h = identity_h_kl(caps, i, j);
        worst = std::max(worst, std::abs(h.closed - h.brute) / scale);
        worst = std::max(worst, std::abs(h.sigma_kl_closed - h.sigma_kl_from_brute) / scale);
      }
    }
  }
  detail = "max rel err = " + std::to_string(worst);
  return worst <= 1e-12;
}

bool a6_variance_bounds(std::string& detail) {
  const double gamma = 3.0;
  const std::size_t k = 10;
  const double upper = var_x_bounds(gamma, k).second;
  if (std::abs(upper - 0.81) > 1e-14) return false;

  const CapacityVector balanced{std::vector<double>(k, static_cast<double>(k) / gamma)};
  if (x_moments(balanced).var != 0.0) {
    detail = "balanced vector has nonzero variance";
    return false;
  }

  double prev = -1.0;
  double last = 0.0;
  for (double a : {0.9, 0.99, 0.999}) {
    const auto caps = extremal_capacities(0, a, gamma, k);
    const double var = x_moments(caps).var;
    if (!(var > prev) || !(var < upper)) {
      detail = "variance not strictly increasing below the bound";
      return false;
    }
    prev = var;
    last = var;
  }
  std::ostringstream d;
  d << "var(a=0.999) = " << last << " vs bound " << upper;
  detail = d.str();
  return (upper - last) / upper <= 0.005;
}

bool a7_pk_oracle(std::string& detail) {
  struct Case {
    ServiceDistribution dist;
    double reference;
    const char* name;
  };
  const std::vector<Case> cases = {
      {ServiceDistribution::exponential(1.0), 2.0, "M/M/1"},
      {ServiceDistribution::deterministic(1.0), 1.5, "M/D/1"},
      {ServiceDistribution::hyperexponential({1.0 / 3.0, 2.0 / 3.0}, {0.5, 2.0}), 2.5, "M/H2/1"}};
  std::ostringstream d;
  bool ok = true;
  int idx = 0;
  for (const auto& c : cases) {
    ScenarioSpec spec;
    spec.capacities = {1.0};
    spec.distribution = c.dist;
    spec.d = 1;
    spec.lambda_grid = {0.5};
    spec.runs = 10;
    spec.busy_periods_per_run = 10000;
    spec.seed = 5100 + idx++;
    const auto est = simulate(validate_scenario(spec), 0.5);
    const double tol = std::max(est.half_width_95, 0.02 * c.reference);
    if (std::abs(est.mean_response - c.reference) > tol) ok = false;
    d << c.name << "=" << est.mean_response << " ";
  }
  detail = d.str();
  return ok;
}

struct SweepData {
  std::vector<std::vector<SimEstimate>> per_family;
};

SweepData g_sweeps;  // filled by A8, reused by A9

bool a8_non_monotonicity(std::string& detail) {
  const char* names[] = {"scenario1_hyper", "scenario1", "scenario1_weibull", "scenario1_det"};
  bool ok = true;
  std::ostringstream d;
  for (int i = 0; i < 4; ++i) {
    const auto scn = parse_config_text(*bundled_scenario_text(names[i]));
    g_sweeps.per_family.push_back(sweep(scn, 1));
    bool dips_below = false;
    double best_upper = 1e9;
    for (const auto& est : g_sweeps.per_family.back()) {
      const double upper = est.mean_response + est.half_width_95;
      best_upper = std::min(best_upper, upper);
      if (upper < 0.3) dips_below = true;
    }
    d << family_label(i) << " min upper CL=" << best_upper << " ";
    if (!dips_below) ok = false;
  }
  detail = d.str();
  return ok;
}

bool a9_insensitivity(std::string& detail) {
  if (g_sweeps.per_family.size() != 4) {
    detail = "sweep data missing (A8 did not run)";
    return false;
  }
  std::ostringstream d;
  bool ok = true;
  for (int i = 0; i < 4; ++i) {
    const auto& e = g_sweeps.per_family[i][0];
    d << family_label(i) << "=" << e.mean_response << "+/-" << e.half_width_95 << " ";
  }
  for (int i = 0; i < 4 && ok; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      const auto& a = g_sweeps.per_family[i][0];
      const auto& b = g_sweeps.per_family[j][0];
      if (std::abs(a.mean_response - b.mean_response) > a.half_width_95 + b.half_width_95) {
        ok = false;
        break;
      }
    }
  }
  detail = d.str();
  return ok;
}

bool a10_determinism(std::string& detail) {
  const fs::path cfg = g_tmp / "a10.cfg";
  write_file(cfg,
             "capacities = [1, 2, 3, 4]\n"
             "distribution = { family = \"exponential\", rate = 1 }\n"
             "lambda_grid = [0.5, 1]\nruns = 4\nbusy_periods_per_run = 2000\nseed = 7\n");

  const auto repeat = [&](const std::string& base, const std::string& out_a,
                          const std::string& out_b) {
    if (run_cli(base + " --workers 1 --out " + (g_tmp / out_a).string()) != 0) return false;
    if (run_cli(base + " --workers 4 --out " + (g_tmp / out_b).string()) != 0) return false;
    const auto a = read_file(g_tmp / out_a);
    return !a.empty() && a == read_file(g_tmp / out_b);
  };

  if (!repeat("sweep --config " + cfg.string(), "sweep_a.csv", "sweep_b.csv")) {
    detail = "sweep outputs differ across worker counts";
    return false;
  }
  if (read_file(g_tmp / "sweep_a_app.csv") != read_file(g_tmp / "sweep_b_app.csv") ||
      read_file(g_tmp / "sweep_a_app.csv").empty()) {
    detail = "companion csv differs";
    return false;
  }
  if (!repeat("analyze --config " + cfg.string(), "an_a.json", "an_b.json")) {
    detail = "analyze outputs differ";
    return false;
  }
  if (!repeat("verify --config " + cfg.string() + " --samples 20000", "ver_a.json",
              "ver_b.json")) {
    detail = "verify outputs differ across worker counts";
    return false;
  }
  detail = "sweep, analyze, verify byte-identical for workers 1 vs 4";
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: acceptance <cli-binary>\n");
    return 2;
  }
  g_cli = argv[1];
  g_tmp = fs::temp_directory_path() / "sq2lt_acceptance";
  fs::create_directories(g_tmp);

  criterion(1, "closed-form reproduction", a1_closed_form);
  criterion(2, "homogeneous degeneracy", a2_homogeneous);
  criterion(3, "quadrature vs closed form", a3_quadrature);
  criterion(4, "monte carlo vs closed form", a4_monte_carlo);
  criterion(5, "identity suite", a5_identities);
  criterion(6, "variance-bound suite", a6_variance_bounds);
  criterion(7, "single-server external oracle", a7_pk_oracle);
  criterion(8, "non-monotonic light traffic", a8_non_monotonicity);
  criterion(9, "light-traffic insensitivity", a9_insensitivity);
  criterion(10, "determinism across workers", a10_determinism);

  if (g_failures == 0) {
    std::printf("all acceptance criteria passed\n");
  } else {
    std::printf("%d acceptance criteria FAILED\n", g_failures);
  }
  return g_failures;
}
