// Command-line front end: closed-form light-traffic analysis, oracle
// cross-checks, and the event-driven SQ(d) simulator, driven by scenario
// config files. Machine-readable artifacts go to stdout or --out; diagnostics
// go to stderr.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sq2lt/analytics.hpp"
#include "sq2lt/config_text.hpp"
#include "sq2lt/des.hpp"
#include "sq2lt/errors.hpp"
#include "sq2lt/scenarios.hpp"
#include "sq2lt/serialize.hpp"
#include "sq2lt/verify.hpp"

namespace {

// Exit codes: 0 success, 2 parse (CLI or config), 3 validation,
// 4 verification failed, 5 runtime (quadrature / degenerate run), 1 other.
constexpr int kExitParse = 2;
constexpr int kExitValidation = 3;
constexpr int kExitVerifyFailed = 4;
constexpr int kExitRuntime = 5;

int exit_code_for(const sq2lt::Error& e) {
  switch (e.code()) {
    case sq2lt::errc::parse_error:
    case sq2lt::errc::file_not_found:
      return kExitParse;
    case sq2lt::errc::quadrature_nonconvergence:
    case sq2lt::errc::degenerate_run:
    case sq2lt::errc::unstable_load:
    case sq2lt::errc::internal_check_failed:
      return kExitRuntime;
    default:
      return kExitValidation;
  }
}

struct CommonArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  unsigned workers = 1;
  std::string out;
  std::string format;
};

void add_common(CLI::App* cmd, CommonArgs& args, const char* default_format) {
  cmd->add_option("--config", args.config, "scenario config file or bundled scenario name")
      ->required();
  cmd->add_option("--seed", args.seed, "override the config seed");
  cmd->add_option("--workers", args.workers, "parallel worker cap (does not change output)");
  cmd->add_option("--out", args.out, "write the artifact to this file instead of stdout");
  args.format = default_format;
  cmd->add_option("--format", args.format, "output format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
}

sq2lt::ScenarioConfig load_config(const CommonArgs& args) {
  sq2lt::ScenarioConfig scn = [&] {
    if (!std::filesystem::exists(args.config)) {
      if (auto text = sq2lt::bundled_scenario_text(args.config)) {
        return sq2lt::parse_config_text(*text);
      }
    }
    return sq2lt::parse_config_file(args.config);
  }();
  if (args.seed) scn.seed = *args.seed;
  return scn;
}

void write_artifact(const CommonArgs& args, const std::string& content) {
  if (args.out.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream out(args.out, std::ios::binary);
  if (!out) sq2lt::fail(sq2lt::errc::file_not_found, "cannot open " + args.out);
  out << content;
}

std::string companion_path(const std::string& out) {
  std::filesystem::path p(out);
  std::filesystem::path q = p.parent_path() / (p.stem().string() + "_app" + p.extension().string());
  return q.string();
}

int cmd_analyze(const CommonArgs& args) {
  const auto scn = load_config(args);
  sq2lt::require(scn.d == 2, sq2lt::errc::invalid_field,
                 "the light-traffic derivatives apply to the two-choice policy (d = 2)");
  const auto derivs = sq2lt::lt_derivatives(scn.capacities, scn.distribution.moment(1));
  if (args.format == "csv") {
    write_artifact(args, sq2lt::approx_csv(derivs, scn.lambda_grid));
    return 0;
  }
  sq2lt::json doc = sq2lt::to_json(derivs);
  doc["mean_sigma"] = derivs.mean_sigma;
  sq2lt::json grid = sq2lt::json::array();
  for (double l : scn.lambda_grid) {
    grid.push_back(sq2lt::json{{"lambda", l}, {"value", sq2lt::lt_approx(derivs, l)}});
  }
  doc["r_app"] = std::move(grid);
  write_artifact(args, doc.dump(2) + "\n");
  return 0;
}

int cmd_verify(const CommonArgs& args, long long samples, double tol, double bias) {
  const auto scn = load_config(args);
  sq2lt::VerifyOptions opt;
  opt.mc_samples = samples;
  opt.quad_tol = tol;
  opt.workers = args.workers;
  opt.r_prime_bias = bias;
  const auto report = sq2lt::run_verify(scn, opt);
  sq2lt::json doc = sq2lt::to_json(report);
  doc["samples"] = samples;
  doc["seed"] = scn.seed;
  write_artifact(args, doc.dump(2) + "\n");
  int failed = 0;
  for (const auto& r : report.records) {
    if (!r.pass && !r.informational) ++failed;
  }
  std::cerr << "verify: " << report.records.size() << " checks, " << failed
            << " outside tolerance, overall " << (report.all_pass() ? "PASS" : "FAIL") << "\n";
  return report.all_pass() ? 0 : kExitVerifyFailed;
}

int cmd_simulate(const CommonArgs& args, std::optional<double> lambda) {
  const auto scn = load_config(args);
  const double l = lambda.value_or(scn.lambda_grid.front());
  const auto est = sq2lt::simulate(scn, l, 0, args.workers);
  if (args.format == "json") {
    write_artifact(args, sq2lt::to_json(est).dump(2) + "\n");
  } else {
    write_artifact(args, sq2lt::sweep_csv({est}));
  }
  return 0;
}

int cmd_sweep(const CommonArgs& args) {
  const auto scn = load_config(args);
  const auto estimates = sq2lt::sweep(scn, args.workers);
  // The quadratic approximation overlay only exists for the two-choice
  // policy; sweeps with other d omit it.
  std::optional<sq2lt::LtDerivatives> derivs;
  if (scn.d == 2 && scn.capacities.size() >= 2) {
    derivs = sq2lt::lt_derivatives(scn.capacities, scn.distribution.moment(1));
  }
  if (args.format == "json") {
    sq2lt::json doc;
    sq2lt::json est = sq2lt::json::array();
    for (const auto& e : estimates) est.push_back(sq2lt::to_json(e));
    doc["estimates"] = std::move(est);
    if (derivs) {
      sq2lt::json app = sq2lt::json::array();
      for (double l : scn.lambda_grid) {
        app.push_back(sq2lt::json{{"lambda", l}, {"value", sq2lt::lt_approx(*derivs, l)}});
      }
      doc["r_app"] = std::move(app);
    }
    write_artifact(args, doc.dump(2) + "\n");
    return 0;
  }
  write_artifact(args, sq2lt::sweep_csv(estimates));
  // Companion CSV of the quadratic approximation on the same grid, for
  // overlay plots; only written when the main artifact goes to a file.
  if (!args.out.empty() && derivs) {
    std::ofstream app(companion_path(args.out), std::ios::binary);
    if (!app) sq2lt::fail(sq2lt::errc::file_not_found, "cannot open companion csv");
    app << sq2lt::approx_csv(*derivs, scn.lambda_grid);
  }
  return 0;
}

int cmd_scenarios(const std::string& write_dir) {
  if (!write_dir.empty()) {
    std::filesystem::create_directories(write_dir);
    for (const auto& s : sq2lt::bundled_scenarios()) {
      std::filesystem::path p = std::filesystem::path(write_dir) / (std::string(s.name) + ".cfg");
      std::ofstream out(p, std::ios::binary);
      if (!out) sq2lt::fail(sq2lt::errc::file_not_found, "cannot write " + p.string());
      out << s.text;
      std::cerr << "wrote " << p.string() << "\n";
    }
    return 0;
  }
  for (const auto& s : sq2lt::bundled_scenarios()) {
    std::cout << s.name << "\t" << s.summary << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Light-traffic analysis and simulation of two-choice load balancing "
               "with heterogeneous FCFS servers"};
  app.require_subcommand(1);

  CommonArgs analyze_args, verify_args, simulate_args, sweep_args;
  long long verify_samples = 1'000'000;
  double verify_tol = 1e-9;
  std::optional<double> simulate_lambda;
  std::string scenarios_write_dir;

  auto* analyze = app.add_subcommand("analyze", "closed-form derivatives and R_App grid");
  add_common(analyze, analyze_args, "json");

  auto* verify = app.add_subcommand("verify", "identity, quadrature, and Monte-Carlo cross-checks");
  add_common(verify, verify_args, "json");
  verify->add_option("--samples", verify_samples, "Monte-Carlo samples per check")
      ->check(CLI::Range(static_cast<long long>(10'000), static_cast<long long>(1'000'000'000)));
  verify->add_option("--tol", verify_tol, "quadrature relative tolerance");
  double verify_bias = 0.0;
  verify->add_option("--inject-r-prime-bias", verify_bias,
                     "corrupt the closed-form first derivative (negative-control hook)")
      ->group("");

  auto* simulate = app.add_subcommand("simulate", "event-driven estimate at one arrival rate");
  add_common(simulate, simulate_args, "csv");
  simulate->add_option("--lambda", simulate_lambda, "arrival rate (default: first grid entry)");

  auto* sweep = app.add_subcommand("sweep", "event-driven estimates over the lambda grid");
  add_common(sweep, sweep_args, "csv");

  auto* scenarios = app.add_subcommand("scenarios", "list or materialize bundled configs");
  scenarios->add_option("--write", scenarios_write_dir, "write bundled .cfg files to this directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitParse;
  }

  try {
    if (analyze->parsed()) return cmd_analyze(analyze_args);
    if (verify->parsed()) return cmd_verify(verify_args, verify_samples, verify_tol, verify_bias);
    if (simulate->parsed()) return cmd_simulate(simulate_args, simulate_lambda);
    if (sweep->parsed()) return cmd_sweep(sweep_args);
    if (scenarios->parsed()) return cmd_scenarios(scenarios_write_dir);
  } catch (const sq2lt::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
