#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mfc/config.hpp"
#include "mfc/csv.hpp"
#include "mfc/error.hpp"
#include "mfc/perturbed_chain.hpp"
#include "mfc/sim.hpp"
#include "mfc/uncertainty.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitAssertion = 1;
constexpr int kExitConfig = 2;
constexpr int kExitDivergence = 3;

int exit_code_for(mfc::ErrorKind kind) {
  switch (kind) {
    case mfc::ErrorKind::config:
    case mfc::ErrorKind::invalid_dimension:
    case mfc::ErrorKind::unstable_specification:
    case mfc::ErrorKind::not_hurwitz:
      return kExitConfig;
    case mfc::ErrorKind::divergence:
    case mfc::ErrorKind::differentiator_divergence:
    case mfc::ErrorKind::numeric_overflow:
      return kExitDivergence;
    default:
      return kExitAssertion;
  }
}

json audit_json(const mfc::RuntimeAudit& a) {
  return {{"gating", a.gating},
          {"passed", a.passed()},
          {"steps_checked", a.steps_checked},
          {"bound_violations", a.bound_violations},
          {"gain_checks", a.gain_checks},
          {"gain_violations", a.gain_violations},
          {"worst_gain_shortfall", a.worst_gain_shortfall},
          {"lyapunov_checks", a.lyapunov_checks},
          {"lyapunov_violations", a.lyapunov_violations},
          {"worst_lyapunov_excess", a.worst_lyapunov_excess},
          {"energy_intervals", a.energy_intervals},
          {"energy_violations", a.energy_violations}};
}

json summary_json(const mfc::SimSummary& s) {
  return {{"final_window_max_error", s.final_window_max_error},
          {"final_window_max_w", s.final_window_max_w},
          {"final_window_max_V", s.final_window_max_V},
          {"max_V", s.max_V},
          {"steps", s.steps},
          {"runtime_seconds", s.runtime_seconds}};
}

struct RunOptions {
  std::string config;
  std::string out;
  std::optional<double> dt;
  std::optional<double> horizon;
  std::optional<std::string> sign;
  std::optional<std::string> deriv;
};

int cmd_run(const RunOptions& opt) {
  mfc::RunPlan plan = mfc::load_config(opt.config);
  for (mfc::SimConfig& cfg : plan.runs) {
    if (opt.dt) cfg.dt = *opt.dt;
    if (opt.horizon) cfg.horizon = *opt.horizon;
    if (opt.sign) cfg.sign = mfc::SignPolicy::parse(*opt.sign);
    if (opt.deriv) cfg.deriv = *opt.deriv;
    cfg.validate();
  }

  fs::path out = opt.out;
  if (const char* env = std::getenv("MFCSIM_OUT"); env && *env) out = env;
  if (out.empty()) throw mfc::Error(mfc::ErrorKind::config, "--out is required");
  fs::create_directories(out);

  std::vector<mfc::SimResult> results;
  if (plan.runs.size() == 1) {
    results.push_back(mfc::run(plan.runs.front()));
  } else {
    results = mfc::run_comparison(plan.runs).runs;
  }

  json manifest;
  manifest["config"] = fs::absolute(opt.config).string();
  manifest["output_directory"] = fs::absolute(out).string();
  manifest["runs"] = json::array();
  bool all_passed = true;
  for (const mfc::SimResult& r : results) {
    const fs::path csv = out / (r.label + ".csv");
    const fs::path diag = out / (r.label + "_diag.csv");
    mfc::write_csv(csv, r);
    mfc::write_diagnostics_csv(diag, r);
    all_passed = all_passed && r.audit.passed();
    manifest["runs"].push_back({{"label", r.label},
                                {"variant", mfc::to_string(r.variant)},
                                {"csv", csv.string()},
                                {"diagnostics_csv", diag.string()},
                                {"summary", summary_json(r.summary)},
                                {"audit", audit_json(r.audit)}});
    std::cout << r.label << ": final-window max|e| = " << r.summary.final_window_max_error
              << ", audits " << (r.audit.gating ? (r.audit.passed() ? "pass" : "FAIL") : "n/a")
              << ", " << r.summary.runtime_seconds << " s\n";
  }
  manifest["passed"] = all_passed;
  std::ofstream(out / "summary.json", std::ios::binary) << manifest.dump(2) << '\n';
  return all_passed ? kExitOk : kExitAssertion;
}

int cmd_verify(const std::string& config_path) {
  const mfc::RunPlan plan = mfc::load_config(config_path);
  const mfc::SimConfig& cfg = plan.runs.front();
  const mfc::PerturbedChain chain = mfc::build_chain(cfg.plant);
  const mfc::FlatSystem& sys = chain.system;
  const std::size_t n = sys.n;

  std::mt19937_64 rng(20240531);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  std::vector<mfc::Vector> samples{cfg.x0};
  for (int i = 0; i < 100; ++i) {
    mfc::Vector x(n);
    for (std::size_t j = 0; j < n; ++j) x[j] = dist(rng);
    samples.push_back(x);
  }

  bool ok = true;
  const auto rd = mfc::check_relative_degree(sys, samples);
  std::cout << "relative degree: pass (" << rd.samples_checked << " samples, min |LgLf^(n-1)h| = "
            << rd.smallest_input_coefficient << ")\n";

  const auto lie = mfc::verify_lie_chain(sys, samples);
  const bool lie_ok = lie.worst_relative_error <= 1e-5;
  ok = ok && lie_ok;
  std::cout << "lie chain: " << (lie_ok ? "pass" : "FAIL") << " (worst relative error "
            << lie.worst_relative_error << " in " << lie.worst_term << ")\n";

  const auto th = mfc::certify_matching(sys, samples);
  std::cout << "uncertainty structure: pass (matched " << th.matched_certified << ", unmatched "
            << th.unmatched_confirmed << ", inconclusive " << th.inconclusive
            << ", worst matched |phi_u| " << th.worst_matched_phi_u << ")\n";

  std::size_t bound_failures = 0;
  double worst_d1 = -INFINITY, worst_d3 = -INFINITY;
  for (const mfc::Vector& x : samples) {
    const auto b = chain.bounds.evaluate(x);
    const auto d = mfc::aux_deltas(sys, x);
    const double s1 = std::abs(d.d1) - b.delta1;
    const double s3 = std::abs(d.d3) - b.delta3;
    worst_d1 = std::max(worst_d1, s1);
    worst_d3 = std::max(worst_d3, s3);
    const double tol = 1e-9 * (1.0 + b.delta1);
    if (s1 > tol || s3 > 1e-9) ++bound_failures;
  }
  ok = ok && bound_failures == 0;
  std::cout << "uncertainty bounds: " << (bound_failures == 0 ? "pass" : "FAIL") << " ("
            << bound_failures << " violations, worst |D1|-d1 = " << worst_d1
            << ", worst |D3|-d3 = " << worst_d3 << ")\n";

  std::cout << (ok ? "verify: pass" : "verify: FAIL") << '\n';
  return ok ? kExitOk : kExitAssertion;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Model-following control simulator"};
  app.require_subcommand(1);

  RunOptions run_opt;
  CLI::App* run = app.add_subcommand("run", "Simulate every configured controller variant");
  run->add_option("--config", run_opt.config, "JSON config")->required()->check(CLI::ExistingFile);
  run->add_option("--out", run_opt.out, "Output directory (MFCSIM_OUT overrides)");
  run->add_option("--dt", run_opt.dt, "Integration step");
  run->add_option("--horizon", run_opt.horizon, "Simulation horizon");
  run->add_option("--sign", run_opt.sign, "pure | layer:EPS");
  run->add_option("--deriv", run_opt.deriv, "oracle | levant:L");

  std::string verify_config;
  CLI::App* verify = app.add_subcommand("verify", "Static certification of the configured plant");
  verify->add_option("--config", verify_config, "JSON config")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run) return cmd_run(run_opt);
    return cmd_verify(verify_config);
  } catch (const mfc::Error& e) {
    std::cerr << "mfcsim: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "mfcsim: " << e.what() << '\n';
    return kExitAssertion;
  }
}
