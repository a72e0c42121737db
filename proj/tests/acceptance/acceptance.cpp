// Acceptance checks. Prints one PASS/FAIL line per criterion; with a criterion
// name as argument only that one runs. Exit status is nonzero if any selected
// criterion fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "mfc/controller.hpp"
#include "mfc/perturbed_chain.hpp"
#include "mfc/sim.hpp"
#include "mfc/uncertainty.hpp"
#include "test_systems.hpp"

using namespace mfc;
using mfc::testing::random_states;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buffer[256];
  std::snprintf(buffer, sizeof buffer, format, a, b, c, d);
  return buffer;
}

// --- Comparison study --------------------------------------------------------

Outcome tracking_study() {
  // Thresholds frozen from the reference run.
  constexpr double kTrackingThreshold = 0.05;
  constexpr double kTransient = 2.0;         // seconds before V must be monotone
  constexpr double kMonotoneSlack = 1e-6;    // relative to max V
  constexpr double kNonConvergingW = 1e-2;   // final-window max |w| of matched_only
  constexpr double kRuntimeLimit = 60.0;

  const SimResult mfc = run(study_config(Variant::mfc));
  const SimResult matched = run(study_config(Variant::matched_only));

  const SimSeries& s = mfc.series;
  double worst_increase = 0.0;
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (s.t[i - 1] >= kTransient) worst_increase = std::max(worst_increase, s.V[i] - s.V[i - 1]);
  }
  const bool mfc_tracks = mfc.summary.final_window_max_error <= kTrackingThreshold;
  const bool monotone = worst_increase <= kMonotoneSlack * mfc.summary.max_V;
  const bool matched_fails = matched.summary.final_window_max_error >= kTrackingThreshold;
  const bool w_persists = matched.summary.final_window_max_w >= kNonConvergingW;
  const double runtime = std::max(mfc.summary.runtime_seconds, matched.summary.runtime_seconds);

  Outcome o;
  o.passed = mfc_tracks && monotone && matched_fails && w_persists && runtime <= kRuntimeLimit;
  o.detail = fmt("mfc max|e|=%.3g (<=0.05), V increase after transient=%.3g; ",
                 mfc.summary.final_window_max_error, worst_increase) +
             fmt("matched_only max|e|=%.3g (>=0.05), max|w|=%.3g (>=0.01); slowest run %.2fs",
                 matched.summary.final_window_max_error, matched.summary.final_window_max_w,
                 runtime);
  return o;
}

// --- Uncertainty structure on random states ---------------------------------

// Chain with state-dependent input gain b(x) = 1 + x_1^2 and a matched
// perturbation delta = g(x) sin(x_2).
FlatSystem scaled_input_chain(std::size_t n) {
  auto b = [](const Vector& x) { return 1.0 + x[0] * x[0]; };
  auto s = mfc::testing::integrator_chain(
      n,
      [n, b](const Vector& x) {
        Vector d(n);
        d[n - 1] = b(x) * std::sin(x[1]);
        return d;
      },
      [n, b](const Vector& x, std::size_t k) { return k < n ? x[k] : b(x) * std::sin(x[1]); });
  s.name = "scaled_input_chain";
  s.g = [n, b](const Vector& x) { return b(x) * Vector::unit(n, n - 1); };
  s.lg_lf_h = b;
  s.lg_lfd_h = b;
  return s;
}

Outcome matching_structure() {
  struct Variant {
    std::string name;
    FlatSystem sys;
    bool matched_only;
  };
  std::vector<Variant> variants;
  {
    PerturbedChainParams p;
    p.alpha = {0.0, 0.0};
    p.rho = 0.0;
    variants.push_back({"chain3_matched", build_chain(p).system, true});
  }
  {
    PerturbedChainParams p;
    p.n = 4;
    p.alpha = {0.0, 0.0, 0.0};
    p.rho = 0.0;
    p.matched = MatchedModel::parse("sine", 2.0);
    variants.push_back({"chain4_matched_sine", build_chain(p).system, true});
  }
  variants.push_back({"scaled_input_chain", scaled_input_chain(3), true});
  variants.push_back({"chain3_default", build_chain({}).system, false});
  {
    PerturbedChainParams p;
    p.n = 5;
    p.alpha = {0.3, -0.2, 0.6, -0.3};
    p.rho = 0.5;
    variants.push_back({"chain5_unmatched", build_chain(p).system, false});
  }

  constexpr std::size_t kSamplesPerVariant = 250;
  std::size_t total = 0;
  double worst_identity = 0.0;
  double worst_matched_phi_u = 0.0;
  double best_unmatched_fraction = 0.0;
  bool ok = true;
  std::uint64_t seed = 1000;
  for (const auto& v : variants) {
    const auto samples = random_states(seed++, kSamplesPerVariant, v.sys.n);
    total += samples.size();
    for (const Vector& x : samples) {
      const Vector delta = v.sys.delta(x);
      const Vector g = v.sys.g(x);
      const auto d = decompose(v.sys, x);
      const double scale = 1.0 + norm(delta);
      const double sum_err = max_abs(d.matched + d.unmatched - delta) / scale;
      const double orth_err = std::abs(dot(g, d.unmatched)) / (scale * norm(g));
      worst_identity = std::max({worst_identity, sum_err, orth_err});
    }
    const auto report = certify_matching(v.sys, samples);
    if (v.matched_only) {
      ok = ok && report.matched_certified == samples.size();
      worst_matched_phi_u = std::max(worst_matched_phi_u, report.worst_matched_phi_u);
    } else {
      const auto large = std::count_if(report.samples.begin(), report.samples.end(),
                                       [](const MatchingSample& s) { return s.transformed_norm > 1e-3; });
      best_unmatched_fraction =
          std::max(best_unmatched_fraction, static_cast<double>(large) / samples.size());
    }
  }
  ok = ok && total >= 1000 && variants.size() >= 5 && worst_identity <= 1e-12 &&
       worst_matched_phi_u <= 1e-5 && best_unmatched_fraction >= 0.99;
  Outcome o;
  o.passed = ok;
  o.detail = fmt("%.0f states, %.0f variants, identity err=%.3g, matched |phi_u|<=%.3g",
                 static_cast<double>(total), static_cast<double>(variants.size()), worst_identity,
                 worst_matched_phi_u) +
             fmt(", unmatched |phi_u|>1e-3 at %.1f%% of samples", 100.0 * best_unmatched_fraction);
  return o;
}

// --- Single-loop equivalence -------------------------------------------------

Outcome single_loop_equivalence() {
  SimConfig a = study_config(Variant::mfc);
  a.xistar0.reset();  // start the model on the reference
  const SimConfig b = study_config(Variant::single_loop);
  const auto cmp = run_comparison({a, b});
  const auto& ua = cmp.runs[0].series.u;
  const auto& ub = cmp.runs[1].series.u;
  double worst = 0.0;
  for (std::size_t i = 0; i < ua.size(); ++i) {
    const double scale = std::max({1.0, std::abs(ua[i]), std::abs(ub[i])});
    worst = std::max(worst, std::abs(ua[i] - ub[i]) / scale);
  }
  Outcome o;
  o.passed = ua.size() == ub.size() && worst <= 1e-9;
  o.detail = fmt("%.0f samples, worst relative u difference=%.3g (<=1e-9)",
                 static_cast<double>(ua.size()), worst);
  return o;
}

// --- Classical model loop equivalence ---------------------------------------

Outcome classical_mcl_equivalence() {
  const SimConfig cfg = study_config(Variant::mfc);
  const SimResult r = run(cfg);
  const auto classical = classical_mcl_oracle(cfg);
  double worst = 0.0;
  const std::size_t count = std::min(classical.size(), r.series.xi_star.size());
  for (std::size_t i = 0; i < count; ++i) {
    worst = std::max(worst, max_abs(classical[i] - r.series.xi_star[i]));
  }
  Outcome o;
  o.passed = classical.size() == r.series.xi_star.size() && worst <= 1e-8;
  o.detail = fmt("%.0f samples, worst |xi*_classical - xi*_chain|=%.3g (<=1e-8)",
                 static_cast<double>(count), worst);
  return o;
}

// --- Matched-only reduction --------------------------------------------------

Outcome matched_reduction() {
  PerturbedChainParams p;
  p.alpha = {0.0, 0.0};
  p.rho = 0.0;
  const auto chain = build_chain(p);
  const Reference ref = sine_reference(3);
  ControllerOptions options;
  options.bounds = chain.bounds;
  const Vector k{1, 3, 3}, kt{64, 48, 12};
  const auto states = random_states(77, 200, 3);
  double worst = 0.0;
  for (std::size_t i = 0; i < 100; ++i) {
    const Vector& x = states[2 * i];
    const double t = 0.2 * static_cast<double>(i);
    const MfcController c(k, kt, options, states[2 * i + 1]);
    const double full = c.full_control(x, tau_n(chain.system, x), t, ref, chain.system).u;
    const double reduced = c.matched_only_control(x, t, ref, chain.system).u;
    worst = std::max(worst, std::abs(full - reduced) / std::max(1.0, std::abs(full)));
  }
  Outcome o;
  o.passed = worst <= 1e-12;
  o.detail = fmt("100 points, worst relative difference=%.3g (<=1e-12)", worst);
  return o;
}

// --- Gain dominance ----------------------------------------------------------

Outcome gain_audit() {
  const auto chain = build_chain(study_config(Variant::mfc).plant);
  const Vector kt = pole_placement(study_config(Variant::mfc).kt_poles);
  std::size_t steps = 0, violations = 0, recomputed = 0, recomputed_violations = 0;
  double worst_shortfall = -INFINITY;
  for (Variant v : {Variant::mfc, Variant::single_loop}) {
    const SimResult r = run(study_config(v));
    steps += r.audit.gain_checks;
    violations += r.audit.gain_violations;
    // Independent recomputation on the recorded samples.
    const SimSeries& s = r.series;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const Vector& x = s.x[i];
      const auto d = aux_deltas(chain.system, x);
      const Vector reference_state = v == Variant::single_loop ? s.xi_d[i] : s.xi_star[i];
      const double v_tilde = -dot(kt, s.xi_n[i] - reference_state);
      const double bracket = -chain.system.lf_h(x, 3) + s.omega_star[i] + v_tilde;
      const double required =
          (std::abs(d.d1) + std::abs(d.d3) * std::abs(bracket)) / (1.0 - std::abs(d.d3));
      const double shortfall = required - s.gamma[i];
      worst_shortfall = std::max(worst_shortfall, shortfall);
      ++recomputed;
      if (shortfall > 1e-9 * (1.0 + required)) ++recomputed_violations;
    }
  }
  Outcome o;
  o.passed = steps > 0 && violations == 0 && recomputed_violations == 0;
  o.detail = fmt("%.0f step checks, %.0f violations; ", static_cast<double>(steps),
                 static_cast<double>(violations)) +
             fmt("%.0f recomputed samples, %.0f violations, worst required-Gamma=%.3g",
                 static_cast<double>(recomputed), static_cast<double>(recomputed_violations),
                 worst_shortfall);
  return o;
}

// --- Numerics ----------------------------------------------------------------

Outcome numerics() {
  std::ostringstream detail;
  bool ok = true;

  const std::vector<double> model{-1, -1, -1}, process{-4, -4, -4};
  const Vector k = pole_placement(model), kt = pole_placement(process);
  const bool gains_exact = k == Vector{1, 3, 3} && kt == Vector{64, 48, 12};
  ok = ok && gains_exact;
  const double res = std::max(lyapunov_residual(brunovsky_closed_loop(k), solve_lyapunov(brunovsky_closed_loop(k))),
                              lyapunov_residual(brunovsky_closed_loop(kt), solve_lyapunov(brunovsky_closed_loop(kt))));
  ok = ok && res <= 1e-10;
  detail << "gains " << (gains_exact ? "exact" : "WRONG") << fmt(", Lyapunov residual=%.3g", res);

  std::vector<PerturbedChainParams> plants(1);
  for (const char* kind : {"zero", "sum_squares", "sine"}) {
    PerturbedChainParams p;
    p.matched = MatchedModel::parse(kind, 1.5);
    plants.push_back(p);
  }
  PerturbedChainParams p5;
  p5.n = 5;
  p5.alpha = {0.3, -0.2, 0.6, -0.3};
  p5.rho = 0.5;
  plants.push_back(p5);
  double lie = 0.0;
  std::uint64_t seed = 500;
  for (const auto& p : plants) {
    const auto chain = build_chain(p);
    lie = std::max(lie, verify_lie_chain(chain.system, random_states(seed++, 200, p.n)).worst_relative_error);
  }
  ok = ok && lie <= 1e-5;
  detail << fmt(", Lie FD err=%.3g", lie);

  // Halving dt from the default step.
  for (Variant v : {Variant::mfc, Variant::matched_only}) {
    SimConfig coarse = study_config(v);
    SimConfig fine = coarse;
    fine.dt = coarse.dt / 2;
    fine.decimation = coarse.decimation * 2;
    const double ec = run(coarse).summary.final_window_max_error;
    const double ef = run(fine).summary.final_window_max_error;
    const double change = std::abs(ef - ec) / ec;
    ok = ok && change < 0.2;
    detail << ", " << to_string(v)
           << fmt(" dt halving %.3g->%.3g (%.1f%%)", ec, ef, 100.0 * change);
  }
  Outcome o;
  o.passed = ok;
  o.detail = detail.str();
  return o;
}

// --- Negative control --------------------------------------------------------

Outcome negative_control() {
  SimConfig cfg = study_config(Variant::mfc);
  cfg.redesign = false;
  const SimResult r = run(cfg);
  const SimResult baseline = run(study_config(Variant::mfc));
  Outcome o;
  o.passed = r.summary.final_window_max_error > 0.05;
  o.detail = fmt("Gamma=0 max|e|=%.3g (must exceed 0.05); with redesign %.3g",
                 r.summary.final_window_max_error, baseline.summary.final_window_max_error);
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"tracking_study", tracking_study},
      {"matching_structure", matching_structure},
      {"single_loop_equivalence", single_loop_equivalence},
      {"classical_mcl_equivalence", classical_mcl_equivalence},
      {"matched_reduction", matched_reduction},
      {"gain_audit", gain_audit},
      {"numerics", numerics},
      {"negative_control", negative_control},
  };

  std::vector<std::string> selected(argv + 1, argv + argc);
  for (const auto& name : selected) {
    const bool known = std::any_of(criteria.begin(), criteria.end(),
                                   [&](const auto& c) { return c.first == name; });
    if (!known) {
      std::fprintf(stderr, "unknown criterion '%s'\n", name.c_str());
      return 2;
    }
  }

  int failures = 0;
  for (const auto& [name, check] : criteria) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), name) == selected.end()) {
      continue;
    }
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s %s: %s\n", o.passed ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
    failures += o.passed ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
