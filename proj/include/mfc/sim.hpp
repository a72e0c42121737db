#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mfc/controller.hpp"
#include "mfc/differentiator.hpp"
#include "mfc/linalg.hpp"
#include "mfc/perturbed_chain.hpp"
#include "mfc/system.hpp"

namespace mfc {

enum class Variant { mfc, matched_only, single_loop };

std::string to_string(Variant v);
Variant parse_variant(const std::string& text);

struct ReferenceSpec {
  std::string kind = "sin";  // "sin" | "poly"
  double amplitude = 1.0;
  double frequency = 1.0;
  double phase = 0.0;
  double offset = 0.0;
  std::vector<double> coeffs;  // poly only, ascending powers

  Reference make(std::size_t order) const;
};

struct SimConfig {
  std::string name;  // output label; defaults to the variant name
  std::string system_id = "perturbed_chain";
  PerturbedChainParams plant;
  Variant variant = Variant::mfc;
  std::vector<double> k_poles{-1.0, -1.0, -1.0};
  std::vector<double> kt_poles{-4.0, -4.0, -4.0};
  double eta = 0.0;
  SignPolicy sign;
  std::string deriv = "oracle";
  ReferenceSpec reference;
  Vector x0{1.0, 0.0, 0.0};
  std::optional<Vector> xistar0 = Vector{0.5, 0.0, 0.0};  // nullopt: xi_d(0)
  double dt = 1e-4;
  double horizon = 20.0;
  std::size_t decimation = 100;
  bool redesign = true;  // false sets Gamma = 0

  std::string label() const { return name.empty() ? to_string(variant) : name; }
  std::size_t steps() const;
  // Raises ErrorKind::config.
  void validate() const;
};

// The reference comparison study for a given law (n = 3, alpha = (0.5, -0.5),
// phi_m = |x|^2, y_d = sin t, x(0) = [1,0,0], xi*(0) = [0.5,0,0]).
SimConfig study_config(Variant variant);

// Uniformly sampled series, one entry per recorded step.
struct SimSeries {
  std::vector<double> t, e, y, y_d, u, omega_star, omega_tilde, V, w, gamma;
  std::vector<Vector> x, xi_star, xi_n, xi_d;
  // V and w evaluated along tau(x) - xi* (xi_d for single loop).
  std::vector<double> V_alt, w_alt;

  std::size_t size() const { return t.size(); }
};

struct RuntimeAudit {
  bool gating = false;  // assertions count towards pass/fail for this run
  std::size_t steps_checked = 0;
  std::size_t bound_violations = 0;
  std::size_t gain_checks = 0;
  std::size_t gain_violations = 0;
  double worst_gain_shortfall = 0.0;  // max(required - Gamma), <= 0 when fine
  std::size_t lyapunov_checks = 0;
  std::size_t lyapunov_violations = 0;
  double worst_lyapunov_excess = 0.0;  // max(dV/dt + |e|^2)
  std::size_t energy_intervals = 0;
  std::size_t energy_violations = 0;

  bool passed() const;
};

struct SimSummary {
  double final_window_max_error = 0.0;  // max |y - y_d| over t >= 0.75 T, full rate
  double final_window_max_w = 0.0;      // max |w(xi_n - xi*)| over the same window
  double final_window_max_V = 0.0;
  double max_V = 0.0;
  std::size_t steps = 0;
  double runtime_seconds = 0.0;
};

struct SimResult {
  std::string label;
  Variant variant = Variant::mfc;
  SimSeries series;
  SimSummary summary;
  RuntimeAudit audit;
};

// Fixed-step RK4 closed loop with the control held over each step.
// Raises divergence (|x| > 1e6 or non-finite), degenerate_control, and
// bound_violation (gating variants only).
SimResult run(const SimConfig& cfg);

// Same as run() with an externally built plant and reference; cfg.plant and
// cfg.reference are ignored.
SimResult run(const SimConfig& cfg, const FlatSystem& sys, const UncertaintyBounds& bounds,
              const Reference& ref);

struct ComparisonResult {
  std::vector<SimResult> runs;
};

// Runs every config (concurrently) and checks the time grids agree.
ComparisonResult run_comparison(const std::vector<SimConfig>& cfgs);

// omega = law(t, xi*)
using ModelInputLaw = std::function<double(double t, const Vector& xi_star)>;

// Integrator-chain model xi*' = A xi* + B omega(t, xi*), RK4 with the law evaluated at
// every stage.
// Returns the states at every `decimation`-th step including step 0.
std::vector<Vector> simulate_chain_model(const Vector& xi0, const ModelInputLaw& law,
                                         double dt, std::size_t steps,
                                         std::size_t decimation);

// Classical realisation: nominal nonlinear model x*' = f + g u* under the
// linearising law u* = (omega - L_f^n h) / (L_g L_f^{n-1} h), started at
// tau^{-1}(xi0), recorded through tau.
std::vector<Vector> simulate_classical_model(const FlatSystem& sys, const Vector& xi0,
                                             const ModelInputLaw& law, double dt,
                                             std::size_t steps, std::size_t decimation);

// Classical model driven by the configured tracking law; comparable with
// run(cfg).series.xi_star.
std::vector<Vector> classical_mcl_oracle(const SimConfig& cfg);

}  // namespace mfc
