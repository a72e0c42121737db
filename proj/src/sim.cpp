#include "mfc/sim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>

#include "mfc/error.hpp"
#include "mfc/uncertainty.hpp"

namespace mfc {

namespace {

constexpr double kDivergenceLimit = 1e6;
constexpr double kSwitchingFloor = 1e-9;  // |w| below this counts as on the switching set
constexpr double kFinalWindow = 0.75;

Vector rk4_step(const std::function<Vector(const Vector&)>& rhs, const Vector& x, double dt) {
  const Vector k1 = rhs(x);
  const Vector k2 = rhs(x + (0.5 * dt) * k1);
  const Vector k3 = rhs(x + (0.5 * dt) * k2);
  const Vector k4 = rhs(x + dt * k3);
  return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Vector rk4_step(const std::function<Vector(double, const Vector&)>& rhs, double t,
                const Vector& x, double dt) {
  const Vector k1 = rhs(t, x);
  const Vector k2 = rhs(t + 0.5 * dt, x + (0.5 * dt) * k1);
  const Vector k3 = rhs(t + 0.5 * dt, x + (0.5 * dt) * k2);
  const Vector k4 = rhs(t + dt, x + dt * k3);
  return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// A xi + B last
Vector chain_rate(const Vector& xi, double last) {
  Vector d(xi.size());
  for (std::size_t i = 0; i + 1 < xi.size(); ++i) d[i] = xi[i + 1];
  d[xi.size() - 1] = last;
  return d;
}

bool within(double value, double bound) {
  return std::abs(value) <= bound * (1.0 + 1e-12) + 1e-12;
}

}  // namespace

std::string to_string(Variant v) {
  switch (v) {
    case Variant::mfc: return "mfc";
    case Variant::matched_only: return "matched_only";
    case Variant::single_loop: return "single_loop";
  }
  return "mfc";
}

Variant parse_variant(const std::string& text) {
  if (text == "mfc") return Variant::mfc;
  if (text == "matched_only") return Variant::matched_only;
  if (text == "single_loop") return Variant::single_loop;
  throw Error(ErrorKind::config, "unknown controller variant '" + text + "'");
}

Reference ReferenceSpec::make(std::size_t order) const {
  if (kind == "sin") return sine_reference(order, amplitude, frequency, phase, offset);
  if (kind == "poly") return polynomial_reference(order, coeffs);
  throw Error(ErrorKind::config, "reference kind must be 'sin' or 'poly', got '" + kind + "'");
}

std::size_t SimConfig::steps() const {
  return static_cast<std::size_t>(std::llround(horizon / dt));
}

void SimConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw Error(ErrorKind::config, "dt must be > 0");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw Error(ErrorKind::config, "horizon must be > 0");
  }
  if (decimation < 1) throw Error(ErrorKind::config, "decimation must be >= 1");
  if (steps() < 1) throw Error(ErrorKind::config, "horizon shorter than one step");
  if (system_id != "perturbed_chain") {
    throw Error(ErrorKind::config, "unknown system id '" + system_id + "'");
  }
  const std::size_t n = plant.n;
  if (x0.size() != n) throw Error(ErrorKind::config, "init.x0 must have n entries");
  if (xistar0 && xistar0->size() != n) {
    throw Error(ErrorKind::config, "init.xistar0 must have n entries");
  }
  if (k_poles.size() != n || kt_poles.size() != n) {
    throw Error(ErrorKind::config, "k_poles and kt_poles must have n entries");
  }
  if (!(eta >= 0.0)) throw Error(ErrorKind::config, "eta must be >= 0");
  if (reference.kind != "sin" && reference.kind != "poly") {
    throw Error(ErrorKind::config, "reference kind must be 'sin' or 'poly'");
  }
  DerivativeSource::parse(deriv);
}

SimConfig study_config(Variant variant) {
  SimConfig cfg;
  cfg.variant = variant;
  cfg.plant = PerturbedChainParams{};
  if (variant == Variant::single_loop) cfg.xistar0.reset();
  return cfg;
}

bool RuntimeAudit::passed() const {
  if (!gating) return true;
  return bound_violations == 0 && gain_violations == 0 && lyapunov_violations == 0 &&
         energy_violations == 0;
}

SimResult run(const SimConfig& cfg) {
  cfg.validate();
  const PerturbedChain chain = build_chain(cfg.plant);
  const UncertaintyBounds& bounds =
      cfg.variant == Variant::matched_only ? chain.matched_bounds : chain.bounds;
  return run(cfg, chain.system, bounds, cfg.reference.make(cfg.plant.n));
}

SimResult run(const SimConfig& cfg, const FlatSystem& sys, const UncertaintyBounds& bounds,
              const Reference& ref) {
  const auto wall_start = std::chrono::steady_clock::now();
  const std::size_t n = sys.n;
  if (cfg.x0.size() != n) throw Error(ErrorKind::config, "x0 size does not match the plant");
  if (!(cfg.dt > 0.0) || !(cfg.horizon > 0.0) || cfg.decimation < 1) {
    throw Error(ErrorKind::config, "invalid step, horizon or decimation");
  }
  check_relative_degree(sys, {cfg.x0});

  const double dt = cfg.dt;
  const std::size_t steps = cfg.steps();
  const double window_start = kFinalWindow * cfg.horizon;

  ControllerOptions options;
  options.bounds = bounds;
  options.gain_margin = cfg.eta;
  options.sign = cfg.sign;
  options.redesign = cfg.redesign;
  MfcController controller = MfcController::from_poles(
      cfg.k_poles, cfg.kt_poles, options, cfg.xistar0.value_or(ref.desired_state(0.0, n)));
  DerivativeSource source = DerivativeSource::parse(cfg.deriv);

  const bool uses_model = cfg.variant != Variant::single_loop;
  const bool gating = cfg.variant != Variant::matched_only && cfg.redesign;
  const bool lyapunov_audit = gating && cfg.sign.mode == SignPolicy::Mode::pure &&
                              source.mode() == DerivativeSource::Mode::oracle;

  SimResult result;
  result.label = cfg.label();
  result.variant = cfg.variant;
  result.audit.gating = gating;
  SimSeries& s = result.series;
  const std::size_t samples = steps / cfg.decimation + 2;
  for (auto* v : {&s.t, &s.e, &s.y, &s.y_d, &s.u, &s.omega_star, &s.omega_tilde, &s.V, &s.w,
                  &s.gamma, &s.V_alt, &s.w_alt}) {
    v->reserve(samples);
  }

  struct EnergyInterval {
    double v_start = 0.0;
    double v_end = 0.0;
    bool off_switching_set = true;
  };
  std::vector<EnergyInterval> intervals;
  EnergyInterval current;

  Vector x = cfg.x0;
  double last_valid_t = 0.0;
  for (std::size_t i = 0; i <= steps; ++i) {
    const double t = static_cast<double>(i) * dt;
    const double y = sys.h(x);
    const Vector xi_n = source.derive(y, dt, sys, x);
    const Vector xi_d = ref.desired_state(t, n);

    ControlOutput out;
    switch (cfg.variant) {
      case Variant::mfc: out = controller.full_control(x, xi_n, t, ref, sys); break;
      case Variant::matched_only: out = controller.matched_only_control(x, t, ref, sys); break;
      case Variant::single_loop:
        out = controller.single_loop_control(x, xi_n, t, ref, sys);
        break;
    }
    if (!std::isfinite(out.u)) {
      throw Error(ErrorKind::divergence, "control not finite at t=" + std::to_string(t));
    }

    const Vector& loop_reference = uses_model ? controller.model_state() : xi_d;
    const Vector pcl_error = xi_n - loop_reference;
    const double V = controller.lyapunov(pcl_error);
    const double w = controller.switching(pcl_error);

    // Truth-side assertions.
    if (gating) {
      RuntimeAudit& a = result.audit;
      ++a.steps_checked;
      const AuxDeltas aux = aux_deltas(sys, x);
      const auto b = bounds.evaluate(x);
      if (!within(aux.d1, b.delta1) || !within(aux.d3, b.delta3)) {
        ++a.bound_violations;
        throw Error(ErrorKind::bound_violation,
                    "at t=" + std::to_string(t) + ": |Delta1|=" + std::to_string(aux.d1) +
                        " vs delta1=" + std::to_string(b.delta1) + ", |Delta3|=" +
                        std::to_string(aux.d3) + " vs delta3=" + std::to_string(b.delta3));
      }
      const double required = (std::abs(aux.d1) + std::abs(aux.d3) * std::abs(out.diag.bracket)) /
                              (1.0 - std::abs(aux.d3));
      ++a.gain_checks;
      const double shortfall = required - out.diag.gamma;
      if (a.gain_checks == 1 || shortfall > a.worst_gain_shortfall) a.worst_gain_shortfall = shortfall;
      if (shortfall > 1e-12 * (1.0 + required)) ++a.gain_violations;

      if (lyapunov_audit && std::abs(w) > kSwitchingFloor) {
        // d/dt V along the true closed-loop right-hand side at the sample.
        const double top = sys.lfd_h(x, n) + control_coefficient_true(sys, x) * out.u;
        const Vector xi_n_rate = chain_rate(xi_n, top);
        const Vector ref_rate = uses_model ? chain_rate(loop_reference, out.omega_star)
                                           : chain_rate(xi_d, ref.derivative(t, n));
        const double v_dot = 2.0 * dot(pcl_error, controller.lyapunov_matrix() *
                                                      (xi_n_rate - ref_rate));
        const double excess = v_dot + squared_norm(pcl_error);
        ++a.lyapunov_checks;
        if (a.lyapunov_checks == 1 || excess > a.worst_lyapunov_excess) {
          a.worst_lyapunov_excess = excess;
        }
        if (excess > 1e-9 * (1.0 + std::abs(v_dot) + squared_norm(pcl_error))) {
          ++a.lyapunov_violations;
        }
      }
    }

    // Energy intervals between recorded samples.
    current.off_switching_set = current.off_switching_set && std::abs(w) > kSwitchingFloor;
    result.summary.max_V = std::max(result.summary.max_V, V);
    if (t >= window_start) {
      result.summary.final_window_max_error =
          std::max(result.summary.final_window_max_error, std::abs(y - ref.derivative(t, 0)));
      result.summary.final_window_max_w = std::max(result.summary.final_window_max_w, std::abs(w));
      result.summary.final_window_max_V = std::max(result.summary.final_window_max_V, V);
    }

    if (i % cfg.decimation == 0 || i == steps) {
      if (!s.t.empty()) {
        current.v_end = V;
        intervals.push_back(current);
      }
      current = EnergyInterval{V, V, std::abs(w) > kSwitchingFloor};

      const Vector alt_error = tau(sys, x) - loop_reference;
      s.t.push_back(t);
      s.y.push_back(y);
      s.y_d.push_back(xi_d[0]);
      s.e.push_back(y - xi_d[0]);
      s.u.push_back(out.u);
      s.omega_star.push_back(out.omega_star);
      s.omega_tilde.push_back(out.omega_tilde);
      s.V.push_back(V);
      s.w.push_back(w);
      s.gamma.push_back(out.diag.gamma);
      s.x.push_back(x);
      s.xi_star.push_back(loop_reference);
      s.xi_n.push_back(xi_n);
      s.xi_d.push_back(xi_d);
      s.V_alt.push_back(controller.lyapunov(alt_error));
      s.w_alt.push_back(controller.switching(alt_error));
    }
    if (i == steps) break;

    const double u = out.u;
    x = rk4_step([&sys, u](const Vector& z) { return sys.rhs(z, u); }, x, dt);
    if (uses_model) controller.mcl_step(t, ref, dt);
    if (!all_finite(x) || norm(x) > kDivergenceLimit) {
      throw Error(ErrorKind::divergence,
                  "plant state diverged after t=" + std::to_string(last_valid_t));
    }
    last_valid_t = t + dt;
  }

  if (gating && lyapunov_audit) {
    const double tol = 1e-6 * result.summary.max_V;
    for (const EnergyInterval& iv : intervals) {
      if (!iv.off_switching_set) continue;
      ++result.audit.energy_intervals;
      if (iv.v_end > iv.v_start + tol) ++result.audit.energy_violations;
    }
  }

  result.summary.steps = steps;
  result.summary.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
  return result;
}

ComparisonResult run_comparison(const std::vector<SimConfig>& cfgs) {
  if (cfgs.size() < 2) throw Error(ErrorKind::config, "comparison needs at least two configs");
  for (const SimConfig& cfg : cfgs) cfg.validate();
  for (const SimConfig& cfg : cfgs) {
    if (cfg.dt != cfgs.front().dt || cfg.horizon != cfgs.front().horizon ||
        cfg.decimation != cfgs.front().decimation) {
      throw Error(ErrorKind::config, "comparison runs must share dt, horizon and decimation");
    }
  }
  std::vector<std::future<SimResult>> pending;
  pending.reserve(cfgs.size());
  for (const SimConfig& cfg : cfgs) {
    pending.push_back(std::async(std::launch::async, [&cfg] { return run(cfg); }));
  }
  ComparisonResult out;
  for (auto& f : pending) out.runs.push_back(f.get());
  for (const SimResult& r : out.runs) {
    if (r.series.t != out.runs.front().series.t) {
      throw Error(ErrorKind::config, "comparison runs produced different time grids");
    }
  }
  return out;
}

std::vector<Vector> simulate_chain_model(const Vector& xi0, const ModelInputLaw& law,
                                         double dt, std::size_t steps,
                                         std::size_t decimation) {
  std::vector<Vector> out;
  Vector xi = xi0;
  for (std::size_t i = 0; i <= steps; ++i) {
    if (i % decimation == 0 || i == steps) out.push_back(xi);
    if (i == steps) break;
    xi = rk4_step([&law](double t, const Vector& z) { return chain_rate(z, law(t, z)); },
                  static_cast<double>(i) * dt, xi, dt);
  }
  return out;
}

std::vector<Vector> simulate_classical_model(const FlatSystem& sys, const Vector& xi0,
                                             const ModelInputLaw& law, double dt,
                                             std::size_t steps, std::size_t decimation) {
  std::vector<Vector> out;
  Vector x = tau_inverse(sys, xi0, xi0);
  for (std::size_t i = 0; i <= steps; ++i) {
    const Vector xi = tau(sys, x);
    if (i % decimation == 0 || i == steps) out.push_back(xi);
    if (i == steps) break;
    auto rate = [&sys, &law](double t, const Vector& z) {
      const double coefficient = sys.lg_lf_h(z);
      if (coefficient == 0.0) throw Error(ErrorKind::degenerate_control, "model input coefficient");
      const double u_model = (law(t, tau(sys, z)) - sys.lf_h(z, sys.n)) / coefficient;
      return sys.f(z) + u_model * sys.g(z);
    };
    x = rk4_step(rate, static_cast<double>(i) * dt, x, dt);
  }
  return out;
}

std::vector<Vector> classical_mcl_oracle(const SimConfig& cfg) {
  cfg.validate();
  const PerturbedChain chain = build_chain(cfg.plant);
  const Reference ref = cfg.reference.make(cfg.plant.n);
  const std::size_t n = cfg.plant.n;
  const Vector k = pole_placement(cfg.k_poles);
  const ModelInputLaw law = [&ref, &k, n](double t, const Vector& xi) {
    return ref.derivative(t, n) - dot(k, xi - ref.desired_state(t, n));
  };
  return simulate_classical_model(chain.system, cfg.xistar0.value_or(ref.desired_state(0.0, n)),
                                  law, cfg.dt, cfg.steps(), cfg.decimation);
}

}  // namespace mfc
