#include "mfc/controller.hpp"

#include <algorithm>
#include <cmath>

#include "mfc/error.hpp"

namespace mfc {

double SignPolicy::apply(double w) const {
  if (mode == Mode::boundary_layer) return std::clamp(w / epsilon, -1.0, 1.0);
  if (w > 0.0) return 1.0;
  if (w < 0.0) return -1.0;
  return 0.0;
}

SignPolicy SignPolicy::boundary_layer(double epsilon) {
  if (!(epsilon > 0.0)) {
    throw Error(ErrorKind::config, "boundary layer width must be positive");
  }
  return {Mode::boundary_layer, epsilon};
}

SignPolicy SignPolicy::parse(const std::string& text) {
  if (text == "pure") return pure();
  const std::string prefix = "layer:";
  if (text.rfind(prefix, 0) == 0) {
    try {
      std::size_t used = 0;
      const std::string number = text.substr(prefix.size());
      const double eps = std::stod(number, &used);
      if (used != number.size()) throw std::invalid_argument(number);
      return boundary_layer(eps);
    } catch (const std::logic_error&) {
      throw Error(ErrorKind::config, "bad boundary layer width in '" + text + "'");
    }
  }
  throw Error(ErrorKind::config, "sign mode must be 'pure' or 'layer:EPS', got '" + text + "'");
}

std::string SignPolicy::to_string() const {
  return mode == Mode::pure ? "pure" : "layer:" + std::to_string(epsilon);
}

MfcController::MfcController(Vector k, Vector k_tilde, ControllerOptions options,
                             Vector model_state)
    : k_(std::move(k)),
      k_tilde_(std::move(k_tilde)),
      options_(std::move(options)),
      model_state_(std::move(model_state)) {
  if (k_.empty() || k_.size() != k_tilde_.size() || model_state_.size() != k_.size()) {
    throw Error(ErrorKind::invalid_dimension, "controller gains and model state sizes differ");
  }
  if (options_.sign.mode == SignPolicy::Mode::boundary_layer && !(options_.sign.epsilon > 0.0)) {
    throw Error(ErrorKind::config, "boundary layer width must be positive");
  }
  if (!(options_.gain_margin >= 0.0)) {
    throw Error(ErrorKind::config, "gain margin must be nonnegative");
  }
  // Hurwitz check for the model loop; P itself is only needed for the process loop.
  solve_lyapunov(brunovsky_closed_loop(k_));
  p_ = solve_lyapunov(brunovsky_closed_loop(k_tilde_));
}

MfcController MfcController::from_poles(std::span<const double> model_poles,
                                        std::span<const double> process_poles,
                                        ControllerOptions options, Vector model_state) {
  return MfcController(pole_placement(model_poles), pole_placement(process_poles),
                       std::move(options), std::move(model_state));
}

void MfcController::set_model_state(Vector state) {
  if (state.size() != n()) throw Error(ErrorKind::invalid_dimension, "model state size");
  model_state_ = std::move(state);
}

double MfcController::lyapunov(const Vector& error) const { return dot(error, p_ * error); }

double MfcController::switching(const Vector& error) const {
  // B = e_n and P symmetric, so e^T P B is the last entry of P e.
  return 2.0 * (p_ * error)[n() - 1];
}

double MfcController::mcl_control(double t, const Reference& ref) const {
  const Vector model_error = model_state_ - ref.desired_state(t, n());
  return ref.derivative(t, n()) - dot(k_, model_error);
}

void MfcController::mcl_step(double omega_star, double dt) {
  if (!(dt > 0.0)) throw Error(ErrorKind::config, "step size must be positive");
  const std::size_t dim = n();
  auto chain = [dim, omega_star](const Vector& xi) {
    Vector d(dim);
    for (std::size_t i = 0; i + 1 < dim; ++i) d[i] = xi[i + 1];
    d[dim - 1] = omega_star;
    return d;
  };
  const Vector& s = model_state_;
  const Vector k1 = chain(s);
  const Vector k2 = chain(s + (0.5 * dt) * k1);
  const Vector k3 = chain(s + (0.5 * dt) * k2);
  const Vector k4 = chain(s + dt * k3);
  model_state_ = s + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

void MfcController::mcl_step(double t, const Reference& ref, double dt) {
  if (!(dt > 0.0)) throw Error(ErrorKind::config, "step size must be positive");
  const std::size_t dim = n();
  auto rate = [&](double time, const Vector& xi) {
    Vector d(dim);
    for (std::size_t i = 0; i + 1 < dim; ++i) d[i] = xi[i + 1];
    d[dim - 1] = ref.derivative(time, dim) - dot(k_, xi - ref.desired_state(time, dim));
    return d;
  };
  const Vector& s = model_state_;
  const Vector k1 = rate(t, s);
  const Vector k2 = rate(t + 0.5 * dt, s + (0.5 * dt) * k1);
  const Vector k3 = rate(t + 0.5 * dt, s + (0.5 * dt) * k2);
  const Vector k4 = rate(t + dt, s + dt * k3);
  model_state_ = s + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

double MfcController::nominal_drift(const FlatSystem& sys, const Vector& x) const {
  return sys.lf_h(x, sys.n);
}

double MfcController::input_coefficient(const FlatSystem& sys, const Vector& x) const {
  const double c = sys.lg_lf_h(x);
  if (c == 0.0 || !std::isfinite(c)) {
    throw Error(ErrorKind::degenerate_control,
                "L_g L_f^{n-1} h = " + std::to_string(c) + " at the current state");
  }
  return c;
}

double MfcController::required_gain(const Vector& x, double bracket) const {
  if (!options_.redesign) return 0.0;
  const auto b = options_.bounds.evaluate(x);
  return (b.delta1 + b.delta3 * std::abs(bracket)) / (1.0 - b.delta3) + options_.gain_margin;
}

ControlDiagnostics MfcController::process_feedback(const Vector& error, double gamma) const {
  ControlDiagnostics d;
  d.error = error;
  d.v_tilde = -dot(k_tilde_, error);
  d.w = switching(error);
  d.gamma = gamma;
  d.v_l = -gamma * options_.sign.apply(d.w);
  d.lyapunov = lyapunov(error);
  return d;
}

double MfcController::gain_schedule(const Vector& x, const Vector& xi_n, double t,
                                    const Reference& ref, const FlatSystem& sys) const {
  const double omega_star = mcl_control(t, ref);
  const double v_tilde = -dot(k_tilde_, xi_n - model_state_);
  return required_gain(x, -nominal_drift(sys, x) + omega_star + v_tilde);
}

ControlOutput MfcController::pcl_control(const Vector& x, const Vector& xi_n, double t,
                                         const Reference& ref, const FlatSystem& sys) const {
  ControlOutput out;
  out.omega_star = mcl_control(t, ref);
  const Vector error = xi_n - model_state_;
  const double v_tilde = -dot(k_tilde_, error);
  const double bracket = -nominal_drift(sys, x) + out.omega_star + v_tilde;
  out.diag = process_feedback(error, required_gain(x, bracket));
  out.diag.bracket = bracket;
  out.omega_tilde = out.diag.v_tilde + out.diag.v_l;
  return out;
}

ControlOutput MfcController::full_control(const Vector& x, const Vector& xi_n, double t,
                                          const Reference& ref, const FlatSystem& sys) const {
  ControlOutput out = pcl_control(x, xi_n, t, ref, sys);
  out.u = (-nominal_drift(sys, x) + out.omega_star + out.omega_tilde) /
          input_coefficient(sys, x);
  return out;
}

ControlOutput MfcController::matched_only_control(const Vector& x, double t,
                                                  const Reference& ref,
                                                  const FlatSystem& sys) const {
  ControlOutput out;
  out.omega_star = mcl_control(t, ref);
  const double gamma =
      options_.redesign ? options_.bounds.evaluate(x).delta1 + options_.gain_margin : 0.0;
  out.diag = process_feedback(tau(sys, x) - model_state_, gamma);
  out.diag.bracket = -nominal_drift(sys, x) + out.omega_star + out.diag.v_tilde;
  out.omega_tilde = out.diag.v_tilde + out.diag.v_l;
  out.u = (-nominal_drift(sys, x) + out.omega_star + out.omega_tilde) /
          input_coefficient(sys, x);
  return out;
}

ControlOutput MfcController::single_loop_control(const Vector& x, const Vector& xi_n, double t,
                                                 const Reference& ref,
                                                 const FlatSystem& sys) const {
  ControlOutput out;
  const double feedforward = ref.derivative(t, n());
  out.omega_star = feedforward;
  const Vector error = xi_n - ref.desired_state(t, n());
  const double v_tilde = -dot(k_tilde_, error);
  const double bracket = -nominal_drift(sys, x) + feedforward + v_tilde;
  out.diag = process_feedback(error, required_gain(x, bracket));
  out.diag.bracket = bracket;
  out.omega_tilde = out.diag.v_tilde + out.diag.v_l;
  out.u = (-nominal_drift(sys, x) + feedforward + out.omega_tilde) / input_coefficient(sys, x);
  return out;
}

}  // namespace mfc
