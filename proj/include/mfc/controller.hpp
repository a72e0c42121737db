#pragma once

#include <cstddef>
#include <span>
#include <string>

#include "mfc/linalg.hpp"
#include "mfc/system.hpp"
#include "mfc/uncertainty.hpp"

namespace mfc {

// How the discontinuous term maps the switching variable w.
struct SignPolicy {
  enum class Mode { pure, boundary_layer };
  Mode mode = Mode::pure;
  double epsilon = 1e-3;  // boundary layer width

  // sgn(w) with sgn(0) = 0, or sat(w / epsilon).
  double apply(double w) const;

  static SignPolicy pure() { return {}; }
  static SignPolicy boundary_layer(double epsilon);
  // "pure" or "layer:EPS"
  static SignPolicy parse(const std::string& text);
  std::string to_string() const;
};

struct ControllerOptions {
  UncertaintyBounds bounds = UncertaintyBounds::zero();
  double gain_margin = 0.0;  // eta, added on top of the required gain
  SignPolicy sign;
  // false forces Gamma = 0 (drops the Lyapunov redesign term entirely).
  bool redesign = true;
};

struct ControlDiagnostics {
  Vector error;          // error the PCL feedback acts on
  double v_tilde = 0.0;  // -k_tilde^T error
  double v_l = 0.0;      // -Gamma sgn(w)
  double w = 0.0;        // 2 error^T P B
  double gamma = 0.0;
  double lyapunov = 0.0;  // error^T P error
  double bracket = 0.0;   // -L_f^n h + y_d^(n) + v + v_tilde
};

struct ControlOutput {
  double u = 0.0;
  double omega_star = 0.0;
  double omega_tilde = 0.0;
  ControlDiagnostics diag;
};

// Model-following controller: a Brunovsky-chain model driven by a linear
// tracking law (model control loop), and feedback linearisation of the plant
// with linear feedback plus a Lyapunov-redesign switching term (process
// control loop). Owns the mutable model state xi*.
class MfcController {
 public:
  // Raises not_hurwitz if either closed loop fails the Lyapunov solve.
  MfcController(Vector k, Vector k_tilde, ControllerOptions options, Vector model_state);

  static MfcController from_poles(std::span<const double> model_poles,
                                  std::span<const double> process_poles,
                                  ControllerOptions options, Vector model_state);

  std::size_t n() const noexcept { return k_.size(); }
  const Vector& k() const noexcept { return k_; }
  const Vector& k_tilde() const noexcept { return k_tilde_; }
  const Matrix& lyapunov_matrix() const noexcept { return p_; }
  const ControllerOptions& options() const noexcept { return options_; }
  const Vector& model_state() const noexcept { return model_state_; }
  void set_model_state(Vector state);

  // V(e) = e^T P e and w(e) = 2 e^T P B
  double lyapunov(const Vector& error) const;
  double switching(const Vector& error) const;

  // omega* = y_d^(n)(t) - k^T (xi* - xi_d(t))
  double mcl_control(double t, const Reference& ref) const;

  // One RK4 step of xi*' = A xi* + B omega* with omega* held.
  void mcl_step(double omega_star, double dt);

  // One RK4 step of the model under the tracking law, re-evaluated at every
  // stage (the model input is known in continuous time).
  void mcl_step(double t, const Reference& ref, double dt);

  // omega_tilde = v_tilde(xi_n - xi*) - Gamma sgn(w(xi_n - xi*)).
  ControlOutput pcl_control(const Vector& x, const Vector& xi_n, double t,
                            const Reference& ref, const FlatSystem& sys) const;

  // (delta1 + delta3 |bracket|) / (1 - delta3) + eta, bracket evaluated with
  // the current model state.
  double gain_schedule(const Vector& x, const Vector& xi_n, double t, const Reference& ref,
                       const FlatSystem& sys) const;

  // Full control law using the measured output derivatives xi_n.
  ControlOutput full_control(const Vector& x, const Vector& xi_n, double t,
                             const Reference& ref, const FlatSystem& sys) const;

  // Law for matched-only uncertainty: feedback on tau(x) - xi*, gain
  // delta1(x) + eta.
  ControlOutput matched_only_control(const Vector& x, double t, const Reference& ref,
                                     const FlatSystem& sys) const;

  // Single-loop law on xi_n - xi_d; ignores the model state.
  ControlOutput single_loop_control(const Vector& x, const Vector& xi_n, double t,
                                    const Reference& ref, const FlatSystem& sys) const;

 private:
  double required_gain(const Vector& x, double bracket) const;
  double nominal_drift(const FlatSystem& sys, const Vector& x) const;
  double input_coefficient(const FlatSystem& sys, const Vector& x) const;
  ControlDiagnostics process_feedback(const Vector& error, double gamma) const;

  Vector k_;
  Vector k_tilde_;
  Matrix p_;
  ControllerOptions options_;
  Vector model_state_;
};

}  // namespace mfc
