#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mfc/linalg.hpp"

namespace mfc {

using VectorField = std::function<Vector(const Vector&)>;
using ScalarField = std::function<double(const Vector&)>;
// (x, k) -> k-th iterated Lie derivative of the output.
using LieChain = std::function<double(const Vector&, std::size_t)>;

// Single-input plant  x' = f(x) + g(x) u + delta(x),  y = h(x)  whose output
// has relative degree n. Lie derivatives are closed-form callbacks; the
// finite-difference helpers below exist to check them.
//
// delta, lfd_h and lg_lfd_h describe the true (uncertain) plant. Controllers
// must only use f, g, h, lf_h and lg_lf_h.
struct FlatSystem {
  std::string name;
  std::size_t n = 0;
  VectorField f;
  VectorField g;
  ScalarField h;
  VectorField delta;
  LieChain lf_h;       // L_f^k h, k = 0..n
  ScalarField lg_lf_h; // L_g L_f^{n-1} h
  LieChain lfd_h;      // L_{f+delta}^k h, k = 0..n
  // L_g L_{f+delta}^{n-1} h. Optional; finite differences of lfd_h otherwise.
  ScalarField lg_lfd_h;

  // f(x) + delta(x)
  Vector drift_true(const Vector& x) const;
  // Right-hand side of the true plant under input u.
  Vector rhs(const Vector& x, double u) const;
};

// Desired output y_d(t) with derivatives up to `order`.
class Reference {
 public:
  using Derivative = std::function<double(double t, std::size_t i)>;

  Reference(std::string kind, std::size_t order, Derivative derivative)
      : kind_(std::move(kind)), order_(order), derivative_(std::move(derivative)) {}

  const std::string& kind() const noexcept { return kind_; }
  std::size_t order() const noexcept { return order_; }

  // i-th time derivative, i <= order().
  double derivative(double t, std::size_t i) const;

  // [y_d, y_d', ..., y_d^(n-1)] at t.
  Vector desired_state(double t, std::size_t n) const;

 private:
  std::string kind_;
  std::size_t order_;
  Derivative derivative_;
};

// y_d = offset + amplitude * sin(frequency t + phase)
Reference sine_reference(std::size_t order, double amplitude = 1.0, double frequency = 1.0,
                         double phase = 0.0, double offset = 0.0);

// y_d = sum_i coeffs[i] t^i
Reference polynomial_reference(std::size_t order, std::vector<double> coeffs);

// Checks that every derivative up to order() is finite and bounded by `limit`
// on `samples` uniformly spaced points of [0, horizon]. Returns the largest
// magnitude seen.
double check_reference_bounded(const Reference& ref, double horizon, std::size_t samples,
                               double limit);

// tau(x) = [h, L_f h, ..., L_f^{n-1} h]
Vector tau(const FlatSystem& sys, const Vector& x);

// tau_n(x) = [h, L_{f+delta} h, ..., L_{f+delta}^{n-1} h], the true output
// derivatives [y, y', ..., y^(n-1)].
Vector tau_n(const FlatSystem& sys, const Vector& x);

double default_fd_step(const Vector& x);

// Central-difference estimate of grad(scalar)(x) . field(x).
double lie_fd_oracle(const VectorField& field, const ScalarField& scalar, const Vector& x,
                     std::optional<double> step = std::nullopt);

// L_g L_{f+delta}^{n-1} h from the closed form when present, else by FD.
double control_coefficient_true(const FlatSystem& sys, const Vector& x);

struct RelativeDegreeReport {
  std::size_t samples_checked = 0;
  double worst_zero_violation = 0.0;       // max |L_g L^k h|, k <= n-2
  double smallest_input_coefficient = 0.0; // min |L_g L^{n-1} h|
  bool passed = true;
  std::string failure;  // first failing sample, empty on success
};

// Verifies L_g L_f^k h = 0 (k <= n-2) and L_g L_f^{n-1} h != 0, and the same
// along f + delta, at every sample. Throws relative_degree_violation.
RelativeDegreeReport check_relative_degree(const FlatSystem& sys,
                                           const std::vector<Vector>& samples,
                                           double tolerance = 1e-6);

struct LieChainReport {
  std::size_t samples_checked = 0;
  double worst_relative_error = 0.0;
  std::string worst_term;
};

// Compares every closed-form Lie derivative with one finite-difference layer
// applied to the previous level: L^k h vs L(L^{k-1} h), for the nominal and
// the true field, plus both control coefficients.
LieChainReport verify_lie_chain(const FlatSystem& sys, const std::vector<Vector>& samples);

struct TransformJacobian {
  Matrix h;  // rows are d(L_f^k h)/dx
  double condition = 0.0;
  bool ill_conditioned = false;  // condition > 1e12
};

TransformJacobian tau_jacobian(const FlatSystem& sys, const Vector& x);

// Solves tau(x) = xi by damped Newton from `guess` (diagnostics only).
Vector tau_inverse(const FlatSystem& sys, const Vector& xi, const Vector& guess,
                   double tolerance = 1e-10, int max_iterations = 50);

}  // namespace mfc
