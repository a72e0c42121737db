#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "mfc/linalg.hpp"
#include "mfc/system.hpp"

namespace mfc {

// Arbitrary-order robust exact differentiator (recursive form), discretised
// with explicit Euler at the caller's step. Estimates y, y', ..., y^(order)
// for signals with |y^(order+1)| <= lipschitz.
class LevantDifferentiator {
 public:
  // Coefficients lambda_0..lambda_5 for orders up to 5.
  static constexpr double kLambda[6] = {1.1, 1.5, 2.0, 3.0, 5.0, 8.0};

  LevantDifferentiator(std::size_t order, double lipschitz);

  std::size_t order() const noexcept { return z_.size() - 1; }
  double lipschitz() const noexcept { return lipschitz_; }
  const Vector& state() const noexcept { return z_; }

  // Advances by dt with measurement y and returns [z_0, ..., z_order].
  // The first call seeds z_0 = y.
  const Vector& update(double y, double dt);
  void reset();

 private:
  double lipschitz_;
  Vector z_;
  bool seeded_ = false;
};

// Supplies xi_n = [y, y', ..., y^(n-1)] to the controller.
class DerivativeSource {
 public:
  enum class Mode { oracle, levant };

  static DerivativeSource oracle();
  static DerivativeSource levant(double lipschitz);
  // "oracle" or "levant:L"
  static DerivativeSource parse(const std::string& text);

  Mode mode() const noexcept { return mode_; }
  double lipschitz() const noexcept { return lipschitz_; }
  std::string to_string() const;

  // Oracle: tau_n(x). Levant: one differentiator step on y_meas, creating the
  // (n-1)-th order differentiator on first use.
  Vector derive(double y_meas, double dt, const FlatSystem& sys, const Vector& x);

 private:
  Mode mode_ = Mode::oracle;
  double lipschitz_ = 0.0;
  std::vector<LevantDifferentiator> levant_;  // 0 or 1 entries
};

}  // namespace mfc
