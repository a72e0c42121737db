#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "mfc/linalg.hpp"
#include "mfc/system.hpp"
#include "mfc/uncertainty.hpp"

namespace mfc {

// Matched perturbation phi_m(x) and its known bound delta(x).
struct MatchedModel {
  enum class Kind { zero, sum_squares, sine };
  Kind kind = Kind::sum_squares;
  double scale = 1.0;

  double value(const Vector& x) const;
  double bound(const Vector& x) const;

  static MatchedModel parse(const std::string& kind, double scale);
};

struct PerturbedChainParams {
  std::size_t n = 3;
  std::vector<double> alpha{0.5, -0.5};  // n-1 entries in (-1, 1)
  double rho = 0.25;                     // 1-rho <= p_{n-1} <= 1+rho
  MatchedModel matched;
  // 0-based index of the actuated state; n-1 is the integrator chain's input.
  // Anything else breaks the relative degree and exists for negative tests.
  std::size_t input_channel = static_cast<std::size_t>(-1);
};

// Integrator chain x' = A x + B (u + phi_m(x)) + phi_u(x) with
// phi_u = [alpha_1 x_2, ..., alpha_{n-1} x_n, 0], output y = x_1.
struct PerturbedChain {
  PerturbedChainParams params;
  std::vector<double> p;  // p_k = prod_{i<=k} (1 + alpha_i), p_0 = 1
  FlatSystem system;
  // delta1 = (1 + rho) delta(x), delta3 = rho
  UncertaintyBounds bounds;
  // Bounds a designer assuming matched-only uncertainty would use:
  // delta1 = delta(x), delta3 = 0.
  UncertaintyBounds matched_bounds;
};

// Validates the parameters and builds the plant with closed-form Lie
// derivatives. Raises ErrorKind::config on invalid parameters.
PerturbedChain build_chain(const PerturbedChainParams& params);

// Gain of the Lyapunov redesign for this family,
// ((1 + rho) delta(x) + rho |bracket|) / (1 - rho).
double chain_gain(const PerturbedChain& chain, const Vector& x, double bracket);

}  // namespace mfc
