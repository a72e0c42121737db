#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "mfc/linalg.hpp"
#include "mfc/system.hpp"

namespace mfc {

// Known bounds |Delta1(x)| <= delta1(x) and |Delta3(x)| <= delta3(x) < 1.
struct UncertaintyBounds {
  ScalarField delta1;
  ScalarField delta3;

  // Evaluates both bounds and enforces 0 <= delta1, 0 <= delta3 < 1.
  // delta3 >= 1 raises gain_infeasible; negative values raise bound_violation.
  struct Values {
    double delta1 = 0.0;
    double delta3 = 0.0;
  };
  Values evaluate(const Vector& x) const;

  static UncertaintyBounds zero();
};

struct Decomposition {
  Vector matched;    // g g+ delta
  Vector unmatched;  // g_perp g_perp+ delta
};

// Splits an arbitrary vector v at x into its component along g(x) and the
// component in the annihilator subspace.
Decomposition decompose_vector(const Vector& g, const Vector& v);

// Matched / unmatched split of the plant uncertainty delta(x).
Decomposition decompose(const FlatSystem& sys, const Vector& x);

struct TransformedUncertainty {
  double matched = 0.0;  // L_delta L_f^{n-1} h
  Vector unmatched;      // [L_delta h, ..., L_delta L_f^{n-2} h, 0]
};

// Uncertainty in the coordinates xi = tau(x), by FD directional derivatives of
// each L_f^k h along delta.
TransformedUncertainty phi_transformed(const FlatSystem& sys, const Vector& x);

enum class MatchingStatus { matched_certified, unmatched_confirmed, inconclusive };

struct MatchingSample {
  Vector x;
  double unmatched_norm = 0.0;      // |Delta_u(x)|
  double transformed_norm = 0.0;    // |phi_u(x)|
  MatchingStatus status = MatchingStatus::inconclusive;
};

struct MatchingReport {
  std::vector<MatchingSample> samples;
  std::size_t matched_certified = 0;
  std::size_t unmatched_confirmed = 0;
  std::size_t inconclusive = 0;
  double worst_matched_phi_u = 0.0;  // max |phi_u| over samples with Delta_u = 0
};

// Pointwise check that phi_u vanishes exactly where Delta_u does. A sample
// with Delta_u = 0 (<= algebraic_tol) but |phi_u| > fd_tol raises
// matching_violation; a sample with Delta_u != 0 and |phi_u| <= fd_tol is
// reported as inconclusive.
MatchingReport certify_matching(const FlatSystem& sys, const std::vector<Vector>& samples,
                                double algebraic_tol = 1e-12, double fd_tol = 1e-6);

struct AuxDeltas {
  double d1 = 0.0;  // L_{f+delta}^n h - L_f^n h
  double d2 = 0.0;  // L_g L_{f+delta}^{n-1} h - L_g L_f^{n-1} h
  double d3 = 0.0;  // d2 / L_g L_f^{n-1} h
};

// Truth-side terms that perturb the input channel of the output-derivative
// dynamics. Raises degenerate_control when L_g L_f^{n-1} h = 0.
AuxDeltas aux_deltas(const FlatSystem& sys, const Vector& x);

}  // namespace mfc
