#include "mfc/uncertainty.hpp"

#include <algorithm>
#include <cmath>

#include "mfc/error.hpp"

namespace mfc {

UncertaintyBounds::Values UncertaintyBounds::evaluate(const Vector& x) const {
  Values v{delta1(x), delta3(x)};
  if (!(v.delta1 >= 0.0) || !(v.delta3 >= 0.0)) {
    throw Error(ErrorKind::bound_violation, "uncertainty bounds must be nonnegative (delta1=" +
                                                std::to_string(v.delta1) + ", delta3=" +
                                                std::to_string(v.delta3) + ")");
  }
  if (!(v.delta3 < 1.0)) {
    throw Error(ErrorKind::gain_infeasible,
                "delta3 = " + std::to_string(v.delta3) + " is not below 1");
  }
  return v;
}

UncertaintyBounds UncertaintyBounds::zero() {
  return {[](const Vector&) { return 0.0; }, [](const Vector&) { return 0.0; }};
}

Decomposition decompose_vector(const Vector& g, const Vector& v) {
  const Vector g_plus = left_pseudo_inverse(g);
  Decomposition d;
  d.matched = dot(g_plus, v) * g;
  // The annihilator has orthonormal columns, so its pseudo-inverse is its
  // transpose.
  const Matrix g_perp = annihilator(g);
  d.unmatched = g_perp * (g_perp.transpose() * v);
  return d;
}

Decomposition decompose(const FlatSystem& sys, const Vector& x) {
  return decompose_vector(sys.g(x), sys.delta(x));
}

TransformedUncertainty phi_transformed(const FlatSystem& sys, const Vector& x) {
  TransformedUncertainty out{0.0, Vector(sys.n)};
  for (std::size_t k = 0; k < sys.n; ++k) {
    const double value = lie_fd_oracle(
        sys.delta, [&sys, k](const Vector& z) { return sys.lf_h(z, k); }, x);
    if (!std::isfinite(value)) {
      throw Error(ErrorKind::numeric_overflow,
                  "L_delta L_f^" + std::to_string(k) + " h is not finite");
    }
    if (k + 1 < sys.n) {
      out.unmatched[k] = value;
    } else {
      out.matched = value;
    }
  }
  return out;
}

MatchingReport certify_matching(const FlatSystem& sys, const std::vector<Vector>& samples,
                                double algebraic_tol, double fd_tol) {
  if (samples.empty()) throw Error(ErrorKind::invalid_dimension, "no samples to certify");
  MatchingReport report;
  report.samples.reserve(samples.size());
  for (const Vector& x : samples) {
    MatchingSample s;
    s.x = x;
    const Vector delta = sys.delta(x);
    s.unmatched_norm = norm(decompose(sys, x).unmatched);
    s.transformed_norm = norm(phi_transformed(sys, x).unmatched);
    if (s.unmatched_norm <= algebraic_tol * (1.0 + norm(delta))) {
      if (s.transformed_norm > fd_tol) {
        throw Error(ErrorKind::matching_violation,
                    "Delta_u vanishes but |phi_u| = " + std::to_string(s.transformed_norm));
      }
      s.status = MatchingStatus::matched_certified;
      report.worst_matched_phi_u = std::max(report.worst_matched_phi_u, s.transformed_norm);
      ++report.matched_certified;
    } else if (s.transformed_norm > fd_tol) {
      s.status = MatchingStatus::unmatched_confirmed;
      ++report.unmatched_confirmed;
    } else {
      s.status = MatchingStatus::inconclusive;
      ++report.inconclusive;
    }
    report.samples.push_back(std::move(s));
  }
  return report;
}

AuxDeltas aux_deltas(const FlatSystem& sys, const Vector& x) {
  const double nominal_coefficient = sys.lg_lf_h(x);
  if (nominal_coefficient == 0.0 || !std::isfinite(nominal_coefficient)) {
    throw Error(ErrorKind::degenerate_control, "L_g L_f^{n-1} h = " +
                                                   std::to_string(nominal_coefficient));
  }
  AuxDeltas d;
  d.d1 = sys.lfd_h(x, sys.n) - sys.lf_h(x, sys.n);
  d.d2 = control_coefficient_true(sys, x) - nominal_coefficient;
  d.d3 = d.d2 / nominal_coefficient;
  return d;
}

}  // namespace mfc
