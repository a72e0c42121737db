#include "mfc/system.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <sstream>

#include "mfc/error.hpp"

namespace mfc {

Vector FlatSystem::drift_true(const Vector& x) const { return f(x) + delta(x); }

Vector FlatSystem::rhs(const Vector& x, double u) const {
  return f(x) + u * g(x) + delta(x);
}

double Reference::derivative(double t, std::size_t i) const {
  if (i > order_) {
    throw Error(ErrorKind::invalid_dimension, "reference derivative order " +
                                                  std::to_string(i) + " exceeds " +
                                                  std::to_string(order_));
  }
  return derivative_(t, i);
}

Vector Reference::desired_state(double t, std::size_t n) const {
  Vector xi(n);
  for (std::size_t i = 0; i < n; ++i) xi[i] = derivative(t, i);
  return xi;
}

Reference sine_reference(std::size_t order, double amplitude, double frequency, double phase,
                         double offset) {
  return Reference("sin", order, [=](double t, std::size_t i) {
    // d^i/dt^i sin(w t + phi) = w^i sin(w t + phi + i pi/2)
    const double arg = frequency * t + phase;
    double value = 0.0;
    switch (i % 4) {
      case 0: value = std::sin(arg); break;
      case 1: value = std::cos(arg); break;
      case 2: value = -std::sin(arg); break;
      default: value = -std::cos(arg); break;
    }
    value *= amplitude * std::pow(frequency, static_cast<double>(i));
    return i == 0 ? value + offset : value;
  });
}

Reference polynomial_reference(std::size_t order, std::vector<double> coeffs) {
  return Reference("poly", order, [coeffs = std::move(coeffs)](double t, std::size_t i) {
    double value = 0.0;
    // Horner on the i-th derivative's coefficients.
    for (std::size_t j = coeffs.size(); j-- > i;) {
      double falling = 1.0;
      for (std::size_t m = 0; m < i; ++m) falling *= static_cast<double>(j - m);
      value = value * t + falling * coeffs[j];
    }
    return value;
  });
}

double check_reference_bounded(const Reference& ref, double horizon, std::size_t samples,
                               double limit) {
  double largest = 0.0;
  const std::size_t count = std::max<std::size_t>(samples, 2);
  for (std::size_t s = 0; s < count; ++s) {
    const double t = horizon * static_cast<double>(s) / static_cast<double>(count - 1);
    for (std::size_t i = 0; i <= ref.order(); ++i) {
      const double v = ref.derivative(t, i);
      if (!std::isfinite(v) || std::abs(v) > limit) {
        throw Error(ErrorKind::numeric_overflow,
                    "reference derivative " + std::to_string(i) + " at t=" +
                        std::to_string(t) + " is " + std::to_string(v));
      }
      largest = std::max(largest, std::abs(v));
    }
  }
  return largest;
}

namespace {

Vector transform(const LieChain& chain, const FlatSystem& sys, const Vector& x,
                 const char* label) {
  if (x.size() != sys.n) {
    throw Error(ErrorKind::invalid_dimension, std::string(label) + ": state has size " +
                                                  std::to_string(x.size()) + ", expected " +
                                                  std::to_string(sys.n));
  }
  Vector xi(sys.n);
  for (std::size_t k = 0; k < sys.n; ++k) {
    xi[k] = chain(x, k);
    if (!std::isfinite(xi[k])) {
      throw Error(ErrorKind::numeric_overflow,
                  std::string(label) + " component " + std::to_string(k) + " is not finite");
    }
  }
  return xi;
}

ScalarField level(const LieChain& chain, std::size_t k) {
  return [&chain, k](const Vector& x) { return chain(x, k); };
}

std::string describe(const Vector& x) {
  std::ostringstream os;
  os.precision(6);
  os << '[';
  for (std::size_t i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
  os << ']';
  return os.str();
}

}  // namespace

Vector tau(const FlatSystem& sys, const Vector& x) { return transform(sys.lf_h, sys, x, "tau"); }

Vector tau_n(const FlatSystem& sys, const Vector& x) {
  return transform(sys.lfd_h, sys, x, "tau_n");
}

double default_fd_step(const Vector& x) { return 1e-6 * (1.0 + norm(x)); }

double lie_fd_oracle(const VectorField& field, const ScalarField& scalar, const Vector& x,
                     std::optional<double> step) {
  const double s = step.value_or(default_fd_step(x));
  const Vector direction = field(x);
  const double plus = scalar(x + s * direction);
  const double minus = scalar(x - s * direction);
  return (plus - minus) / (2.0 * s);
}

double control_coefficient_true(const FlatSystem& sys, const Vector& x) {
  if (sys.lg_lfd_h) return sys.lg_lfd_h(x);
  return lie_fd_oracle(sys.g, level(sys.lfd_h, sys.n - 1), x);
}

RelativeDegreeReport check_relative_degree(const FlatSystem& sys,
                                           const std::vector<Vector>& samples,
                                           double tolerance) {
  if (samples.empty()) {
    throw Error(ErrorKind::invalid_dimension, "relative degree check needs samples");
  }
  RelativeDegreeReport report;
  report.smallest_input_coefficient = std::numeric_limits<double>::infinity();

  for (const Vector& x : samples) {
    for (const LieChain* chain : {&sys.lf_h, &sys.lfd_h}) {
      const char* which = chain == &sys.lf_h ? "f" : "f+delta";
      for (std::size_t k = 0; k < sys.n; ++k) {
        const double coefficient = lie_fd_oracle(sys.g, level(*chain, k), x);
        if (k + 1 < sys.n) {
          report.worst_zero_violation =
              std::max(report.worst_zero_violation, std::abs(coefficient));
          if (std::abs(coefficient) > tolerance && report.passed) {
            report.passed = false;
            report.failure = "L_g L_" + std::string(which) + "^" + std::to_string(k) +
                             " h = " + std::to_string(coefficient) + " at x = " + describe(x) +
                             " (k=" + std::to_string(k) + ")";
          }
        } else {
          report.smallest_input_coefficient =
              std::min(report.smallest_input_coefficient, std::abs(coefficient));
          if (std::abs(coefficient) <= tolerance && report.passed) {
            report.passed = false;
            report.failure = "L_g L_" + std::string(which) + "^" + std::to_string(k) +
                             " h vanishes at x = " + describe(x) +
                             " (k=" + std::to_string(k) + ")";
          }
        }
      }
    }
    ++report.samples_checked;
  }
  if (!report.passed) throw Error(ErrorKind::relative_degree_violation, report.failure);
  return report;
}

LieChainReport verify_lie_chain(const FlatSystem& sys, const std::vector<Vector>& samples) {
  LieChainReport report;
  const VectorField true_drift = [&sys](const Vector& x) { return sys.drift_true(x); };

  auto record = [&report](double closed, double estimate, const std::string& term) {
    const double err = std::abs(closed - estimate) / (1.0 + std::abs(closed));
    if (err > report.worst_relative_error || report.worst_term.empty()) {
      report.worst_relative_error = std::max(report.worst_relative_error, err);
      report.worst_term = term;
    }
  };

  for (const Vector& x : samples) {
    record(sys.lf_h(x, 0), sys.h(x), "L_f^0 h");
    record(sys.lfd_h(x, 0), sys.h(x), "L_{f+delta}^0 h");
    for (std::size_t k = 1; k <= sys.n; ++k) {
      record(sys.lf_h(x, k), lie_fd_oracle(sys.f, level(sys.lf_h, k - 1), x),
             "L_f^" + std::to_string(k) + " h");
      record(sys.lfd_h(x, k), lie_fd_oracle(true_drift, level(sys.lfd_h, k - 1), x),
             "L_{f+delta}^" + std::to_string(k) + " h");
    }
    record(sys.lg_lf_h(x), lie_fd_oracle(sys.g, level(sys.lf_h, sys.n - 1), x),
           "L_g L_f^{n-1} h");
    if (sys.lg_lfd_h) {
      record(sys.lg_lfd_h(x), lie_fd_oracle(sys.g, level(sys.lfd_h, sys.n - 1), x),
             "L_g L_{f+delta}^{n-1} h");
    }
    ++report.samples_checked;
  }
  return report;
}

TransformJacobian tau_jacobian(const FlatSystem& sys, const Vector& x) {
  const std::size_t n = sys.n;
  const double s = default_fd_step(x);
  TransformJacobian out{Matrix(n, n)};
  for (std::size_t j = 0; j < n; ++j) {
    const Vector ej = Vector::unit(n, j);
    const Vector diff = tau(sys, x + s * ej) - tau(sys, x - s * ej);
    for (std::size_t i = 0; i < n; ++i) out.h(i, j) = diff[i] / (2.0 * s);
  }
  out.condition = condition_number(out.h);
  out.ill_conditioned = !(out.condition <= 1e12);
  if (out.ill_conditioned) {
    std::clog << "warning: transform Jacobian of " << sys.name << " at " << describe(x)
              << " has condition " << out.condition << '\n';
  }
  return out;
}

Vector tau_inverse(const FlatSystem& sys, const Vector& xi, const Vector& guess,
                   double tolerance, int max_iterations) {
  Vector x = guess;
  Vector residual = tau(sys, x) - xi;
  for (int it = 0; it < max_iterations && max_abs(residual) > tolerance; ++it) {
    LuDecomposition lu(tau_jacobian(sys, x).h);
    if (lu.singular()) {
      throw Error(ErrorKind::numeric_overflow, "singular transform Jacobian at " + describe(x));
    }
    const Vector step = lu.solve(residual);
    double damping = 1.0;
    Vector candidate = x - step;
    Vector candidate_residual = tau(sys, candidate) - xi;
    while (norm(candidate_residual) > norm(residual) && damping > 1e-6) {
      damping *= 0.5;
      candidate = x - damping * step;
      candidate_residual = tau(sys, candidate) - xi;
    }
    x = std::move(candidate);
    residual = std::move(candidate_residual);
  }
  if (max_abs(residual) > tolerance) {
    throw Error(ErrorKind::numeric_overflow,
                "tau inverse did not converge, residual " + std::to_string(max_abs(residual)));
  }
  return x;
}

}  // namespace mfc
