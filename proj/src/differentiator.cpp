#include "mfc/differentiator.hpp"

#include <cmath>

#include "mfc/error.hpp"

namespace mfc {

namespace {

double signed_power(double value, double exponent) {
  if (value == 0.0) return 0.0;
  return std::copysign(std::pow(std::abs(value), exponent), value);
}

}  // namespace

LevantDifferentiator::LevantDifferentiator(std::size_t order, double lipschitz)
    : lipschitz_(lipschitz), z_(order + 1) {
  if (order > 5) throw Error(ErrorKind::config, "differentiator order must be <= 5");
  if (!(lipschitz > 0.0)) throw Error(ErrorKind::config, "differentiator L must be > 0");
}

void LevantDifferentiator::reset() {
  z_ = Vector(z_.size());
  seeded_ = false;
}

const Vector& LevantDifferentiator::update(double y, double dt) {
  if (!(dt > 0.0)) throw Error(ErrorKind::config, "step size must be positive");
  if (!seeded_) {
    z_[0] = y;
    seeded_ = true;
  }
  const std::size_t m = order();
  Vector rate(m + 1);
  // z_i' = -lambda_{m-i} L^{1/(m-i+1)} |z_i - v_{i-1}|^{(m-i)/(m-i+1)} sgn(.) + z_{i+1},
  // with v_{-1} = y and v_{i-1} = z_{i-1}'.
  double target = y;
  for (std::size_t i = 0; i <= m; ++i) {
    const double r = static_cast<double>(m - i + 1);
    const double correction = -kLambda[m - i] * std::pow(lipschitz_, 1.0 / r) *
                              signed_power(z_[i] - target, (r - 1.0) / r);
    rate[i] = correction + (i < m ? z_[i + 1] : 0.0);
    target = rate[i];
  }
  z_ += dt * rate;
  if (!all_finite(z_)) {
    throw Error(ErrorKind::differentiator_divergence, "differentiator state is not finite");
  }
  return z_;
}

DerivativeSource DerivativeSource::oracle() { return {}; }

DerivativeSource DerivativeSource::levant(double lipschitz) {
  if (!(lipschitz > 0.0)) throw Error(ErrorKind::config, "differentiator L must be > 0");
  DerivativeSource src;
  src.mode_ = Mode::levant;
  src.lipschitz_ = lipschitz;
  return src;
}

DerivativeSource DerivativeSource::parse(const std::string& text) {
  if (text == "oracle") return oracle();
  const std::string prefix = "levant:";
  if (text.rfind(prefix, 0) == 0) {
    const std::string number = text.substr(prefix.size());
    double value = 0.0;
    try {
      std::size_t used = 0;
      value = std::stod(number, &used);
      if (used != number.size()) throw std::invalid_argument(number);
    } catch (const std::logic_error&) {
      throw Error(ErrorKind::config, "bad Lipschitz constant in '" + text + "'");
    }
    return levant(value);
  }
  throw Error(ErrorKind::config,
              "derivative source must be 'oracle' or 'levant:L', got '" + text + "'");
}

std::string DerivativeSource::to_string() const {
  return mode_ == Mode::oracle ? "oracle" : "levant:" + std::to_string(lipschitz_);
}

Vector DerivativeSource::derive(double y_meas, double dt, const FlatSystem& sys,
                                const Vector& x) {
  if (mode_ == Mode::oracle) return tau_n(sys, x);
  if (levant_.empty()) levant_.emplace_back(sys.n - 1, lipschitz_);
  return levant_.front().update(y_meas, dt);
}

}  // namespace mfc
