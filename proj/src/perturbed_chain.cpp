#include "mfc/perturbed_chain.hpp"

#include <cmath>
#include <limits>

#include "mfc/error.hpp"

namespace mfc {

double MatchedModel::value(const Vector& x) const {
  switch (kind) {
    case Kind::zero: return 0.0;
    case Kind::sum_squares: return scale * squared_norm(x);
    case Kind::sine: return scale * std::sin(x[0]);
  }
  return 0.0;
}

double MatchedModel::bound(const Vector& x) const {
  switch (kind) {
    case Kind::zero: return 0.0;
    case Kind::sum_squares: return std::abs(scale) * squared_norm(x);
    case Kind::sine: return std::abs(scale);
  }
  return 0.0;
}

MatchedModel MatchedModel::parse(const std::string& kind, double scale) {
  if (kind == "zero") return {Kind::zero, scale};
  if (kind == "sum_squares") return {Kind::sum_squares, scale};
  if (kind == "sine") return {Kind::sine, scale};
  throw Error(ErrorKind::config, "unknown matched perturbation kind '" + kind + "'");
}

PerturbedChain build_chain(const PerturbedChainParams& params) {
  const std::size_t n = params.n;
  if (n == 0) throw Error(ErrorKind::config, "chain dimension n must be >= 1");
  if (params.alpha.size() + 1 != n) {
    throw Error(ErrorKind::config, "alpha must have n-1 = " + std::to_string(n - 1) +
                                       " entries, got " + std::to_string(params.alpha.size()));
  }
  for (std::size_t i = 0; i < params.alpha.size(); ++i) {
    const double a = params.alpha[i];
    if (!(a > -1.0 && a < 1.0)) {
      throw Error(ErrorKind::config,
                  "alpha[" + std::to_string(i) + "] = " + std::to_string(a) +
                      " outside (-1, 1)");
    }
  }
  if (!(params.rho >= 0.0 && params.rho < 1.0)) {
    throw Error(ErrorKind::config, "rho = " + std::to_string(params.rho) + " outside [0, 1)");
  }

  PerturbedChain chain;
  chain.params = params;
  if (chain.params.input_channel == static_cast<std::size_t>(-1)) {
    chain.params.input_channel = n - 1;
  }
  const std::size_t input = chain.params.input_channel;
  if (input >= n) throw Error(ErrorKind::config, "input_channel out of range");

  chain.p.assign(n, 1.0);
  for (std::size_t k = 1; k < n; ++k) chain.p[k] = chain.p[k - 1] * (1.0 + params.alpha[k - 1]);
  const double p_last = chain.p[n - 1];
  // Tolerate one rounding step at the interval ends (e.g. 1.5 * 0.5 vs 0.75).
  const double slack = 4.0 * std::numeric_limits<double>::epsilon();
  if (p_last < 1.0 - params.rho - slack || p_last > 1.0 + params.rho + slack) {
    throw Error(ErrorKind::config, "p_{n-1} = " + std::to_string(p_last) +
                                       " violates 1-rho <= p_{n-1} <= 1+rho for rho = " +
                                       std::to_string(params.rho));
  }

  const MatchedModel matched = params.matched;
  const std::vector<double> alpha = params.alpha;
  const std::vector<double> p = chain.p;

  FlatSystem& sys = chain.system;
  sys.name = "perturbed_chain";
  sys.n = n;
  sys.f = [n](const Vector& x) {
    Vector dx(n);
    for (std::size_t i = 0; i + 1 < n; ++i) dx[i] = x[i + 1];
    return dx;
  };
  sys.g = [n, input](const Vector&) { return Vector::unit(n, input); };
  sys.h = [](const Vector& x) { return x[0]; };
  sys.delta = [n, alpha, matched](const Vector& x) {
    Vector d(n);
    for (std::size_t i = 0; i + 1 < n; ++i) d[i] = alpha[i] * x[i + 1];
    d[n - 1] = matched.value(x);
    return d;
  };
  sys.lf_h = [n](const Vector& x, std::size_t k) { return k < n ? x[k] : 0.0; };
  sys.lg_lf_h = [n, input](const Vector&) { return input == n - 1 ? 1.0 : 0.0; };
  sys.lfd_h = [n, p, matched](const Vector& x, std::size_t k) {
    return k < n ? p[k] * x[k] : p[n - 1] * matched.value(x);
  };
  sys.lg_lfd_h = [n, input, p_last](const Vector&) { return input == n - 1 ? p_last : 0.0; };

  const double rho = params.rho;
  chain.bounds = {[matched, rho](const Vector& x) { return (1.0 + rho) * matched.bound(x); },
                  [rho](const Vector&) { return rho; }};
  chain.matched_bounds = {[matched](const Vector& x) { return matched.bound(x); },
                          [](const Vector&) { return 0.0; }};
  return chain;
}

double chain_gain(const PerturbedChain& chain, const Vector& x, double bracket) {
  const double rho = chain.params.rho;
  return ((1.0 + rho) * chain.params.matched.bound(x) + rho * std::abs(bracket)) / (1.0 - rho);
}

}  // namespace mfc
