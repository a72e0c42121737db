#include <cmath>

#include "doctest.h"
#include "mfc/differentiator.hpp"
#include "mfc/error.hpp"
#include "mfc/perturbed_chain.hpp"

using namespace mfc;

TEST_SUITE("differentiator") {
  TEST_CASE("oracle source returns the true output derivatives") {
    const auto chain = build_chain({});
    auto src = DerivativeSource::oracle();
    CHECK(src.derive(1.0, 1e-3, chain.system, Vector{1, 0, 0}) == Vector{1, 0, 0});
    CHECK(src.derive(0.0, 1e-3, chain.system, Vector{0, 2, 2}) == Vector{0, 3, 1.5});
  }

  TEST_CASE("levant tracks sin t after the transient") {
    // Transient frozen from a reference run (last 0.05 exceedance near t = 2.55).
    constexpr double kTransient = 3.0;
    const double dt = 1e-4;
    LevantDifferentiator d(2, 2.0);
    double worst = 0.0;
    for (int i = 0; i <= 200000; ++i) {
      const double t = i * dt;
      const Vector& z = d.update(std::sin(t), dt);
      const double tn = t + dt;
      if (tn < kTransient) continue;
      worst = std::max({worst, std::abs(z[0] - std::sin(tn)), std::abs(z[1] - std::cos(tn)),
                        std::abs(z[2] + std::sin(tn))});
    }
    CHECK(worst <= 0.05);
  }

  TEST_CASE("levant converges on a constant") {
    LevantDifferentiator d(3, 1.0);
    for (int i = 0; i < 100000; ++i) d.update(0.7, 1e-4);
    CHECK(d.state()[0] == doctest::Approx(0.7).epsilon(1e-9));
    for (std::size_t k = 1; k <= 3; ++k) CHECK(std::abs(d.state()[k]) < 1e-6);
  }

  TEST_CASE("levant rejects bad parameters and divergence") {
    CHECK_THROWS_AS(LevantDifferentiator(6, 1.0), Error);
    CHECK_THROWS_AS(LevantDifferentiator(2, 0.0), Error);
    LevantDifferentiator d(2, 1.0);
    try {
      d.update(1.0, 1e-3);
      d.update(NAN, 1e-3);
      FAIL("expected an exception");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::differentiator_divergence);
    }
  }

  TEST_CASE("derivative source parsing") {
    CHECK(DerivativeSource::parse("oracle").mode() == DerivativeSource::Mode::oracle);
    const auto l = DerivativeSource::parse("levant:12.5");
    CHECK(l.mode() == DerivativeSource::Mode::levant);
    CHECK(l.lipschitz() == 12.5);
    CHECK(DerivativeSource::parse(l.to_string()).lipschitz() == 12.5);
    CHECK_THROWS_AS(DerivativeSource::parse("levant:"), Error);
    CHECK_THROWS_AS(DerivativeSource::parse("spline"), Error);
  }

  TEST_CASE("levant source seeds from the measurement") {
    const auto chain = build_chain({});
    auto src = DerivativeSource::levant(5.0);
    const Vector z = src.derive(0.4, 1e-4, chain.system, Vector{0.4, 0, 0});
    REQUIRE(z.size() == 3);
    CHECK(z[0] == doctest::Approx(0.4).epsilon(1e-3));
  }
}
