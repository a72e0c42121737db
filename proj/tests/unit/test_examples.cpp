#include <cmath>

#include "doctest.h"
#include "mfc/error.hpp"
#include "mfc/perturbed_chain.hpp"
#include "test_systems.hpp"

using namespace mfc;
using mfc::testing::random_states;

TEST_SUITE("examples") {
  TEST_CASE("default chain parameters") {
    const auto chain = build_chain({});
    REQUIRE(chain.p.size() == 3);
    CHECK(chain.p[0] == 1.0);
    CHECK(chain.p[1] == 1.5);
    CHECK(chain.p[2] == 0.75);
    const Vector x{1, -2, 0.5};
    CHECK(chain.params.matched.value(x) == squared_norm(x));
    CHECK(chain.params.matched.bound(x) == squared_norm(x));
    const auto b = chain.bounds.evaluate(x);
    CHECK(b.delta1 == doctest::Approx(1.25 * squared_norm(x)));
    CHECK(b.delta3 == 0.25);
    const auto mb = chain.matched_bounds.evaluate(x);
    CHECK(mb.delta1 == squared_norm(x));
    CHECK(mb.delta3 == 0.0);
  }

  TEST_CASE("bounds dominate the true deltas") {
    const auto chain = build_chain({});
    for (const Vector& x : random_states(31, 500, 3, -3.0, 3.0)) {
      const auto d = aux_deltas(chain.system, x);
      const auto b = chain.bounds.evaluate(x);
      CHECK(std::abs(d.d1) <= b.delta1 + 1e-12);
      CHECK(std::abs(d.d3) <= b.delta3 + 1e-12);
    }
  }

  TEST_CASE("zero alpha reduces to matched-only uncertainty") {
    PerturbedChainParams p;
    p.alpha = {0.0, 0.0};
    p.rho = 0.0;
    const auto chain = build_chain(p);
    for (const Vector& x : random_states(32, 50, 3)) {
      CHECK(max_abs(decompose(chain.system, x).unmatched) <= 1e-12 * (1.0 + squared_norm(x)));
      CHECK(aux_deltas(chain.system, x).d3 == 0.0);
    }
  }

  TEST_CASE("chain gain") {
    const auto chain = build_chain({});
    const Vector x{1, 1, 1};
    CHECK(chain_gain(chain, x, 0.0) == doctest::Approx(1.25 / 0.75 * 3.0));
    CHECK(chain_gain(chain, x, 2.0) == doctest::Approx((1.25 * 3.0 + 0.5) / 0.75));
  }

  TEST_CASE("invalid parameters") {
    auto expect_config = [](PerturbedChainParams p) {
      try {
        build_chain(p);
        FAIL("expected an exception");
      } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::config);
      }
    };
    PerturbedChainParams p;
    p.alpha = {1.5, -0.5};
    expect_config(p);
    p.alpha = {0.5};
    expect_config(p);
    p = {};
    p.rho = 1.0;
    expect_config(p);
    p = {};
    p.rho = 0.1;  // p_2 = 0.75 outside [0.9, 1.1]
    expect_config(p);
  }

  TEST_CASE("wrong input channel breaks the relative degree") {
    PerturbedChainParams p;
    p.input_channel = 0;
    const auto chain = build_chain(p);
    CHECK_THROWS_AS(check_relative_degree(chain.system, random_states(33, 10, 3)), Error);
  }
}
