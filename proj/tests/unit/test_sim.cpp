#include <cmath>

#include "doctest.h"
#include "mfc/error.hpp"
#include "mfc/sim.hpp"
#include "test_systems.hpp"

using namespace mfc;

namespace {

SimConfig short_config(Variant v, double horizon = 1.0) {
  SimConfig cfg = study_config(v);
  cfg.horizon = horizon;
  return cfg;
}

}  // namespace

TEST_SUITE("sim") {
  TEST_CASE("comparison study configuration") {
    const SimConfig cfg = study_config(Variant::mfc);
    CHECK(cfg.plant.alpha == std::vector<double>{0.5, -0.5});
    CHECK(cfg.plant.rho == 0.25);
    CHECK(cfg.x0 == Vector{1, 0, 0});
    REQUIRE(cfg.xistar0.has_value());
    CHECK(*cfg.xistar0 == Vector{0.5, 0, 0});
    CHECK(cfg.steps() == 200000);
    CHECK(parse_variant("matched_only") == Variant::matched_only);
    CHECK_THROWS_AS(parse_variant("pid"), Error);
  }

  TEST_CASE("first recorded sample") {
    const SimResult r = run(short_config(Variant::mfc, 0.01));
    const SimSeries& s = r.series;
    REQUIRE(s.size() == 2);
    CHECK(s.t[0] == 0.0);
    CHECK(s.e[0] == 1.0);
    CHECK(s.V[0] == 1.31640625);
    CHECK(s.w[0] == 0.0078125);
    CHECK(s.u[0] == doctest::Approx(1.5 - 32.0 - (1.25 + 0.25 * 30.5) / 0.75));
    CHECK(s.xi_star[0] == Vector{0.5, 0, 0});
    CHECK(r.audit.gating);
  }

  TEST_CASE("matched-only run uses the matched-only gain") {
    const SimResult r = run(short_config(Variant::matched_only, 0.01));
    CHECK(r.series.gamma[0] == 1.0);
    CHECK_FALSE(r.audit.gating);
  }

  TEST_CASE("exact feedforward without uncertainty") {
    // The control is held over each step, so the residual error is first order
    // in dt.
    const Reference ref = sine_reference(3);
    auto worst_error = [&](double dt) {
      SimConfig cfg = short_config(Variant::mfc, 5.0);
      cfg.dt = dt;
      cfg.x0 = ref.desired_state(0.0, 3);
      cfg.xistar0 = cfg.x0;
      const SimResult r = run(cfg, mfc::testing::nominal_chain(3), UncertaintyBounds::zero(), ref);
      double worst = 0.0;
      for (double e : r.series.e) worst = std::max(worst, std::abs(e));
      return worst;
    };
    const double coarse = worst_error(1e-4);
    const double fine = worst_error(5e-5);
    CHECK(coarse <= 1e-4);
    CHECK(fine / coarse == doctest::Approx(0.5).epsilon(0.1));
  }

  TEST_CASE("runs are deterministic") {
    const SimResult a = run(short_config(Variant::mfc, 2.0));
    const SimResult b = run(short_config(Variant::mfc, 2.0));
    CHECK(a.series.u == b.series.u);
    CHECK(a.series.x == b.series.x);
    CHECK(a.series.xi_star == b.series.xi_star);
  }

  TEST_CASE("comparison shares the time grid") {
    const auto cmp = run_comparison({short_config(Variant::mfc), short_config(Variant::matched_only),
                                     short_config(Variant::single_loop)});
    REQUIRE(cmp.runs.size() == 3);
    CHECK(cmp.runs[0].series.t == cmp.runs[1].series.t);
    CHECK(cmp.runs[0].series.t == cmp.runs[2].series.t);
    CHECK(cmp.runs[1].label == "matched_only");

    SimConfig other = short_config(Variant::matched_only);
    other.dt = 2e-4;
    CHECK_THROWS_AS(run_comparison({short_config(Variant::mfc), other}), Error);
  }

  TEST_CASE("chain model responses") {
    const auto zero = simulate_chain_model(Vector(3), [](double, const Vector&) { return 0.0; },
                                           1e-3, 1000, 100);
    for (const Vector& v : zero) CHECK(v == Vector(3));

    const auto step = simulate_chain_model(Vector(3), [](double, const Vector&) { return 1.0; },
                                           1e-3, 2000, 500);
    REQUIRE(step.size() == 5);
    for (std::size_t i = 0; i < step.size(); ++i) {
      const double t = 0.5 * static_cast<double>(i);
      CHECK(std::abs(step[i][0] - t * t * t / 6) <= 1e-8);
      CHECK(std::abs(step[i][1] - t * t / 2) <= 1e-8);
      CHECK(std::abs(step[i][2] - t) <= 1e-8);
    }

    const auto chain = build_chain({});
    const auto classical = simulate_classical_model(
        chain.system, Vector(3), [](double, const Vector&) { return 1.0; }, 1e-3, 2000, 500);
    REQUIRE(classical.size() == step.size());
    for (std::size_t i = 0; i < step.size(); ++i) CHECK(norm(classical[i] - step[i]) <= 1e-8);
  }

  TEST_CASE("divergence is reported") {
    SimConfig cfg = short_config(Variant::mfc, 5.0);
    cfg.x0 = Vector{5, 5, 5};
    cfg.dt = 0.05;
    cfg.decimation = 1;
    try {
      run(cfg);
      FAIL("expected an exception");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::divergence);
    }
  }

  TEST_CASE("invalid configurations") {
    SimConfig cfg = study_config(Variant::mfc);
    cfg.horizon = 0.0;
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg = study_config(Variant::mfc);
    cfg.k_poles = {-1, -1};
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg = study_config(Variant::mfc);
    cfg.eta = -1.0;
    CHECK_THROWS_AS(cfg.validate(), Error);
  }

  TEST_CASE("boundary layer and levant runs stay bounded") {
    SimConfig cfg = short_config(Variant::mfc, 5.0);
    cfg.sign = SignPolicy::boundary_layer(1e-3);
    const SimResult layer = run(cfg);
    CHECK(layer.summary.final_window_max_error < 1.0);

    cfg = short_config(Variant::mfc, 5.0);
    cfg.deriv = "levant:50";
    const SimResult levant = run(cfg);
    CHECK(std::isfinite(levant.summary.final_window_max_error));
  }
}
