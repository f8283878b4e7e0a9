#include <catch2/catch_amalgamated.hpp>

#include "drgt/cli.hpp"
#include "helpers.hpp"

using namespace drgt;
using namespace testhelp;
using Catch::Approx;

TEST_CASE("embedded robust free rider fixture parses to the documented family", "[spec]") {
    const auto& fx = fixture_by_name("free_rider_robust");  // alias of robust_free_rider
    const std::string text = emit_spec(fx.spec);
    const GameSpecFile spec = parse_spec_text(text);
    REQUIRE(spec.regime == Regime::robust);
    REQUIRE(spec.parametric.has_value());
    REQUIRE(spec.parametric->num_params() == 1);
    const auto& iv = std::get<Interval>(spec.parametric->supports[0]);
    CHECK(iv.lo == Approx(0.25));
    CHECK(iv.hi == Approx(0.625));
    // the family midpoint is the nominal cost 7/16
    const auto nominal = spec.parametric->at({(iv.lo + iv.hi) / 2});
    CHECK(nominal.flat == fixtures::free_rider_tensor(7.0 / 16).flat);
}

TEST_CASE("specs round-trip byte for byte", "[spec]") {
    for (const auto& f : builtin_fixtures()) {
        const std::string once = emit_spec(f.spec);
        const std::string twice = emit_spec(parse_spec_text(once));
        INFO("fixture " << f.name);
        CHECK(once == twice);
    }
}

TEST_CASE("bad specs are rejected with exit-2 style errors", "[spec]") {
    CHECK_THROWS_AS(parse_spec_text("not json"), InputError);
    CHECK_THROWS_AS(parse_spec_text("{}"), InputError);
    CHECK_THROWS_AS(parse_spec_text(R"({"regime": "chess"})"), InputError);

    // risk level 0 is out of (0, 1]
    GameSpecFile dro = fixture_by_name("dro_free_rider_m1").spec;
    nlohmann::json j = emit_spec_json(dro);
    j["risk"] = {0.0, 1.0};
    CHECK_THROWS_AS(parse_spec_json(j), InputError);

    // dimension mismatch in the payload
    nlohmann::json nash = emit_spec_json(fixture_by_name("nash_free_rider").spec);
    nash["payoff"] = {1.0, 2.0, 3.0};
    CHECK_THROWS_AS(parse_spec_json(nash), InputError);

    // mean outside the support makes the ambiguity set empty
    nlohmann::json bad_mean = emit_spec_json(dro);
    bad_mean["ambiguity"]["m"][0] = 0.9;
    CHECK_THROWS_AS(parse_spec_json(bad_mean), EmptyAmbiguityError);

    // two payloads at once
    nlohmann::json two = emit_spec_json(fixture_by_name("nash_free_rider").spec);
    two["mixture"] = nlohmann::json::array();
    CHECK_THROWS_AS(parse_spec_json(two), InputError);

    // unknown keys are caught, not ignored
    nlohmann::json unknown = emit_spec_json(fixture_by_name("nash_free_rider").spec);
    unknown["extra"] = 1;
    CHECK_THROWS_AS(parse_spec_json(unknown), InputError);
}

TEST_CASE("solver overrides survive the round trip and apply in order", "[spec]") {
    GameSpecFile spec = fixture_by_name("robust_inspection").spec;
    REQUIRE(spec.solver.penalty_tol.has_value());
    CHECK(*spec.solver.penalty_tol == Approx(1e-8));

    SolverConfig cfg = spec.solver.apply(SolverConfig{});
    CHECK(cfg.penalty_tol == Approx(1e-8));
    CHECK(cfg.num_starts == 200);  // untouched default

    SolverOverrides cli;
    cli.num_starts = 77;
    cli.method = Method::steepest;
    cfg = cli.apply(cfg);
    CHECK(cfg.num_starts == 77);
    CHECK(cfg.method == Method::steepest);
    CHECK(cfg.penalty_tol == Approx(1e-8));  // spec-file setting survives
}

TEST_CASE("every dro fixture passes the startup self-check", "[spec]") {
    CHECK_NOTHROW(fixtures_self_check());
    for (const auto& f : builtin_fixtures())
        if (f.spec.regime == Regime::dro) CHECK(contains(f.spec.ambiguity->support, f.spec.ambiguity->mean));
}
