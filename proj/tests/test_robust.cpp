#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"

using namespace drgt;
using namespace testhelp;
using Catch::Approx;

namespace {

ExtremePointSet singleton_family(const PayoffTensor& p) { return ExtremePointSet{{p}}; }

// Feasible certificate for a known equilibrium of the Condition 2 system:
// theta = point mass on a worst extreme, z = phi = worst-case payoff.
Eigen::VectorXd condition2_certificate(const MultilinearSystem& sys, const ExtremePointSet& family,
                                       const GameShape& shape, const StrategyProfile& eq) {
    Eigen::VectorXd y = Eigen::VectorXd::Zero(sys.num_vars);
    for (int i = 0; i < shape.num_players; ++i) {
        const auto& xb = sys.block("x", i);
        for (int j = 0; j < shape.actions[i]; ++j) y(xb.offset + j) = eq.strategies[i].weights[j];
    }
    for (int i = 0; i < shape.num_players; ++i) {
        int worst = 0;
        double worst_val = std::numeric_limits<double>::infinity();
        for (std::size_t l = 0; l < family.points.size(); ++l) {
            const double v = expected_payoff(family.points[l], eq, i);
            if (v < worst_val) {
                worst_val = v;
                worst = static_cast<int>(l);
            }
        }
        y(sys.block("z", i).offset) = worst_val;
        y(sys.block("phi", i).offset) = worst_val;
        y(sys.block("theta", i).offset + worst) = 1.0;
    }
    return y;
}

}  // namespace

TEST_CASE("condition 2 variable and constraint counts match the slot arithmetic", "[robust]") {
    const auto family = box_extreme_points(fixtures::free_rider_parametric(0.25, 0.625));
    const GameShape shape = fixtures::two_by_two();
    const auto sys = build_condition2(family, shape);

    const int k = 2;
    CHECK(sys.num_vars == 4 + 2 * (1 + k + 1));  // 12
    // per player: z = phi, e'x = 1, e'theta = 1
    CHECK(sys.equalities.size() == 2 * 3);
    // per player: k worst-case rows, a_i sign rows on x, a_i best-response
    // rows, k sign rows on theta
    CHECK(sys.inequalities.size() == 2u * (k + 2 + 2 + k));
    CHECK(sys.max_degree() <= shape.num_players);
}

TEST_CASE("condition 2 rejects an empty family", "[robust]") {
    CHECK_THROWS_AS(build_condition2(ExtremePointSet{}, fixtures::two_by_two()), InputError);
}

TEST_CASE("condition 3 slot count on the appendix free rider polyhedron", "[robust]") {
    const auto poly = fixtures::free_rider_support_box();
    const auto sys = build_condition3(poly, fixtures::two_by_two());
    CHECK(sys.num_vars == 4 + 2 * (16 + 8));  // 52
    CHECK(sys.equalities.size() == 2u * (8 + 1));
    CHECK(sys.inequalities.size() == 2u * (2 + 2 + 16 + 16));
    CHECK(sys.max_degree() <= 2);
}

TEST_CASE("known equilibria give zero penalty certificates", "[robust]") {
    const GameShape shape = fixtures::two_by_two();
    const auto family = box_extreme_points(fixtures::free_rider_parametric(0.25, 0.625));
    const auto sys = build_condition2(family, shape);

    // known equilibria of the robust free rider game, in contribute odds
    const std::vector<std::pair<double, double>> eqs = {{1, 0}, {0, 1}, {3.0 / 8, 3.0 / 8}};
    for (const auto& [x1, x2] : eqs) {
        StrategyProfile eq({MixedStrategy({x1, 1 - x1}), MixedStrategy({x2, 1 - x2})});
        const auto y = condition2_certificate(sys, family, shape, eq);
        CHECK(penalty(sys, y) <= 1e-12);
    }

    // non-equilibrium points must not be certifiable this way
    StrategyProfile off_eq({MixedStrategy({0.5, 0.5}), MixedStrategy({0.5, 0.5})});
    CHECK(penalty(sys, condition2_certificate(sys, family, shape, off_eq)) > 1e-6);

    // inspection fixture: the unique equilibrium (0.4, 0.8)
    const auto insp_family =
        box_extreme_points(fixtures::inspection_parametric({8, 12}, {16, 24}, {4, 6}));
    const auto insp_sys = build_condition2(insp_family, shape);
    StrategyProfile insp_eq({MixedStrategy({0.4, 0.6}), MixedStrategy({0.8, 0.2})});
    CHECK(penalty(insp_sys, condition2_certificate(insp_sys, insp_family, shape, insp_eq)) <= 1e-10);
}

TEST_CASE("singleton condition 2 systems project onto nash equilibria", "[robust][multistart]") {
    std::mt19937_64 rng(71);
    SolverConfig cfg;
    cfg.num_starts = 60;
    cfg.seed = 7;
    int tested = 0;
    while (tested < 6) {
        const auto p = random_tensor(fixtures::two_by_two(), rng);
        const auto oracle = support_enumeration_nash(p);
        if (oracle.empty()) continue;
        // keep well-separated instances so the 1e-3 match is meaningful
        bool crisp = true;
        for (std::size_t a = 0; a < oracle.size(); ++a)
            for (std::size_t b = a + 1; b < oracle.size(); ++b)
                crisp = crisp && profile_distance(oracle[a], oracle[b]) > 5e-2;
        if (!crisp) continue;

        const auto sys = build_condition2(singleton_family(p), p.shape);
        const auto out = multistart_enumerate(sys, p.shape, cfg);
        std::vector<StrategyProfile> found;
        for (const auto& r : out.equilibria) found.push_back(r.profile);
        INFO("instance " << tested);
        CHECK(hausdorff(found, oracle) <= 1e-3);
        ++tested;
    }
}

TEST_CASE("condition 2 and condition 3 agree on a singleton set", "[robust][multistart]") {
    std::mt19937_64 rng(73);
    const auto p = random_tensor(fixtures::two_by_two(), rng);
    const VecOrdering ord(p.shape);
    const auto flat = flatten(p, ord);

    // singleton polyhedron {v = flat} as +/- rows
    Eigen::MatrixXd w(16, 8);
    Eigen::VectorXd h(16);
    w.setZero();
    for (int d = 0; d < 8; ++d) {
        w(2 * d, d) = 1.0;
        h(2 * d) = flat[d];
        w(2 * d + 1, d) = -1.0;
        h(2 * d + 1) = -flat[d];
    }
    const Polyhedron poly(w, h);

    SolverConfig cfg;
    cfg.num_starts = 60;
    cfg.seed = 11;
    const auto out2 = multistart_enumerate(build_condition2(singleton_family(p), p.shape), p.shape, cfg);
    const auto out3 = multistart_enumerate(build_condition3(poly, p.shape), p.shape, cfg);
    std::vector<StrategyProfile> f2, f3;
    for (const auto& r : out2.equilibria) f2.push_back(r.profile);
    for (const auto& r : out3.equilibria) f3.push_back(r.profile);
    REQUIRE(!f2.empty());
    REQUIRE(!f3.empty());
    CHECK(hausdorff(f2, f3) <= 1e-3);
}
