#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"

using namespace drgt;
using namespace testhelp;
using Catch::Approx;

TEST_CASE("box extreme points of the free rider family are its two endpoints", "[parametric]") {
    const auto g = fixtures::free_rider_parametric(0.25, 0.625);
    const auto eps = box_extreme_points(g);
    REQUIRE(eps.points.size() == 2);
    const auto lo = fixtures::free_rider_tensor(0.25).flat;
    const auto hi = fixtures::free_rider_tensor(0.625).flat;
    const bool first_is_lo = std::abs(eps.points[0].flat[0] - lo[0]) < 1e-12;
    CHECK(eps.points[first_is_lo ? 0 : 1].flat == lo);
    CHECK(eps.points[first_is_lo ? 1 : 0].flat == hi);
}

TEST_CASE("box extreme points of the inspection family are the eight corners", "[parametric]") {
    const auto g = fixtures::inspection_parametric({8, 12}, {16, 24}, {4, 6});
    CHECK(box_extreme_points(g).points.size() == 8);
}

TEST_CASE("finite and union supports reduce to their endpoints", "[parametric]") {
    // single parameter with values {8, 8.5, 9, 12}: corners at 8 and 12
    PayoffTensor base(fixtures::two_by_two());
    PayoffTensor coeff(fixtures::two_by_two());
    coeff.entry(0, {0, 0}) = 1.0;
    const ParametricGame g(fixtures::two_by_two(), base, {coeff},
                           {FiniteSet{{8, 8.5, 9, 12}}});
    const auto eps = box_extreme_points(g);
    REQUIRE(eps.points.size() == 2);
    std::vector<double> seen = {eps.points[0].entry(0, {0, 0}), eps.points[1].entry(0, {0, 0})};
    std::sort(seen.begin(), seen.end());
    CHECK(seen[0] == Approx(8.0));
    CHECK(seen[1] == Approx(12.0));

    const ParamSupport u = UnionOfIntervals{{{16, 18}, {23, 24}}};
    CHECK(support_min(u) == 16.0);
    CHECK(support_max(u) == 24.0);
}

TEST_CASE("parametric polyhedron matches the appendix free rider set membership", "[parametric]") {
    const auto g = fixtures::free_rider_parametric(0.25, 0.625);
    const auto mine = parametric_to_polyhedron(g);
    const auto appendix = fixtures::free_rider_support_box();

    std::mt19937_64 rng(41);
    int agreements = 0, accepted = 0;
    for (int rep = 0; rep < 1000; ++rep) {
        Eigen::VectorXd v(8);
        if (rep % 3 == 0) {
            // on-family point, possibly out of range
            const double c = urand(rng, 0.0, 1.0);
            const auto t = fixtures::free_rider_tensor(c).flat;
            for (int d = 0; d < 8; ++d) v(d) = t[d];
        } else if (rep % 3 == 1) {
            // single-coordinate perturbation of an in-range point
            const auto t = fixtures::free_rider_tensor(urand(rng, 0.25, 0.625)).flat;
            for (int d = 0; d < 8; ++d) v(d) = t[d];
            v(static_cast<int>(rng() % 8)) += urand(rng, -0.5, 0.5);
        } else {
            for (int d = 0; d < 8; ++d) v(d) = urand(rng, -1, 2);
        }
        const bool a = contains(appendix, v), b = contains(mine, v);
        CHECK(a == b);
        agreements += a == b;
        accepted += a;
    }
    CHECK(agreements == 1000);
    CHECK(accepted > 50);  // the sampler must actually exercise the accept path
}

TEST_CASE("parametric polyhedron matches the appendix inspection set membership", "[parametric]") {
    const auto g = fixtures::inspection_parametric({8, 12}, {16, 24}, {4, 6});
    const auto mine = parametric_to_polyhedron(g);
    const auto appendix = fixtures::inspection_support_box();

    std::mt19937_64 rng(43);
    int accepted = 0;
    for (int rep = 0; rep < 1000; ++rep) {
        Eigen::VectorXd v(8);
        if (rep % 3 == 0) {
            const auto t = fixtures::inspection_tensor(urand(rng, 7, 13), urand(rng, 15, 25),
                                                       urand(rng, 3.5, 6.5))
                               .flat;
            for (int d = 0; d < 8; ++d) v(d) = t[d];
        } else if (rep % 3 == 1) {
            // perturb one coordinate; the appendix set is the coordinate
            // interval hull, so points off the parametric manifold but inside
            // the per-entry ranges must stay accepted
            const auto t = fixtures::inspection_tensor(urand(rng, 8, 12), urand(rng, 16, 24),
                                                       urand(rng, 4, 6))
                               .flat;
            for (int d = 0; d < 8; ++d) v(d) = t[d];
            v(static_cast<int>(rng() % 8)) += urand(rng, -3, 3);
        } else {
            for (int d = 0; d < 8; ++d) v(d) = urand(rng, -20, 25);
        }
        CHECK(contains(appendix, v) == contains(mine, v));
        accepted += contains(appendix, v);
    }
    CHECK(accepted > 50);
}

TEST_CASE("constant family collapses to a singleton polyhedron", "[parametric]") {
    const ParametricGame g(fixtures::two_by_two(), fixtures::battle_of_sexes(), {}, {});
    const auto poly = parametric_to_polyhedron(g);
    const auto flat = flatten(fixtures::battle_of_sexes(), VecOrdering(fixtures::two_by_two()));
    CHECK(contains(poly, flat));
    const auto vs = vertex_enumerate(poly);
    REQUIRE(vs.size() == 1);
    for (int d = 0; d < 8; ++d) CHECK(vs[0](d) == Approx(flat[d]).margin(1e-12));
}

TEST_CASE("vertices of the parametric polyhedron equal the box corners for single-parameter games",
          "[parametric]") {
    std::mt19937_64 rng(47);
    for (int rep = 0; rep < 12; ++rep) {
        PayoffTensor base = random_tensor(fixtures::two_by_two(), rng);
        PayoffTensor coeff(fixtures::two_by_two());
        coeff.flat[0] = 1.0;
        for (int extra = 0; extra < 2; ++extra)  // a couple more tied coordinates
            coeff.flat[1 + rng() % 7] = urand(rng, -2, 2);
        const double lo = urand(rng, -1, 0), hi = lo + urand(rng, 0.5, 1.5);
        const ParametricGame g(fixtures::two_by_two(), base, {coeff}, {Interval{lo, hi}});

        const auto corners = box_extreme_points(g, 1e-8);
        const auto verts = vertex_enumerate(parametric_to_polyhedron(g), 1e-7, 1e-8);
        REQUIRE(verts.size() == corners.points.size());
        for (const auto& c : corners.points) {
            bool matched = false;
            for (const auto& v : verts) {
                double dist = 0.0;
                for (int d = 0; d < 8; ++d) dist = std::max(dist, std::abs(v(d) - c.flat[d]));
                if (dist <= 1e-7) matched = true;
            }
            CHECK(matched);
        }
    }
}

TEST_CASE("special class reduction reproduces the worst-case inspection table", "[parametric]") {
    const auto g = fixtures::inspection_parametric({8, 12}, {16, 24}, {4, 6});
    const auto q = special_class_reduce(g);
    REQUIRE(q.has_value());
    CHECK(q->entry(0, {0, 0}) == Approx(0.0));
    CHECK(q->entry(1, {0, 0}) == Approx(-6.0));
    CHECK(q->entry(0, {0, 1}) == Approx(15.0));
    CHECK(q->entry(1, {0, 1}) == Approx(-15.0));
    CHECK(q->entry(0, {1, 0}) == Approx(3.0));
    CHECK(q->entry(1, {1, 0}) == Approx(-5.0));
    CHECK(q->entry(0, {1, 1}) == Approx(3.0));
    CHECK(q->entry(1, {1, 1}) == Approx(1.0));
}

TEST_CASE("special class reduction only needs support extremes", "[parametric]") {
    // same tensor from finite/union supports with matching endpoints
    const auto base = fixtures::inspection_parametric({8, 12}, {16, 24}, {4, 6});
    const ParametricGame g(base.shape, base.base, base.coeffs,
                           {FiniteSet{{8, 8.5, 9, 12}},
                            UnionOfIntervals{{{16, 18}, {23, 24}}},
                            FiniteSet{{4, 6}}});
    const auto q1 = special_class_reduce(base);
    const auto q2 = special_class_reduce(g);
    REQUIRE(q1.has_value());
    REQUIRE(q2.has_value());
    CHECK(q1->flat == q2->flat);
}

TEST_CASE("special class reduction refuses mixed signs", "[parametric]") {
    PayoffTensor base(fixtures::two_by_two());
    PayoffTensor coeff(fixtures::two_by_two());
    coeff.entry(0, {0, 0}) = 1.0;
    coeff.entry(0, {1, 1}) = -1.0;  // same player, opposite signs
    const ParametricGame g(fixtures::two_by_two(), base, {coeff}, {Interval{0, 1}});
    CHECK_FALSE(special_class_reduce(g).has_value());
}

TEST_CASE("free rider special class reduction pins the cost at its maximum", "[parametric]") {
    const auto q = special_class_reduce(fixtures::free_rider_parametric(0.25, 0.625));
    REQUIRE(q.has_value());
    CHECK(q->flat == fixtures::free_rider_tensor(0.625).flat);
}
