#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"

using namespace drgt;
using namespace testhelp;
using Catch::Approx;

namespace {
DiscreteLossDistribution random_dist(std::mt19937_64& rng) {
    DiscreteLossDistribution d;
    const int atoms = 2 + static_cast<int>(rng() % 8);
    double sum = 0.0;
    std::vector<double> raw(atoms);
    for (auto& p : raw) {
        p = urand(rng, 0.05, 1.0);
        sum += p;
    }
    double acc = 0.0;
    for (int i = 0; i < atoms; ++i) {
        double p = raw[i] / sum;
        if (i == atoms - 1) p = 1.0 - acc;  // make the sum exact
        acc += p;
        d.atoms.push_back({p, urand(rng, -10, 10)});
    }
    return d;
}
}  // namespace

TEST_CASE("cvar at level one is exactly the mean", "[risk]") {
    std::mt19937_64 rng(79);
    for (int rep = 0; rep < 20; ++rep) {
        const auto d = random_dist(rng);
        CHECK(cvar(d, 1.0) == d.mean());
    }
}

TEST_CASE("cvar of a point mass is its loss", "[risk]") {
    DiscreteLossDistribution d;
    d.atoms = {{1.0, 5.0}};
    for (double eps : {1.0, 0.5, 0.25, 0.01}) CHECK(cvar(d, eps) == Approx(5.0));
}

TEST_CASE("cvar of the uniform four-point distribution matches the grid oracle", "[risk]") {
    DiscreteLossDistribution d;
    d.atoms = {{0.25, 1}, {0.25, 2}, {0.25, 3}, {0.25, 4}};
    CHECK(cvar(d, 0.5) == Approx(3.5));
    CHECK(cvar_grid_oracle(d, 0.5) == Approx(3.5).margin(1e-4));
}

TEST_CASE("cvar closed form matches the tail enumeration oracle", "[risk]") {
    std::mt19937_64 rng(83);
    for (int rep = 0; rep < 200; ++rep) {
        const auto d = random_dist(rng);
        const double eps = urand(rng, 0.02, 1.0);
        CHECK(cvar(d, eps) == Approx(cvar_atom_oracle(d, eps)).margin(1e-6));
    }
}

TEST_CASE("cvar is nonincreasing in eps", "[risk]") {
    std::mt19937_64 rng(89);
    for (int rep = 0; rep < 50; ++rep) {
        const auto d = random_dist(rng);
        double e1 = urand(rng, 0.02, 1.0), e2 = urand(rng, 0.02, 1.0);
        if (e1 > e2) std::swap(e1, e2);  // e1 <= e2
        CHECK(cvar(d, e1) >= cvar(d, e2) - 1e-12);
    }
}

TEST_CASE("cvar rejects bad risk levels", "[risk]") {
    DiscreteLossDistribution d;
    d.atoms = {{1.0, 0.0}};
    CHECK_THROWS_AS(cvar(d, 0.0), InputError);
    CHECK_THROWS_AS(cvar(d, -0.1), InputError);
    CHECK_THROWS_AS(cvar(d, 1.1), InputError);
}

TEST_CASE("sigma is the risk aversion ratio", "[risk]") {
    CHECK(sigma(1.0) == 0.0);
    CHECK(sigma(0.5) == Approx(1.0));
    CHECK(sigma(0.25) == Approx(3.0));
    CHECK_THROWS_AS(sigma(0.0), InputError);
}

TEST_CASE("risk profiles validate their range", "[risk]") {
    CHECK_THROWS_AS(RiskProfile({0.5, 0.0}), InputError);
    CHECK_THROWS_AS(RiskProfile({1.5}), InputError);
    CHECK(RiskProfile::neutral(2).all_neutral());
    CHECK_FALSE(RiskProfile({1.0, 0.99}).all_neutral());
}
