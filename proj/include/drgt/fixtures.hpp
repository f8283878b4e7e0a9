#pragma once

// Built-in benchmark games: the free rider game (contribute / don't, cost c,
// benefit 1) and the inspection game (employee shirks or works, employer
// inspects or not; work cost g, work value v, inspection cost h, wage w).
// Ships the polyhedral support matrices, mean vectors and parametric forms
// used by the bundled fixture specs and the test suite.

#include <Eigen/Dense>
#include <vector>

#include "drgt/dro.hpp"
#include "drgt/game.hpp"
#include "drgt/parametric.hpp"
#include "drgt/polyhedron.hpp"

namespace drgt::fixtures {

inline GameShape two_by_two() { return GameShape(2, {2, 2}); }

// Bimatrix helper: cells[r][c] = (payoff to player 1, payoff to player 2)
// when player 1 plays row r and player 2 plays column c.
inline PayoffTensor bimatrix(const std::vector<std::vector<std::pair<double, double>>>& cells) {
    const int rows = static_cast<int>(cells.size());
    const int cols = static_cast<int>(cells.front().size());
    PayoffTensor t(GameShape(2, {rows, cols}));
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            t.entry(0, {r, c}) = cells[r][c].first;
            t.entry(1, {r, c}) = cells[r][c].second;
        }
    return t;
}

// Free rider payoffs at cost c; action 0 = contribute, 1 = don't.
inline PayoffTensor free_rider_tensor(double c) {
    return bimatrix({{{1 - c, 1 - c}, {1 - c, 1}},
                     {{1, 1 - c}, {0, 0}}});
}

// Inspection payoffs; player 1 action 0 = shirk, 1 = work; player 2 action
// 0 = inspect, 1 = don't inspect.
inline PayoffTensor inspection_tensor(double g, double v, double h, double w = 15.0) {
    return bimatrix({{{0, -h}, {w, -w}},
                     {{w - g, v - w - h}, {w - g, v - w}}});
}

inline PayoffTensor matching_pennies() {
    return bimatrix({{{-1, 1}, {1, -1}},
                     {{1, -1}, {-1, 1}}});
}

inline PayoffTensor battle_of_sexes() {
    return bimatrix({{{2, 1}, {0, 0}},
                     {{0, 0}, {1, 2}}});
}

// The two type tables of the battle-of-sexes variant where player 2 either
// wants to meet or to avoid, each with probability 1/2.
inline PayoffTensor battle_of_sexes_type1() { return battle_of_sexes(); }
inline PayoffTensor battle_of_sexes_type2() {
    return bimatrix({{{2, 0}, {0, 2}},
                     {{0, 1}, {1, 0}}});
}

// Free rider as an affine family in the single parameter c.
inline ParametricGame free_rider_parametric(double c_lo, double c_hi) {
    PayoffTensor base = free_rider_tensor(0.0);
    PayoffTensor coeff(two_by_two());
    coeff.entry(0, {0, 0}) = -1;
    coeff.entry(1, {0, 0}) = -1;
    coeff.entry(0, {0, 1}) = -1;
    coeff.entry(1, {1, 0}) = -1;
    return ParametricGame(two_by_two(), std::move(base), {std::move(coeff)},
                          {Interval{c_lo, c_hi}});
}

// Inspection as an affine family in (g, v, h) with fixed wage w.
inline ParametricGame inspection_parametric(Interval g, Interval v, Interval h, double w = 15.0) {
    PayoffTensor base = inspection_tensor(0.0, 0.0, 0.0, w);
    PayoffTensor cg(two_by_two()), cv(two_by_two()), ch(two_by_two());
    cg.entry(0, {1, 0}) = -1;
    cg.entry(0, {1, 1}) = -1;
    cv.entry(1, {1, 0}) = 1;
    cv.entry(1, {1, 1}) = 1;
    ch.entry(1, {0, 0}) = -1;
    ch.entry(1, {1, 0}) = -1;
    return ParametricGame(two_by_two(), std::move(base), {std::move(cg), std::move(cv), std::move(ch)},
                          {ParamSupport{g}, ParamSupport{v}, ParamSupport{h}});
}

namespace fixdetail {
inline Polyhedron make_poly(const std::vector<std::vector<double>>& w, const std::vector<double>& h) {
    Eigen::MatrixXd wm(static_cast<Eigen::Index>(w.size()), static_cast<Eigen::Index>(w.front().size()));
    Eigen::VectorXd hv(static_cast<Eigen::Index>(h.size()));
    for (std::size_t r = 0; r < w.size(); ++r) {
        for (std::size_t c = 0; c < w[r].size(); ++c) wm(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = w[r][c];
        hv(static_cast<Eigen::Index>(r)) = h[r];
    }
    return Polyhedron(std::move(wm), std::move(hv));
}
}  // namespace fixdetail

// Support matrix for the free rider family over flattened payoff space.
// Rows 1-2 bound the first uncertain entry (1 - c with c in [1/4, 5/8]),
// rows 3-8 tie the other uncertain entries to it, rows 9-16 pin the four
// certain entries.
inline const std::vector<std::vector<double>>& free_rider_W() {
    static const std::vector<std::vector<double>> w = {
        {1, 0, 0, 0, 0, 0, 0, 0},  {-1, 0, 0, 0, 0, 0, 0, 0},
        {1, -1, 0, 0, 0, 0, 0, 0}, {-1, 1, 0, 0, 0, 0, 0, 0},
        {1, 0, -1, 0, 0, 0, 0, 0}, {-1, 0, 1, 0, 0, 0, 0, 0},
        {1, 0, 0, 0, 0, -1, 0, 0}, {-1, 0, 0, 0, 0, 1, 0, 0},
        {0, 0, 0, 1, 0, 0, 0, 0},  {0, 0, 0, -1, 0, 0, 0, 0},
        {0, 0, 0, 0, 1, 0, 0, 0},  {0, 0, 0, 0, -1, 0, 0, 0},
        {0, 0, 0, 0, 0, 0, 1, 0},  {0, 0, 0, 0, 0, 0, -1, 0},
        {0, 0, 0, 0, 0, 0, 0, 1},  {0, 0, 0, 0, 0, 0, 0, -1},
    };
    return w;
}

inline Polyhedron free_rider_support_box() {
    return fixdetail::make_poly(free_rider_W(),
                             {6.0 / 8, -3.0 / 8, 0, 0, 0, 0, 0, 0, 1, -1, 1, -1, 0, 0, 0, 0});
}

// Singleton variant: the support collapses to the c = 1/2 payoff matrix.
inline Polyhedron free_rider_support_singleton() {
    return fixdetail::make_poly(free_rider_W(),
                             {0.5, -0.5, 0, 0, 0, 0, 0, 0, 1, -1, 1, -1, 0, 0, 0, 0});
}

inline Eigen::VectorXd free_rider_m1() {
    Eigen::VectorXd m(8);
    m << 9.0 / 16, 9.0 / 16, 9.0 / 16, 1, 1, 9.0 / 16, 0, 0;  // nominal, c = 7/16
    return m;
}

inline Eigen::VectorXd free_rider_m2() {
    Eigen::VectorXd m(8);
    m << 0.5, 0.5, 0.5, 1, 1, 0.5, 0, 0;  // c = 1/2
    return m;
}

// Coordinate-interval support for the inspection family: one +/- row pair
// per flattened entry.
inline const std::vector<std::vector<double>>& inspection_W() {
    static const std::vector<std::vector<double>> w = [] {
        std::vector<std::vector<double>> rows;
        for (int d = 0; d < 8; ++d) {
            std::vector<double> up(8, 0.0), dn(8, 0.0);
            up[d] = 1.0;
            dn[d] = -1.0;
            rows.push_back(up);
            rows.push_back(dn);
        }
        return rows;
    }();
    return w;
}

inline Polyhedron inspection_support_box() {
    return fixdetail::make_poly(inspection_W(),
                             {0, 0, -4, 6, 15, -15, -15, 15, 7, -3, 5, 5, 7, -3, 9, -1});
}

// Singleton variant: (g, v, h) = (9, 17, 5).
inline Polyhedron inspection_support_singleton() {
    return fixdetail::make_poly(inspection_W(),
                             {0, 0, -5, 5, 15, -15, -15, 15, 6, -6, -3, 3, 6, -6, 2, -2});
}

inline Eigen::VectorXd inspection_m1() {
    Eigen::VectorXd m(8);
    m << 0, -5, 15, -15, 5, 0, 5, 5;  // nominal, (g, v, h) = (10, 20, 5)
    return m;
}

inline Eigen::VectorXd inspection_m2() {
    Eigen::VectorXd m(8);
    m << 0, -5, 15, -15, 6, -3, 6, 2;  // (g, v, h) = (9, 17, 5)
    return m;
}

}  // namespace drgt::fixtures
