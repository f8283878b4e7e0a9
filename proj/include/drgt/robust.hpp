#pragma once

// Multilinear feasibility systems whose component-wise projections are the
// equilibria of robust finite games with bounded polyhedral payoff
// uncertainty. Two equivalent builders:
//
//  - build_condition2: over the extreme points G(1)..G(k) of the uncertainty
//    set; per player the certificate carries (z_i, theta^i, phi_i).
//  - build_condition3: over the polyhedron itself via LP duality; per player
//    the certificate carries (eta^i, xi^i). Much larger systems, kept as a
//    cross-check.

#include <memory>
#include <string>
#include <vector>

#include "drgt/game.hpp"
#include "drgt/multilinear.hpp"
#include "drgt/parametric.hpp"
#include "drgt/polyhedron.hpp"
#include "drgt/solver.hpp"

namespace drgt {

namespace detail {

// Add to expr the terms of pi_i(G; x) restricted to profiles where player
// i plays fixed_action (-1 = unrestricted), multiplying each term by scale
// and an optional extra variable.
inline void add_payoff_terms(MultilinearExpr& expr, const PayoffTensor& g, int player, int fixed_action,
                             const std::vector<int>& x_offsets, bool include_own, double scale,
                             int extra_var = -1) {
    const GameShape& shape = g.shape;
    std::vector<int> idx(shape.num_players, 0);
    std::int64_t flat = player;
    do {
        if (fixed_action < 0 || idx[player] == fixed_action) {
            std::vector<int> vars;
            vars.reserve(shape.num_players + 1);
            if (extra_var >= 0) vars.push_back(extra_var);
            for (int k = 0; k < shape.num_players; ++k) {
                if (k == player && !include_own) continue;
                vars.push_back(x_offsets[k] + idx[k]);
            }
            const double coef = scale * g.flat[flat];
            if (coef != 0.0) expr.add(coef, std::move(vars));
        }
        flat += shape.num_players;
    } while (next_profile(shape, idx));
}

inline std::vector<int> add_strategy_blocks(MultilinearSystem& sys, const GameShape& shape) {
    std::vector<int> x_offsets(shape.num_players);
    for (int i = 0; i < shape.num_players; ++i) {
        const int b = sys.add_block("x", shape.actions[i], InitKind::simplex, i, /*is_strategy=*/true);
        x_offsets[i] = sys.layout[b].offset;
    }
    return x_offsets;
}

inline void add_simplex_constraints(MultilinearSystem& sys, int offset, int size) {
    MultilinearExpr sum;
    for (int j = 0; j < size; ++j) sum.add(1.0, {offset + j});
    sum.constant = -1.0;
    sys.equalities.push_back(std::move(sum));
    for (int j = 0; j < size; ++j) {
        MultilinearExpr nonneg;
        nonneg.add(-1.0, {offset + j});
        sys.inequalities.push_back(std::move(nonneg));
    }
}

}  // namespace detail

// Condition 2 system. Per player i with extreme points G(1)..G(k):
//   z_i = phi_i
//   z_i - pi_i(G(l); x) <= 0                        for every l
//   e'x^i = 1,  x^i >= 0
//   e'theta^i = 1,  theta^i >= 0
//   sum_l theta^i_l pi_i(G(l); x^-i, e_j) - phi_i <= 0   for every action j
inline MultilinearSystem build_condition2(const ExtremePointSet& family, const GameShape& shape) {
    const int k = static_cast<int>(family.points.size());
    if (k < 1) throw InputError("build_condition2: need at least one extreme point");
    for (const auto& g : family.points)
        if (!(g.shape == shape)) throw DimensionError("build_condition2: extreme point shape mismatch");

    MultilinearSystem sys;
    const std::vector<int> x = detail::add_strategy_blocks(sys, shape);

    for (int i = 0; i < shape.num_players; ++i) {
        const int zb = sys.add_block("z", 1, InitKind::robust_value, i);
        const int tb = sys.add_block("theta", k, InitKind::simplex, i);
        const int pb = sys.add_block("phi", 1, InitKind::mirror_value, i, false, zb);
        const int z = sys.layout[zb].offset;
        const int theta = sys.layout[tb].offset;
        const int phi = sys.layout[pb].offset;

        MultilinearExpr link;
        link.add(1.0, {z}).add(-1.0, {phi});
        sys.equalities.push_back(std::move(link));

        for (int l = 0; l < k; ++l) {
            MultilinearExpr worst;
            worst.add(1.0, {z});
            detail::add_payoff_terms(worst, family.points[l], i, -1, x, /*include_own=*/true, -1.0);
            sys.inequalities.push_back(std::move(worst));
        }

        detail::add_simplex_constraints(sys, x[i], shape.actions[i]);

        MultilinearExpr theta_sum;
        for (int l = 0; l < k; ++l) theta_sum.add(1.0, {theta + l});
        theta_sum.constant = -1.0;
        sys.equalities.push_back(std::move(theta_sum));

        for (int j = 0; j < shape.actions[i]; ++j) {
            MultilinearExpr best;
            for (int l = 0; l < k; ++l)
                detail::add_payoff_terms(best, family.points[l], i, j, x, /*include_own=*/false, 1.0,
                                         theta + l);
            best.add(-1.0, {phi});
            sys.inequalities.push_back(std::move(best));
        }

        for (int l = 0; l < k; ++l) {
            MultilinearExpr nonneg;
            nonneg.add(-1.0, {theta + l});
            sys.inequalities.push_back(std::move(nonneg));
        }
    }
    sys.canonicalize();
    return sys;
}

// Condition 3 system over U = {v : W v <= h}. The dual form reads the set as
// {v : F v >= d} with F = -W, d = -h, which makes the theorem's constraints
//   xi_i' Y^i(x^-i) e_j <= d'eta^i,   F'eta_i = Y^i(x^-i) x^i,
//   eta^i >= 0,   F xi_i >= d  (i.e. xi_i lies in U)
// consistent: d'eta_i is the worst-case payoff of x^i and xi_i is the
// witness matrix bounding every pure deviation.
inline MultilinearSystem build_condition3(const Polyhedron& poly, const GameShape& shape) {
    const std::int64_t dim = shape.flat_dim();
    if (poly.dim() != dim) throw DimensionError("build_condition3: polyhedron dimension != N * prod(a_i)");
    require_bounded(poly, "build_condition3");
    const int m = static_cast<int>(poly.rows());
    const VecOrdering ord(shape);

    MultilinearSystem sys;
    const std::vector<int> x = detail::add_strategy_blocks(sys, shape);

    for (int i = 0; i < shape.num_players; ++i) {
        const int eb = sys.add_block("eta", m, InitKind::zero, i);
        const int xb = sys.add_block("xi", static_cast<int>(dim), InitKind::zero, i);
        const int eta = sys.layout[eb].offset;
        const int xi = sys.layout[xb].offset;

        // xi' Y e_j - d'eta <= 0 for every pure action j
        for (int j = 0; j < shape.actions[i]; ++j) {
            MultilinearExpr dev;
            std::vector<int> idx(shape.num_players, 0);
            std::int64_t flat = i;
            do {
                if (idx[i] == j) {
                    std::vector<int> vars{xi + static_cast<int>(flat)};
                    for (int k = 0; k < shape.num_players; ++k)
                        if (k != i) vars.push_back(x[k] + idx[k]);
                    dev.add(1.0, std::move(vars));
                }
                flat += shape.num_players;
            } while (next_profile(shape, idx));
            for (int r = 0; r < m; ++r) dev.add(poly.h(r), {eta + r});  // -d'eta with d = -h
            sys.inequalities.push_back(std::move(dev));
        }

        // F'eta - Y x^i = 0, one equality per flat coordinate
        {
            std::vector<int> idx(shape.num_players, 0);
            std::vector<MultilinearExpr> rows(static_cast<std::size_t>(dim));
            for (std::int64_t d = 0; d < dim; ++d)
                for (int r = 0; r < m; ++r)
                    if (poly.W(r, d) != 0.0) rows[d].add(-poly.W(r, d), {eta + r});
            std::int64_t flat = i;
            do {
                std::vector<int> vars;
                for (int k = 0; k < shape.num_players; ++k) vars.push_back(x[k] + idx[k]);
                rows[flat].add(-1.0, std::move(vars));
                flat += shape.num_players;
            } while (next_profile(shape, idx));
            for (auto& row : rows) sys.equalities.push_back(std::move(row));
        }

        detail::add_simplex_constraints(sys, x[i], shape.actions[i]);

        for (int r = 0; r < m; ++r) {
            MultilinearExpr nonneg;
            nonneg.add(-1.0, {eta + r});
            sys.inequalities.push_back(std::move(nonneg));
        }

        // F xi >= d, i.e. W xi <= h: the witness stays inside U
        for (int r = 0; r < m; ++r) {
            MultilinearExpr member;
            for (std::int64_t d = 0; d < dim; ++d)
                if (poly.W(r, d) != 0.0) member.add(poly.W(r, d), {xi + static_cast<int>(d)});
            member.constant = -poly.h(r);
            sys.inequalities.push_back(std::move(member));
        }
    }
    sys.canonicalize();
    return sys;
}

// Start seeding for condition-3 systems. Zero-initialized duals leave the
// pure-equilibrium certificates with vanishing basins (descent drags every
// start to the interior solutions), so each start anchors eta at the clipped
// least-squares dual of the sampled strategies and xi at an interior point
// of the uncertainty set.
inline StartInitializer condition3_start_initializer(const Polyhedron& poly, const GameShape& shape) {
    auto qr = std::make_shared<Eigen::ColPivHouseholderQR<Eigen::MatrixXd>>(
        Eigen::MatrixXd(poly.W.transpose()));
    const auto vertices = vertex_enumerate(poly);
    Eigen::VectorXd center = Eigen::VectorXd::Zero(poly.dim());
    for (const auto& v : vertices) center += v / static_cast<double>(vertices.size());
    const VecOrdering ord(shape);

    return [qr, center, ord, shape](const MultilinearSystem& sys, std::mt19937_64& rng) {
        Eigen::VectorXd y = initial_point(sys, rng);
        StrategyProfile prof;
        for (int i = 0; i < shape.num_players; ++i) {
            const auto& b = sys.block("x", i);
            prof.strategies.emplace_back(
                std::vector<double>(y.data() + b.offset, y.data() + b.offset + b.size));
        }
        for (int i = 0; i < shape.num_players; ++i) {
            const auto yv = build_Y(prof, i, ord);
            Eigen::VectorXd yx = Eigen::VectorXd::Zero(center.size());
            for (Eigen::Index d = 0; d < center.size(); ++d)
                for (int j = 0; j < shape.actions[i]; ++j)
                    yx(d) += yv[d][j] * prof.strategies[i].weights[j];
            Eigen::VectorXd eta = qr->solve(-yx);  // W' eta = -Yx in least squares
            const auto& be = sys.block("eta", i);
            const auto& bx = sys.block("xi", i);
            for (int r = 0; r < be.size; ++r) y(be.offset + r) = std::max(eta(r), 0.0);
            for (int d = 0; d < bx.size; ++d) y(bx.offset + d) = center(d);
        }
        return y;
    };
}

}  // namespace drgt
