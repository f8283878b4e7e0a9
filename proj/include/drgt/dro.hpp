#pragma once

// Distributionally robust games: the ambiguity set (polyhedral support W,h
// over flattened payoff space, pinned mean m, dispersion radius s), the
// multilinear system whose projections are the worst-case-CVaR equilibria,
// and the three reductions to complete-information games (risk neutral,
// zero dispersion, singleton support).

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "drgt/game.hpp"
#include "drgt/multilinear.hpp"
#include "drgt/polyhedron.hpp"
#include "drgt/risk.hpp"
#include "drgt/robust.hpp"

namespace drgt {

struct EmptyAmbiguityError : InputError {
    explicit EmptyAmbiguityError(const std::string& msg) : InputError(msg) {}
};

struct InconsistentAmbiguityError : InputError {
    explicit InconsistentAmbiguityError(const std::string& msg) : InputError(msg) {}
};

struct AmbiguitySet {
    Polyhedron support;     // {v : W v <= h}, bounded
    Eigen::VectorXd mean;   // pinned expected value of vec(P)
    double dispersion = 0;  // bound on E || vec(P) - mean ||_1

    AmbiguitySet() = default;
    AmbiguitySet(Polyhedron sup, Eigen::VectorXd m, double s)
        : support(std::move(sup)), mean(std::move(m)), dispersion(s) {
        if (mean.size() != support.dim()) throw DimensionError("AmbiguitySet: mean dimension mismatch");
        if (!(dispersion >= 0.0)) throw InputError("AmbiguitySet: dispersion must be >= 0");
        require_bounded(support, "AmbiguitySet");
        if (!contains(support, mean))
            throw EmptyAmbiguityError("AmbiguitySet: mean lies outside the support polyhedron, set is empty");
    }
};

// Lemma reductions. Each returns the complete-information payoff tensor the
// game collapses to, or nothing when the trigger does not apply.

inline std::optional<PayoffTensor> reduce_risk_neutral(const AmbiguitySet& amb, const RiskProfile& risk,
                                                       const GameShape& shape) {
    risk.validate();
    if (!risk.all_neutral()) return std::nullopt;
    return unflatten(std::vector<double>(amb.mean.data(), amb.mean.data() + amb.mean.size()),
                     VecOrdering(shape));
}

inline std::optional<PayoffTensor> reduce_s_zero(const AmbiguitySet& amb, const GameShape& shape) {
    if (amb.dispersion > 1e-12) return std::nullopt;
    return unflatten(std::vector<double>(amb.mean.data(), amb.mean.data() + amb.mean.size()),
                     VecOrdering(shape));
}

inline std::optional<PayoffTensor> reduce_singleton(const AmbiguitySet& amb, const GameShape& shape) {
    const auto vertices = vertex_enumerate(amb.support, kPolyTol, 1e-8);
    if (vertices.size() != 1) return std::nullopt;
    const Eigen::VectorXd& c = vertices.front();
    if ((c - amb.mean).lpNorm<Eigen::Infinity>() > 1e-8)
        throw InconsistentAmbiguityError("reduce_singleton: support single point differs from the mean");
    return unflatten(std::vector<double>(c.data(), c.data() + c.size()), VecOrdering(shape));
}

// The full equilibrium system. Per player i the certificate carries four
// scalars (alpha, zeta, rho, gamma), nine vectors over flattened payoff
// space (beta, lambda, kappa, delta, nu, tau, f, phi, g) and two vectors
// over the support rows (xi, theta); rho_i is the worst-case CVaR of player
// i's loss at the solution.
inline MultilinearSystem build_dro_system(const GameShape& shape, const AmbiguitySet& amb,
                                          const RiskProfile& risk) {
    risk.validate();
    if (static_cast<int>(risk.epsilons.size()) != shape.num_players)
        throw DimensionError("build_dro_system: risk profile length != num_players");
    const std::int64_t dim = shape.flat_dim();
    if (amb.support.dim() != dim) throw DimensionError("build_dro_system: ambiguity dimension mismatch");
    const int d = static_cast<int>(dim);
    const int m = static_cast<int>(amb.support.rows());
    const auto& w = amb.support.W;
    const auto& h = amb.support.h;
    const auto& mv = amb.mean;
    const double s = amb.dispersion;

    MultilinearSystem sys;
    const std::vector<int> x = detail::add_strategy_blocks(sys, shape);

    for (int i = 0; i < shape.num_players; ++i) {
        const double eps = risk.epsilons[i];
        const double sig = sigma(eps);

        const int alpha = sys.layout[sys.add_block("alpha", 1, InitKind::zero, i)].offset;
        const int zeta = sys.layout[sys.add_block("zeta", 1, InitKind::zero, i)].offset;
        const int rho = sys.layout[sys.add_block("rho", 1, InitKind::zero, i)].offset;
        const int gamma = sys.layout[sys.add_block("gamma", 1, InitKind::zero, i)].offset;
        const int beta = sys.layout[sys.add_block("beta", d, InitKind::zero, i)].offset;
        const int lambda = sys.layout[sys.add_block("lambda", d, InitKind::zero, i)].offset;
        const int kappa = sys.layout[sys.add_block("kappa", d, InitKind::zero, i)].offset;
        const int delta = sys.layout[sys.add_block("delta", d, InitKind::zero, i)].offset;
        const int nu = sys.layout[sys.add_block("nu", d, InitKind::zero, i)].offset;
        const int tau = sys.layout[sys.add_block("tau", d, InitKind::zero, i)].offset;
        const int fv = sys.layout[sys.add_block("f", d, InitKind::zero, i)].offset;
        const int phi = sys.layout[sys.add_block("phi", d, InitKind::zero, i)].offset;
        const int gv = sys.layout[sys.add_block("g", d, InitKind::zero, i)].offset;
        const int xi = sys.layout[sys.add_block("xi", m, InitKind::zero, i)].offset;
        const int theta = sys.layout[sys.add_block("theta", m, InitKind::zero, i)].offset;

        // zeta + (1/eps)(alpha + m'beta + s gamma) = rho
        {
            MultilinearExpr e;
            e.add(1.0, {zeta}).add(1.0 / eps, {alpha});
            for (int dd = 0; dd < d; ++dd)
                if (mv(dd) != 0.0) e.add(mv(dd) / eps, {beta + dd});
            e.add(s / eps, {gamma});
            e.add(-1.0, {rho});
            sys.equalities.push_back(std::move(e));
        }

        detail::add_simplex_constraints(sys, x[i], shape.actions[i]);

        // alpha - m'lambda + m'kappa + h'xi >= 0
        {
            MultilinearExpr e;
            e.add(-1.0, {alpha});
            for (int dd = 0; dd < d; ++dd) {
                if (mv(dd) == 0.0) continue;
                e.add(mv(dd), {lambda + dd}).add(-mv(dd), {kappa + dd});
            }
            for (int r = 0; r < m; ++r)
                if (h(r) != 0.0) e.add(-h(r), {xi + r});
            sys.inequalities.push_back(std::move(e));
        }

        // -lambda + kappa + W'xi - beta = 0
        for (int dd = 0; dd < d; ++dd) {
            MultilinearExpr e;
            e.add(-1.0, {lambda + dd}).add(1.0, {kappa + dd}).add(-1.0, {beta + dd});
            for (int r = 0; r < m; ++r)
                if (w(r, dd) != 0.0) e.add(w(r, dd), {xi + r});
            sys.equalities.push_back(std::move(e));
        }

        // lambda + kappa <= gamma e,  delta + nu <= gamma e
        for (int dd = 0; dd < d; ++dd) {
            MultilinearExpr e;
            e.add(1.0, {lambda + dd}).add(1.0, {kappa + dd}).add(-1.0, {gamma});
            sys.inequalities.push_back(std::move(e));
        }
        for (int dd = 0; dd < d; ++dd) {
            MultilinearExpr e;
            e.add(1.0, {delta + dd}).add(1.0, {nu + dd}).add(-1.0, {gamma});
            sys.inequalities.push_back(std::move(e));
        }

        // alpha - m'delta + m'nu + h'theta + zeta >= 0
        {
            MultilinearExpr e;
            e.add(-1.0, {alpha}).add(-1.0, {zeta});
            for (int dd = 0; dd < d; ++dd) {
                if (mv(dd) == 0.0) continue;
                e.add(mv(dd), {delta + dd}).add(-mv(dd), {nu + dd});
            }
            for (int r = 0; r < m; ++r)
                if (h(r) != 0.0) e.add(-h(r), {theta + r});
            sys.inequalities.push_back(std::move(e));
        }

        // -delta + nu + W'theta - beta - Y^i(x^-i) x^i = 0
        {
            std::vector<MultilinearExpr> rows(static_cast<std::size_t>(d));
            for (int dd = 0; dd < d; ++dd) {
                rows[dd].add(-1.0, {delta + dd}).add(1.0, {nu + dd}).add(-1.0, {beta + dd});
                for (int r = 0; r < m; ++r)
                    if (w(r, dd) != 0.0) rows[dd].add(w(r, dd), {theta + r});
            }
            std::vector<int> idx(shape.num_players, 0);
            std::int64_t flat = i;
            do {
                std::vector<int> vars;
                for (int k = 0; k < shape.num_players; ++k) vars.push_back(x[k] + idx[k]);
                rows[flat].add(-1.0, std::move(vars));
                flat += shape.num_players;
            } while (next_profile(shape, idx));
            for (auto& row : rows) sys.equalities.push_back(std::move(row));
        }

        // -e'g - e'phi <= s/eps
        {
            MultilinearExpr e;
            for (int dd = 0; dd < d; ++dd) e.add(-1.0, {gv + dd}).add(-1.0, {phi + dd});
            e.constant = -s / eps;
            sys.inequalities.push_back(std::move(e));
        }

        // -tau - f = (1/eps) m
        for (int dd = 0; dd < d; ++dd) {
            MultilinearExpr e;
            e.add(-1.0, {tau + dd}).add(-1.0, {fv + dd});
            e.constant = -mv(dd) / eps;
            sys.equalities.push_back(std::move(e));
        }

        // -tau + phi <= sigma m,  tau + phi <= -sigma m
        for (int dd = 0; dd < d; ++dd) {
            MultilinearExpr e;
            e.add(-1.0, {tau + dd}).add(1.0, {phi + dd});
            e.constant = -sig * mv(dd);
            sys.inequalities.push_back(std::move(e));
        }
        for (int dd = 0; dd < d; ++dd) {
            MultilinearExpr e;
            e.add(1.0, {tau + dd}).add(1.0, {phi + dd});
            e.constant = sig * mv(dd);
            sys.inequalities.push_back(std::move(e));
        }

        // W tau >= -sigma h,  W f >= -h
        for (int r = 0; r < m; ++r) {
            MultilinearExpr e;
            for (int dd = 0; dd < d; ++dd)
                if (w(r, dd) != 0.0) e.add(-w(r, dd), {tau + dd});
            e.constant = -sig * h(r);
            sys.inequalities.push_back(std::move(e));
        }
        for (int r = 0; r < m; ++r) {
            MultilinearExpr e;
            for (int dd = 0; dd < d; ++dd)
                if (w(r, dd) != 0.0) e.add(-w(r, dd), {fv + dd});
            e.constant = -h(r);
            sys.inequalities.push_back(std::move(e));
        }

        // -f + g <= m,  f + g <= -m
        for (int dd = 0; dd < d; ++dd) {
            MultilinearExpr e;
            e.add(-1.0, {fv + dd}).add(1.0, {gv + dd});
            e.constant = -mv(dd);
            sys.inequalities.push_back(std::move(e));
        }
        for (int dd = 0; dd < d; ++dd) {
            MultilinearExpr e;
            e.add(1.0, {fv + dd}).add(1.0, {gv + dd});
            e.constant = mv(dd);
            sys.inequalities.push_back(std::move(e));
        }

        // rho e' <= f' Y^i(x^-i), one row per pure action
        for (int j = 0; j < shape.actions[i]; ++j) {
            MultilinearExpr e;
            e.add(1.0, {rho});
            std::vector<int> idx(shape.num_players, 0);
            std::int64_t flat = i;
            do {
                if (idx[i] == j) {
                    std::vector<int> vars{fv + static_cast<int>(flat)};
                    for (int k = 0; k < shape.num_players; ++k)
                        if (k != i) vars.push_back(x[k] + idx[k]);
                    e.add(-1.0, std::move(vars));
                }
                flat += shape.num_players;
            } while (next_profile(shape, idx));
            sys.inequalities.push_back(std::move(e));
        }

        // sign constraints: lambda, kappa, delta, nu, gamma >= 0;
        // theta, xi, phi, g <= 0
        auto nonneg = [&](int off, int n) {
            for (int k = 0; k < n; ++k) {
                MultilinearExpr e;
                e.add(-1.0, {off + k});
                sys.inequalities.push_back(std::move(e));
            }
        };
        auto nonpos = [&](int off, int n) {
            for (int k = 0; k < n; ++k) {
                MultilinearExpr e;
                e.add(1.0, {off + k});
                sys.inequalities.push_back(std::move(e));
            }
        };
        nonneg(lambda, d);
        nonneg(kappa, d);
        nonneg(delta, d);
        nonneg(nu, d);
        nonneg(gamma, 1);
        nonpos(theta, m);
        nonpos(xi, m);
        nonpos(phi, d);
        nonpos(gv, d);
    }
    sys.canonicalize();
    return sys;
}

// Start seeding for the distributionally robust system. With every dual
// block at zero the pure-equilibrium certificates have vanishing basins, so
// each start is anchored at a certificate that satisfies every row except
// the best-response ones: f = -m, tau = -sigma m, beta = -Yx, lambda = Yx,
// alpha = m'Yx, zeta = -alpha, gamma = max Yx, rho from the objective link.
inline StartInitializer dro_start_initializer(const GameShape& shape, const AmbiguitySet& amb,
                                              const RiskProfile& risk) {
    const VecOrdering ord(shape);
    const Eigen::VectorXd mean = amb.mean;
    const double s = amb.dispersion;
    const std::vector<double> eps = risk.epsilons;

    return [ord, mean, s, eps, shape](const MultilinearSystem& sys, std::mt19937_64& rng) {
        Eigen::VectorXd y = initial_point(sys, rng);
        StrategyProfile prof;
        for (int i = 0; i < shape.num_players; ++i) {
            const auto& b = sys.block("x", i);
            prof.strategies.emplace_back(
                std::vector<double>(y.data() + b.offset, y.data() + b.offset + b.size));
        }
        for (int i = 0; i < shape.num_players; ++i) {
            const double sig = (1.0 - eps[i]) / eps[i];
            const auto yv = build_Y(prof, i, ord);
            Eigen::VectorXd yx = Eigen::VectorXd::Zero(mean.size());
            for (Eigen::Index d = 0; d < mean.size(); ++d)
                for (int j = 0; j < shape.actions[i]; ++j)
                    yx(d) += yv[d][j] * prof.strategies[i].weights[j];
            const double value = mean.dot(yx);
            auto put = [&](const char* name, int k, double v) { y(sys.block(name, i).offset + k) = v; };
            for (Eigen::Index d = 0; d < mean.size(); ++d) {
                put("f", static_cast<int>(d), -mean(d));
                put("tau", static_cast<int>(d), -sig * mean(d));
                put("beta", static_cast<int>(d), -yx(d));
                put("lambda", static_cast<int>(d), yx(d));
            }
            const double gamma = yx.maxCoeff();
            put("gamma", 0, gamma);
            put("alpha", 0, value);
            put("zeta", 0, -value);
            put("rho", 0, -value + s * gamma / eps[i]);
        }
        return y;
    };
}

struct CvarReportRow {
    double mean_payoff = 0.0;
    double worst_case_cvar = 0.0;  // CVaR of the loss distribution, worst case over the ambiguity set
    bool verified = false;         // true when read off a solved system point
};

// Per-player report at a strategy profile. When a solved system vector is
// supplied, the worst-case CVaR is its rho_i coordinate (verified). Without
// one, the value is exact in the reduced cases (singleton support, s = 0, or
// risk-neutral players force CVaR = -mean payoff) and flagged unverified
// otherwise.
inline std::vector<CvarReportRow> worst_case_cvar_report(const AmbiguitySet& amb, const RiskProfile& risk,
                                                         const StrategyProfile& profile,
                                                         const GameShape& shape,
                                                         const MultilinearSystem* sys = nullptr,
                                                         const Eigen::VectorXd* solution = nullptr) {
    risk.validate();
    profile.validate(shape, kSimplexTolSolver);
    const PayoffTensor mean_tensor = unflatten(
        std::vector<double>(amb.mean.data(), amb.mean.data() + amb.mean.size()), VecOrdering(shape));

    bool reduced = risk.all_neutral() || amb.dispersion <= 1e-12;
    if (!reduced) {
        try {
            reduced = vertex_enumerate(amb.support, kPolyTol, 1e-8).size() == 1;
        } catch (const InputError&) {
            reduced = false;
        }
    }

    std::vector<CvarReportRow> rows(shape.num_players);
    for (int i = 0; i < shape.num_players; ++i) {
        rows[i].mean_payoff = expected_payoff(mean_tensor, profile, i);
        if (sys != nullptr && solution != nullptr) {
            rows[i].worst_case_cvar = (*solution)(sys->block("rho", i).offset);
            rows[i].verified = true;
        } else {
            rows[i].worst_case_cvar = -rows[i].mean_payoff;
            rows[i].verified = reduced;
        }
    }
    return rows;
}

}  // namespace drgt
