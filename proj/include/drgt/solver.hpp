#pragma once

// Feasible points of multilinear systems via penalty minimization:
// steepest descent and BFGS, both with Armijo backtracking, driven from many
// random starts. Converged starts are projected onto the strategy
// coordinates and deduplicated. Runs are deterministic for a fixed seed:
// start j draws from seed + j and results merge in start order regardless of
// the number of worker threads (capped by the DRGT_THREADS environment
// variable).

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "drgt/game.hpp"
#include "drgt/multilinear.hpp"

namespace drgt {

enum class Method { bfgs, steepest };

struct SolverConfig {
    Method method = Method::bfgs;
    double armijo_s = 1.0;
    double armijo_beta = 0.5;
    double armijo_sigma = 1e-4;
    double penalty_tol = 1e-10;
    double grad_tol = 1e-8;
    int max_iters = 2000;
    int num_starts = 200;
    std::uint64_t seed = 42;
    double dedup_tol = 1e-3;

    void validate() const {
        if (armijo_s <= 0 || penalty_tol <= 0 || grad_tol <= 0 || dedup_tol <= 0)
            throw InputError("SolverConfig: tolerances and step scale must be positive");
        if (armijo_beta <= 0 || armijo_beta >= 1 || armijo_sigma <= 0 || armijo_sigma >= 1)
            throw InputError("SolverConfig: beta and sigma must lie in (0,1)");
        if (max_iters < 1 || num_starts < 1) throw InputError("SolverConfig: iteration/start counts must be positive");
    }
};

inline Method method_from_string(const std::string& s) {
    if (s == "bfgs") return Method::bfgs;
    if (s == "steepest") return Method::steepest;
    throw InputError("unknown method '" + s + "' (expected bfgs or steepest)");
}

inline const char* method_name(Method m) { return m == Method::bfgs ? "bfgs" : "steepest"; }

using ObjectiveFn = std::function<double(const Eigen::VectorXd&)>;
using GradientFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

struct ArmijoResult {
    double step = 0.0;
    int exponent = 0;  // m with step = beta^m * s
    bool ok = false;
};

// Backtracking rule: accept the first nonnegative m with
//   f(x) - f(x + beta^m s d) >= -sigma beta^m s grad'd.
// A non-descent d falls back to -grad; failure is reported past m = 60.
inline ArmijoResult armijo_search(const ObjectiveFn& f, const GradientFn& grad_f, const Eigen::VectorXd& x,
                                  Eigen::VectorXd d, const SolverConfig& cfg) {
    const double fx = f(x);
    Eigen::VectorXd g = grad_f(x);
    double gd = g.dot(d);
    if (gd >= 0.0) {
        d = -g;
        gd = -g.squaredNorm();
        if (gd >= 0.0) return {};  // zero gradient: nothing to search
    }
    double step = cfg.armijo_s;
    for (int m = 0; m <= 60; ++m, step *= cfg.armijo_beta) {
        const double fnew = f(x + step * d);
        if (fx - fnew >= -cfg.armijo_sigma * step * gd) return {step, m, true};
    }
    return {};
}

enum class MinimizeStatus {
    converged_value,    // f fell below penalty_tol
    converged_gradient, // gradient norm fell below grad_tol
    max_iterations,
    line_search_failed,
    diverged,           // NaN or Inf encountered
};

inline const char* to_string(MinimizeStatus s) {
    switch (s) {
        case MinimizeStatus::converged_value: return "converged_value";
        case MinimizeStatus::converged_gradient: return "converged_gradient";
        case MinimizeStatus::max_iterations: return "max_iterations";
        case MinimizeStatus::line_search_failed: return "line_search_failed";
        case MinimizeStatus::diverged: return "diverged";
    }
    return "unknown";
}

struct MinimizeResult {
    Eigen::VectorXd x;
    double f = 0.0;
    int iterations = 0;
    MinimizeStatus status = MinimizeStatus::max_iterations;
};

namespace detail {

// One Levenberg-Marquardt pass on the stacked residuals (equalities plus
// strictly positive inequality parts). With frozen == true the strategy
// coordinates are held fixed, which makes the least-squares problem linear
// and lets it finish in a couple of rounds.
inline double lm_rounds(const MultilinearSystem& sys, Eigen::VectorXd& y, double best, int max_rounds,
                        const std::vector<int>& frozen_cols) {
    const int n = sys.num_vars;
    double lambda = 1e-8;
    Eigen::VectorXd best_y = y;
    std::vector<double> r;
    std::vector<Eigen::VectorXd> rows;
    for (int round = 0; round < max_rounds && best > 1e-26; ++round) {
        r.clear();
        rows.clear();
        auto push = [&](const MultilinearExpr& e, double g) {
            Eigen::VectorXd row = Eigen::VectorXd::Zero(n);
            for (const auto& t : e.terms) accumulate_term_gradient(t, y, 1.0, row);
            for (int c : frozen_cols) row(c) = 0.0;
            r.push_back(g);
            rows.push_back(std::move(row));
        };
        for (const auto& e : sys.equalities) push(e, e.eval(y));
        for (const auto& e : sys.inequalities) {
            const double g = e.eval(y);
            if (g > 0.0) push(e, g);
        }
        const int m = static_cast<int>(r.size());
        if (m == 0) break;
        Eigen::MatrixXd jac(m, n);
        Eigen::VectorXd rv(m);
        for (int i = 0; i < m; ++i) {
            jac.row(i) = rows[i];
            rv(i) = r[i];
        }
        Eigen::MatrixXd jtj = Eigen::MatrixXd::Zero(n, n);
        jtj.selfadjointView<Eigen::Lower>().rankUpdate(jac.transpose());
        const Eigen::VectorXd jtr = jac.transpose() * rv;

        bool improved = false;
        for (int tries = 0; tries < 12; ++tries) {
            Eigen::MatrixXd damped = jtj;
            damped.diagonal().array() += lambda;
            const Eigen::VectorXd step = damped.selfadjointView<Eigen::Lower>().ldlt().solve(-jtr);
            if (!step.allFinite()) break;
            const Eigen::VectorXd cand = y + step;
            const double f = penalty(sys, cand);
            if (f < best) {
                best = f;
                y = cand;
                best_y = cand;
                lambda = std::max(lambda * 0.3, 1e-14);
                improved = true;
                break;
            }
            lambda *= 10.0;
        }
        if (!improved) break;
    }
    y = best_y;
    return best;
}

}  // namespace detail

// Refinement of a near-feasible point. A Levenberg-Marquardt pass on the
// active residuals handles most solutions outright; where the feasibility
// manifold is tangent to the strategy simplex the remaining error sits in
// the strategy coordinates, so those are snapped onto the simplex and the
// (then linear) auxiliary system is re-solved. Returns the best point seen.
inline Eigen::VectorXd least_squares_polish(const MultilinearSystem& sys, Eigen::VectorXd y,
                                            double& penalty_out, int max_rounds = 30) {
    double best = detail::lm_rounds(sys, y, penalty(sys, y), max_rounds, {});
    if (best > 1e-26) {
        Eigen::VectorXd snapped = y;
        for (const auto& b : sys.layout) {
            if (!b.is_strategy) continue;
            double sum = 0.0;
            for (int k = 0; k < b.size; ++k) {
                double& w = snapped(b.offset + k);
                if (w < 0.0) w = 0.0;
                sum += w;
            }
            if (sum <= 0.0) return y;
            for (int k = 0; k < b.size; ++k) snapped(b.offset + k) /= sum;
        }
        std::vector<int> frozen;
        for (const auto& b : sys.layout)
            if (b.is_strategy)
                for (int k = 0; k < b.size; ++k) frozen.push_back(b.offset + k);
        const double snapped_f = detail::lm_rounds(sys, snapped, penalty(sys, snapped), 12, frozen);
        if (snapped_f < best) {
            best = snapped_f;
            y = snapped;
        }
    }
    penalty_out = best;
    return y;
}

namespace detail {

struct ValueGradFn {
    // Single-pass value+gradient when available (compiled systems), else the
    // two callbacks.
    const CompiledSystem* compiled = nullptr;
    const ObjectiveFn* f = nullptr;
    const GradientFn* g = nullptr;

    double value(const Eigen::VectorXd& y) const { return compiled ? compiled->value(y) : (*f)(y); }
    double value_and_gradient(const Eigen::VectorXd& y, Eigen::VectorXd& grad) const {
        if (compiled) return compiled->value_and_gradient(y, grad);
        grad = (*g)(y);
        return (*f)(y);
    }
};

inline MinimizeResult minimize_impl(const ValueGradFn& fn, const Eigen::VectorXd& x0,
                                    const SolverConfig& cfg, Method method,
                                    std::vector<double>* trace = nullptr) {
    const Eigen::Index n = x0.size();
    Eigen::VectorXd x = x0;
    Eigen::VectorXd g(n), d(n), x_new(n), g_new(n), dx(n), dg(n), hdg(n);
    double fx = fn.value_and_gradient(x, g);
    if (trace) trace->push_back(fx);

    // Inverse Hessian approximation (BFGS only); kept symmetric, so only the
    // lower triangle is updated.
    Eigen::MatrixXd h;
    const bool use_bfgs = method == Method::bfgs;
    if (use_bfgs) h = Eigen::MatrixXd::Identity(n, n);

    MinimizeResult out;
    for (int k = 0; k < cfg.max_iters; ++k) {
        out.iterations = k;
        if (!std::isfinite(fx) || !g.allFinite()) {
            out.status = MinimizeStatus::diverged;
            out.x = x;
            out.f = fx;
            return out;
        }
        if (fx <= cfg.penalty_tol) {
            out.status = MinimizeStatus::converged_value;
            out.x = x;
            out.f = fx;
            return out;
        }
        if (g.norm() <= cfg.grad_tol) {
            out.status = MinimizeStatus::converged_gradient;
            out.x = x;
            out.f = fx;
            return out;
        }

        if (use_bfgs) {
            d.noalias() = h.selfadjointView<Eigen::Lower>() * g;
            d = -d;
        } else {
            d = -g;
        }
        double gd = g.dot(d);
        if (gd >= 0.0) {  // fall back to steepest direction
            d = -g;
            gd = -g.squaredNorm();
            if (use_bfgs) h.setIdentity();
        }

        // Armijo backtracking
        double step = cfg.armijo_s;
        double f_new = std::numeric_limits<double>::infinity();
        bool accepted = false;
        for (int m = 0; m <= 60; ++m, step *= cfg.armijo_beta) {
            x_new = x + step * d;
            f_new = fn.value(x_new);
            if (fx - f_new >= -cfg.armijo_sigma * step * gd) {
                accepted = true;
                break;
            }
        }
        if (!accepted || !(f_new <= fx)) {
            out.status = MinimizeStatus::line_search_failed;
            out.x = x;
            out.f = fx;
            return out;
        }

        fx = fn.value_and_gradient(x_new, g_new);
        if (trace) trace->push_back(fx);

        if (use_bfgs) {
            dx = x_new - x;
            dg = g_new - g;
            const double curv = dg.dot(dx);
            if (curv <= 1e-12) {
                // Penalty Hessians go singular at feasibility; restart the
                // approximation rather than corrupting it.
                h.setIdentity();
            } else {
                hdg.noalias() = h.selfadjointView<Eigen::Lower>() * dg;
                const double c1 = (1.0 + dg.dot(hdg) / curv) / curv;
                auto hv = h.selfadjointView<Eigen::Lower>();
                hv.rankUpdate(dx, c1);
                hv.rankUpdate(dx, hdg, -1.0 / curv);
            }
        }
        x.swap(x_new);
        g.swap(g_new);
    }
    out.status = MinimizeStatus::max_iterations;
    out.x = x;
    out.f = fx;
    return out;
}

}  // namespace detail

inline MinimizeResult bfgs_minimize(const ObjectiveFn& f, const GradientFn& grad_f,
                                    const Eigen::VectorXd& x0, const SolverConfig& cfg,
                                    std::vector<double>* trace = nullptr) {
    detail::ValueGradFn fn;
    fn.f = &f;
    fn.g = &grad_f;
    return detail::minimize_impl(fn, x0, cfg, Method::bfgs, trace);
}

inline MinimizeResult steepest_descent_minimize(const ObjectiveFn& f, const GradientFn& grad_f,
                                                const Eigen::VectorXd& x0, const SolverConfig& cfg,
                                                std::vector<double>* trace = nullptr) {
    detail::ValueGradFn fn;
    fn.f = &f;
    fn.g = &grad_f;
    return detail::minimize_impl(fn, x0, cfg, Method::steepest, trace);
}

// Greedy clustering in input order; each point is kept unless it sits within
// tol of an already kept one.
inline std::vector<Eigen::VectorXd> dedup(const std::vector<Eigen::VectorXd>& points, double tol) {
    if (tol <= 0) throw InputError("dedup: tolerance must be positive");
    std::vector<Eigen::VectorXd> kept;
    for (const auto& p : points) {
        bool close = false;
        for (const auto& q : kept)
            if ((p - q).norm() <= tol) {
                close = true;
                break;
            }
        if (!close) kept.push_back(p);
    }
    return kept;
}

struct EquilibriumReport {
    StrategyProfile profile;
    double penalty_residual = 0.0;
    // per player: (mean payoff, worst-case value); filled by the caller that
    // knows the game behind the system.
    std::vector<std::pair<double, double>> per_player;
    int starts_converged = 0;
    Eigen::VectorXd solution;  // full variable vector of the best start
};

struct MultistartOutcome {
    std::vector<EquilibriumReport> equilibria;
    int starts_attempted = 0;
    int starts_converged = 0;
    int dropped_invalid = 0;  // converged but off the simplex at 1e-6
};

namespace detail {

// Deterministic uniform double in (0,1).
inline double uniform01(std::mt19937_64& rng) {
    while (true) {
        const double u = (rng() >> 11) * 0x1.0p-53;
        if (u > 0.0) return u;
    }
}

inline void sample_simplex(std::mt19937_64& rng, double* out, int n) {
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        out[i] = -std::log(uniform01(rng));
        sum += out[i];
    }
    for (int i = 0; i < n; ++i) out[i] /= sum;
}

// Upper bounds on a scalar variable implied by inequalities where it appears
// as a lone linear term with positive coefficient: c*v + rest <= 0 gives
// v <= -rest/c at the current point.
inline double max_upper_bound(const MultilinearSystem& sys, int var, const Eigen::VectorXd& y) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& e : sys.inequalities) {
        double coef = 0.0;
        bool elsewhere = false;
        for (const auto& t : e.terms) {
            const bool has = std::find(t.vars.begin(), t.vars.end(), var) != t.vars.end();
            if (!has) continue;
            if (t.vars.size() == 1) coef += t.coef;
            else elsewhere = true;
        }
        if (coef <= 0.0 || elsewhere) continue;
        double rest = e.constant;
        for (const auto& t : e.terms) {
            if (t.vars.size() == 1 && t.vars[0] == var) continue;
            double p = t.coef;
            for (int idx : t.vars) p *= y(idx);
            rest += p;
        }
        best = std::max(best, -rest / coef);
    }
    return std::isfinite(best) ? best : 0.0;
}

inline int thread_budget() {
    if (const char* env = std::getenv("DRGT_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace detail

// Seed a start: strategy and simplex blocks are sampled uniformly on the
// simplex, robust value variables start at the largest upper bound their
// inequalities impose at the sampled x (mirrors copy them), everything else
// starts at zero.
inline Eigen::VectorXd initial_point(const MultilinearSystem& sys, std::mt19937_64& rng) {
    Eigen::VectorXd y = Eigen::VectorXd::Zero(sys.num_vars);
    for (const auto& b : sys.layout)
        if (b.init == InitKind::simplex) detail::sample_simplex(rng, y.data() + b.offset, b.size);
    for (std::size_t i = 0; i < sys.layout.size(); ++i) {
        const auto& b = sys.layout[i];
        if (b.init == InitKind::robust_value)
            for (int k = 0; k < b.size; ++k) y(b.offset + k) = detail::max_upper_bound(sys, b.offset + k, y);
    }
    for (const auto& b : sys.layout)
        if (b.init == InitKind::mirror_value && b.mirror_of >= 0) {
            const auto& src = sys.layout[b.mirror_of];
            for (int k = 0; k < b.size && k < src.size; ++k) y(b.offset + k) = y(src.offset + k);
        }
    return y;
}

// Optional override for seeding starts; receives the per-start generator and
// must be pure (it runs concurrently across worker threads).
using StartInitializer = std::function<Eigen::VectorXd(const MultilinearSystem&, std::mt19937_64&)>;

inline MultistartOutcome multistart_enumerate(const MultilinearSystem& sys, const GameShape& shape,
                                              const SolverConfig& cfg,
                                              const StartInitializer& seed_start = {}) {
    cfg.validate();
    sys.validate();
    const auto strategy = sys.strategy_blocks();
    if (strategy.empty()) throw InputError("multistart_enumerate: system has no strategy blocks");
    if (static_cast<int>(strategy.size()) != shape.num_players)
        throw DimensionError("multistart_enumerate: strategy block count != num_players");
    for (int i = 0; i < shape.num_players; ++i)
        if (strategy[i]->size != shape.actions[i])
            throw DimensionError("multistart_enumerate: strategy block size mismatch");

    const CompiledSystem compiled(sys);
    detail::ValueGradFn fn;
    fn.compiled = &compiled;

    struct StartResult {
        bool converged = false;
        double f = 0.0;
        Eigen::VectorXd y;
    };
    std::vector<StartResult> results(cfg.num_starts);

    auto run_start = [&](int j) {
        std::mt19937_64 rng(cfg.seed + static_cast<std::uint64_t>(j));
        const Eigen::VectorXd y0 = seed_start ? seed_start(sys, rng) : initial_point(sys, rng);
        MinimizeResult r = detail::minimize_impl(fn, y0, cfg, cfg.method);
        StartResult& slot = results[j];
        slot.converged = r.status == MinimizeStatus::converged_value;
        slot.f = r.f;
        if (slot.converged) {
            // A point at penalty_tol can still sit ~sqrt(penalty_tol) off the
            // simplex; refine it so the projected strategies are clean at
            // reporting tolerance.
            double refined = r.f;
            slot.y = least_squares_polish(sys, std::move(r.x), refined);
            slot.f = std::min(refined, r.f);
        }
    };

    const int threads = std::min(detail::thread_budget(), cfg.num_starts);
    if (threads <= 1) {
        for (int j = 0; j < cfg.num_starts; ++j) run_start(j);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (int t = 0; t < threads; ++t)
            pool.emplace_back([&] {
                while (true) {
                    const int j = next.fetch_add(1);
                    if (j >= cfg.num_starts) return;
                    run_start(j);
                }
            });
        for (auto& t : pool) t.join();
    }

    MultistartOutcome out;
    out.starts_attempted = cfg.num_starts;

    const int sdim = sys.strategy_dim();
    auto project = [&](const Eigen::VectorXd& y) {
        Eigen::VectorXd s(sdim);
        int at = 0;
        for (const auto* b : strategy) {
            s.segment(at, b->size) = y.segment(b->offset, b->size);
            at += b->size;
        }
        return s;
    };

    // Greedy clustering in start order; the representative of a cluster is
    // its lowest-residual member.
    struct Cluster {
        Eigen::VectorXd s;
        Eigen::VectorXd y;
        double f;
        int count = 0;
    };
    std::vector<Cluster> clusters;
    for (int j = 0; j < cfg.num_starts; ++j) {
        if (!results[j].converged) continue;
        ++out.starts_converged;
        Eigen::VectorXd s = project(results[j].y);

        bool simplex_ok = true;
        int at = 0;
        for (const auto* b : strategy) {
            MixedStrategy ms(std::vector<double>(s.data() + at, s.data() + at + b->size));
            if (!ms.valid(kSimplexTolSolver)) simplex_ok = false;
            at += b->size;
        }
        if (!simplex_ok) {
            ++out.dropped_invalid;
            continue;
        }

        bool merged = false;
        for (auto& c : clusters) {
            if ((c.s - s).norm() <= cfg.dedup_tol) {
                ++c.count;
                if (results[j].f < c.f) {
                    c.s = std::move(s);
                    c.y = results[j].y;
                    c.f = results[j].f;
                }
                merged = true;
                break;
            }
        }
        if (!merged) clusters.push_back(Cluster{std::move(s), results[j].y, results[j].f, 1});
    }

    for (const auto& c : clusters) {
        EquilibriumReport rep;
        rep.penalty_residual = c.f;
        rep.starts_converged = c.count;
        rep.solution = c.y;
        int at = 0;
        for (const auto* b : strategy) {
            rep.profile.strategies.emplace_back(std::vector<double>(c.s.data() + at, c.s.data() + at + b->size));
            at += b->size;
        }
        out.equilibria.push_back(std::move(rep));
    }
    return out;
}

}  // namespace drgt
