#pragma once

// Shared test utilities: independent oracles (direct tensor sums, support
// enumeration for two-player games, finite differences, CVaR tail
// enumeration) and small random generators. Everything here is deliberately
// written against the public types only, independent of the implementation
// paths it checks.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "drgt/drgt.hpp"

namespace testhelp {

using namespace drgt;

inline double urand(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * ((rng() >> 11) * 0x1.0p-53);
}

inline PayoffTensor random_tensor(const GameShape& shape, std::mt19937_64& rng, double lo = -2.0,
                                  double hi = 2.0) {
    PayoffTensor t(shape);
    for (auto& v : t.flat) v = urand(rng, lo, hi);
    return t;
}

inline MixedStrategy random_simplex(int n, std::mt19937_64& rng) {
    std::vector<double> w(n);
    double sum = 0.0;
    for (auto& x : w) {
        x = -std::log(urand(rng, 1e-12, 1.0));
        sum += x;
    }
    for (auto& x : w) x /= sum;
    return MixedStrategy(std::move(w));
}

inline StrategyProfile random_profile(const GameShape& shape, std::mt19937_64& rng) {
    std::vector<MixedStrategy> s;
    for (int i = 0; i < shape.num_players; ++i) s.push_back(random_simplex(shape.actions[i], rng));
    return StrategyProfile(std::move(s));
}

// Direct tensor-sum oracle for the expected payoff: explicit nested loops
// over the entry accessor, no flat indexing.
inline double oracle_expected_payoff(const PayoffTensor& p, const StrategyProfile& profile, int player) {
    const GameShape& shape = p.shape;
    std::vector<int> idx(shape.num_players, 0);
    double total = 0.0;
    while (true) {
        double w = p.entry(player, idx);
        for (int k = 0; k < shape.num_players; ++k) w *= profile.strategies[k].weights[idx[k]];
        total += w;
        int k = shape.num_players - 1;
        while (k >= 0) {
            if (++idx[k] < shape.actions[k]) break;
            idx[k] = 0;
            --k;
        }
        if (k < 0) break;
    }
    return total;
}

// Support enumeration for two-player games: for every pair of equal-size
// supports solve the indifference system and keep simplex-feasible solutions
// that survive a full best-response check. Complete for nondegenerate games.
inline std::vector<StrategyProfile> support_enumeration_nash(const PayoffTensor& p, double tol = 1e-9) {
    const GameShape& shape = p.shape;
    if (shape.num_players != 2) throw std::invalid_argument("oracle handles two players only");
    const int a1 = shape.actions[0], a2 = shape.actions[1];

    auto subsets = [](int n) {
        std::vector<std::vector<int>> out;
        for (int mask = 1; mask < (1 << n); ++mask) {
            std::vector<int> s;
            for (int j = 0; j < n; ++j)
                if (mask >> j & 1) s.push_back(j);
            out.push_back(std::move(s));
        }
        return out;
    };

    // Solve for q on supp_other making `player` indifferent across supp_own.
    // Unknowns: q over supp_other plus the common payoff value.
    auto solve_indiff = [&](int player, const std::vector<int>& supp_own,
                            const std::vector<int>& supp_other) -> std::vector<double> {
        const int n = static_cast<int>(supp_other.size());
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n + 1, n + 1);
        Eigen::VectorXd b = Eigen::VectorXd::Zero(n + 1);
        for (int r = 0; r < static_cast<int>(supp_own.size()); ++r) {
            for (int c = 0; c < n; ++c) {
                const int own = supp_own[r], oth = supp_other[c];
                a(r, c) = player == 0 ? p.entry(0, {own, oth}) : p.entry(1, {oth, own});
            }
            a(r, n) = -1.0;
        }
        for (int c = 0; c < n; ++c) a(n, c) = 1.0;
        b(n) = 1.0;
        Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
        if (!lu.isInvertible()) return {};
        Eigen::VectorXd sol = lu.solve(b);
        if (!sol.allFinite()) return {};
        return std::vector<double>(sol.data(), sol.data() + n);
    };

    std::vector<StrategyProfile> found;
    for (const auto& s1 : subsets(a1)) {
        for (const auto& s2 : subsets(a2)) {
            if (s1.size() != s2.size()) continue;  // nondegenerate equilibria have equal supports
            std::vector<double> x1(a1, 0.0), x2(a2, 0.0);
            if (s1.size() == 1) {
                x1[s1[0]] = 1.0;
                x2[s2[0]] = 1.0;
            } else {
                const auto q2 = solve_indiff(0, s1, s2);  // player 1 indifferent -> pins x2
                const auto q1 = solve_indiff(1, s2, s1);  // player 2 indifferent -> pins x1
                if (q1.empty() || q2.empty()) continue;
                bool ok = true;
                for (double v : q1) ok = ok && v >= -tol;
                for (double v : q2) ok = ok && v >= -tol;
                if (!ok) continue;
                for (std::size_t k = 0; k < s1.size(); ++k) x1[s1[k]] = std::max(0.0, q1[k]);
                for (std::size_t k = 0; k < s2.size(); ++k) x2[s2[k]] = std::max(0.0, q2[k]);
            }
            StrategyProfile prof({MixedStrategy(x1), MixedStrategy(x2)});
            if (!is_nash(p, prof, 1e-7).is_equilibrium) continue;
            bool dup = false;
            for (const auto& seen : found) {
                double dist = 0.0;
                for (int i = 0; i < 2; ++i)
                    for (std::size_t j = 0; j < prof.strategies[i].weights.size(); ++j)
                        dist += std::abs(prof.strategies[i].weights[j] - seen.strategies[i].weights[j]);
                if (dist < 1e-6) dup = true;
            }
            if (!dup) found.push_back(std::move(prof));
        }
    }
    return found;
}

inline Eigen::VectorXd fd_gradient(const MultilinearSystem& sys, const Eigen::VectorXd& y,
                                   double step = 1e-6) {
    Eigen::VectorXd g(y.size());
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        Eigen::VectorXd hi = y, lo = y;
        hi(i) += step;
        lo(i) -= step;
        g(i) = (penalty(sys, hi) - penalty(sys, lo)) / (2 * step);
    }
    return g;
}

// CVaR oracle: the objective zeta + E[(L - zeta)+]/eps is convex piecewise
// linear with kinks at the atom losses, so minimizing over the atoms is
// exact.
inline double cvar_atom_oracle(const DiscreteLossDistribution& dist, double eps) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [pz, zeta] : dist.atoms) {
        (void)pz;
        double expect = 0.0;
        for (const auto& [p, l] : dist.atoms) expect += p * std::max(l - zeta, 0.0);
        best = std::min(best, zeta + expect / eps);
    }
    return best;
}

// Fine-grid minimization of the same objective; the grid includes the atom
// losses so the kinks of the piecewise-linear objective are hit exactly.
inline double cvar_grid_oracle(const DiscreteLossDistribution& dist, double eps, int steps = 20000) {
    double lo = dist.atoms.front().second, hi = lo;
    for (const auto& [p, l] : dist.atoms) {
        lo = std::min(lo, l);
        hi = std::max(hi, l);
    }
    lo -= 1.0;
    hi += 1.0;
    std::vector<double> grid;
    grid.reserve(steps + 1 + dist.atoms.size());
    for (int i = 0; i <= steps; ++i) grid.push_back(lo + (hi - lo) * i / steps);
    for (const auto& [p, l] : dist.atoms) grid.push_back(l);
    double best = std::numeric_limits<double>::infinity();
    for (double zeta : grid) {
        double expect = 0.0;
        for (const auto& [p, l] : dist.atoms) expect += p * std::max(l - zeta, 0.0);
        best = std::min(best, zeta + expect / eps);
    }
    return best;
}

// Strategy-space distance between two profiles (concatenated euclidean).
inline double profile_distance(const StrategyProfile& a, const StrategyProfile& b) {
    const auto va = a.concat(), vb = b.concat();
    double d2 = 0.0;
    for (std::size_t i = 0; i < va.size(); ++i) d2 += (va[i] - vb[i]) * (va[i] - vb[i]);
    return std::sqrt(d2);
}

// Symmetric Hausdorff distance between two sets of profiles.
inline double hausdorff(const std::vector<StrategyProfile>& a, const std::vector<StrategyProfile>& b) {
    if (a.empty() || b.empty()) return a.empty() && b.empty() ? 0.0 : std::numeric_limits<double>::infinity();
    double worst = 0.0;
    for (const auto& p : a) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& q : b) best = std::min(best, profile_distance(p, q));
        worst = std::max(worst, best);
    }
    for (const auto& q : b) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& p : a) best = std::min(best, profile_distance(p, q));
        worst = std::max(worst, best);
    }
    return worst;
}

}  // namespace testhelp
