#pragma once

// Finite normal-form games: shapes, payoff tensors, mixed strategies,
// expected payoffs, and equilibrium verification.
//
// A game with N players where player i has a_i actions stores one payoff
// entry per (player, action profile) pair. Tensors are kept flat in a fixed
// vectorization order (see flat_index below); the same order is used by the
// polyhedral uncertainty sets, so membership tests and system builders all
// speak the same coordinates.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "drgt/errors.hpp"

namespace drgt {

inline constexpr double kSimplexTolInput = 1e-9;   // strict, for user-supplied strategies
inline constexpr double kSimplexTolSolver = 1e-6;  // relaxed, for solver outputs

struct GameShape {
    int num_players = 0;
    std::vector<int> actions;  // actions[i] = number of actions of player i

    GameShape() = default;
    GameShape(int players, std::vector<int> acts) : num_players(players), actions(std::move(acts)) {
        if (num_players < 1) throw InputError("GameShape: need at least one player");
        if (static_cast<int>(actions.size()) != num_players)
            throw DimensionError("GameShape: actions list length != num_players");
        for (int a : actions)
            if (a < 1) throw InputError("GameShape: every player needs at least one action");
        // Desk-scale guard: N * prod(a_i) entries must stay comfortably in memory.
        std::int64_t prod = 1;
        for (int a : actions) {
            prod *= a;
            if (prod > 100'000'000) throw InputError("GameShape: joint profile count too large");
        }
        if (static_cast<std::int64_t>(num_players) * prod > 10'000'000)
            throw InputError("GameShape: N * prod(a_i) exceeds 1e7");
    }

    // Number of joint action profiles, prod(a_i).
    std::int64_t num_profiles() const {
        std::int64_t p = 1;
        for (int a : actions) p *= a;
        return p;
    }

    // Flat payoff dimension D = N * prod(a_i).
    std::int64_t flat_dim() const { return num_players * num_profiles(); }

    bool operator==(const GameShape& o) const = default;
};

// Fixed vectorization convention for payoff tensors.
//
// Profiles are enumerated row-major with the first player's action varying
// slowest; within a profile the player index varies fastest:
//
//   flat(i, (j_1..j_N)) = profile_rank(j_1..j_N) * N + i
//
// This matches the column layout of the shipped (W, h, m) fixture matrices,
// which are the authoritative anchor for the convention.
struct VecOrdering {
    GameShape shape;

    explicit VecOrdering(GameShape s) : shape(std::move(s)) {}

    // Row-major rank of an action profile (actions are 0-based).
    std::int64_t profile_rank(const std::vector<int>& profile) const {
        if (static_cast<int>(profile.size()) != shape.num_players)
            throw DimensionError("VecOrdering: profile length mismatch");
        std::int64_t r = 0;
        for (int k = 0; k < shape.num_players; ++k) {
            if (profile[k] < 0 || profile[k] >= shape.actions[k])
                throw InputError("VecOrdering: action index out of range");
            r = r * shape.actions[k] + profile[k];
        }
        return r;
    }

    std::int64_t flat_index(int player, const std::vector<int>& profile) const {
        if (player < 0 || player >= shape.num_players)
            throw InputError("VecOrdering: player index out of range");
        return profile_rank(profile) * shape.num_players + player;
    }

    // Inverse: decode a flat index into (player, profile).
    void decode(std::int64_t flat, int& player, std::vector<int>& profile) const {
        if (flat < 0 || flat >= shape.flat_dim()) throw InputError("VecOrdering: flat index out of range");
        player = static_cast<int>(flat % shape.num_players);
        std::int64_t r = flat / shape.num_players;
        profile.assign(shape.num_players, 0);
        for (int k = shape.num_players - 1; k >= 0; --k) {
            profile[k] = static_cast<int>(r % shape.actions[k]);
            r /= shape.actions[k];
        }
    }
};

// Advance a 0-based action profile in row-major order; false after the last.
inline bool next_profile(const GameShape& shape, std::vector<int>& profile) {
    for (int k = shape.num_players - 1; k >= 0; --k) {
        if (++profile[k] < shape.actions[k]) return true;
        profile[k] = 0;
    }
    return false;
}

struct PayoffTensor {
    GameShape shape;
    std::vector<double> flat;  // values in VecOrdering layout

    PayoffTensor() = default;

    explicit PayoffTensor(GameShape s) : shape(std::move(s)), flat(shape.flat_dim(), 0.0) {}

    PayoffTensor(GameShape s, std::vector<double> values) : shape(std::move(s)), flat(std::move(values)) {
        if (static_cast<std::int64_t>(flat.size()) != shape.flat_dim())
            throw DimensionError("PayoffTensor: value count != N * prod(a_i)");
        for (double v : flat)
            if (!std::isfinite(v)) throw InputError("PayoffTensor: entries must be finite");
    }

    double& entry(int player, const std::vector<int>& profile) {
        return flat[VecOrdering(shape).flat_index(player, profile)];
    }
    double entry(int player, const std::vector<int>& profile) const {
        return flat[VecOrdering(shape).flat_index(player, profile)];
    }
};

// flatten/unflatten are the bijection between tensors and R^D vectors.
inline std::vector<double> flatten(const PayoffTensor& p, const VecOrdering& ord) {
    if (!(ord.shape == p.shape)) throw DimensionError("flatten: ordering shape mismatch");
    return p.flat;
}

inline PayoffTensor unflatten(const std::vector<double>& v, const VecOrdering& ord) {
    return PayoffTensor(ord.shape, v);
}

struct MixedStrategy {
    std::vector<double> weights;

    MixedStrategy() = default;
    explicit MixedStrategy(std::vector<double> w) : weights(std::move(w)) {}

    bool valid(double tol = kSimplexTolInput) const {
        double sum = 0.0;
        for (double w : weights) {
            if (!std::isfinite(w) || w < -tol) return false;
            sum += w;
        }
        return std::abs(sum - 1.0) <= tol;
    }

    void validate(double tol = kSimplexTolInput) const {
        if (weights.empty()) throw InputError("MixedStrategy: empty weight vector");
        if (!valid(tol)) throw InputError("MixedStrategy: weights not on the probability simplex");
    }

    static MixedStrategy pure(int num_actions, int action) {
        std::vector<double> w(num_actions, 0.0);
        w.at(action) = 1.0;
        return MixedStrategy(std::move(w));
    }
};

struct StrategyProfile {
    std::vector<MixedStrategy> strategies;

    StrategyProfile() = default;
    explicit StrategyProfile(std::vector<MixedStrategy> s) : strategies(std::move(s)) {}

    void validate_shape(const GameShape& shape) const {
        if (static_cast<int>(strategies.size()) != shape.num_players)
            throw DimensionError("StrategyProfile: wrong number of strategies");
        for (int i = 0; i < shape.num_players; ++i)
            if (static_cast<int>(strategies[i].weights.size()) != shape.actions[i])
                throw DimensionError("StrategyProfile: strategy length mismatch for player " +
                                     std::to_string(i + 1));
    }

    void validate(const GameShape& shape, double tol = kSimplexTolInput) const {
        validate_shape(shape);
        for (const auto& s : strategies) s.validate(tol);
    }

    // Concatenated weights (x^1, x^2, ..., x^N).
    std::vector<double> concat() const {
        std::vector<double> out;
        for (const auto& s : strategies) out.insert(out.end(), s.weights.begin(), s.weights.end());
        return out;
    }
};

// Expected payoff of player i: sum over all profiles of
// P^i_(j_1..j_N) * prod_k x^k_{j_k}.
// Accepts raw weight vectors as well; only dimensions are checked, so the
// multilinear form can be evaluated off the simplex.
inline double expected_payoff(const PayoffTensor& p, const StrategyProfile& profile, int player) {
    profile.validate_shape(p.shape);
    if (player < 0 || player >= p.shape.num_players) throw InputError("expected_payoff: bad player index");
    const int n = p.shape.num_players;
    std::vector<int> idx(n, 0);
    double total = 0.0;
    std::int64_t flat = player;  // profile (0,..,0)
    do {
        double w = 1.0;
        for (int k = 0; k < n; ++k) w *= profile.strategies[k].weights[idx[k]];
        // flat index tracks VecOrdering: profile_rank * N + player
        total += p.flat[flat] * w;
        flat += n;
    } while (next_profile(p.shape, idx));
    return total;
}

// The matrix Y^i(x^{-i}) with vec(P)' * Y * x^i == expected_payoff(P, x, i)
// for every tensor P. Entry (d, j) is prod_{k != i} x^k_{j_k} when flat
// coordinate d belongs to player i with i-th action j, and zero otherwise.
// Only the opponents' strategies of `profile` are read.
inline std::vector<std::vector<double>> build_Y(const StrategyProfile& profile, int player,
                                                const VecOrdering& ord) {
    const GameShape& shape = ord.shape;
    if (player < 0 || player >= shape.num_players) throw InputError("build_Y: bad player index");
    if (static_cast<int>(profile.strategies.size()) != shape.num_players)
        throw DimensionError("build_Y: profile length mismatch");
    for (int k = 0; k < shape.num_players; ++k) {
        if (k == player) continue;
        if (static_cast<int>(profile.strategies[k].weights.size()) != shape.actions[k])
            throw DimensionError("build_Y: strategy length mismatch");
    }
    const std::int64_t d = shape.flat_dim();
    std::vector<std::vector<double>> y(d, std::vector<double>(shape.actions[player], 0.0));
    std::vector<int> idx(shape.num_players, 0);
    std::int64_t flat = player;
    do {
        double w = 1.0;
        for (int k = 0; k < shape.num_players; ++k)
            if (k != player) w *= profile.strategies[k].weights[idx[k]];
        y[flat][idx[player]] = w;
        flat += shape.num_players;
    } while (next_profile(shape, idx));
    return y;
}

struct NashCheck {
    bool is_equilibrium = false;
    std::vector<double> regrets;  // per player: best pure deviation gain
};

// Pure-action deviations suffice: the expected payoff is linear in x^i, so a
// profitable mixed deviation implies a profitable pure one.
inline NashCheck is_nash(const PayoffTensor& p, const StrategyProfile& profile, double tol) {
    profile.validate(p.shape, kSimplexTolSolver);
    NashCheck out;
    out.regrets.resize(p.shape.num_players, 0.0);
    out.is_equilibrium = true;
    for (int i = 0; i < p.shape.num_players; ++i) {
        const double base = expected_payoff(p, profile, i);
        double best = -std::numeric_limits<double>::infinity();
        for (int u = 0; u < p.shape.actions[i]; ++u) {
            StrategyProfile dev = profile;
            dev.strategies[i] = MixedStrategy::pure(p.shape.actions[i], u);
            best = std::max(best, expected_payoff(p, dev, i));
        }
        out.regrets[i] = best - base;
        if (out.regrets[i] > tol) out.is_equilibrium = false;
    }
    return out;
}

// A Bayesian game without private information collapses to the complete
// information game with the entry-wise expected payoff tensor.
inline PayoffTensor bayesian_to_nash(const std::vector<std::pair<double, PayoffTensor>>& distribution) {
    if (distribution.empty()) throw InputError("bayesian_to_nash: empty distribution");
    const GameShape& shape = distribution.front().second.shape;
    double wsum = 0.0;
    for (const auto& [w, t] : distribution) {
        if (w < 0) throw InputError("bayesian_to_nash: negative weight");
        if (!(t.shape == shape)) throw DimensionError("bayesian_to_nash: mixed tensor shapes");
        wsum += w;
    }
    if (std::abs(wsum - 1.0) > 1e-9) throw InputError("bayesian_to_nash: weights must sum to 1");
    PayoffTensor out(shape);
    for (const auto& [w, t] : distribution)
        for (std::size_t d = 0; d < out.flat.size(); ++d) out.flat[d] += w * t.flat[d];
    return out;
}

}  // namespace drgt
