#pragma once

// Payoff families that are affine in a small vector of uncertain parameters:
//   entry(f) = base + sum_l f_l * coeff[l]
// with per-parameter supports (interval, finite set, or union of intervals).
// Provides corner enumeration, conversion to a polyhedron over flattened
// payoff space, and the sign-condition reduction to a complete-information
// game.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "drgt/game.hpp"
#include "drgt/polyhedron.hpp"

namespace drgt {

struct Interval {
    double lo = 0.0, hi = 0.0;
};

struct FiniteSet {
    std::vector<double> values;
};

struct UnionOfIntervals {
    std::vector<Interval> intervals;
};

using ParamSupport = std::variant<Interval, FiniteSet, UnionOfIntervals>;

// Attainable minimum / maximum of a support descriptor.
inline double support_min(const ParamSupport& s) {
    if (const auto* iv = std::get_if<Interval>(&s)) return iv->lo;
    if (const auto* fs = std::get_if<FiniteSet>(&s)) {
        if (fs->values.empty()) throw InputError("FiniteSet support: empty");
        return *std::min_element(fs->values.begin(), fs->values.end());
    }
    const auto& u = std::get<UnionOfIntervals>(s);
    if (u.intervals.empty()) throw InputError("UnionOfIntervals support: empty");
    double lo = std::numeric_limits<double>::infinity();
    for (const auto& iv : u.intervals) lo = std::min(lo, iv.lo);
    return lo;
}

inline double support_max(const ParamSupport& s) {
    if (const auto* iv = std::get_if<Interval>(&s)) return iv->hi;
    if (const auto* fs = std::get_if<FiniteSet>(&s)) {
        if (fs->values.empty()) throw InputError("FiniteSet support: empty");
        return *std::max_element(fs->values.begin(), fs->values.end());
    }
    const auto& u = std::get<UnionOfIntervals>(s);
    if (u.intervals.empty()) throw InputError("UnionOfIntervals support: empty");
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& iv : u.intervals) hi = std::max(hi, iv.hi);
    return hi;
}

inline void validate_support(const ParamSupport& s) {
    const double lo = support_min(s), hi = support_max(s);
    if (!std::isfinite(lo) || !std::isfinite(hi)) throw InputError("parameter support: unbounded");
    if (lo > hi) throw InputError("parameter support: min exceeds max");
}

struct ParametricGame {
    GameShape shape;
    PayoffTensor base;                 // constant part
    std::vector<PayoffTensor> coeffs;  // linear part per parameter
    std::vector<ParamSupport> supports;

    ParametricGame() = default;
    ParametricGame(GameShape s, PayoffTensor b, std::vector<PayoffTensor> c, std::vector<ParamSupport> sup)
        : shape(std::move(s)), base(std::move(b)), coeffs(std::move(c)), supports(std::move(sup)) {
        if (!(base.shape == shape)) throw DimensionError("ParametricGame: base shape mismatch");
        if (coeffs.size() != supports.size())
            throw DimensionError("ParametricGame: coeff / support count mismatch");
        for (const auto& t : coeffs)
            if (!(t.shape == shape)) throw DimensionError("ParametricGame: coeff shape mismatch");
        for (const auto& s2 : supports) validate_support(s2);
    }

    int num_params() const { return static_cast<int>(coeffs.size()); }

    PayoffTensor at(const std::vector<double>& f) const {
        if (static_cast<int>(f.size()) != num_params())
            throw DimensionError("ParametricGame::at: parameter count mismatch");
        PayoffTensor out = base;
        for (int l = 0; l < num_params(); ++l)
            for (std::size_t d = 0; d < out.flat.size(); ++d) out.flat[d] += f[l] * coeffs[l].flat[d];
        return out;
    }
};

struct ExtremePointSet {
    std::vector<PayoffTensor> points;
};

// Payoff tensors at all combinations of per-parameter {min, max}. Because
// the entries are affine in f, these corners contain every extreme point of
// the induced payoff set; only the attainable min and max of each support
// matter, so finite sets and interval unions reduce to their endpoints.
inline ExtremePointSet box_extreme_points(const ParametricGame& g, double dedup_tol = 1e-9) {
    const int v = g.num_params();
    if (v > 20) throw InputError("box_extreme_points: too many parameters (v <= 20)");
    for (const auto& s : g.supports) validate_support(s);

    ExtremePointSet out;
    std::vector<double> f(v, 0.0);
    const std::int64_t combos = std::int64_t{1} << v;
    for (std::int64_t mask = 0; mask < combos; ++mask) {
        for (int l = 0; l < v; ++l)
            f[l] = (mask >> l) & 1 ? support_max(g.supports[l]) : support_min(g.supports[l]);
        PayoffTensor t = g.at(f);
        bool dup = false;
        for (const auto& seen : out.points) {
            double dist2 = 0.0;
            for (std::size_t d = 0; d < t.flat.size(); ++d) {
                const double diff = t.flat[d] - seen.flat[d];
                dist2 += diff * diff;
            }
            if (std::sqrt(dist2) <= dedup_tol) {
                dup = true;
                break;
            }
        }
        if (!dup) out.points.push_back(std::move(t));
    }
    return out;
}

// Encode the family as {v : W v <= h} over flattened payoff space.
//
// Every coordinate gets interval rows for its attainable range. When the
// family has a single parameter, the uncertain coordinates are additionally
// tied to the first one (two inequalities per equality), which makes the
// polyhedron the exact image of the family. Multi-parameter families keep
// only the coordinate-wise interval hull, matching the fixture matrices
// shipped with the solver.
inline Polyhedron parametric_to_polyhedron(const ParametricGame& g) {
    const int v = g.num_params();
    for (const auto& s : g.supports)
        if (!std::holds_alternative<Interval>(s))
            throw InputError("parametric_to_polyhedron: interval supports only");

    const std::int64_t dim = g.shape.flat_dim();
    std::vector<Eigen::VectorXd> rows;
    std::vector<double> rhs;
    auto add_row = [&](std::int64_t col_a, double coef_a, std::int64_t col_b, double coef_b, double bound) {
        Eigen::VectorXd r = Eigen::VectorXd::Zero(dim);
        r(col_a) += coef_a;
        if (col_b >= 0) r(col_b) += coef_b;
        rows.push_back(std::move(r));
        rhs.push_back(bound);
    };

    // Attainable range per coordinate (affine in f, so extremes are at
    // support endpoints coordinate-wise).
    for (std::int64_t d = 0; d < dim; ++d) {
        double lo = g.base.flat[d], hi = g.base.flat[d];
        for (int l = 0; l < v; ++l) {
            const double k = g.coeffs[l].flat[d];
            const double a = k * support_min(g.supports[l]);
            const double b = k * support_max(g.supports[l]);
            lo += std::min(a, b);
            hi += std::max(a, b);
        }
        add_row(d, 1.0, -1, 0.0, hi);
        add_row(d, -1.0, -1, 0.0, -lo);
    }

    if (v == 1) {
        // Tie every uncertain coordinate to the first one:
        //   k_d (v_0 - b_0) = k_0 (v_d - b_d)
        std::int64_t first = -1;
        for (std::int64_t d = 0; d < dim; ++d) {
            const double k = g.coeffs[0].flat[d];
            if (k == 0.0) continue;
            if (first < 0) {
                first = d;
                continue;
            }
            const double k0 = g.coeffs[0].flat[first];
            const double c = k * g.base.flat[first] - k0 * g.base.flat[d];
            add_row(first, k, d, -k0, c);
            add_row(first, -k, d, k0, -c);
        }
    }

    Eigen::MatrixXd W(static_cast<Eigen::Index>(rows.size()), dim);
    Eigen::VectorXd h(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        W.row(static_cast<Eigen::Index>(r)) = rows[r];
        h(static_cast<Eigen::Index>(r)) = rhs[r];
    }
    return Polyhedron(std::move(W), std::move(h));
}

// Sign-condition reduction: if for every (player, parameter) all linear
// coefficients in that player's entries share one sign (zeros neutral), the
// robust game collapses to the complete-information game where parameter l
// sits at max when the shared sign is negative and at min otherwise,
// per player. Returns nothing when the sign condition fails.
inline std::optional<PayoffTensor> special_class_reduce(const ParametricGame& g) {
    const int n = g.shape.num_players;
    const int v = g.num_params();
    const VecOrdering ord(g.shape);

    PayoffTensor out = g.base;
    for (int i = 0; i < n; ++i) {
        std::vector<double> h_val(v, 0.0);
        for (int l = 0; l < v; ++l) {
            int sign = 0;  // 0 = unseen, +1 / -1 once seen
            for (std::int64_t d = i; d < g.shape.flat_dim(); d += n) {
                const double k = g.coeffs[l].flat[d];
                if (k == 0.0) continue;
                const int s = k > 0 ? 1 : -1;
                if (sign == 0) sign = s;
                else if (sign != s) return std::nullopt;
            }
            h_val[l] = sign < 0 ? support_max(g.supports[l]) : support_min(g.supports[l]);
        }
        for (std::int64_t d = i; d < g.shape.flat_dim(); d += n)
            for (int l = 0; l < v; ++l) out.flat[d] += h_val[l] * g.coeffs[l].flat[d];
    }
    return out;
}

}  // namespace drgt
