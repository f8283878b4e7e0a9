#pragma once

// JSON game-spec files. A spec carries a regime tag, the game shape, exactly
// one payload matching the regime, an optional risk profile (dro) and
// optional solver settings:
//
//   {
//     "regime": "nash" | "bayesian" | "robust" | "dro",
//     "shape": {"players": 2, "actions": [2, 2]},
//     "payoff": [ ... flat tensor ... ],                      (nash)
//     "mixture": [{"weight": w, "payoff": [...]}, ...],       (bayesian)
//     "parametric": {"base": [...], "coeffs": [[...], ...],
//                    "supports": [ ... ]},                    (robust)
//     "ambiguity": {"W": [[...], ...], "h": [...],
//                   "m": [...], "s": 0.0},                    (dro)
//     "risk": [eps_1, ..., eps_N],
//     "solver": {"method": "bfgs", "starts": 200, "seed": 42, ...}
//   }
//
// Tensors are flat arrays in the engine's vectorization order; matrices are
// row-major arrays of rows, so polyhedra can be copied digit for digit from
// printed sources.

#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "drgt/dro.hpp"
#include "drgt/game.hpp"
#include "drgt/parametric.hpp"
#include "drgt/solver.hpp"

namespace drgt {

enum class Regime { nash, bayesian, robust, dro };

inline const char* regime_name(Regime r) {
    switch (r) {
        case Regime::nash: return "nash";
        case Regime::bayesian: return "bayesian";
        case Regime::robust: return "robust";
        case Regime::dro: return "dro";
    }
    return "?";
}

inline Regime regime_from_string(const std::string& s) {
    if (s == "nash") return Regime::nash;
    if (s == "bayesian") return Regime::bayesian;
    if (s == "robust") return Regime::robust;
    if (s == "dro") return Regime::dro;
    throw InputError("spec: unknown regime '" + s + "'");
}

// Partial solver settings; unset fields keep the engine defaults.
struct SolverOverrides {
    std::optional<Method> method;
    std::optional<int> num_starts;
    std::optional<std::uint64_t> seed;
    std::optional<double> penalty_tol;
    std::optional<double> grad_tol;
    std::optional<int> max_iters;
    std::optional<double> dedup_tol;
    std::optional<double> armijo_s;
    std::optional<double> armijo_beta;
    std::optional<double> armijo_sigma;

    SolverConfig apply(SolverConfig cfg) const {
        if (method) cfg.method = *method;
        if (num_starts) cfg.num_starts = *num_starts;
        if (seed) cfg.seed = *seed;
        if (penalty_tol) cfg.penalty_tol = *penalty_tol;
        if (grad_tol) cfg.grad_tol = *grad_tol;
        if (max_iters) cfg.max_iters = *max_iters;
        if (dedup_tol) cfg.dedup_tol = *dedup_tol;
        if (armijo_s) cfg.armijo_s = *armijo_s;
        if (armijo_beta) cfg.armijo_beta = *armijo_beta;
        if (armijo_sigma) cfg.armijo_sigma = *armijo_sigma;
        cfg.validate();
        return cfg;
    }
};

struct GameSpecFile {
    Regime regime = Regime::nash;
    GameShape shape;
    std::optional<PayoffTensor> payoff;                       // nash
    std::vector<std::pair<double, PayoffTensor>> mixture;     // bayesian
    std::optional<ParametricGame> parametric;                 // robust
    std::optional<AmbiguitySet> ambiguity;                    // dro
    std::optional<RiskProfile> risk;                          // dro, defaults to neutral
    SolverOverrides solver;
};

namespace specio {

using json = nlohmann::json;

inline double get_number(const json& j, const std::string& where) {
    if (!j.is_number()) throw InputError("spec: " + where + " must be a number");
    return j.get<double>();
}

inline std::vector<double> get_array(const json& j, const std::string& where,
                                     std::int64_t expected = -1) {
    if (!j.is_array()) throw InputError("spec: " + where + " must be an array");
    std::vector<double> out;
    out.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i)
        out.push_back(get_number(j[i], where + "[" + std::to_string(i) + "]"));
    if (expected >= 0 && static_cast<std::int64_t>(out.size()) != expected)
        throw InputError("spec: " + where + " must have length " + std::to_string(expected) + ", got " +
                         std::to_string(out.size()));
    return out;
}

inline const json& require(const json& j, const std::string& key, const std::string& where) {
    auto it = j.find(key);
    if (it == j.end()) throw InputError("spec: missing '" + key + "' in " + where);
    return *it;
}

inline GameShape parse_shape(const json& j) {
    const json& js = require(j, "shape", "spec root");
    if (!js.is_object()) throw InputError("spec: shape must be an object");
    const int players = require(js, "players", "shape").get<int>();
    const json& ja = require(js, "actions", "shape");
    if (!ja.is_array()) throw InputError("spec: shape.actions must be an array");
    std::vector<int> actions;
    for (const auto& a : ja) actions.push_back(a.get<int>());
    return GameShape(players, std::move(actions));
}

inline PayoffTensor parse_tensor(const json& j, const GameShape& shape, const std::string& where) {
    return PayoffTensor(shape, get_array(j, where, shape.flat_dim()));
}

inline ParamSupport parse_support(const json& j, const std::string& where) {
    if (!j.is_object()) throw InputError("spec: " + where + " must be an object");
    const std::string type = require(j, "type", where).get<std::string>();
    if (type == "interval")
        return Interval{get_number(require(j, "lo", where), where + ".lo"),
                        get_number(require(j, "hi", where), where + ".hi")};
    if (type == "finite") return FiniteSet{get_array(require(j, "values", where), where + ".values")};
    if (type == "union") {
        const json& ivs = require(j, "intervals", where);
        if (!ivs.is_array()) throw InputError("spec: " + where + ".intervals must be an array");
        UnionOfIntervals u;
        for (const auto& iv : ivs) {
            const auto pair = get_array(iv, where + ".intervals[]", 2);
            u.intervals.push_back(Interval{pair[0], pair[1]});
        }
        return u;
    }
    throw InputError("spec: " + where + ".type must be interval, finite or union");
}

inline Polyhedron parse_polyhedron(const json& j, std::int64_t dim, const std::string& where) {
    const json& jw = require(j, "W", where);
    if (!jw.is_array() || jw.empty()) throw InputError("spec: " + where + ".W must be a nonempty array of rows");
    const auto hv = get_array(require(j, "h", where), where + ".h", static_cast<std::int64_t>(jw.size()));
    Eigen::MatrixXd w(static_cast<Eigen::Index>(jw.size()), dim);
    for (std::size_t r = 0; r < jw.size(); ++r) {
        const auto row = get_array(jw[r], where + ".W[" + std::to_string(r) + "]", dim);
        for (std::int64_t c = 0; c < dim; ++c) w(static_cast<Eigen::Index>(r), c) = row[c];
    }
    Eigen::VectorXd h(static_cast<Eigen::Index>(hv.size()));
    for (std::size_t r = 0; r < hv.size(); ++r) h(static_cast<Eigen::Index>(r)) = hv[r];
    return Polyhedron(std::move(w), std::move(h));
}

inline SolverOverrides parse_solver(const json& j) {
    SolverOverrides s;
    if (!j.is_object()) throw InputError("spec: solver must be an object");
    for (const auto& [key, val] : j.items()) {
        if (key == "method") s.method = method_from_string(val.get<std::string>());
        else if (key == "starts") s.num_starts = val.get<int>();
        else if (key == "seed") s.seed = val.get<std::uint64_t>();
        else if (key == "penalty_tol") s.penalty_tol = get_number(val, "solver.penalty_tol");
        else if (key == "grad_tol") s.grad_tol = get_number(val, "solver.grad_tol");
        else if (key == "max_iters") s.max_iters = val.get<int>();
        else if (key == "dedup_tol") s.dedup_tol = get_number(val, "solver.dedup_tol");
        else if (key == "armijo") {
            if (val.contains("s")) s.armijo_s = get_number(val["s"], "solver.armijo.s");
            if (val.contains("beta")) s.armijo_beta = get_number(val["beta"], "solver.armijo.beta");
            if (val.contains("sigma")) s.armijo_sigma = get_number(val["sigma"], "solver.armijo.sigma");
        } else throw InputError("spec: unknown solver key '" + key + "'");
    }
    return s;
}

}  // namespace specio

inline GameSpecFile parse_spec_json(const nlohmann::json& j) {
    using namespace specio;
    if (!j.is_object()) throw InputError("spec: root must be an object");
    GameSpecFile spec;
    spec.regime = regime_from_string(require(j, "regime", "spec root").get<std::string>());
    spec.shape = parse_shape(j);
    const std::int64_t dim = spec.shape.flat_dim();

    const bool has_payoff = j.contains("payoff");
    const bool has_mixture = j.contains("mixture");
    const bool has_parametric = j.contains("parametric");
    const bool has_ambiguity = j.contains("ambiguity");
    const int payloads = has_payoff + has_mixture + has_parametric + has_ambiguity;
    if (payloads != 1) throw InputError("spec: exactly one of payoff/mixture/parametric/ambiguity required");

    switch (spec.regime) {
        case Regime::nash:
            if (!has_payoff) throw InputError("spec: regime nash needs a 'payoff' payload");
            spec.payoff = parse_tensor(j["payoff"], spec.shape, "payoff");
            break;
        case Regime::bayesian: {
            if (!has_mixture) throw InputError("spec: regime bayesian needs a 'mixture' payload");
            const json& jm = j["mixture"];
            if (!jm.is_array() || jm.empty()) throw InputError("spec: mixture must be a nonempty array");
            for (std::size_t i = 0; i < jm.size(); ++i) {
                const std::string where = "mixture[" + std::to_string(i) + "]";
                const double w = get_number(require(jm[i], "weight", where), where + ".weight");
                spec.mixture.emplace_back(w, parse_tensor(require(jm[i], "payoff", where), spec.shape,
                                                          where + ".payoff"));
            }
            break;
        }
        case Regime::robust: {
            if (!has_parametric) throw InputError("spec: regime robust needs a 'parametric' payload");
            const json& jp = j["parametric"];
            PayoffTensor base = parse_tensor(require(jp, "base", "parametric"), spec.shape,
                                             "parametric.base");
            const json& jc = require(jp, "coeffs", "parametric");
            if (!jc.is_array()) throw InputError("spec: parametric.coeffs must be an array");
            std::vector<PayoffTensor> coeffs;
            for (std::size_t l = 0; l < jc.size(); ++l)
                coeffs.push_back(parse_tensor(jc[l], spec.shape,
                                              "parametric.coeffs[" + std::to_string(l) + "]"));
            const json& jsup = require(jp, "supports", "parametric");
            if (!jsup.is_array() || jsup.size() != coeffs.size())
                throw InputError("spec: parametric.supports must match the coefficient count");
            std::vector<ParamSupport> supports;
            for (std::size_t l = 0; l < jsup.size(); ++l)
                supports.push_back(specio::parse_support(jsup[l],
                                                         "parametric.supports[" + std::to_string(l) + "]"));
            spec.parametric = ParametricGame(spec.shape, std::move(base), std::move(coeffs),
                                             std::move(supports));
            break;
        }
        case Regime::dro: {
            if (!has_ambiguity) throw InputError("spec: regime dro needs an 'ambiguity' payload");
            const json& ja = j["ambiguity"];
            Polyhedron support = specio::parse_polyhedron(ja, dim, "ambiguity");
            const auto mv = get_array(require(ja, "m", "ambiguity"), "ambiguity.m", dim);
            const double s = get_number(require(ja, "s", "ambiguity"), "ambiguity.s");
            Eigen::VectorXd mean(dim);
            for (std::int64_t d = 0; d < dim; ++d) mean(d) = mv[d];
            spec.ambiguity = AmbiguitySet(std::move(support), std::move(mean), s);
            break;
        }
    }

    if (j.contains("risk")) {
        if (spec.regime != Regime::dro) throw InputError("spec: 'risk' only applies to the dro regime");
        spec.risk = RiskProfile(get_array(j["risk"], "risk", spec.shape.num_players));
    }
    if (j.contains("solver")) spec.solver = specio::parse_solver(j["solver"]);

    for (const auto& [key, val] : j.items()) {
        (void)val;
        if (key != "regime" && key != "shape" && key != "payoff" && key != "mixture" &&
            key != "parametric" && key != "ambiguity" && key != "risk" && key != "solver")
            throw InputError("spec: unknown key '" + key + "'");
    }
    return spec;
}

inline GameSpecFile parse_spec_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw InputError(std::string("spec: malformed JSON: ") + e.what());
    }
    return parse_spec_json(j);
}

inline nlohmann::json emit_spec_json(const GameSpecFile& spec) {
    nlohmann::json j;
    j["regime"] = regime_name(spec.regime);
    j["shape"] = {{"players", spec.shape.num_players}, {"actions", spec.shape.actions}};
    switch (spec.regime) {
        case Regime::nash:
            j["payoff"] = spec.payoff->flat;
            break;
        case Regime::bayesian: {
            nlohmann::json arr = nlohmann::json::array();
            for (const auto& [w, t] : spec.mixture) arr.push_back({{"weight", w}, {"payoff", t.flat}});
            j["mixture"] = std::move(arr);
            break;
        }
        case Regime::robust: {
            nlohmann::json jp;
            jp["base"] = spec.parametric->base.flat;
            nlohmann::json coeffs = nlohmann::json::array();
            for (const auto& c : spec.parametric->coeffs) coeffs.push_back(c.flat);
            jp["coeffs"] = std::move(coeffs);
            nlohmann::json sup = nlohmann::json::array();
            for (const auto& s : spec.parametric->supports) {
                if (const auto* iv = std::get_if<Interval>(&s))
                    sup.push_back({{"type", "interval"}, {"lo", iv->lo}, {"hi", iv->hi}});
                else if (const auto* fs = std::get_if<FiniteSet>(&s))
                    sup.push_back({{"type", "finite"}, {"values", fs->values}});
                else {
                    const auto& u = std::get<UnionOfIntervals>(s);
                    nlohmann::json ivs = nlohmann::json::array();
                    for (const auto& seg : u.intervals) ivs.push_back({seg.lo, seg.hi});
                    sup.push_back({{"type", "union"}, {"intervals", std::move(ivs)}});
                }
            }
            jp["supports"] = std::move(sup);
            j["parametric"] = std::move(jp);
            break;
        }
        case Regime::dro: {
            nlohmann::json ja;
            nlohmann::json rows = nlohmann::json::array();
            for (Eigen::Index r = 0; r < spec.ambiguity->support.rows(); ++r) {
                nlohmann::json row = nlohmann::json::array();
                for (Eigen::Index c = 0; c < spec.ambiguity->support.dim(); ++c)
                    row.push_back(spec.ambiguity->support.W(r, c));
                rows.push_back(std::move(row));
            }
            ja["W"] = std::move(rows);
            ja["h"] = std::vector<double>(spec.ambiguity->support.h.data(),
                                          spec.ambiguity->support.h.data() + spec.ambiguity->support.rows());
            ja["m"] = std::vector<double>(spec.ambiguity->mean.data(),
                                          spec.ambiguity->mean.data() + spec.ambiguity->mean.size());
            ja["s"] = spec.ambiguity->dispersion;
            j["ambiguity"] = std::move(ja);
            break;
        }
    }
    if (spec.risk) j["risk"] = spec.risk->epsilons;

    nlohmann::json js = nlohmann::json::object();
    const auto& s = spec.solver;
    if (s.method) js["method"] = method_name(*s.method);
    if (s.num_starts) js["starts"] = *s.num_starts;
    if (s.seed) js["seed"] = *s.seed;
    if (s.penalty_tol) js["penalty_tol"] = *s.penalty_tol;
    if (s.grad_tol) js["grad_tol"] = *s.grad_tol;
    if (s.max_iters) js["max_iters"] = *s.max_iters;
    if (s.dedup_tol) js["dedup_tol"] = *s.dedup_tol;
    nlohmann::json ja = nlohmann::json::object();
    if (s.armijo_s) ja["s"] = *s.armijo_s;
    if (s.armijo_beta) ja["beta"] = *s.armijo_beta;
    if (s.armijo_sigma) ja["sigma"] = *s.armijo_sigma;
    if (!ja.empty()) js["armijo"] = std::move(ja);
    if (!js.empty()) j["solver"] = std::move(js);
    return j;
}

inline std::string emit_spec(const GameSpecFile& spec) { return emit_spec_json(spec).dump(2) + "\n"; }

}  // namespace drgt
