#pragma once

// Regime dispatch: turn a game spec into a multilinear system (applying the
// complete-information reductions where they hold), run the multistart
// penalty solver, verify and annotate survivors, and render the result as a
// table. Also hosts the built-in fixture specs.

#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "drgt/fixtures.hpp"
#include "drgt/gamespec.hpp"
#include "drgt/robust.hpp"
#include "drgt/solver.hpp"

namespace drgt {

struct EquilibriumTable {
    GameShape shape;
    std::vector<EquilibriumReport> rows;  // sorted lexicographically by strategy vector
    int starts_attempted = 0;
    int starts_converged = 0;
    int dropped_invalid = 0;
    int dropped_unverified = 0;
    std::string path;  // which dispatch branch ran, for diagnostics
};

enum class OutputFormat { plain, csv };

inline OutputFormat format_from_string(const std::string& s) {
    if (s == "plain") return OutputFormat::plain;
    if (s == "csv") return OutputFormat::csv;
    throw InputError("unknown format '" + s + "' (expected plain or csv)");
}

namespace detail {

// Nash-style payoff annotation: mean and worst case from explicit tensors.
inline void annotate_with_tensors(EquilibriumReport& rep, const PayoffTensor& mean_tensor,
                                  const std::vector<PayoffTensor>& worst_candidates) {
    const int n = mean_tensor.shape.num_players;
    rep.per_player.clear();
    for (int i = 0; i < n; ++i) {
        const double mean = expected_payoff(mean_tensor, rep.profile, i);
        double worst = std::numeric_limits<double>::infinity();
        for (const auto& t : worst_candidates) worst = std::min(worst, expected_payoff(t, rep.profile, i));
        rep.per_player.emplace_back(mean, worst);
    }
}

inline double regret_tolerance(const PayoffTensor& t) {
    double scale = 0.0;
    for (double v : t.flat) scale = std::max(scale, std::abs(v));
    return 1e-3 * (1.0 + scale);
}

inline double payoff_scale(const std::vector<PayoffTensor>& tensors) {
    double scale = 0.0;
    for (const auto& t : tensors)
        for (double v : t.flat) scale = std::max(scale, std::abs(v));
    return scale > 0.0 ? scale : 1.0;
}

// Equilibria are invariant under a positive rescaling of all payoffs, and
// unit-scale payoffs keep the penalty landscape well conditioned for the
// line-search methods, so systems are built from normalized tensors.
inline ExtremePointSet normalized_family(std::vector<PayoffTensor> tensors) {
    const double scale = payoff_scale(tensors);
    for (auto& t : tensors)
        for (double& v : t.flat) v /= scale;
    return ExtremePointSet{std::move(tensors)};
}

// Solve a complete-information game via the singleton condition-2 system and
// verify every survivor by its pure-deviation regret.
inline EquilibriumTable run_nash_tensor(const PayoffTensor& tensor, const PayoffTensor& mean_tensor,
                                        const std::vector<PayoffTensor>& worst_candidates,
                                        const SolverConfig& cfg, const std::string& path) {
    const auto sys = build_condition2(normalized_family({tensor}), tensor.shape);
    auto out = multistart_enumerate(sys, tensor.shape, cfg);

    EquilibriumTable table;
    table.shape = tensor.shape;
    table.starts_attempted = out.starts_attempted;
    table.starts_converged = out.starts_converged;
    table.dropped_invalid = out.dropped_invalid;
    table.path = path;
    const double tol = regret_tolerance(tensor);
    for (auto& rep : out.equilibria) {
        if (!is_nash(tensor, rep.profile, tol).is_equilibrium) {
            ++table.dropped_unverified;
            continue;
        }
        annotate_with_tensors(rep, mean_tensor, worst_candidates);
        table.rows.push_back(std::move(rep));
    }
    return table;
}

inline void sort_rows(EquilibriumTable& table) {
    std::sort(table.rows.begin(), table.rows.end(), [](const EquilibriumReport& a, const EquilibriumReport& b) {
        return a.profile.concat() < b.profile.concat();
    });
}

}  // namespace detail

inline EquilibriumTable run(const GameSpecFile& spec, const SolverOverrides& overrides = {}) {
    SolverConfig cfg = overrides.apply(spec.solver.apply(SolverConfig{}));

    EquilibriumTable table;
    switch (spec.regime) {
        case Regime::nash:
            table = detail::run_nash_tensor(*spec.payoff, *spec.payoff, {*spec.payoff}, cfg, "nash");
            break;
        case Regime::bayesian: {
            const PayoffTensor expected = bayesian_to_nash(spec.mixture);
            table = detail::run_nash_tensor(expected, expected, {expected}, cfg, "bayesian:expected-tensor");
            break;
        }
        case Regime::robust: {
            const ParametricGame& game = *spec.parametric;
            const auto family = box_extreme_points(game);
            // centroid of the corner tensors doubles as the nominal game
            PayoffTensor nominal(game.shape);
            for (const auto& t : family.points)
                for (std::size_t d = 0; d < nominal.flat.size(); ++d)
                    nominal.flat[d] += t.flat[d] / static_cast<double>(family.points.size());

            if (const auto reduced = special_class_reduce(game)) {
                table = detail::run_nash_tensor(*reduced, nominal, family.points, cfg,
                                                "robust:sign-reduction");
            } else {
                const auto sys = build_condition2(detail::normalized_family(family.points), game.shape);
                auto out = multistart_enumerate(sys, game.shape, cfg);
                table.shape = game.shape;
                table.starts_attempted = out.starts_attempted;
                table.starts_converged = out.starts_converged;
                table.dropped_invalid = out.dropped_invalid;
                table.path = "robust:condition2";
                for (auto& rep : out.equilibria) {
                    detail::annotate_with_tensors(rep, nominal, family.points);
                    table.rows.push_back(std::move(rep));
                }
            }
            break;
        }
        case Regime::dro: {
            const AmbiguitySet& amb = *spec.ambiguity;
            const RiskProfile risk = spec.risk ? *spec.risk : RiskProfile::neutral(spec.shape.num_players);
            const PayoffTensor mean_tensor = unflatten(
                std::vector<double>(amb.mean.data(), amb.mean.data() + amb.mean.size()),
                VecOrdering(spec.shape));

            // reduction precedence: singleton support, then zero dispersion,
            // then risk neutrality; all collapse to the mean tensor
            std::optional<PayoffTensor> reduced = reduce_singleton(amb, spec.shape);
            std::string path = "dro:singleton-reduction";
            if (!reduced) {
                reduced = reduce_s_zero(amb, spec.shape);
                path = "dro:zero-dispersion-reduction";
            }
            if (!reduced) {
                reduced = reduce_risk_neutral(amb, risk, spec.shape);
                path = "dro:risk-neutral-reduction";
            }
            if (reduced) {
                table = detail::run_nash_tensor(*reduced, mean_tensor, {mean_tensor}, cfg, path);
                // in every reduced case the worst-case CVaR of the loss is
                // minus the mean payoff
                for (auto& rep : table.rows)
                    for (auto& [mean, worst] : rep.per_player) worst = -mean;
            } else {
                const auto sys = build_dro_system(spec.shape, amb, risk);
                auto out = multistart_enumerate(sys, spec.shape, cfg,
                                                dro_start_initializer(spec.shape, amb, risk));
                table.shape = spec.shape;
                table.starts_attempted = out.starts_attempted;
                table.starts_converged = out.starts_converged;
                table.dropped_invalid = out.dropped_invalid;
                table.path = "dro:full-system";
                for (auto& rep : out.equilibria) {
                    rep.per_player.clear();
                    for (int i = 0; i < spec.shape.num_players; ++i) {
                        const double mean = expected_payoff(mean_tensor, rep.profile, i);
                        const double rho = rep.solution(sys.block("rho", i).offset);
                        rep.per_player.emplace_back(mean, rho);
                    }
                    table.rows.push_back(std::move(rep));
                }
            }
            break;
        }
    }
    detail::sort_rows(table);
    return table;
}

namespace detail {

inline std::string fmt(double v, const char* spec_str) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), spec_str, v);
    return buf;
}

// Fixed 6-decimal probability with tiny negatives clamped for display.
inline std::string fmt_prob(double p) { return fmt(std::abs(p) < 5e-7 ? 0.0 : p, "%.6f"); }

}  // namespace detail

inline std::string emit_table(const EquilibriumTable& table, OutputFormat format) {
    std::string out;
    if (format == OutputFormat::csv) {
        out += "eq_index,player,action,probability,mean_payoff,worst_case_value,residual\n";
        if (table.rows.empty()) {
            out += "# no equilibria found within budget\n";
            return out;
        }
        for (std::size_t e = 0; e < table.rows.size(); ++e) {
            const auto& rep = table.rows[e];
            for (int i = 0; i < table.shape.num_players; ++i)
                for (int j = 0; j < table.shape.actions[i]; ++j) {
                    out += std::to_string(e + 1) + "," + std::to_string(i + 1) + "," + std::to_string(j + 1);
                    out += "," + detail::fmt_prob(rep.profile.strategies[i].weights[j]);
                    out += "," + detail::fmt(rep.per_player[i].first, "%.6f");
                    out += "," + detail::fmt(rep.per_player[i].second, "%.6f");
                    out += "," + detail::fmt(rep.penalty_residual, "%.3e");
                    out += "\n";
                }
        }
        return out;
    }

    out += "# " + table.path + ": " + std::to_string(table.rows.size()) + " equilibria (" +
           std::to_string(table.starts_converged) + "/" + std::to_string(table.starts_attempted) +
           " starts converged)\n";
    if (table.rows.empty()) {
        out += "# no equilibria found within budget\n";
        return out;
    }
    for (std::size_t e = 0; e < table.rows.size(); ++e) {
        const auto& rep = table.rows[e];
        out += "equilibrium " + std::to_string(e + 1) + "  residual " +
               detail::fmt(rep.penalty_residual, "%.3e") + "  starts " +
               std::to_string(rep.starts_converged) + "\n";
        for (int i = 0; i < table.shape.num_players; ++i) {
            out += "  player " + std::to_string(i + 1) + ": (";
            for (int j = 0; j < table.shape.actions[i]; ++j) {
                if (j) out += ", ";
                out += detail::fmt_prob(rep.profile.strategies[i].weights[j]);
            }
            out += ")  mean " + detail::fmt(rep.per_player[i].first, "%.6f") + "  worst-case " +
                   detail::fmt(rep.per_player[i].second, "%.6f") + "\n";
        }
    }
    return out;
}

// ---- built-in fixtures ----

struct Fixture {
    std::string name;
    std::string description;
    GameSpecFile spec;
};

namespace detail {

inline SolverOverrides free_rider_protocol() {
    SolverOverrides s;
    s.penalty_tol = 1e-10;
    s.max_iters = 2000;
    return s;
}

inline SolverOverrides inspection_protocol() {
    SolverOverrides s;
    s.penalty_tol = 1e-8;
    s.max_iters = 2000;
    return s;
}

inline GameSpecFile nash_spec(PayoffTensor t) {
    GameSpecFile spec;
    spec.regime = Regime::nash;
    spec.shape = t.shape;
    spec.payoff = std::move(t);
    return spec;
}

inline GameSpecFile dro_spec(Polyhedron support, Eigen::VectorXd mean, double s,
                             std::vector<double> eps, SolverOverrides solver) {
    GameSpecFile spec;
    spec.regime = Regime::dro;
    spec.shape = fixtures::two_by_two();
    spec.ambiguity = AmbiguitySet(std::move(support), std::move(mean), s);
    spec.risk = RiskProfile(std::move(eps));
    spec.solver = solver;
    return spec;
}

}  // namespace detail

inline const std::vector<Fixture>& builtin_fixtures() {
    static const std::vector<Fixture> fixtures_list = [] {
        using namespace fixtures;
        std::vector<Fixture> fs;

        fs.push_back({"nash_free_rider", "free rider at cost 7/16, three equilibria",
                      detail::nash_spec(free_rider_tensor(7.0 / 16))});
        fs.push_back({"nash_matching_pennies", "matching pennies, unique mixed equilibrium",
                      detail::nash_spec(matching_pennies())});
        fs.push_back({"nash_battle_of_sexes", "battle of the sexes, two pure and one mixed",
                      detail::nash_spec(battle_of_sexes())});

        {
            GameSpecFile spec;
            spec.regime = Regime::bayesian;
            spec.shape = two_by_two();
            spec.mixture = {{0.5, battle_of_sexes_type1()}, {0.5, battle_of_sexes_type2()}};
            fs.push_back({"bayesian_battle_of_sexes",
                          "battle of the sexes against an equal-odds meet/avoid opponent", spec});
        }

        {
            GameSpecFile spec;
            spec.regime = Regime::robust;
            spec.shape = two_by_two();
            spec.parametric = free_rider_parametric(0.25, 0.625);
            spec.solver = detail::free_rider_protocol();
            fs.push_back({"robust_free_rider", "free rider with cost in [1/4, 5/8]", spec});
        }
        {
            GameSpecFile spec;
            spec.regime = Regime::robust;
            spec.shape = two_by_two();
            spec.parametric = inspection_parametric({8, 12}, {16, 24}, {4, 6});
            spec.solver = detail::inspection_protocol();
            fs.push_back({"robust_inspection",
                          "inspection with g in [8,12], v in [16,24], h in [4,6], w = 15", spec});
        }

        fs.push_back({"dro_free_rider_m1", "free rider ambiguity around the nominal cost, s = 2",
                      detail::dro_spec(free_rider_support_box(), free_rider_m1(), 2.0, {1.0, 1.0},
                                       detail::free_rider_protocol())});
        fs.push_back({"dro_free_rider_m2", "free rider ambiguity around cost 1/2, s = 2",
                      detail::dro_spec(free_rider_support_box(), free_rider_m2(), 2.0, {1.0, 1.0},
                                       detail::free_rider_protocol())});
        fs.push_back({"dro_free_rider_averse",
                      "free rider ambiguity, both players strongly risk averse",
                      detail::dro_spec(free_rider_support_box(), free_rider_m1(), 2.0, {0.01, 0.01},
                                       detail::free_rider_protocol())});
        fs.push_back({"dro_free_rider_singleton", "free rider with the cost pinned at 1/2",
                      detail::dro_spec(free_rider_support_singleton(), free_rider_m2(), 3.0, {0.5, 0.5},
                                       detail::free_rider_protocol())});
        fs.push_back({"dro_inspection_m1", "inspection ambiguity around the nominal payoffs, s = 4",
                      detail::dro_spec(inspection_support_box(), inspection_m1(), 4.0, {1.0, 1.0},
                                       detail::inspection_protocol())});
        fs.push_back({"dro_inspection_m2", "inspection ambiguity around (g,v,h) = (9,17,5), s = 2",
                      detail::dro_spec(inspection_support_box(), inspection_m2(), 2.0, {1.0, 1.0},
                                       detail::inspection_protocol())});
        fs.push_back({"dro_inspection_singleton", "inspection with payoffs pinned at (g,v,h) = (9,17,5)",
                      detail::dro_spec(inspection_support_singleton(), inspection_m2(), 3.0, {0.5, 0.5},
                                       detail::inspection_protocol())});
        return fs;
    }();
    return fixtures_list;
}

inline const Fixture& fixture_by_name(const std::string& name) {
    // a couple of historical aliases
    std::string canonical = name;
    if (name == "free_rider_robust") canonical = "robust_free_rider";
    if (name == "inspection_robust") canonical = "robust_inspection";
    for (const auto& f : builtin_fixtures())
        if (f.name == canonical) return f;
    throw InputError("unknown fixture '" + name + "' (see --list-fixtures)");
}

// Every DRO fixture must have its mean inside its support; run at startup.
inline void fixtures_self_check() {
    for (const auto& f : builtin_fixtures()) {
        if (f.spec.regime != Regime::dro) continue;
        if (!contains(f.spec.ambiguity->support, f.spec.ambiguity->mean))
            throw InternalError("fixture self-check failed: mean outside support in " + f.name);
    }
}

}  // namespace drgt
