#pragma once

// Canonical form for systems of multilinear equalities and inequalities:
// each constraint is a constant plus a sum of coefficient * (product of
// variables). Inequalities use the convention expr <= 0. The penalty
//   h(y) = 1/2 sum_E g_n(y)^2 + 1/2 sum_I max(g_n(y), 0)^2
// vanishes exactly on the feasible set; its analytic gradient is assembled
// term-wise.

#include <Eigen/Dense>
#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "drgt/errors.hpp"

namespace drgt {

struct Term {
    double coef = 0.0;
    std::vector<int> vars;  // sorted variable indices, repeats allowed
};

struct MultilinearExpr {
    std::vector<Term> terms;
    double constant = 0.0;

    MultilinearExpr& add(double coef, std::vector<int> vars) {
        std::sort(vars.begin(), vars.end());
        terms.push_back(Term{coef, std::move(vars)});
        return *this;
    }

    // Merge terms with identical variable multisets, drop exact zeros.
    void canonicalize() {
        std::map<std::vector<int>, double> merged;
        for (auto& t : terms) merged[t.vars] += t.coef;
        terms.clear();
        for (auto& [vars, coef] : merged)
            if (coef != 0.0) terms.push_back(Term{coef, vars});
    }

    int degree() const {
        int d = 0;
        for (const auto& t : terms) d = std::max(d, static_cast<int>(t.vars.size()));
        return d;
    }

    double eval(const Eigen::VectorXd& y) const {
        double v = constant;
        for (const auto& t : terms) {
            double p = t.coef;
            for (int idx : t.vars) p *= y(idx);
            v += p;
        }
        return v;
    }
};

// How the multistart initializer seeds a variable block.
enum class InitKind {
    simplex,       // sample uniformly on the probability simplex
    zero,          // start at zero
    robust_value,  // max upper bound implied by the block's inequalities at the sampled x
    mirror_value,  // copy another block's value (phi_i = z_i)
};

struct VarBlock {
    std::string name;
    int offset = 0;
    int size = 0;
    InitKind init = InitKind::zero;
    int player = -1;        // owning player (0-based), -1 for shared blocks
    bool is_strategy = false;
    int mirror_of = -1;     // layout index for mirror_value blocks
};

struct MultilinearSystem {
    int num_vars = 0;
    std::vector<VarBlock> layout;
    std::vector<MultilinearExpr> equalities;
    std::vector<MultilinearExpr> inequalities;  // expr <= 0

    int add_block(std::string name, int size, InitKind init, int player = -1, bool is_strategy = false,
                  int mirror_of = -1) {
        VarBlock b;
        b.name = std::move(name);
        b.offset = num_vars;
        b.size = size;
        b.init = init;
        b.player = player;
        b.is_strategy = is_strategy;
        b.mirror_of = mirror_of;
        layout.push_back(b);
        num_vars += size;
        return static_cast<int>(layout.size()) - 1;
    }

    const VarBlock& block(const std::string& name, int player = -1) const {
        for (const auto& b : layout)
            if (b.name == name && b.player == player) return b;
        throw InternalError("MultilinearSystem: unknown variable block " + name);
    }

    // Offsets of the strategy blocks in player order.
    std::vector<const VarBlock*> strategy_blocks() const {
        std::vector<const VarBlock*> out;
        for (const auto& b : layout)
            if (b.is_strategy) out.push_back(&b);
        std::sort(out.begin(), out.end(),
                  [](const VarBlock* a, const VarBlock* b) { return a->player < b->player; });
        return out;
    }

    int strategy_dim() const {
        int d = 0;
        for (const auto* b : strategy_blocks()) d += b->size;
        return d;
    }

    int max_degree() const {
        int d = 0;
        for (const auto& e : equalities) d = std::max(d, e.degree());
        for (const auto& e : inequalities) d = std::max(d, e.degree());
        return d;
    }

    void canonicalize() {
        for (auto& e : equalities) e.canonicalize();
        for (auto& e : inequalities) e.canonicalize();
    }

    void validate() const {
        auto check = [&](const MultilinearExpr& e) {
            for (const auto& t : e.terms)
                for (int v : t.vars)
                    if (v < 0 || v >= num_vars) throw InternalError("MultilinearSystem: variable index out of range");
        };
        for (const auto& e : equalities) check(e);
        for (const auto& e : inequalities) check(e);
    }
};

inline double penalty(const MultilinearSystem& sys, const Eigen::VectorXd& y) {
    if (y.size() != sys.num_vars) throw DimensionError("penalty: vector size != num_vars");
    double h = 0.0;
    for (const auto& e : sys.equalities) {
        const double g = e.eval(y);
        h += 0.5 * g * g;
    }
    for (const auto& e : sys.inequalities) {
        const double g = e.eval(y);
        if (g > 0.0) h += 0.5 * g * g;
    }
    return h;
}

namespace detail {

// d/dy of coef * prod(vars) accumulated into grad, scaled by r. Repeated
// variables follow the power rule via the sum over term positions.
inline void accumulate_term_gradient(const Term& t, const Eigen::VectorXd& y, double r,
                                     Eigen::VectorXd& grad) {
    const int deg = static_cast<int>(t.vars.size());
    if (deg == 0) return;
    for (int skip = 0; skip < deg; ++skip) {
        double p = t.coef;
        for (int k = 0; k < deg; ++k)
            if (k != skip) p *= y(t.vars[k]);
        grad(t.vars[skip]) += r * p;
    }
}

}  // namespace detail

inline Eigen::VectorXd penalty_gradient(const MultilinearSystem& sys, const Eigen::VectorXd& y) {
    if (y.size() != sys.num_vars) throw DimensionError("penalty_gradient: vector size != num_vars");
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(sys.num_vars);
    for (const auto& e : sys.equalities) {
        const double g = e.eval(y);
        if (g != 0.0)
            for (const auto& t : e.terms) detail::accumulate_term_gradient(t, y, g, grad);
    }
    for (const auto& e : sys.inequalities) {
        const double g = e.eval(y);
        if (g > 0.0)
            for (const auto& t : e.terms) detail::accumulate_term_gradient(t, y, g, grad);
    }
    return grad;
}

// Flattened copy of a system for the optimizer's hot loop. Evaluates the
// penalty and its gradient in one pass without touching the node-based
// representation.
class CompiledSystem {
  public:
    explicit CompiledSystem(const MultilinearSystem& sys) : num_vars_(sys.num_vars) {
        reserve(sys);
        for (const auto& e : sys.equalities) push(e, /*is_eq=*/true);
        for (const auto& e : sys.inequalities) push(e, /*is_eq=*/false);
    }

    int num_vars() const { return num_vars_; }

    double value(const Eigen::VectorXd& y) const {
        double h = 0.0;
        for (std::size_t c = 0; c < constants_.size(); ++c) {
            const double g = residual(c, y);
            if (is_eq_[c] || g > 0.0) h += 0.5 * g * g;
        }
        return h;
    }

    double value_and_gradient(const Eigen::VectorXd& y, Eigen::VectorXd& grad) const {
        grad.setZero(num_vars_);
        double h = 0.0;
        for (std::size_t c = 0; c < constants_.size(); ++c) {
            const double g = residual(c, y);
            if (!is_eq_[c] && g <= 0.0) continue;
            h += 0.5 * g * g;
            if (g == 0.0) continue;
            for (int t = term_begin_[c]; t < term_begin_[c + 1]; ++t) {
                const int vb = var_begin_[t], ve = var_begin_[t + 1];
                for (int skip = vb; skip < ve; ++skip) {
                    double p = coefs_[t];
                    for (int k = vb; k < ve; ++k)
                        if (k != skip) p *= y(vars_[k]);
                    grad(vars_[skip]) += g * p;
                }
            }
        }
        return h;
    }

  private:
    double residual(std::size_t c, const Eigen::VectorXd& y) const {
        double g = constants_[c];
        for (int t = term_begin_[c]; t < term_begin_[c + 1]; ++t) {
            double p = coefs_[t];
            for (int k = var_begin_[t]; k < var_begin_[t + 1]; ++k) p *= y(vars_[k]);
            g += p;
        }
        return g;
    }

    void reserve(const MultilinearSystem& sys) {
        std::size_t nterms = 0, nvars = 0;
        auto count = [&](const MultilinearExpr& e) {
            nterms += e.terms.size();
            for (const auto& t : e.terms) nvars += t.vars.size();
        };
        for (const auto& e : sys.equalities) count(e);
        for (const auto& e : sys.inequalities) count(e);
        coefs_.reserve(nterms);
        vars_.reserve(nvars);
        term_begin_.reserve(sys.equalities.size() + sys.inequalities.size() + 1);
        term_begin_.push_back(0);
        var_begin_.reserve(nterms + 1);
        var_begin_.push_back(0);
    }

    void push(const MultilinearExpr& e, bool is_eq) {
        constants_.push_back(e.constant);
        is_eq_.push_back(is_eq);
        for (const auto& t : e.terms) {
            coefs_.push_back(t.coef);
            for (int v : t.vars) vars_.push_back(v);
            var_begin_.push_back(static_cast<int>(vars_.size()));
        }
        term_begin_.push_back(static_cast<int>(coefs_.size()));
    }

    int num_vars_;
    std::vector<double> constants_;
    std::vector<char> is_eq_;
    std::vector<double> coefs_;
    std::vector<int> term_begin_;  // per constraint
    std::vector<int> vars_;
    std::vector<int> var_begin_;   // per term
};

}  // namespace drgt
