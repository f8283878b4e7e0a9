#pragma once

// Quantile risk measures on discrete loss distributions. CVaR at level eps
// is min_zeta zeta + E[(L - zeta)+]/eps; in closed form it is the average of
// the eps-tail of the loss distribution (losses sorted descending, the
// boundary atom taken fractionally). At eps = 1 it equals the mean.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "drgt/errors.hpp"

namespace drgt {

struct DiscreteLossDistribution {
    std::vector<std::pair<double, double>> atoms;  // (probability, loss)

    void validate() const {
        if (atoms.empty()) throw InputError("DiscreteLossDistribution: no atoms");
        double sum = 0.0;
        for (const auto& [p, l] : atoms) {
            if (!(p >= 0.0) || !std::isfinite(l)) throw InputError("DiscreteLossDistribution: bad atom");
            sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-12)
            throw InputError("DiscreteLossDistribution: probabilities must sum to 1");
    }

    double mean() const {
        double m = 0.0;
        for (const auto& [p, l] : atoms) m += p * l;
        return m;
    }
};

inline double cvar(const DiscreteLossDistribution& dist, double eps) {
    dist.validate();
    if (!(eps > 0.0) || eps > 1.0) throw InputError("cvar: eps must lie in (0, 1]");
    if (eps == 1.0) return dist.mean();

    std::vector<std::pair<double, double>> sorted = dist.atoms;  // (probability, loss)
    std::sort(sorted.begin(), sorted.end(),
              [](const auto& a, const auto& b) { return a.second > b.second; });
    double remaining = eps;
    double tail = 0.0;
    for (const auto& [p, l] : sorted) {
        const double take = std::min(p, remaining);
        tail += take * l;
        remaining -= take;
        if (remaining <= 0.0) break;
    }
    return tail / eps;
}

// Risk-aversion weight used by the distributionally robust system builder.
inline double sigma(double eps) {
    if (!(eps > 0.0) || eps > 1.0) throw InputError("sigma: eps must lie in (0, 1]");
    return (1.0 - eps) / eps;
}

struct RiskProfile {
    std::vector<double> epsilons;  // one per player, each in (0, 1]

    RiskProfile() = default;
    explicit RiskProfile(std::vector<double> eps) : epsilons(std::move(eps)) { validate(); }

    static RiskProfile neutral(int players) { return RiskProfile(std::vector<double>(players, 1.0)); }

    void validate() const {
        if (epsilons.empty()) throw InputError("RiskProfile: empty");
        for (double e : epsilons)
            if (!(e > 0.0) || e > 1.0) throw InputError("RiskProfile: eps must lie in (0, 1]");
    }

    bool all_neutral() const {
        for (double e : epsilons)
            if (e != 1.0) return false;
        return true;
    }
};

}  // namespace drgt
