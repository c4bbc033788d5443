#pragma once

#include <cmath>

#include "eqp/model.hpp"
#include "eqp/numerics.hpp"

namespace eqp {

/// Probability that a call bought at `premium` ends with a nonnegative return,
/// together with its two normal factors.
struct ProbabilityResult {
    Probability p;
    Probability n_e1;  // exercise probability Pr{S_T >= K}
    Probability n_e2;  // Pr{S_T >= K + premium * e^{rT}}
    double e1 = 0.0;
    double e2 = 0.0;
};

namespace detail {

// Standardized log-distance of S_T from `level` under the physical law.
inline double physical_score(const MarketParams& m, const CallContract& c, double level) {
    return (std::log(m.s0 / level) + (m.mu - 0.5 * m.sigma * m.sigma) * c.ttm_years) /
           (m.sigma * std::sqrt(c.ttm_years));
}

}  // namespace detail

inline ProbabilityResult prob_positive_return(const MarketParams& m, const CallContract& c,
                                              double premium) {
    m.validate();
    c.validate();
    if (!(premium >= 0.0) || !std::isfinite(premium)) {
        throw DomainError("prob_positive_return: premium must be a finite nonnegative number");
    }
    const double e1 = detail::physical_score(m, c, c.strike);
    const double e2 =
        detail::physical_score(m, c, c.strike + premium * std::exp(m.r * c.ttm_years));
    const Probability n1 = norm_cdf(e1);
    const Probability n2 = norm_cdf(e2);
    return {Probability(n1.value() * n2.value()), n1, n2, e1, e2};
}

inline Probability exercise_probability(const MarketParams& m, const CallContract& c) {
    m.validate();
    c.validate();
    return norm_cdf(detail::physical_score(m, c, c.strike));
}

}  // namespace eqp
