#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string_view>

#include "eqp/model.hpp"
#include "eqp/numerics.hpp"
#include "eqp/physical.hpp"

namespace eqp {

enum class QuoteStatus { Priced, ClampedLower, ClampedUpper, Infeasible };

constexpr std::string_view to_string(QuoteStatus s) noexcept {
    switch (s) {
        case QuoteStatus::Priced: return "priced";
        case QuoteStatus::ClampedLower: return "clamped_lower";
        case QuoteStatus::ClampedUpper: return "clamped_upper";
        case QuoteStatus::Infeasible: return "infeasible";
    }
    return "unknown";
}

/// Rational call price interval [max(0, S0 - K e^{-rT}), S0].
struct NoArbBounds {
    double lower = 0.0;
    double upper = 0.0;
};

inline NoArbBounds no_arb_bounds(const MarketParams& m, const CallContract& c) {
    m.validate();
    c.validate();
    return {std::max(0.0, m.s0 - c.strike * std::exp(-m.r * c.ttm_years)), m.s0};
}

/// Price at which a call reaches a target probability of positive return.
///
/// `raw_value` is the unclamped closed-form premium; `value` is that premium
/// moved into the no-arbitrage interval. Both are empty iff the target is not
/// below the exercise probability.
struct EquilibriumQuote {
    QuoteStatus status = QuoteStatus::Infeasible;
    std::optional<double> raw_value;
    std::optional<double> value;
    Probability target_p;
    Probability exercise_p;
};

inline EquilibriumQuote equilibrium_price(const MarketParams& m, const CallContract& c,
                                          Probability target_p) {
    if (!(target_p.value() > 0.0 && target_p.value() < 1.0)) {
        throw DomainError("equilibrium_price: target probability must lie in (0, 1)");
    }
    const Probability exercise_p = exercise_probability(m, c);

    EquilibriumQuote quote;
    quote.target_p = target_p;
    quote.exercise_p = exercise_p;
    if (target_p >= exercise_p) {
        quote.status = QuoteStatus::Infeasible;
        return quote;
    }

    // Required second factor N(e2) = p / N(e1), then solve e2 for the premium.
    const double e2 = norm_quantile(target_p.value() / exercise_p.value());
    const double t = c.ttm_years;
    const double raw =
        m.s0 * std::exp(-m.sigma * std::sqrt(t) * e2 + (m.mu - m.r - 0.5 * m.sigma * m.sigma) * t) -
        std::exp(-m.r * t) * c.strike;

    const NoArbBounds bounds = no_arb_bounds(m, c);
    quote.raw_value = raw;
    if (raw < bounds.lower) {
        quote.status = QuoteStatus::ClampedLower;
        quote.value = bounds.lower;
    } else if (raw > bounds.upper) {
        quote.status = QuoteStatus::ClampedUpper;
        quote.value = bounds.upper;
    } else {
        quote.status = QuoteStatus::Priced;
        quote.value = raw;
    }
    return quote;
}

inline EquilibriumQuote equilibrium_price(const MarketParams& m, const CallContract& c,
                                          double target_p) {
    if (!(target_p > 0.0 && target_p < 1.0)) {
        throw DomainError("equilibrium_price: target probability must lie in (0, 1)");
    }
    return equilibrium_price(m, c, Probability(target_p));
}

}  // namespace eqp
