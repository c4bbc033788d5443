#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>

#include "eqp/model.hpp"
#include "eqp/numerics.hpp"

namespace eqp {

struct BsInputs {
    double d1 = 0.0;
    double d2 = 0.0;
};

inline BsInputs bs_d1_d2(const MarketParams& m, const CallContract& c) {
    m.validate();
    c.validate();
    const double vol_sqrt_t = m.sigma * std::sqrt(c.ttm_years);
    const double d1 =
        (std::log(m.s0 / c.strike) + (m.r + 0.5 * m.sigma * m.sigma) * c.ttm_years) / vol_sqrt_t;
    return {d1, d1 - vol_sqrt_t};
}

/// Black-Scholes value of a European call. Does not depend on m.mu.
inline double bs_price(const MarketParams& m, const CallContract& c) {
    const auto [d1, d2] = bs_d1_d2(m, c);
    const double discounted_strike = c.strike * std::exp(-m.r * c.ttm_years);
    const double price = m.s0 * norm_cdf(d1).value() - discounted_strike * norm_cdf(d2).value();
    assert(price >= std::max(0.0, m.s0 - discounted_strike) - 1e-12 * std::max(1.0, m.s0));
    assert(price <= m.s0 * (1.0 + 1e-15));
    return price;
}

}  // namespace eqp
