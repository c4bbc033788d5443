#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "eqp/bs.hpp"
#include "eqp/equilibrium.hpp"
#include "eqp/numerics.hpp"

namespace eqp {

namespace iv_limits {
inline constexpr double initial_lo = 1e-6;
inline constexpr double initial_hi = 5.0;
inline constexpr double widest_lo = 1e-9;
inline constexpr double widest_hi = 50.0;
// Residual is measured on log prices; see implied_vol.
inline constexpr double log_price_tol = 1e-15;
inline constexpr double price_tol_per_spot = 1e-9;
}  // namespace iv_limits

/// Black-Scholes implied volatility of a call price.
///
/// The residual ln BS(sigma) - ln price is driven to zero by a bracketed Brent
/// search. Working in log price keeps the search well scaled when the price is
/// tiny (deep out of the money) and vega is nearly flat; the result is then
/// checked against the price-space tolerance 1e-9 * S0.
inline double implied_vol(const MarketParams& m, const CallContract& c, double price) {
    m.validate();
    c.validate();
    const NoArbBounds bounds = no_arb_bounds(m, c);
    if (!(price > bounds.lower && price < bounds.upper)) {
        std::ostringstream msg;
        msg << "implied_vol: price " << price << " outside the open no-arbitrage interval ("
            << bounds.lower << ", " << bounds.upper << ")";
        throw OutOfBoundsError(msg.str());
    }

    const double log_price = std::log(price);
    auto residual = [&](double sigma) {
        MarketParams trial = m;
        trial.sigma = sigma;
        const double bs = std::max(bs_price(trial, c), std::numeric_limits<double>::min());
        return std::log(bs) - log_price;
    };

    double lo = iv_limits::initial_lo;
    double hi = iv_limits::initial_hi;
    while (residual(lo) > 0.0 && lo > iv_limits::widest_lo) {
        lo = std::max(lo * 0.1, iv_limits::widest_lo);
    }
    while (residual(hi) < 0.0 && hi < iv_limits::widest_hi) {
        hi = std::min(hi * 2.0, iv_limits::widest_hi);
    }

    double sigma = 0.0;
    try {
        sigma = find_root(residual, RootBracket(lo, hi, iv_limits::log_price_tol, 300));
    } catch (const BracketError&) {
        std::ostringstream msg;
        msg << "implied_vol: no volatility in [" << lo << ", " << hi << "] reproduces price "
            << price;
        throw ConvergenceError(msg.str());
    }

    MarketParams solved = m;
    solved.sigma = sigma;
    if (std::abs(bs_price(solved, c) - price) > iv_limits::price_tol_per_spot * m.s0) {
        std::ostringstream msg;
        msg << "implied_vol: price residual above tolerance at sigma " << sigma << " (bracket ["
            << lo << ", " << hi << "])";
        throw ConvergenceError(msg.str());
    }
    return sigma;
}

}  // namespace eqp
