#pragma once

#include <cmath>
#include <string>

#include "eqp/errors.hpp"

namespace eqp {

inline bool is_supported_day_count(int days_per_year) noexcept {
    return days_per_year == 252 || days_per_year == 360 || days_per_year == 365 ||
           days_per_year == 366;
}

/// Black-Scholes market state under the physical measure.
///
/// `mu` is the growth rate of the stock and `r` the riskless rate, both per
/// year and allowed to be zero or negative. `day_count` is the annualization
/// divisor used when an expiry is quoted in days.
struct MarketParams {
    double s0 = 100.0;
    double mu = 0.05;
    double sigma = 0.1;
    double r = 0.05;
    int day_count = 365;

    void validate() const {
        if (!(s0 > 0.0) || !std::isfinite(s0)) throw DomainError("MarketParams: s0 must be positive");
        if (!(sigma > 0.0) || !std::isfinite(sigma)) {
            throw DomainError("MarketParams: sigma must be positive");
        }
        if (!std::isfinite(mu)) throw DomainError("MarketParams: mu must be finite");
        if (!std::isfinite(r)) throw DomainError("MarketParams: r must be finite");
        if (!is_supported_day_count(day_count)) {
            throw DomainError("MarketParams: day_count must be one of 252, 360, 365, 366 (got " +
                              std::to_string(day_count) + ")");
        }
    }
};

/// European call: strike K and time to expiration in years.
struct CallContract {
    double strike = 100.0;
    double ttm_years = 60.0 / 365.0;

    void validate() const {
        if (!(strike > 0.0) || !std::isfinite(strike)) {
            throw DomainError("CallContract: strike must be positive");
        }
        if (!(ttm_years > 0.0) || !std::isfinite(ttm_years)) {
            throw DomainError("CallContract: ttm_years must be positive");
        }
    }
};

/// ln S_T ~ Normal(log_mean, log_std^2) under the physical measure.
struct TerminalLaw {
    double log_mean = 0.0;
    double log_std = 0.0;
};

inline TerminalLaw terminal_law(const MarketParams& m, const CallContract& c) {
    m.validate();
    c.validate();
    return {std::log(m.s0) + (m.mu - 0.5 * m.sigma * m.sigma) * c.ttm_years,
            m.sigma * std::sqrt(c.ttm_years)};
}

inline double ttm_from_days(double days, int day_count) {
    if (!(days > 0.0) || !std::isfinite(days)) throw DomainError("ttm_from_days: days must be positive");
    if (day_count <= 0) throw DomainError("ttm_from_days: day_count must be positive");
    return days / static_cast<double>(day_count);
}

}  // namespace eqp
