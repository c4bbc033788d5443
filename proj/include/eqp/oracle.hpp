#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

#include "eqp/bs.hpp"
#include "eqp/model.hpp"
#include "eqp/numerics.hpp"
#include "eqp/physical.hpp"

namespace eqp {

// Monte Carlo brute force under the GBM terminal law.
//
// Random numbers come from SplitMix64 used as a counter-based generator: the
// k-th uniform of a stream is mix64(key + (k + 1) * gamma), where the key is
// derived from (seed, stream id). Normals are norm_quantile of those uniforms.
// A path is therefore a pure function of (seed, stream, path index), so the
// estimate does not depend on how paths are split across workers.

inline constexpr std::uint64_t kSplitMixGamma = 0x9e3779b97f4a7c15ULL;

inline constexpr std::uint64_t splitmix_mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Maps 64 random bits to the open interval (0, 1).
inline constexpr double bits_to_unit(std::uint64_t bits) noexcept {
    return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;  // 52 bits keep the top value below 1
}

/// Random-access view of one SplitMix64 stream.
class CounterStream {
public:
    CounterStream(std::uint64_t seed, std::uint64_t stream_id) noexcept
        : key_(splitmix_mix(seed ^ splitmix_mix(stream_id * kSplitMixGamma + 1))) {}

    [[nodiscard]] std::uint64_t bits(std::uint64_t index) const noexcept {
        return splitmix_mix(key_ + (index + 1) * kSplitMixGamma);
    }
    [[nodiscard]] double uniform(std::uint64_t index) const noexcept {
        return bits_to_unit(bits(index));
    }
    [[nodiscard]] double normal(std::uint64_t index) const { return norm_quantile(uniform(index)); }

private:
    std::uint64_t key_;
};

/// Sequential SplitMix64, used for drawing random configurations.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    std::uint64_t next() noexcept {
        state_ += kSplitMixGamma;
        return splitmix_mix(state_);
    }
    double uniform() noexcept { return bits_to_unit(next()); }
    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

private:
    std::uint64_t state_;
};

struct McConfig {
    std::uint64_t paths = 1'000'000;
    std::uint64_t seed = 42;
    bool antithetic = false;
    unsigned workers = 1;

    void validate() const {
        if (paths < 1) throw DomainError("McConfig: paths must be at least 1");
        if (workers < 1) throw DomainError("McConfig: workers must be at least 1");
    }
};

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::uint64_t paths = 0;
};

namespace detail {

inline constexpr std::uint64_t kBlockPaths = std::uint64_t{1} << 16;  // even: antithetic pairs never straddle blocks

enum StreamId : std::uint64_t {
    kStreamExercise = 1,
    kStreamPremium = 2,
    kStreamRiskNeutral = 3,
    kStreamJoint = 4,
};

// Runs block_fn(first_path, last_path) over fixed-size blocks and returns the
// per-block results in block order. Blocks are dealt to workers round-robin.
template <class Acc, class BlockFn>
std::vector<Acc> run_blocks(std::uint64_t paths, unsigned workers, BlockFn block_fn) {
    const std::uint64_t n_blocks = (paths + kBlockPaths - 1) / kBlockPaths;
    std::vector<Acc> results(n_blocks);
    auto work = [&](unsigned w) {
        for (std::uint64_t b = w; b < n_blocks; b += workers) {
            const std::uint64_t first = b * kBlockPaths;
            results[b] = block_fn(first, std::min(paths, first + kBlockPaths));
        }
    };
    workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, std::max<std::uint64_t>(n_blocks, 1)));
    if (workers <= 1) {
        work(0);
        return results;
    }
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
    pool.clear();
    return results;
}

// Normal draw for a path; antithetic mode pairs path 2j with 2j+1 sharing |Z|.
inline double path_normal(const CounterStream& stream, std::uint64_t path, bool antithetic) {
    if (!antithetic) return stream.normal(path);
    const double z = stream.normal(path / 2);
    return (path % 2 == 0) ? z : -z;
}

inline McEstimate indicator_estimate(std::uint64_t hits, std::uint64_t paths) {
    const double mean = static_cast<double>(hits) / static_cast<double>(paths);
    return {mean, std::sqrt(mean * (1.0 - mean) / static_cast<double>(paths)), paths};
}

template <class Event>
McEstimate estimate_indicator(std::uint64_t paths, unsigned workers, Event event) {
    const auto counts = run_blocks<std::uint64_t>(paths, workers, [&](std::uint64_t first,
                                                                      std::uint64_t last) {
        std::uint64_t hits = 0;
        for (std::uint64_t i = first; i < last; ++i) hits += event(i) ? 1 : 0;
        return hits;
    });
    std::uint64_t hits = 0;
    for (auto h : counts) hits += h;
    return indicator_estimate(hits, paths);
}

struct LogPriceLaw {
    double log_s0;
    double drift;  // (growth - sigma^2 / 2) * T
    double vol;    // sigma * sqrt(T)

    [[nodiscard]] double terminal(double z) const { return std::exp(log_s0 + drift + vol * z); }
};

inline LogPriceLaw physical_law(const MarketParams& m, const CallContract& c) {
    const TerminalLaw law = terminal_law(m, c);
    return {std::log(m.s0), law.log_mean - std::log(m.s0), law.log_std};
}

}  // namespace detail

/// Estimates Pr{S_T >= K} by simulation.
inline McEstimate mc_exercise_probability(const MarketParams& m, const CallContract& c,
                                          const McConfig& cfg) {
    cfg.validate();
    const auto law = detail::physical_law(m, c);
    const CounterStream stream(cfg.seed, detail::kStreamExercise);
    return detail::estimate_indicator(cfg.paths, cfg.workers, [&](std::uint64_t i) {
        return law.terminal(detail::path_normal(stream, i, cfg.antithetic)) >= c.strike;
    });
}

/// Estimates Pr{S_T >= K} * Pr{S_T' >= K + premium e^{rT}} with S_T, S_T'
/// two independent terminal prices drawn per path from separate streams.
///
/// This is the two-factor probability the closed form p = N(e1) N(e2)
/// describes. The fraction of paths satisfying both indicators is a plain
/// binomial estimate of that product. Compare mc_joint_positive_return, which
/// evaluates the payoff event on a single terminal price.
inline McEstimate mc_prob_positive_return(const MarketParams& m, const CallContract& c,
                                          double premium, const McConfig& cfg) {
    cfg.validate();
    if (!(premium >= 0.0)) throw DomainError("mc_prob_positive_return: premium must be nonnegative");
    const auto law = detail::physical_law(m, c);
    const double hurdle = premium * std::exp(m.r * c.ttm_years);
    const CounterStream exercise(cfg.seed, detail::kStreamExercise);
    const CounterStream payoff(cfg.seed, detail::kStreamPremium);
    return detail::estimate_indicator(cfg.paths, cfg.workers, [&](std::uint64_t i) {
        const double s_exercise = law.terminal(detail::path_normal(exercise, i, cfg.antithetic));
        const double s_payoff = law.terminal(detail::path_normal(payoff, i, cfg.antithetic));
        return s_exercise >= c.strike && s_payoff >= c.strike + hurdle;
    });
}

/// Estimates Pr{(S_T - K)^+ - premium e^{rT} >= 0} on a single terminal price.
/// For premium > 0 this event equals {S_T >= K + premium e^{rT}}, whose
/// probability is N(e2) alone; for premium = 0 it holds on every path.
inline McEstimate mc_joint_positive_return(const MarketParams& m, const CallContract& c,
                                           double premium, const McConfig& cfg) {
    cfg.validate();
    if (!(premium >= 0.0)) throw DomainError("mc_joint_positive_return: premium must be nonnegative");
    const auto law = detail::physical_law(m, c);
    const double hurdle = premium * std::exp(m.r * c.ttm_years);
    const CounterStream stream(cfg.seed, detail::kStreamJoint);
    return detail::estimate_indicator(cfg.paths, cfg.workers, [&](std::uint64_t i) {
        const double s = law.terminal(detail::path_normal(stream, i, cfg.antithetic));
        return std::max(s - c.strike, 0.0) - hurdle >= 0.0;
    });
}

/// Discounted mean call payoff under the risk-neutral drift r.
/// With antithetic draws the standard error is taken over pair averages.
inline McEstimate mc_bs_price(const MarketParams& m, const CallContract& c, const McConfig& cfg) {
    cfg.validate();
    MarketParams risk_neutral = m;
    risk_neutral.mu = m.r;
    const auto law = detail::physical_law(risk_neutral, c);
    const double discount = std::exp(-m.r * c.ttm_years);
    const CounterStream stream(cfg.seed, detail::kStreamRiskNeutral);

    struct Sums {
        double payoff = 0.0;
        double unit = 0.0;
        double unit_sq = 0.0;
        std::uint64_t units = 0;
    };
    const std::uint64_t unit_size = cfg.antithetic ? 2 : 1;
    const auto blocks =
        detail::run_blocks<Sums>(cfg.paths, cfg.workers, [&](std::uint64_t first, std::uint64_t last) {
            Sums s;
            for (std::uint64_t i = first; i < last; i += unit_size) {
                const std::uint64_t end = std::min(last, i + unit_size);
                double unit_sum = 0.0;
                for (std::uint64_t j = i; j < end; ++j) {
                    const double st = law.terminal(detail::path_normal(stream, j, cfg.antithetic));
                    unit_sum += discount * std::max(st - c.strike, 0.0);
                }
                const double unit_mean = unit_sum / static_cast<double>(end - i);
                s.payoff += unit_sum;
                s.unit += unit_mean;
                s.unit_sq += unit_mean * unit_mean;
                ++s.units;
            }
            return s;
        });

    Sums total;
    for (const auto& b : blocks) {
        total.payoff += b.payoff;
        total.unit += b.unit;
        total.unit_sq += b.unit_sq;
        total.units += b.units;
    }
    const double n = static_cast<double>(total.units);
    const double unit_mean = total.unit / n;
    const double variance =
        total.units > 1 ? std::max(0.0, (total.unit_sq - n * unit_mean * unit_mean) / (n - 1.0)) : 0.0;
    return {total.payoff / static_cast<double>(cfg.paths), std::sqrt(variance / n), cfg.paths};
}

// --- closed form vs simulation --------------------------------------------

struct OracleCase {
    MarketParams market;
    CallContract contract;
    double premium = 0.0;
};

struct OracleCheck {
    OracleCase input;
    double closed_p = 0.0;
    McEstimate mc_p;
    double closed_bs = 0.0;
    McEstimate mc_bs;
    bool p_within = false;
    bool bs_within = false;
};

inline constexpr double kOracleProbSigmas = 4.0;
inline constexpr double kOraclePriceSigmas = 3.0;

// |closed - estimate| <= k * SE. A zero SE (all paths agree) leaves the
// estimator's resolution of one path as the allowance.
inline bool within_sigmas(double closed, const McEstimate& est, double k) {
    const double allowance =
        est.std_error > 0.0 ? k * est.std_error : 1.0 / static_cast<double>(est.paths);
    return std::abs(closed - est.mean) <= allowance;
}

/// Random configurations: S0 in [50,200], K/S0 in [0.7,1.3], mu in [-0.3,0.3],
/// sigma in [0.05,0.5], r in [0,0.1], T in [0.02,1]; premium is the BS price.
inline std::vector<OracleCase> sample_oracle_cases(std::size_t n, std::uint64_t seed) {
    SplitMix64 rng(seed);
    std::vector<OracleCase> cases;
    cases.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        OracleCase oc;
        oc.market.s0 = rng.uniform(50.0, 200.0);
        oc.market.mu = rng.uniform(-0.3, 0.3);
        oc.market.sigma = rng.uniform(0.05, 0.5);
        oc.market.r = rng.uniform(0.0, 0.1);
        oc.contract.strike = oc.market.s0 * rng.uniform(0.7, 1.3);
        oc.contract.ttm_years = rng.uniform(0.02, 1.0);
        oc.premium = bs_price(oc.market, oc.contract);
        cases.push_back(oc);
    }
    return cases;
}

inline OracleCheck check_against_oracle(const OracleCase& oc, const McConfig& cfg) {
    OracleCheck out;
    out.input = oc;
    out.closed_p = prob_positive_return(oc.market, oc.contract, oc.premium).p.value();
    out.mc_p = mc_prob_positive_return(oc.market, oc.contract, oc.premium, cfg);
    out.closed_bs = bs_price(oc.market, oc.contract);
    out.mc_bs = mc_bs_price(oc.market, oc.contract, cfg);
    out.p_within = within_sigmas(out.closed_p, out.mc_p, kOracleProbSigmas);
    out.bs_within = within_sigmas(out.closed_bs, out.mc_bs, kOraclePriceSigmas);
    return out;
}

/// Checks each case against its own seed, derived from cfg.seed and the case index.
inline std::vector<OracleCheck> run_oracle_suite(const std::vector<OracleCase>& cases,
                                                 const McConfig& cfg) {
    std::vector<OracleCheck> checks;
    checks.reserve(cases.size());
    for (std::size_t i = 0; i < cases.size(); ++i) {
        McConfig case_cfg = cfg;
        case_cfg.seed = splitmix_mix(cfg.seed + (i + 1) * kSplitMixGamma);
        checks.push_back(check_against_oracle(cases[i], case_cfg));
    }
    return checks;
}

}  // namespace eqp
