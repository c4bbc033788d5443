#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "eqp/bs.hpp"
#include "eqp/equilibrium.hpp"
#include "eqp/errors.hpp"
#include "eqp/implied_vol.hpp"
#include "eqp/model.hpp"
#include "eqp/parallel.hpp"
#include "eqp/physical.hpp"
#include "eqp/reference_tables.hpp"
#include "eqp/report.hpp"

namespace eqp {

// ---------------------------------------------------------------------------
// Grid description

enum class Param { S0, K, Mu, R, Sigma, TDays, P };

constexpr std::string_view param_name(Param p) noexcept {
    switch (p) {
        case Param::S0: return "s0";
        case Param::K: return "K";
        case Param::Mu: return "mu";
        case Param::R: return "r";
        case Param::Sigma: return "sigma";
        case Param::TDays: return "T_days";
        case Param::P: return "p";
    }
    return "?";
}

inline std::optional<Param> parse_param(std::string_view name) {
    for (Param p : {Param::S0, Param::K, Param::Mu, Param::R, Param::Sigma, Param::TDays, Param::P}) {
        if (name == param_name(p)) return p;
    }
    return std::nullopt;
}

/// One swept parameter: [start, stop] by a fixed step or with `count` evenly
/// spaced points (endpoints included).
struct Axis {
    Param param = Param::K;
    double start = 0.0;
    double stop = 0.0;
    std::optional<double> step;
    std::optional<std::size_t> count;

    static Axis stepped(Param p, double start, double stop, double step) {
        return {p, start, stop, step, std::nullopt};
    }
    static Axis counted(Param p, double start, double stop, std::size_t count) {
        return {p, start, stop, std::nullopt, count};
    }

    [[nodiscard]] std::vector<double> values() const {
        const std::string name(param_name(param));
        if (!std::isfinite(start) || !std::isfinite(stop) || start > stop) {
            throw ConfigError("axis " + name + ": requires finite start <= stop");
        }
        if (step.has_value() == count.has_value()) {
            throw ConfigError("axis " + name + ": give exactly one of step or count");
        }
        std::vector<double> out;
        if (step) {
            if (!(*step > 0.0)) throw ConfigError("axis " + name + ": step must be positive");
            const auto n = static_cast<std::size_t>(std::floor((stop - start) / *step + 1e-9)) + 1;
            out.reserve(n);
            // Snap to a 1e-12 lattice so 0.01 prints as 0.01, not 0.010000000000000009.
            for (std::size_t i = 0; i < n; ++i) {
                out.push_back(std::nearbyint((start + static_cast<double>(i) * *step) * 1e12) / 1e12);
            }
        } else {
            if (*count < 1) throw ConfigError("axis " + name + ": count must be at least 1");
            if (*count == 1) return {start};
            out.reserve(*count);
            for (std::size_t i = 0; i < *count; ++i) {
                const double t = static_cast<double>(i) / static_cast<double>(*count - 1);
                out.push_back(std::nearbyint((start + t * (stop - start)) * 1e12) / 1e12);
            }
        }
        return out;
    }
};

/// Full parameter vector of one grid point.
struct GridPoint {
    double s0 = 0.0;
    double strike = 0.0;
    double mu = 0.0;
    double r = 0.0;
    double sigma = 0.0;
    double t_days = 0.0;
    int day_count = 365;
    std::optional<double> p;

    [[nodiscard]] MarketParams market() const { return {s0, mu, sigma, r, day_count}; }
    [[nodiscard]] CallContract contract() const { return {strike, ttm_from_days(t_days, day_count)}; }

    [[nodiscard]] double get(Param param) const {
        switch (param) {
            case Param::S0: return s0;
            case Param::K: return strike;
            case Param::Mu: return mu;
            case Param::R: return r;
            case Param::Sigma: return sigma;
            case Param::TDays: return t_days;
            case Param::P: return p.value_or(std::nan(""));
        }
        return std::nan("");
    }
    void set(Param param, double v) {
        switch (param) {
            case Param::S0: s0 = v; break;
            case Param::K: strike = v; break;
            case Param::Mu: mu = v; break;
            case Param::R: r = v; break;
            case Param::Sigma: sigma = v; break;
            case Param::TDays: t_days = v; break;
            case Param::P: p = v; break;
        }
    }
};

/// Axes plus fixed values; every model parameter appears exactly once.
/// Points are enumerated row-major: the first axis varies slowest.
struct SweepGrid {
    std::vector<Axis> axes;
    std::map<Param, double> fixed;
    int day_count = 365;

    void validate(bool require_p = false) const {
        std::map<Param, int> seen;
        for (const auto& a : axes) {
            if (a.param == Param::S0) throw ConfigError("grid: s0 cannot be swept");
            ++seen[a.param];
            (void)a.values();
        }
        for (const auto& [p, v] : fixed) {
            ++seen[p];
            if (!std::isfinite(v)) {
                throw ConfigError("grid: fixed " + std::string(param_name(p)) + " is not finite");
            }
        }
        for (const auto& [p, n] : seen) {
            if (n > 1) throw ConfigError("grid: " + std::string(param_name(p)) + " given more than once");
        }
        std::vector<Param> required{Param::S0, Param::K, Param::Mu, Param::R, Param::Sigma, Param::TDays};
        if (require_p) required.push_back(Param::P);
        for (Param p : required) {
            if (!seen.contains(p)) throw ConfigError("grid: " + std::string(param_name(p)) + " missing");
        }
        if (!is_supported_day_count(day_count)) throw ConfigError("grid: unsupported day_count");
    }

    [[nodiscard]] std::vector<GridPoint> points() const {
        validate();
        std::vector<std::vector<double>> values;
        std::size_t n = 1;
        for (const auto& a : axes) {
            values.push_back(a.values());
            n *= values.back().size();
        }
        GridPoint base;
        base.day_count = day_count;
        for (const auto& [p, v] : fixed) base.set(p, v);

        std::vector<GridPoint> out;
        out.reserve(n);
        std::vector<std::size_t> idx(axes.size(), 0);
        for (std::size_t i = 0; i < n; ++i) {
            GridPoint g = base;
            for (std::size_t a = 0; a < axes.size(); ++a) g.set(axes[a].param, values[a][idx[a]]);
            out.push_back(g);
            for (std::size_t a = axes.size(); a-- > 0;) {
                if (++idx[a] < values[a].size()) break;
                idx[a] = 0;
            }
        }
        return out;
    }
};

struct SweepRecord {
    GridPoint inputs;
    double bs_value = 0.0;
    Probability p_of_bs;
    std::optional<EquilibriumQuote> eq_quote;
    std::optional<double> implied_vol;
    std::string iv_error;
};

inline SweepRecord evaluate_point(const GridPoint& g) {
    SweepRecord rec;
    rec.inputs = g;
    const MarketParams m = g.market();
    const CallContract c = g.contract();
    rec.bs_value = bs_price(m, c);
    rec.p_of_bs = prob_positive_return(m, c, rec.bs_value).p;
    if (g.p) rec.eq_quote = equilibrium_price(m, c, *g.p);
    return rec;
}

// ---------------------------------------------------------------------------
// Composition scan

/// Grid points whose probability of positive return at the BS premium exceeds
/// `threshold`, in row-major order.
inline std::vector<SweepRecord> scan_compositions(const SweepGrid& grid, double threshold,
                                                  unsigned workers = 1) {
    if (!(threshold > 0.0 && threshold < 1.0)) {
        throw ConfigError("scan_compositions: threshold must lie in (0, 1)");
    }
    const auto points = grid.points();
    auto records = parallel_map<SweepRecord>(points.size(), workers,
                                             [&](std::size_t i) { return evaluate_point(points[i]); });
    std::erase_if(records, [&](const SweepRecord& r) { return !(r.p_of_bs.value() > threshold); });
    return records;
}

/// The three market-factor grids: strike and growth rate crossed with the
/// riskless rate ("rates"), the volatility ("vols") or the expiry ("expiries").
inline SweepGrid composition_preset(std::string_view name) {
    SweepGrid g;
    g.fixed[Param::S0] = 100.0;
    g.axes.push_back(Axis::stepped(Param::K, 80.0, 120.0, 1.0));
    g.axes.push_back(Axis::stepped(Param::Mu, -0.4, 0.4, 0.02));
    if (name == "rates") {
        g.axes.push_back(Axis::counted(Param::R, 0.001, 0.3, 30));
        g.fixed[Param::Sigma] = 0.1;
        g.fixed[Param::TDays] = 60.0;
    } else if (name == "vols") {
        g.axes.push_back(Axis::counted(Param::Sigma, 0.001, 0.2, 40));
        g.fixed[Param::R] = 0.05;
        g.fixed[Param::TDays] = 60.0;
    } else if (name == "expiries") {
        g.axes.push_back(Axis::stepped(Param::TDays, 1.0, 120.0, 1.0));
        g.fixed[Param::R] = 0.05;
        g.fixed[Param::Sigma] = 0.1;
    } else {
        throw ConfigError("unknown composition preset '" + std::string(name) +
                          "' (expected rates, vols or expiries)");
    }
    return g;
}

inline RecordTable scan_records(std::span<const SweepRecord> records) {
    RecordTable t;
    t.columns = {"s0", "K", "mu", "r", "sigma", "T_days", "T_years", "bs_value", "p_of_bs"};
    for (const auto& rec : records) {
        const auto& g = rec.inputs;
        t.add_row({g.s0, g.strike, g.mu, g.r, g.sigma, g.t_days, g.contract().ttm_years, rec.bs_value,
                   rec.p_of_bs.value()});
    }
    return t;
}

// ---------------------------------------------------------------------------
// Equilibrium tables

/// Market held fixed across a (mu, K) table or surface.
struct TableMarket {
    double s0 = 100.0;
    double sigma = 0.1;
    double r = 0.05;
    double t_days = 60.0;
    int day_count = 365;

    [[nodiscard]] double ttm_years() const { return ttm_from_days(t_days, day_count); }
    [[nodiscard]] MarketParams market(double mu) const { return {s0, mu, sigma, r, day_count}; }
    [[nodiscard]] CallContract contract(double strike) const { return {strike, ttm_years()}; }
};

struct EquilibriumTable {
    double target_p = 0.0;
    TableMarket market;
    std::vector<double> mus;
    std::vector<double> strikes;
    std::vector<double> bs_row;
    std::vector<std::vector<EquilibriumQuote>> cells;  // [mu][strike]
};

namespace detail {

inline void require_axis(const Axis& axis, Param expected, std::string_view what) {
    if (axis.param != expected) {
        throw ConfigError(std::string(what) + ": expected a " + std::string(param_name(expected)) +
                          " axis, got " + std::string(param_name(axis.param)));
    }
}

}  // namespace detail

inline EquilibriumTable make_table(double target_p, const Axis& mu_axis, const Axis& k_axis,
                                   const TableMarket& fixed, unsigned workers = 1) {
    detail::require_axis(mu_axis, Param::Mu, "make_table");
    detail::require_axis(k_axis, Param::K, "make_table");
    if (!is_supported_day_count(fixed.day_count)) throw ConfigError("make_table: unsupported day_count");

    EquilibriumTable t;
    t.target_p = target_p;
    t.market = fixed;
    t.mus = mu_axis.values();
    t.strikes = k_axis.values();
    t.bs_row.reserve(t.strikes.size());
    for (double k : t.strikes) t.bs_row.push_back(bs_price(fixed.market(0.0), fixed.contract(k)));

    const std::size_t nk = t.strikes.size();
    auto flat = parallel_map<EquilibriumQuote>(t.mus.size() * nk, workers, [&](std::size_t i) {
        return equilibrium_price(fixed.market(t.mus[i / nk]), fixed.contract(t.strikes[i % nk]),
                                 target_p);
    });
    t.cells.resize(t.mus.size());
    for (std::size_t i = 0; i < t.mus.size(); ++i) {
        t.cells[i].assign(flat.begin() + static_cast<std::ptrdiff_t>(i * nk),
                          flat.begin() + static_cast<std::ptrdiff_t>((i + 1) * nk));
    }
    return t;
}

/// "NaN" for an infeasible target, else the (clamped) price to two decimals.
inline std::string display_cell(const EquilibriumQuote& q) {
    return q.value ? format_fixed2(*q.value) : std::string("NaN");
}

namespace detail {
inline Cell opt_cell(const std::optional<double>& v) {
    return v ? Cell{*v} : Cell{};
}
}  // namespace detail

/// One row per (mu, K) cell with display and full-precision columns.
inline RecordTable table_records(const EquilibriumTable& t) {
    RecordTable out;
    out.columns = {"target_p", "mu", "K", "T_years", "bs_value", "bs_display", "status",
                   "raw_value", "value", "exercise_p", "display"};
    const double ttm = t.market.ttm_years();
    for (std::size_t i = 0; i < t.mus.size(); ++i) {
        for (std::size_t j = 0; j < t.strikes.size(); ++j) {
            const auto& q = t.cells[i][j];
            out.add_row({t.target_p, t.mus[i], t.strikes[j], ttm, t.bs_row[j], format_fixed2(t.bs_row[j]),
                         std::string(to_string(q.status)), detail::opt_cell(q.raw_value),
                         detail::opt_cell(q.value), q.exercise_p.value(), display_cell(q)});
        }
    }
    return out;
}

/// The printed layout: strikes across, a BS row, then one row per growth rate.
inline RecordTable table_grid(const EquilibriumTable& t) {
    RecordTable out;
    out.columns.push_back("mu");
    for (double k : t.strikes) out.columns.push_back(format_fixed2(k));
    std::vector<Cell> bs{std::string("BS")};
    for (double v : t.bs_row) bs.emplace_back(format_fixed2(v));
    out.add_row(std::move(bs));
    for (std::size_t i = 0; i < t.mus.size(); ++i) {
        std::vector<Cell> row{format_fixed2(t.mus[i])};
        for (const auto& q : t.cells[i]) row.emplace_back(display_cell(q));
        out.add_row(std::move(row));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Implied-volatility surface

struct SurfaceCell {
    EquilibriumQuote quote;
    std::optional<double> implied_vol;
    std::string tag;  // "ok" or why no volatility was produced
};

struct ImpliedVolSurface {
    double target_p = 0.0;
    TableMarket market;
    std::vector<double> mus;
    std::vector<double> strikes;
    std::vector<std::vector<SurfaceCell>> cells;  // [mu][strike]
};

inline SurfaceCell surface_cell(const MarketParams& m, const CallContract& c, double target_p) {
    SurfaceCell cell;
    cell.quote = equilibrium_price(m, c, target_p);
    if (cell.quote.status != QuoteStatus::Priced) {
        cell.tag = std::string(to_string(cell.quote.status));
        return cell;
    }
    try {
        cell.implied_vol = implied_vol(m, c, *cell.quote.value);
        cell.tag = "ok";
    } catch (const OutOfBoundsError&) {
        cell.tag = "out_of_bounds";
    } catch (const ConvergenceError&) {
        cell.tag = "no_convergence";
    }
    return cell;
}

inline ImpliedVolSurface make_surface(double target_p, const Axis& mu_axis, const Axis& k_axis,
                                      const TableMarket& fixed, unsigned workers = 1) {
    detail::require_axis(mu_axis, Param::Mu, "make_surface");
    detail::require_axis(k_axis, Param::K, "make_surface");
    if (!is_supported_day_count(fixed.day_count)) throw ConfigError("make_surface: unsupported day_count");

    ImpliedVolSurface s;
    s.target_p = target_p;
    s.market = fixed;
    s.mus = mu_axis.values();
    s.strikes = k_axis.values();
    const std::size_t nk = s.strikes.size();
    auto flat = parallel_map<SurfaceCell>(s.mus.size() * nk, workers, [&](std::size_t i) {
        return surface_cell(fixed.market(s.mus[i / nk]), fixed.contract(s.strikes[i % nk]), target_p);
    });
    s.cells.resize(s.mus.size());
    for (std::size_t i = 0; i < s.mus.size(); ++i) {
        s.cells[i].assign(std::make_move_iterator(flat.begin() + static_cast<std::ptrdiff_t>(i * nk)),
                          std::make_move_iterator(flat.begin() + static_cast<std::ptrdiff_t>((i + 1) * nk)));
    }
    return s;
}

inline RecordTable surface_records(const ImpliedVolSurface& s) {
    RecordTable out;
    out.columns = {"target_p", "mu", "K", "moneyness", "status", "value", "implied_vol", "iv_tag"};
    for (std::size_t i = 0; i < s.mus.size(); ++i) {
        for (std::size_t j = 0; j < s.strikes.size(); ++j) {
            const auto& c = s.cells[i][j];
            out.add_row({s.target_p, s.mus[i], s.strikes[j], s.strikes[j] / s.market.s0,
                         std::string(to_string(c.quote.status)), detail::opt_cell(c.quote.value),
                         detail::opt_cell(c.implied_vol), c.tag});
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Day-count convention search

/// An annualization hypothesis: an expiry of `t_days` over a `day_count` year.
struct Convention {
    int day_count = 365;
    double t_days = 60.0;

    [[nodiscard]] double ttm_years() const { return ttm_from_days(t_days, day_count); }
    [[nodiscard]] std::string label() const {
        return format_shortest(t_days) + "/" + std::to_string(day_count);
    }
};

/// Day counts {252, 360, 365, 366} crossed with 59, 60 and 61 days, covering
/// both inclusive and exclusive counting of a 60-day expiry.
inline std::vector<Convention> default_conventions() {
    std::vector<Convention> out;
    for (int dc : {252, 360, 365, 366}) {
        for (double days : {59.0, 60.0, 61.0}) out.push_back({dc, days});
    }
    return out;
}

struct ConventionFit {
    Convention convention;
    double max_abs_deviation = 0.0;
    double worst_strike = 0.0;
};

struct ConventionReport {
    std::vector<ConventionFit> ranked;  // ascending deviation
    double tolerance = 0.05;
    bool any_within_tolerance = false;
};

inline ConventionReport convention_search(std::span<const std::pair<double, double>> bs_row,
                                          std::span<const Convention> candidates, double s0,
                                          double sigma, double r) {
    if (bs_row.empty()) throw ConfigError("convention_search: empty BS row");
    if (candidates.empty()) throw ConfigError("convention_search: no candidates");
    ConventionReport report;
    for (const auto& cand : candidates) {
        ConventionFit fit{cand, 0.0, bs_row.front().first};
        const MarketParams m{s0, 0.0, sigma, r, cand.day_count};
        for (const auto& [strike, printed] : bs_row) {
            const double dev = std::abs(bs_price(m, {strike, cand.ttm_years()}) - printed);
            if (dev > fit.max_abs_deviation) {
                fit.max_abs_deviation = dev;
                fit.worst_strike = strike;
            }
        }
        report.ranked.push_back(fit);
    }
    std::stable_sort(report.ranked.begin(), report.ranked.end(),
                     [](const ConventionFit& a, const ConventionFit& b) {
                         return a.max_abs_deviation < b.max_abs_deviation;
                     });
    report.any_within_tolerance = report.ranked.front().max_abs_deviation <= report.tolerance;
    return report;
}

inline RecordTable convention_records(const ConventionReport& report) {
    RecordTable out;
    out.columns = {"rank", "T_days", "day_count", "T_years", "max_abs_deviation", "worst_K",
                   "within_tolerance"};
    std::int64_t rank = 1;
    for (const auto& fit : report.ranked) {
        out.add_row({rank++, fit.convention.t_days, std::int64_t{fit.convention.day_count},
                     fit.convention.ttm_years(), fit.max_abs_deviation, fit.worst_strike,
                     std::string(fit.max_abs_deviation <= report.tolerance ? "yes" : "no")});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Comparison with the published tables

inline std::vector<std::pair<double, double>> published_bs_row(const reference::PublishedTable& pub) {
    std::vector<std::pair<double, double>> row;
    for (std::size_t j = 0; j < pub.strikes.size(); ++j) row.emplace_back(pub.strikes[j], pub.bs_row[j]);
    return row;
}

inline Axis published_mu_axis(const reference::PublishedTable& pub) {
    return Axis::stepped(Param::Mu, pub.mus.front(), pub.mus.back(), 0.02);
}

inline Axis published_k_axis(const reference::PublishedTable& pub) {
    return Axis::stepped(Param::K, pub.strikes.front(), pub.strikes.back(), 2.0);
}

struct CellResidual {
    double mu = 0.0;
    double strike = 0.0;
    double published = 0.0;
    std::optional<double> computed;
    QuoteStatus status = QuoteStatus::Infeasible;
};

struct TableDiscrepancy {
    std::size_t compared_cells = 0;
    std::size_t feasibility_mismatches = 0;
    std::vector<CellResidual> mismatched_cells;
    std::size_t priced_pairs = 0;  // cells with a number on both sides
    double max_abs_residual = 0.0;
    std::optional<CellResidual> worst_cell;
    double bs_row_max_residual = 0.0;
    // Published cells identical to the published BS value while the computed
    // price differs from it by more than a cent.
    std::vector<CellResidual> bs_echo_cells;
};

namespace detail {
inline std::optional<std::size_t> find_close(const std::vector<double>& xs, double x) {
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (std::abs(xs[i] - x) <= 1e-9) return i;
    }
    return std::nullopt;
}
}  // namespace detail

inline TableDiscrepancy compare_to_published(const EquilibriumTable& t,
                                             const reference::PublishedTable& pub) {
    TableDiscrepancy d;
    for (std::size_t j = 0; j < pub.strikes.size(); ++j) {
        if (auto tj = detail::find_close(t.strikes, pub.strikes[j])) {
            d.bs_row_max_residual = std::max(d.bs_row_max_residual, std::abs(t.bs_row[*tj] - pub.bs_row[j]));
        }
    }
    for (std::size_t i = 0; i < pub.mus.size(); ++i) {
        const auto ti = detail::find_close(t.mus, pub.mus[i]);
        if (!ti) continue;
        for (std::size_t j = 0; j < pub.strikes.size(); ++j) {
            const auto tj = detail::find_close(t.strikes, pub.strikes[j]);
            if (!tj) continue;
            const auto& q = t.cells[*ti][*tj];
            const CellResidual cell{pub.mus[i], pub.strikes[j], pub.cells[i][j], q.value, q.status};
            ++d.compared_cells;
            const bool pub_infeasible = pub.infeasible(i, j);
            if (pub_infeasible != (q.status == QuoteStatus::Infeasible)) {
                ++d.feasibility_mismatches;
                d.mismatched_cells.push_back(cell);
                continue;
            }
            if (pub_infeasible) continue;
            ++d.priced_pairs;
            const double residual = std::abs(*q.value - pub.cells[i][j]);
            if (!d.worst_cell || residual > d.max_abs_residual) {
                d.max_abs_residual = residual;
                d.worst_cell = cell;
            }
            if (pub.cells[i][j] == pub.bs_row[j] && std::abs(*q.value - pub.bs_row[j]) > 0.01) {
                d.bs_echo_cells.push_back(cell);
            }
        }
    }
    return d;
}

struct FeasibilityFit {
    Convention convention;
    std::size_t mismatches = 0;
};

/// Infeasible-cell mismatches against each published table, per candidate.
/// Feasibility only depends on (mu, sigma, K, T), so r does not enter.
inline std::vector<FeasibilityFit> feasibility_search(std::span<const reference::PublishedTable> pubs,
                                                      std::span<const Convention> candidates,
                                                      double s0 = 100.0, double sigma = 0.1,
                                                      double r = 0.05) {
    std::vector<FeasibilityFit> out;
    for (const auto& cand : candidates) {
        FeasibilityFit fit{cand, 0};
        for (const auto& pub : pubs) {
            const TableMarket market{s0, sigma, r, cand.t_days, cand.day_count};
            const auto t = make_table(pub.target_p, published_mu_axis(pub), published_k_axis(pub), market);
            fit.mismatches += compare_to_published(t, pub).feasibility_mismatches;
        }
        out.push_back(fit);
    }
    return out;
}

/// Aggregate sign test over rows with mu > 0: counts of priced cells whose
/// equilibrium value lies above / below the BS value, split by moneyness.
struct OrderingTest {
    std::size_t itm_above = 0;
    std::size_t itm_below = 0;
    std::size_t otm_above = 0;
    std::size_t otm_below = 0;

    [[nodiscard]] bool holds() const { return itm_above > itm_below && otm_below > otm_above; }
};

inline OrderingTest ordering_sign_test(const EquilibriumTable& t) {
    OrderingTest o;
    for (std::size_t i = 0; i < t.mus.size(); ++i) {
        if (!(t.mus[i] > 0.0)) continue;
        for (std::size_t j = 0; j < t.strikes.size(); ++j) {
            const auto& q = t.cells[i][j];
            if (!q.value || t.strikes[j] == t.market.s0) continue;
            const double diff = *q.value - t.bs_row[j];
            if (diff == 0.0) continue;
            const bool itm = t.strikes[j] < t.market.s0;
            if (itm) {
                (diff > 0.0 ? o.itm_above : o.itm_below)++;
            } else {
                (diff > 0.0 ? o.otm_above : o.otm_below)++;
            }
        }
    }
    return o;
}

/// Human-readable reproduction report for one generated table.
inline void write_discrepancy_report(std::ostream& os, const EquilibriumTable& t,
                                     const reference::PublishedTable& pub,
                                     const ConventionReport& conventions,
                                     std::span<const FeasibilityFit> feasibility) {
    const auto d = compare_to_published(t, pub);
    const auto ordering = ordering_sign_test(t);
    os << "# reproduction report: target p = " << format_shortest(t.target_p) << "\n";
    os << "run convention: " << Convention{t.market.day_count, t.market.t_days}.label()
       << " (T = " << format_shortest(t.market.ttm_years()) << " years)\n";
    os << "BS row: max |computed - published| = " << format_fixed2(d.bs_row_max_residual) << "\n";
    const auto& best = conventions.ranked.front();
    os << "best BS-row convention: " << best.convention.label()
       << ", max residual = " << format_shortest(best.max_abs_deviation) << " at K = "
       << format_shortest(best.worst_strike)
       << (conventions.any_within_tolerance ? " (within " : " (no candidate within ")
       << format_shortest(conventions.tolerance) << ")\n";
    os << "feasibility pattern mismatches by convention:";
    for (const auto& f : feasibility) os << ' ' << f.convention.label() << '=' << f.mismatches;
    os << "\n";
    os << "cells compared: " << d.compared_cells << ", feasibility mismatches: " << d.feasibility_mismatches
       << "\n";
    for (const auto& c : d.mismatched_cells) {
        os << "  mismatch mu=" << format_fixed2(c.mu) << " K=" << format_fixed2(c.strike) << ": published "
           << (std::isnan(c.published) ? std::string("NaN") : format_fixed2(c.published)) << ", computed "
           << (c.computed ? format_fixed2(*c.computed) : std::string("NaN")) << "\n";
    }
    os << "priced cells compared: " << d.priced_pairs << ", max |residual| = " << format_fixed2(d.max_abs_residual);
    if (d.worst_cell) {
        os << " at mu=" << format_fixed2(d.worst_cell->mu) << " K=" << format_fixed2(d.worst_cell->strike);
    }
    os << "\n";
    os << "published cells equal to the published BS value but not reproduced: " << d.bs_echo_cells.size()
       << "\n";
    os << "ordering sign test (mu > 0): ITM above/below BS = " << ordering.itm_above << "/"
       << ordering.itm_below << ", OTM above/below BS = " << ordering.otm_above << "/" << ordering.otm_below
       << (ordering.holds() ? " -> holds" : " -> does not hold") << "\n";
}

}  // namespace eqp
