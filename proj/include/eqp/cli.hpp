#pragma once

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "eqp/bs.hpp"
#include "eqp/equilibrium.hpp"
#include "eqp/errors.hpp"
#include "eqp/implied_vol.hpp"
#include "eqp/model.hpp"
#include "eqp/oracle.hpp"
#include "eqp/physical.hpp"
#include "eqp/reference_tables.hpp"
#include "eqp/report.hpp"
#include "eqp/sweep.hpp"

// Command-line front end. Every subcommand parses flags, calls the library and
// renders a RecordTable; no pricing logic lives here.

namespace eqp::cli {

enum ExitCode : int {
    kOk = 0,
    kCheckFailed = 1,
    kDomainError = 2,
    kConvergenceError = 3,
    kUsageError = 64,
};

struct CommonOptions {
    double s0 = 100.0;
    double mu = 0.05;
    double sigma = 0.1;
    double rate = 0.05;
    double strike = 100.0;
    double ttm_days = 60.0;
    int day_count = 365;
    std::string format = "csv";
    std::string out_file;
    std::uint64_t seed = 42;
    std::uint64_t paths = 1'000'000;
    unsigned workers = 1;
    bool antithetic = false;

    [[nodiscard]] MarketParams market() const { return {s0, mu, sigma, rate, day_count}; }
    [[nodiscard]] CallContract contract() const { return {strike, ttm_from_days(ttm_days, day_count)}; }
    [[nodiscard]] TableMarket table_market() const { return {s0, sigma, rate, ttm_days, day_count}; }
    [[nodiscard]] McConfig mc() const { return {paths, seed, antithetic, workers}; }
    [[nodiscard]] OutputFormat output_format() const {
        return format == "json" ? OutputFormat::Json : OutputFormat::Csv;
    }
};

struct AxisOptions {
    double start;
    double stop;
    double step;

    [[nodiscard]] Axis axis(Param p) const { return Axis::stepped(p, start, stop, step); }
};

namespace detail {

inline std::vector<Cell> market_cells(const CommonOptions& o) {
    return {o.s0, o.mu, o.sigma, o.rate, o.strike, o.ttm_days, std::int64_t{o.day_count},
            o.contract().ttm_years};
}

inline std::vector<std::string> market_columns() {
    return {"s0", "mu", "sigma", "r", "K", "T_days", "day_count", "T_years"};
}

inline RecordTable single_row(std::vector<std::string> extra_cols, std::vector<Cell> extra_cells,
                              const CommonOptions& o) {
    RecordTable t;
    t.columns = market_columns();
    t.columns.insert(t.columns.end(), extra_cols.begin(), extra_cols.end());
    auto row = market_cells(o);
    row.insert(row.end(), extra_cells.begin(), extra_cells.end());
    t.add_row(std::move(row));
    return t;
}

inline Cell opt(const std::optional<double>& v) { return v ? Cell{*v} : Cell{}; }

// "name:start:stop:step" or "name:start:stop:nCOUNT".
inline Axis parse_axis_spec(const std::string& spec) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    for (std::string part; std::getline(ss, part, ':');) parts.push_back(part);
    if (parts.size() != 4) throw ConfigError("axis '" + spec + "': expected name:start:stop:step");
    const auto param = parse_param(parts[0]);
    if (!param) throw ConfigError("axis '" + spec + "': unknown parameter " + parts[0]);
    try {
        const double start = std::stod(parts[1]);
        const double stop = std::stod(parts[2]);
        if (!parts[3].empty() && parts[3][0] == 'n') {
            return Axis::counted(*param, start, stop, std::stoul(parts[3].substr(1)));
        }
        return Axis::stepped(*param, start, stop, std::stod(parts[3]));
    } catch (const std::logic_error&) {
        throw ConfigError("axis '" + spec + "': malformed number");
    }
}

// "days/day_count", e.g. 60/365.
inline Convention parse_convention(const std::string& spec) {
    const auto slash = spec.find('/');
    if (slash == std::string::npos) throw ConfigError("candidate '" + spec + "': expected DAYS/DAY_COUNT");
    try {
        return {std::stoi(spec.substr(slash + 1)), std::stod(spec.substr(0, slash))};
    } catch (const std::logic_error&) {
        throw ConfigError("candidate '" + spec + "': malformed number");
    }
}

// "K:value,K:value,..."
inline std::vector<std::pair<double, double>> parse_bs_row(const std::string& spec) {
    std::vector<std::pair<double, double>> row;
    std::stringstream ss(spec);
    for (std::string item; std::getline(ss, item, ',');) {
        const auto colon = item.find(':');
        if (colon == std::string::npos) throw ConfigError("bs-row item '" + item + "': expected K:value");
        try {
            row.emplace_back(std::stod(item.substr(0, colon)), std::stod(item.substr(colon + 1)));
        } catch (const std::logic_error&) {
            throw ConfigError("bs-row item '" + item + "': malformed number");
        }
    }
    return row;
}

inline const reference::PublishedTable* published_for(double target_p) {
    if (target_p == reference::table_p20().target_p) return &reference::table_p20();
    if (target_p == reference::table_p50().target_p) return &reference::table_p50();
    return nullptr;
}

}  // namespace detail

inline RecordTable cmd_price_bs(const CommonOptions& o) {
    const auto [d1, d2] = bs_d1_d2(o.market(), o.contract());
    const double v = bs_price(o.market(), o.contract());
    return detail::single_row({"d1", "d2", "bs_value", "display"}, {d1, d2, v, format_fixed2(v)}, o);
}

inline RecordTable cmd_prob(const CommonOptions& o, std::optional<double> premium, bool use_bs) {
    if (premium.has_value() == use_bs) throw ConfigError("prob: give exactly one of --premium or --use-bs");
    const double c = use_bs ? bs_price(o.market(), o.contract()) : *premium;
    const auto r = prob_positive_return(o.market(), o.contract(), c);
    return detail::single_row({"premium", "p", "n_e1", "n_e2", "e1", "e2"},
                              {c, r.p.value(), r.n_e1.value(), r.n_e2.value(), r.e1, r.e2}, o);
}

inline RecordTable cmd_price_eq(const CommonOptions& o, double target_p) {
    const auto q = equilibrium_price(o.market(), o.contract(), target_p);
    const auto b = no_arb_bounds(o.market(), o.contract());
    return detail::single_row(
        {"target_p", "status", "raw_value", "value", "exercise_p", "lower_bound", "upper_bound", "display"},
        {target_p, std::string(to_string(q.status)), detail::opt(q.raw_value), detail::opt(q.value),
         q.exercise_p.value(), b.lower, b.upper, display_cell(q)},
        o);
}

inline RecordTable cmd_implied_vol(const CommonOptions& o, double price) {
    const double iv = implied_vol(o.market(), o.contract(), price);
    return detail::single_row({"price", "implied_vol"}, {price, iv}, o);
}

inline RecordTable cmd_mc_check(const CommonOptions& o, std::size_t n_configs) {
    const auto checks = run_oracle_suite(sample_oracle_cases(n_configs, o.seed), o.mc());
    RecordTable t;
    t.columns = {"case", "s0", "K", "mu", "sigma", "r", "T_years", "premium", "closed_p", "mc_p",
                 "mc_p_se", "p_within_4se", "closed_bs", "mc_bs", "mc_bs_se", "bs_within_3se"};
    std::int64_t i = 0;
    for (const auto& c : checks) {
        const auto& m = c.input.market;
        t.add_row({i++, m.s0, c.input.contract.strike, m.mu, m.sigma, m.r, c.input.contract.ttm_years,
                   c.input.premium, c.closed_p, c.mc_p.mean, c.mc_p.std_error,
                   std::string(c.p_within ? "yes" : "no"), c.closed_bs, c.mc_bs.mean, c.mc_bs.std_error,
                   std::string(c.bs_within ? "yes" : "no")});
    }
    return t;
}

/// Runs the CLI on argv, writing records to `out` (or --out) and diagnostics to `err`.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
    CLI::App app{"Probability of positive return and equilibrium pricing of European calls"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "key=value file with flag defaults");

    CommonOptions o;
    app.add_option("--s0", o.s0, "spot price")->capture_default_str();
    app.add_option("--mu", o.mu, "growth rate per year")->capture_default_str();
    app.add_option("--sigma", o.sigma, "volatility per year")->capture_default_str();
    app.add_option("--rate", o.rate, "riskless rate per year")->capture_default_str();
    app.add_option("--strike", o.strike, "strike price")->capture_default_str();
    app.add_option("--ttm-days", o.ttm_days, "time to expiration in days")->capture_default_str();
    app.add_option("--day-count", o.day_count, "days per year (252, 360, 365, 366)")
        ->envname("EQP_DAY_COUNT")
        ->capture_default_str();
    app.add_option("--format", o.format, "output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    app.add_option("--out", o.out_file, "write records to FILE instead of stdout");
    app.add_option("--seed", o.seed, "Monte Carlo seed")->capture_default_str();
    app.add_option("--paths", o.paths, "Monte Carlo paths")->capture_default_str();
    app.add_option("--workers", o.workers, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
    app.add_flag("--antithetic", o.antithetic, "antithetic Monte Carlo draws");

    auto* price_bs = app.add_subcommand("price-bs", "Black-Scholes call value");

    auto* prob = app.add_subcommand("prob", "probability of positive return");
    std::optional<double> premium;
    bool use_bs = false;
    auto* premium_opt = prob->add_option("--premium", premium, "premium paid for the call");
    prob->add_flag("--use-bs", use_bs, "use the Black-Scholes value as premium")->excludes(premium_opt);

    auto* price_eq = app.add_subcommand("price-eq", "equilibrium price at a target probability");
    double eq_target = 0.0;
    price_eq->add_option("--target-p", eq_target, "target probability of positive return")->required();

    auto* iv = app.add_subcommand("implied-vol", "Black-Scholes implied volatility of a price");
    double iv_price = 0.0;
    iv->add_option("--price", iv_price, "call price")->required();

    auto* table = app.add_subcommand("table", "equilibrium-price table over growth rates and strikes");
    double table_target = 0.2;
    std::string layout = "long";
    std::string report_file;
    AxisOptions table_mu{-0.25, 0.25, 0.02};
    AxisOptions table_k{80.0, 112.0, 2.0};
    table->add_option("--target-p", table_target, "target probability")->capture_default_str();
    table->add_option("--layout", layout, "long (one row per cell) or grid (printed layout)")
        ->check(CLI::IsMember({"long", "grid"}))
        ->capture_default_str();
    table->add_option("--report", report_file, "write the reproduction report to FILE (default: stderr)");
    table->add_option("--mu-start", table_mu.start)->capture_default_str();
    table->add_option("--mu-stop", table_mu.stop)->capture_default_str();
    table->add_option("--mu-step", table_mu.step)->capture_default_str();
    table->add_option("--k-start", table_k.start)->capture_default_str();
    table->add_option("--k-stop", table_k.stop)->capture_default_str();
    table->add_option("--k-step", table_k.step)->capture_default_str();

    auto* scan = app.add_subcommand("scan", "market-factor compositions above a probability threshold");
    double threshold = 0.5;
    std::string preset = "rates";
    std::vector<std::string> axis_specs;
    scan->add_option("--threshold", threshold, "probability threshold")->capture_default_str();
    scan->add_option("--preset", preset, "rates, vols or expiries")
        ->check(CLI::IsMember({"rates", "vols", "expiries"}))
        ->capture_default_str();
    scan->add_option("--axis", axis_specs,
                     "custom axis name:start:stop:step (or :nCOUNT); other parameters come from the common flags");

    auto* surface = app.add_subcommand("surface", "implied volatilities of equilibrium prices");
    double surface_target = 0.5;
    AxisOptions surface_mu{-0.1, 0.25, 0.01};
    AxisOptions surface_k{80.0, 120.0, 2.0};
    surface->add_option("--target-p", surface_target, "target probability")->capture_default_str();
    surface->add_option("--mu-start", surface_mu.start)->capture_default_str();
    surface->add_option("--mu-stop", surface_mu.stop)->capture_default_str();
    surface->add_option("--mu-step", surface_mu.step)->capture_default_str();
    surface->add_option("--k-start", surface_k.start)->capture_default_str();
    surface->add_option("--k-stop", surface_k.stop)->capture_default_str();
    surface->add_option("--k-step", surface_k.step)->capture_default_str();

    auto* conv = app.add_subcommand("convention-search", "rank day-count conventions against a BS row");
    std::vector<std::string> candidate_specs;
    std::string bs_row_spec;
    conv->add_option("--candidate", candidate_specs, "DAYS/DAY_COUNT, repeatable (default: 59-61 x 252/360/365/366)");
    conv->add_option("--bs-row", bs_row_spec, "K:value,... (default: the published BS row)");

    auto* mc_check = app.add_subcommand("mc-check", "closed forms against Monte Carlo on random configurations");
    std::size_t n_configs = 20;
    mc_check->add_option("--configs", n_configs, "number of random configurations")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsageError;
    }
    // checked here rather than with a validator so EQP_DAY_COUNT is covered too
    if (!is_supported_day_count(o.day_count)) {
        err << "error: day count must be one of 252, 360, 365, 366 (got " << o.day_count << ")\n";
        return kUsageError;
    }

    std::ofstream file;
    if (!o.out_file.empty()) {
        file.open(o.out_file, std::ios::binary);
        if (!file) {
            err << "error: cannot open " << o.out_file << " for writing\n";
            return kUsageError;
        }
    }
    std::ostream& sink = o.out_file.empty() ? out : file;

    try {
        int status = kOk;
        RecordTable records;
        if (*price_bs) {
            records = cmd_price_bs(o);
        } else if (*prob) {
            records = cmd_prob(o, premium, use_bs);
        } else if (*price_eq) {
            records = cmd_price_eq(o, eq_target);
        } else if (*iv) {
            records = cmd_implied_vol(o, iv_price);
        } else if (*table) {
            const auto t = make_table(table_target, table_mu.axis(Param::Mu), table_k.axis(Param::K),
                                      o.table_market(), o.workers);
            records = layout == "grid" ? table_grid(t) : table_records(t);
            if (const auto* pub = detail::published_for(table_target)) {
                const auto candidates = default_conventions();
                const auto bs_row = published_bs_row(*pub);
                const auto conventions = convention_search(bs_row, candidates, o.s0, o.sigma, o.rate);
                const std::vector<reference::PublishedTable> pubs{*pub};
                const auto feasibility = feasibility_search(pubs, candidates, o.s0, o.sigma, o.rate);
                if (report_file.empty()) {
                    write_discrepancy_report(err, t, *pub, conventions, feasibility);
                } else {
                    std::ofstream rep(report_file, std::ios::binary);
                    if (!rep) throw ConfigError("cannot open report file " + report_file);
                    write_discrepancy_report(rep, t, *pub, conventions, feasibility);
                }
            }
        } else if (*scan) {
            SweepGrid grid;
            if (axis_specs.empty()) {
                grid = composition_preset(preset);
            } else {
                for (const auto& spec : axis_specs) grid.axes.push_back(detail::parse_axis_spec(spec));
                const GridPoint defaults{o.s0, o.strike, o.mu, o.rate, o.sigma, o.ttm_days, o.day_count, {}};
                for (Param p : {Param::S0, Param::K, Param::Mu, Param::R, Param::Sigma, Param::TDays}) {
                    const bool swept = std::any_of(grid.axes.begin(), grid.axes.end(),
                                                   [&](const Axis& a) { return a.param == p; });
                    if (!swept) grid.fixed[p] = defaults.get(p);
                }
            }
            grid.day_count = o.day_count;
            records = scan_records(scan_compositions(grid, threshold, o.workers));
        } else if (*surface) {
            records = surface_records(make_surface(surface_target, surface_mu.axis(Param::Mu),
                                                   surface_k.axis(Param::K), o.table_market(), o.workers));
        } else if (*conv) {
            std::vector<Convention> candidates;
            for (const auto& spec : candidate_specs) candidates.push_back(detail::parse_convention(spec));
            if (candidates.empty()) candidates = default_conventions();
            const auto bs_row =
                bs_row_spec.empty() ? published_bs_row(reference::table_p20()) : detail::parse_bs_row(bs_row_spec);
            records = convention_records(convention_search(bs_row, candidates, o.s0, o.sigma, o.rate));
        } else if (*mc_check) {
            records = cmd_mc_check(o, n_configs);
            for (const auto& row : records.rows) {
                if (std::get<std::string>(row[11]) != "yes" || std::get<std::string>(row[15]) != "yes") {
                    status = kCheckFailed;
                }
            }
            if (status != kOk) err << "mc-check: closed form outside the Monte Carlo allowance\n";
        }
        write_records(sink, records, o.output_format());
        return status;
    } catch (const ConfigError& e) {
        err << "configuration error: " << e.what() << "\n";
        return kUsageError;
    } catch (const DomainError& e) {
        err << "domain error: " << e.what() << "\n";
        return kDomainError;
    } catch (const BracketError& e) {
        err << "convergence error: " << e.what() << "\n";
        return kConvergenceError;
    } catch (const ConvergenceError& e) {
        err << "convergence error: " << e.what() << "\n";
        return kConvergenceError;
    }
}

}  // namespace eqp::cli
