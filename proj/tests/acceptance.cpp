// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "eqp/cli.hpp"
#include "eqp/eqp.hpp"

using namespace eqp;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass = false;
    std::string detail;
    std::vector<std::string> notes;  // informational lines printed under the verdict
};

unsigned workers() { return std::max(1u, std::thread::hardware_concurrency()); }

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

// Criterion-1 style configuration.
struct Config {
    MarketParams m;
    CallContract c;
};

Config draw_config(SplitMix64& rng) {
    Config x;
    x.m.s0 = rng.uniform(50.0, 200.0);
    x.m.mu = rng.uniform(-0.3, 0.3);
    x.m.sigma = rng.uniform(0.05, 0.5);
    x.m.r = rng.uniform(0.0, 0.1);
    x.c.strike = x.m.s0 * rng.uniform(0.7, 1.3);
    x.c.ttm_years = rng.uniform(0.02, 1.0);
    return x;
}

Outcome round_trip_identity() {
    SplitMix64 rng(1001);
    int accepted = 0, skipped = 0;
    double worst = 0.0;
    while (accepted < 10000) {
        const Config x = draw_config(rng);
        const double ex = exercise_probability(x.m, x.c).value();
        const double target = ex * rng.uniform();
        if (!(target > 0.0)) {
            ++skipped;
            continue;
        }
        const auto q = equilibrium_price(x.m, x.c, target);
        if (q.status != QuoteStatus::Priced) {
            ++skipped;
            continue;
        }
        ++accepted;
        worst = std::max(worst, std::abs(prob_positive_return(x.m, x.c, *q.value).p.value() - target));
    }
    return {worst <= 1e-9,
            "max |p(C(p)) - p| = " + fmt("%.3g", worst) + " over 10000 priced configurations (tol 1e-9)",
            {"draws without Priced status skipped: " + std::to_string(skipped)}};
}

Outcome oracle_equivalence() {
    const auto cases = sample_oracle_cases(20, 2718);
    const McConfig cfg{10'000'000, 314159, false, workers()};
    const auto checks = run_oracle_suite(cases, cfg);
    int p_ok = 0, bs_ok = 0;
    double worst_p = 0.0, worst_bs = 0.0;
    for (const auto& ch : checks) {
        p_ok += ch.p_within;
        bs_ok += ch.bs_within;
        if (ch.mc_p.std_error > 0) worst_p = std::max(worst_p, std::abs(ch.closed_p - ch.mc_p.mean) / ch.mc_p.std_error);
        if (ch.mc_bs.std_error > 0) worst_bs = std::max(worst_bs, std::abs(ch.closed_bs - ch.mc_bs.mean) / ch.mc_bs.std_error);
    }
    Outcome o;
    o.pass = p_ok == 20 && bs_ok == 20;
    o.detail = "p within 4 SE: " + std::to_string(p_ok) + "/20 (worst " + fmt("%.2f", worst_p) +
               " SE); BS within 3 SE: " + std::to_string(bs_ok) + "/20 (worst " + fmt("%.2f", worst_bs) +
               " SE); 1e7 paths each";

    // The single-terminal-price payoff event, estimated on the same cases.
    int near_e2 = 0, near_p = 0;
    for (std::size_t i = 0; i < cases.size(); ++i) {
        const auto& oc = cases[i];
        const auto est = mc_joint_positive_return(oc.market, oc.contract, oc.premium,
                                                  {1'000'000, 4242 + i, false, workers()});
        const auto closed = prob_positive_return(oc.market, oc.contract, oc.premium);
        near_e2 += std::abs(est.mean - closed.n_e2.value()) <= 4 * est.std_error;
        near_p += std::abs(est.mean - closed.p.value()) <= 4 * est.std_error;
    }
    o.notes.push_back("single-path event {(S_T-K)^+ >= C e^{rT}} at 1e6 paths: within 4 SE of N(e2) in " +
                      std::to_string(near_e2) + "/20 cases, of N(e1)N(e2) in " + std::to_string(near_p) + "/20");
    return o;
}

Outcome premium_monotonicity() {
    SplitMix64 rng(3003);
    int checked = 0, violations = 0, unresolved = 0;
    while (checked < 1000) {
        const Config x = draw_config(rng);
        const double ex = exercise_probability(x.m, x.c).value();
        double p1 = ex * rng.uniform(), p2 = ex * rng.uniform();
        if (p1 > p2) std::swap(p1, p2);
        // targets closer than 1e-6 of the ceiling can map to the same double price
        if (!(p1 > 0.0) || !(p2 - p1 > 1e-6 * ex)) {
            ++unresolved;
            continue;
        }
        ++checked;
        const auto q1 = equilibrium_price(x.m, x.c, p1);
        const auto q2 = equilibrium_price(x.m, x.c, p2);
        if (!(*q1.raw_value > *q2.raw_value)) ++violations;
    }
    return {violations == 0,
            "raw C(p1) > C(p2) strictly in " + std::to_string(1000 - violations) + "/1000 feasible pairs",
            {"pairs with p2 - p1 <= 1e-6 N(e1) redrawn: " + std::to_string(unresolved)}};
}

Outcome probability_monotonicity() {
    SplitMix64 rng(4004);
    struct Draw {
        Config x;
        double premium;
    };
    int saturated = 0;
    auto draw = [&]() {
        for (;;) {
            Draw d{draw_config(rng), 0.0};
            d.premium = bs_price(d.x.m, d.x.c) * rng.uniform(0.5, 1.5);
            const double p = prob_positive_return(d.x.m, d.x.c, d.premium).p.value();
            if (d.premium > 0.0 && p > 1e-6 && p < 1.0 - 1e-6) return d;
            ++saturated;
        }
    };
    auto prob = [](const Draw& d) { return prob_positive_return(d.x.m, d.x.c, d.premium).p.value(); };
    auto bump = [&]() { return 1.0 + rng.uniform(0.01, 0.1); };

    struct Direction {
        const char* name;
        int sign;  // -1: p must fall, +1: p must rise
        std::function<void(Draw&)> perturb;
    };
    const std::vector<Direction> dirs{
        {"premium", -1, [&](Draw& d) { d.premium *= bump(); }},
        {"K", -1, [&](Draw& d) { d.x.c.strike *= bump(); }},
        {"r", -1, [&](Draw& d) { d.x.m.r += rng.uniform(0.01, 0.05); }},
        {"mu", +1, [&](Draw& d) { d.x.m.mu += rng.uniform(0.01, 0.1); }},
        {"S0", +1, [&](Draw& d) { d.x.m.s0 *= bump(); }},
    };
    std::string detail;
    bool pass = true;
    for (const auto& dir : dirs) {
        int ok = 0;
        for (int i = 0; i < 1000; ++i) {
            Draw d = draw();
            const double p0 = prob(d);
            dir.perturb(d);
            const double p1 = prob(d);
            ok += dir.sign < 0 ? p1 < p0 : p1 > p0;
        }
        pass = pass && ok == 1000;
        detail += std::string(dir.name) + " " + std::to_string(ok) + "/1000; ";
    }
    int sigma_ok = 0, sigma_checked = 0, outside = 0;
    while (sigma_checked < 1000) {
        Draw d = draw();
        const double t = d.x.c.ttm_years;
        const double hurdle = d.x.c.strike + d.premium * std::exp(d.x.m.r * t);
        if (!(std::log(d.x.m.s0 / d.x.c.strike) + d.x.m.mu * t > 0.0 &&
              std::log(d.x.m.s0 / hurdle) + d.x.m.mu * t > 0.0)) {
            ++outside;
            continue;
        }
        ++sigma_checked;
        const double p0 = prob(d);
        d.x.m.sigma *= bump();
        sigma_ok += prob(d) < p0;
    }
    pass = pass && sigma_ok == 1000;
    detail += "sigma (restricted regime) " + std::to_string(sigma_ok) + "/1000";
    return {pass, detail,
            {"draws with p within 1e-6 of 0 or 1 redrawn: " + std::to_string(saturated),
             "sigma draws outside the restricted regime skipped: " + std::to_string(outside)}};
}

Outcome implied_vol_round_trip() {
    SplitMix64 rng(5005);
    int checked = 0, unidentifiable = 0, failures = 0;
    double worst = 0.0;
    while (checked < 1000) {
        MarketParams m;
        m.s0 = rng.uniform(50.0, 200.0);
        m.mu = rng.uniform(-0.3, 0.3);
        m.sigma = rng.uniform(0.01, 2.0);
        m.r = rng.uniform(0.0, 0.1);
        const CallContract c{m.s0 * rng.uniform(0.7, 1.3), rng.uniform(0.02, 1.0)};
        const double price = bs_price(m, c);
        // sigma is only determined to 1e-7 if moving it that far moves the price
        // well above double resolution
        MarketParams bumped = m;
        bumped.sigma += 1e-7;
        if (!(bs_price(bumped, c) - price > 1e-13 * m.s0)) {
            ++unidentifiable;
            continue;
        }
        ++checked;
        try {
            const double err = std::abs(implied_vol(m, c, price) - m.sigma);
            worst = std::max(worst, err);
            failures += err > 1e-7;
        } catch (const std::exception&) {
            ++failures;
        }
    }
    return {failures == 0,
            "max |iv - sigma| = " + fmt("%.3g", worst) + ", failures " + std::to_string(failures) +
                "/1000 (tol 1e-7)",
            {"draws whose price does not pin sigma to 1e-7 (BS(sigma+1e-7) - BS(sigma) <= 1e-13 S0) redrawn: " +
             std::to_string(unidentifiable)}};
}

Outcome table_reproduction() {
    Outcome o;
    bool pass = true;
    const std::vector<reference::PublishedTable> pubs{reference::table_p20(), reference::table_p50()};
    for (const auto& pub : pubs) {
        const std::string target = pub.target_p == 0.2 ? "0.2" : "0.5";
        const char* argv[] = {"eqp", "table", "--target-p", target.c_str(), "--workers", "1"};
        std::ostringstream out, err;
        const int code = cli::run(6, argv, out, err);
        const bool reported = err.str().find("best BS-row convention") != std::string::npos;
        pass = pass && code == 0 && reported;

        const auto t = make_table(pub.target_p, published_mu_axis(pub), published_k_axis(pub), TableMarket{});
        const auto ordering = ordering_sign_test(t);
        pass = pass && ordering.holds();
        o.notes.push_back("p=" + target + ": ordering ITM above/below " + std::to_string(ordering.itm_above) + "/" +
                          std::to_string(ordering.itm_below) + ", OTM above/below " +
                          std::to_string(ordering.otm_above) + "/" + std::to_string(ordering.otm_below) +
                          (reported ? ", discrepancy report emitted" : ", NO discrepancy report"));
        std::istringstream lines(err.str());
        for (std::string line; std::getline(lines, line);) {
            if (line.rfind("best BS-row", 0) == 0 || line.rfind("priced cells", 0) == 0) {
                o.notes.push_back("  " + line);
            }
        }
    }
    const auto cands = default_conventions();
    const auto fits = feasibility_search(pubs, cands);
    std::string exact;
    for (const auto& f : fits) {
        if (f.mismatches == 0) exact += (exact.empty() ? "" : ", ") + f.convention.label();
    }
    pass = pass && !exact.empty();
    o.pass = pass;
    o.detail = "NaN pattern of both tables reproduced exactly under: " + (exact.empty() ? std::string("none") : exact) +
               "; ordering sign test over mu > 0 rows holds for both";
    return o;
}

Outcome composition_property() {
    std::vector<SweepRecord> hits;
    bool pass = true;
    std::size_t bad = 0;
    for (const char* name : {"rates", "vols", "expiries"}) {
        auto found = scan_compositions(composition_preset(name), 0.5, workers());
        for (const auto& r : found) bad += r.inputs.mu < 0.0 && r.inputs.strike >= r.inputs.s0;
        hits.insert(hits.end(), found.begin(), found.end());
    }
    pass = bad == 0 && hits.size() >= 100;
    SplitMix64 rng(7007);
    int within = 0;
    for (int i = 0; i < 100; ++i) {
        const auto& rec = hits[rng.next() % hits.size()];
        const auto est = mc_prob_positive_return(rec.inputs.market(), rec.inputs.contract(), rec.bs_value,
                                                 {1'000'000, 9000 + static_cast<std::uint64_t>(i), false, workers()});
        within += within_sigmas(rec.p_of_bs.value(), est, 4.0);
    }
    pass = pass && within == 100;
    return {pass,
            std::to_string(hits.size()) + " qualifying points, " + std::to_string(bad) +
                " with mu < 0 and K >= S0; MC (1e6 paths) within 4 SE at " + std::to_string(within) + "/100 sampled points",
            {}};
}

Outcome surface_property() {
    const auto s = make_surface(0.5, Axis::stepped(Param::Mu, -0.1, 0.25, 0.01), Axis::stepped(Param::K, 80.0, 120.0, 2.0),
                                TableMarket{}, workers());
    double max_iv = 0.0;
    for (const auto& row : s.cells) {
        for (const auto& c : row) {
            if (c.implied_vol) max_iv = std::max(max_iv, *c.implied_vol);
        }
    }
    double lo = INFINITY, hi = -INFINITY;
    int solved = 0;
    for (const auto& c : s.cells.back()) {
        if (!c.implied_vol) continue;
        ++solved;
        lo = std::min(lo, *c.implied_vol);
        hi = std::max(hi, *c.implied_vol);
    }
    const bool non_constant = solved >= 2 && hi - lo > 1e-6;
    return {max_iv > 0.11 && non_constant,
            "max implied vol " + fmt("%.4f", max_iv) + " (needs > 0.11); mu=0.25 row: " + std::to_string(solved) +
                " solved cells spanning [" + fmt("%.4f", lo) + ", " + fmt("%.4f", hi) + "]",
            {}};
}

std::string cli_output(std::vector<std::string> args) {
    args.insert(args.begin(), "eqp");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return std::to_string(code) + "\n" + out.str();
}

Outcome determinism() {
    const std::vector<std::vector<std::string>> commands{
        {"price-bs"},
        {"prob", "--use-bs", "--mu", "0.1"},
        {"price-eq", "--target-p", "0.2"},
        {"implied-vol", "--price", "3"},
        {"table", "--target-p", "0.2", "--report", "/dev/null"},
        {"table", "--target-p", "0.5", "--layout", "grid", "--report", "/dev/null"},
        {"scan", "--preset", "rates"},
        {"scan", "--preset", "vols"},
        {"scan", "--preset", "expiries"},
        {"surface"},
        {"convention-search"},
        {"mc-check", "--configs", "4", "--paths", "300000", "--seed", "11"},
        {"mc-check", "--configs", "2", "--paths", "200001", "--seed", "12", "--antithetic"},
    };
    int identical = 0;
    std::string differing;
    for (const auto& cmd : commands) {
        std::vector<std::string> outputs;
        for (const char* w : {"1", "1", "3", "4"}) {
            auto args = cmd;
            args.insert(args.end(), {"--workers", w});
            outputs.push_back(cli_output(args));
        }
        const bool same = std::all_of(outputs.begin(), outputs.end(), [&](const std::string& s) { return s == outputs[0]; });
        identical += same;
        if (!same) differing += " " + cmd[0];
    }
    return {identical == static_cast<int>(commands.size()),
            std::to_string(identical) + "/" + std::to_string(commands.size()) +
                " commands byte-identical across repeated runs and 1/3/4 workers" +
                (differing.empty() ? "" : "; differing:" + differing),
            {}};
}

struct Criterion {
    int id;
    const char* name;
    double limit_s;  // 0: no runtime limit
    Outcome (*run)();
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "round-trip identity", 5.0, round_trip_identity},
        {2, "closed form vs Monte Carlo oracle", 120.0, oracle_equivalence},
        {3, "price strictly decreasing in target probability", 0.0, premium_monotonicity},
        {4, "probability monotonicity", 0.0, probability_monotonicity},
        {5, "implied-vol round trip", 0.0, implied_vol_round_trip},
        {6, "table reproduction (feasibility pattern, ordering)", 10.0, table_reproduction},
        {7, "negative growth keeps p below 1/2 out of the money", 60.0, composition_property},
        {8, "implied-vol surface is not flat", 10.0, surface_property},
        {9, "determinism across runs and worker counts", 0.0, determinism},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto start = Clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what(), {}};
        }
        const double secs = std::chrono::duration<double>(Clock::now() - start).count();
        const bool in_time = c.limit_s == 0.0 || secs < c.limit_s;
        const bool pass = o.pass && in_time;
        failed += !pass;
        std::printf("[%s] %d %s: %s; %.2f s%s\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs,
                    c.limit_s > 0 ? (" (limit " + fmt("%g", c.limit_s) + " s)").c_str() : "");
        for (const auto& n : o.notes) std::printf("       %s\n", n.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
