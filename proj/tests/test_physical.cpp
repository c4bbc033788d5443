#include "eqp/bs.hpp"
#include "eqp/oracle.hpp"
#include "eqp/physical.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace eqp {
namespace {

TEST(ProbPositiveReturn, ZeroPremiumSquaresExerciseProbability) {
    const MarketParams m{100.0, 0.08, 0.2, 0.03, 365};
    const CallContract c{105.0, 0.5};
    const auto r = prob_positive_return(m, c, 0.0);
    EXPECT_EQ(r.e1, r.e2);
    EXPECT_EQ(r.p.value(), norm_cdf(r.e1).value() * norm_cdf(r.e1).value());
}

TEST(ProbPositiveReturn, AtTheMoneyDriftlessIsQuarter) {
    const MarketParams m{100.0, 0.005, 0.1, 0.05, 365};  // mu = sigma^2 / 2
    const auto r = prob_positive_return(m, {100.0, 60.0 / 365.0}, 0.0);
    EXPECT_NEAR(r.p.value(), 0.25, 1e-15);
}

TEST(ProbPositiveReturn, FactorizationIsExact) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 2000; ++i) {
        const MarketParams m{50 + 150 * u(rng), -0.3 + 0.6 * u(rng), 0.05 + 0.45 * u(rng), 0.1 * u(rng), 365};
        const CallContract c{m.s0 * (0.7 + 0.6 * u(rng)), 0.02 + 0.98 * u(rng)};
        const double premium = 20.0 * u(rng);
        const auto r = prob_positive_return(m, c, premium);
        EXPECT_EQ(r.p.value(), r.n_e1.value() * r.n_e2.value());
        EXPECT_LE(r.e2, r.e1);
    }
}

TEST(ProbPositiveReturn, NegativePremiumRejected) {
    EXPECT_THROW(prob_positive_return({}, {}, -0.01), DomainError);
    EXPECT_THROW(prob_positive_return({}, {}, std::nan("")), DomainError);
}

TEST(ProbPositiveReturn, AgreesWithMonteCarloAtBsPremium) {
    const MarketParams m{100.0, 0.1, 0.1, 0.05, 365};
    const CallContract c{100.0, 0.25};
    const double premium = bs_price(m, c);
    const double closed = prob_positive_return(m, c, premium).p.value();
    const auto mc = mc_prob_positive_return(m, c, premium, {10'000'000, 2718, false, 1});
    EXPECT_LE(std::abs(closed - mc.mean), 4.0 * mc.std_error)
        << "closed " << closed << " mc " << mc.mean << " se " << mc.std_error;
}

TEST(ExerciseProbability, HalfWhenScoreIsZero) {
    const MarketParams m{100.0, 0.12, 0.25, 0.05, 365};
    const double t = 0.75;
    const double strike = m.s0 / std::exp(-(m.mu - 0.5 * m.sigma * m.sigma) * t);
    EXPECT_NEAR(exercise_probability(m, {strike, t}).value(), 0.5, 1e-14);
}

TEST(ExerciseProbability, LargeGrowthLimit) {
    EXPECT_EQ(exercise_probability({100.0, 1e3, 0.1, 0.05, 365}, {150.0, 1.0}).value(), 1.0);
}

TEST(ExerciseProbability, EqualsFirstFactor) {
    const MarketParams m{90.0, -0.1, 0.3, 0.02, 365};
    const CallContract c{95.0, 0.4};
    EXPECT_EQ(exercise_probability(m, c).value(), prob_positive_return(m, c, 0.0).n_e1.value());
}

TEST(ExerciseProbability, AgreesWithMonteCarlo) {
    const MarketParams m{100.0, 0.05, 0.1, 0.05, 365};
    const CallContract c{96.0, 60.0 / 365.0};
    const auto mc = mc_exercise_probability(m, c, {10'000'000, 31415, false, 1});
    EXPECT_LE(std::abs(exercise_probability(m, c).value() - mc.mean), 4.0 * mc.std_error);
}

// Monotonicity on random pairwise perturbations, restricted to configurations
// where p is resolvable in double precision (not saturated at 0 or 1).
class Monotonicity : public ::testing::Test {
protected:
    std::mt19937_64 rng{77};
    std::uniform_real_distribution<double> u{0.0, 1.0};

    struct Draw {
        MarketParams m;
        CallContract c;
        double premium;
    };

    Draw draw() {
        for (;;) {
            Draw d{{50 + 150 * u(rng), -0.3 + 0.6 * u(rng), 0.05 + 0.45 * u(rng), 0.1 * u(rng), 365},
                   {0.0, 0.02 + 0.98 * u(rng)},
                   0.0};
            d.c.strike = d.m.s0 * (0.7 + 0.6 * u(rng));
            d.premium = bs_price(d.m, d.c) * (0.5 + u(rng));
            const double p = prob(d);
            if (p > 1e-6 && p < 1.0 - 1e-6 && d.premium > 0.0) return d;
        }
    }
    static double prob(const Draw& d) { return prob_positive_return(d.m, d.c, d.premium).p.value(); }
    double bump() { return 1.0 + 0.01 + 0.09 * u(rng); }
};

TEST_F(Monotonicity, StrictlyDecreasingInPremium) {
    for (int i = 0; i < 1000; ++i) {
        auto d = draw();
        const double p0 = prob(d);
        d.premium *= bump();
        EXPECT_LT(prob(d), p0);
    }
}

TEST_F(Monotonicity, StrictlyDecreasingInStrike) {
    for (int i = 0; i < 1000; ++i) {
        auto d = draw();
        const double p0 = prob(d);
        d.c.strike *= bump();
        EXPECT_LT(prob(d), p0);
    }
}

TEST_F(Monotonicity, StrictlyDecreasingInRate) {
    for (int i = 0; i < 1000; ++i) {
        auto d = draw();
        const double p0 = prob(d);
        d.m.r += 0.01 + 0.04 * u(rng);
        EXPECT_LT(prob(d), p0);
    }
}

TEST_F(Monotonicity, StrictlyIncreasingInGrowthRate) {
    for (int i = 0; i < 1000; ++i) {
        auto d = draw();
        const double p0 = prob(d);
        d.m.mu += 0.01 + 0.09 * u(rng);
        EXPECT_GT(prob(d), p0);
    }
}

TEST_F(Monotonicity, StrictlyIncreasingInSpot) {
    for (int i = 0; i < 1000; ++i) {
        auto d = draw();
        const double p0 = prob(d);
        d.m.s0 *= bump();
        EXPECT_GT(prob(d), p0);
    }
}

TEST_F(Monotonicity, DecreasingInVolatilityWhereBothScoresHavePositiveNumerators) {
    int checked = 0;
    while (checked < 1000) {
        auto d = draw();
        const double t = d.c.ttm_years;
        const double hurdle = d.c.strike + d.premium * std::exp(d.m.r * t);
        if (!(std::log(d.m.s0 / d.c.strike) + d.m.mu * t > 0.0 && std::log(d.m.s0 / hurdle) + d.m.mu * t > 0.0)) {
            continue;
        }
        const double p0 = prob(d);
        d.m.sigma *= bump();
        EXPECT_LT(prob(d), p0);
        ++checked;
    }
}

TEST(MonotonicityCounterexample, VolatilityCanRaiseProbabilityDeepOutOfTheMoney) {
    // ln(S0/K) + mu T < 0: a larger sigma widens the law and lifts both tails.
    MarketParams m{100.0, -0.3, 0.05, 0.05, 365};
    const CallContract c{130.0, 0.25};
    const double low = prob_positive_return(m, c, 0.01).p.value();
    m.sigma = 0.3;
    EXPECT_GT(prob_positive_return(m, c, 0.01).p.value(), low);
}

}  // namespace
}  // namespace eqp
