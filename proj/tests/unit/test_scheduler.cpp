// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include "robustlink/random.hpp"
#include "robustlink/scheduler.hpp"

using namespace robustlink;
using namespace robustlink::scheduler;
using rate_adapt::make_decision;

TEST_SUITE("scheduler") {

TEST_CASE("expected_rate")
{
    CHECK(expected_rate(make_decision(3.0, 0.0)) == 3.0);
    CHECK(expected_rate(make_decision(3.0, 1.0)) == 0.0);
    CHECK(expected_rate(make_decision(3.0, 0.1)) == doctest::Approx(2.7));
}

TEST_CASE("metric_immediate and select_user")
{
    CHECK(metric_immediate(1.0, 2.0) == doctest::Approx(0.5 * metric_immediate(1.0, 1.0)));
    const std::vector<double> m{metric_immediate(1.0, 0.5), metric_immediate(1.0, 1.0)};
    CHECK(select_user(m) == 0);
    CHECK(select_user(std::vector<double>{0.3, 0.7}) == 1);
    CHECK(select_user(std::vector<double>{0.5, 0.5}) == 0);
    CHECK(select_user(std::vector<double>{4.0}) == 0);
    CHECK_THROWS(select_user(std::vector<double>{}));
    CHECK_THROWS(metric_immediate(1.0, 0.0));

    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.01, 3.0);
    for (int i = 0; i < 200; ++i) {
        std::vector<double> rates(4), t(4), a(4), b(4);
        for (int k = 0; k < 4; ++k) {
            rates[k] = u(rng);
            t[k] = u(rng);
            a[k] = metric_immediate(rates[k], t[k]);
            b[k] = metric_immediate(rates[k], 7.3 * t[k]);
        }
        CHECK(select_user(a) == select_user(b));
    }
}

TEST_CASE("enumerate_outcomes")
{
    const auto none = enumerate_outcomes({});
    REQUIRE(none.size() == 1);
    CHECK(none[0].rate_sum == 0.0);
    CHECK(none[0].probability == 1.0);

    const std::vector<PendingTx> one{{1, 2.0, 0.9, true}};
    const auto o1 = enumerate_outcomes(one);
    REQUIRE(o1.size() == 2);
    CHECK(o1[0].rate_sum == 0.0);
    CHECK(o1[0].probability == doctest::Approx(0.1));
    CHECK(o1[1].rate_sum == 2.0);
    CHECK(o1[1].probability == doctest::Approx(0.9));

    SUBCASE("matches simulated success patterns")
    {
        const std::vector<PendingTx> three{{1, 1.0, 0.9, false}, {2, 2.0, 0.5, false}, {3, 4.0, 0.2, false}};
        const auto outcomes = enumerate_outcomes(three);
        REQUIRE(outcomes.size() == 8);
        std::map<double, long> hist;
        Rng rng(77);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        const long n = 1000000;
        for (long i = 0; i < n; ++i) {
            double d = 0.0;
            for (const auto& tx : three) {
                if (u(rng) < tx.success_prob) {
                    d += tx.rate;
                }
            }
            ++hist[d];
        }
        for (const auto& o : outcomes) {
            const double p = o.probability;
            const double sigma = std::sqrt(p * (1.0 - p) / n);
            CAPTURE(o.rate_sum);
            CHECK(std::abs(static_cast<double>(hist[o.rate_sum]) / n - p) <= 3.0 * sigma);
        }
    }

    SUBCASE("probabilities sum to one")
    {
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int nu = 0; nu <= 20; ++nu) {
            std::vector<PendingTx> p;
            for (int j = 0; j < nu; ++j) {
                p.push_back({j, 5.0 * u(rng), u(rng), false});
            }
            double total = 0.0;
            for (const auto& o : enumerate_outcomes(p)) {
                total += o.probability;
            }
            CAPTURE(nu);
            CHECK(std::abs(total - 1.0) <= 1e-12);
        }
    }

    SUBCASE("cap")
    {
        std::vector<PendingTx> many(23, PendingTx{0, 1.0, 0.5, false});
        CHECK_THROWS_AS(enumerate_outcomes(many), EnumerationLimit);
        CHECK_THROWS_AS(enumerate_outcomes(many, 5), EnumerationLimit);
    }
}

TEST_CASE("metric_delayed")
{
    CHECK(metric_delayed(2.0, std::span<const PendingTx>{}, 10.0) == doctest::Approx(0.2));

    const std::vector<PendingTx> certain{{1, 1.0, 1.0, true}, {2, 3.0, 1.0, true}};
    CHECK(metric_delayed(2.0, certain, 10.0) == doctest::Approx(2.0 / 14.0));

    const std::vector<PendingTx> two{{1, 1.0, 0.9, true}, {2, 2.0, 0.8, true}};
    const double hand = 0.9 * 0.8 / 13.0 + 0.9 * 0.2 / 11.0 + 0.1 * 0.8 / 12.0 + 0.1 * 0.2 / 10.0;
    CHECK(expected_inverse_throughput(two, 10.0) == doctest::Approx(hand).epsilon(1e-15));
    CHECK(metric_delayed(1.5, two, 10.0) == doctest::Approx(1.5 * hand).epsilon(1e-15));

    SUBCASE("enumeration against Monte Carlo for random ledgers")
    {
        std::mt19937_64 rng(9);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        Rng draw_rng(10);
        for (int trial = 0; trial < 100; ++trial) {
            const int nu = static_cast<int>(u(rng) * 11.0);
            std::vector<PendingTx> p;
            for (int j = 0; j < nu; ++j) {
                p.push_back({j, 6.0 * u(rng), u(rng), false});
            }
            const double known = 30.0 + 270.0 * u(rng);
            const double exact = expected_inverse_throughput(p, known);
            double acc = 0.0;
            const int n = 100000;
            for (int i = 0; i < n; ++i) {
                double d = 0.0;
                for (const auto& tx : p) {
                    if (u(draw_rng) < tx.success_prob) {
                        d += tx.rate;
                    }
                }
                acc += 1.0 / (known + d);
            }
            CHECK(std::abs(acc / n - exact) / exact < 1e-3);
        }
    }

    SUBCASE("Monte-Carlo fallback above the cap")
    {
        std::vector<PendingTx> many(24, PendingTx{0, 1.0, 0.5, false});
        CHECK_THROWS_AS(expected_inverse_throughput(many, 10.0), EnumerationLimit);
        Rng rng(4);
        EnumerationOptions opts;
        opts.fallback_draws = 20000;
        const double est = expected_inverse_throughput(many, 10.0, opts, &rng);
        // D ~ Binomial(24, 0.5): E{1/(10 + D)} by direct summation.
        double exact = 0.0;
        for (int k = 0; k <= 24; ++k) {
            exact += std::exp(std::lgamma(25.0) - std::lgamma(k + 1.0) - std::lgamma(25.0 - k) - 24.0 * std::log(2.0)) /
                     (10.0 + k);
        }
        CHECK(est == doctest::Approx(exact).epsilon(1e-2));
        opts.monte_carlo_fallback = false;
        CHECK_THROWS_AS(expected_inverse_throughput(many, 10.0, opts, &rng), EnumerationLimit);
    }
}

TEST_CASE("UserLedger bookkeeping")
{
    SUBCASE("never scheduled stays at the floor")
    {
        UserLedger l(3);
        for (int n = 0; n < 50; ++n) {
            l.advance(5.0, std::nullopt);
        }
        CHECK(l.throughput() == kThroughputFloor);
        CHECK(l.acknowledged_throughput() == kThroughputFloor);
        CHECK(l.pending_count() == 0);
    }
    SUBCASE("arithmetic mean of delivered rates")
    {
        UserLedger l(0);
        CHECK(l.advance(3.0, make_decision(2.0, 0.1)));
        l.advance(3.0, std::nullopt);
        CHECK(l.throughput() == doctest::Approx(1.0));
        CHECK(l.acknowledged_throughput() == doctest::Approx(1.0));
    }
    SUBCASE("rate equal to capacity succeeds")
    {
        UserLedger l(0);
        CHECK(l.advance(2.0, make_decision(2.0, 0.0)));
        CHECK_FALSE(l.advance(2.0, make_decision(2.0 + 1e-12, 0.0)));
    }
    SUBCASE("acknowledgements surface after the delay")
    {
        const int delay = 3;
        UserLedger l(delay);
        for (int n = 1; n <= 10; ++n) {
            l.advance(10.0, make_decision(1.0, 0.0));
            // Scheduling slot n + 1 sees outcomes up to n - delay.
            CHECK(l.acknowledged_slots() == std::max(0, n - delay));
            CHECK(l.pending_count() == std::min(n, delay));
            CHECK(l.pending_count() <= delay);
        }
        CHECK(l.known_sum() == doctest::Approx(7.0));
        CHECK(l.acknowledged_throughput() == doctest::Approx(1.0));
        CHECK(l.throughput() == doctest::Approx(1.0));
    }
    SUBCASE("recursion equals the direct mean at every slot")
    {
        UserLedger l(4);
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> u(0.0, 4.0);
        for (int n = 0; n < 5000; ++n) {
            const double cap = u(rng);
            if (u(rng) < 2.0) {
                l.advance(cap, make_decision(u(rng), 0.2));
            } else {
                l.advance(cap, std::nullopt);
            }
            CHECK(std::abs(l.throughput() - l.direct_throughput()) <= 1e-12);
        }
    }
    CHECK_THROWS(UserLedger(-1));
    CHECK_THROWS(UserLedger(0, 0.0));
}

TEST_CASE("zero-delay delayed metric selects like the immediate metric")
{
    Rng rng(6);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<UserLedger> ledgers(3, UserLedger(0));
    for (int n = 0; n < 10000; ++n) {
        std::vector<double> a(3), b(3), cap(3);
        std::vector<rate_adapt::RateDecision> dec(3);
        for (std::size_t k = 0; k < 3; ++k) {
            dec[k] = make_decision(3.0 * u(rng), 0.1);
            cap[k] = 3.0 * u(rng);
            a[k] = metric_immediate(dec[k].expected_rate, ledgers[k].acknowledged_throughput());
            b[k] = metric_delayed(dec[k].expected_rate, ledgers[k]);
        }
        const auto k_star = select_user(a);
        REQUIRE(k_star == select_user(b));
        for (std::size_t k = 0; k < 3; ++k) {
            ledgers[k].advance(cap[k], k == k_star ? std::optional(dec[k]) : std::nullopt);
        }
    }
}

TEST_CASE("utility")
{
    CHECK(utility(std::vector<double>{1.0}) == 0.0);
    CHECK(utility(std::vector<double>{std::exp(1.0), std::exp(1.0)}) == doctest::Approx(2.0));
    CHECK(utility(std::vector<double>{0.6, 1.4}) + 2.0 * std::log(2.0) ==
          doctest::Approx(utility(std::vector<double>{1.2, 2.8})));
    CHECK_THROWS(utility(std::vector<double>{1.0, 0.0}));
}

}  // TEST_SUITE
