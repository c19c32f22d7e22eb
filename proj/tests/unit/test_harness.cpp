// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "oracles.hpp"
#include "robustlink/channel.hpp"
#include "robustlink/harness.hpp"
#include "robustlink/scheduler.hpp"

using namespace robustlink;
using namespace robustlink::harness;

namespace {

SimConfig small_config()
{
    SimConfig cfg;
    cfg.drops = 6;
    cfg.slots = 60;
    cfg.delays = {0, 4, 10};
    cfg.snr_edge_db = {5.0};
    cfg.seed = 42;
    return cfg;
}

std::string csv_of(const ExperimentResult& r)
{
    std::ostringstream ss;
    write_metrics_csv(r.rows, ss);
    return ss.str();
}

const MetricsRow& find_row(const ExperimentResult& r, const std::string& scheme, int delay)
{
    for (const auto& row : r.rows) {
        if (row.scheme == scheme && row.delay == delay) {
            return row;
        }
    }
    throw std::runtime_error("row not found: " + scheme);
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("calibrate_power puts the edge SNR at the target")
{
    SimConfig cfg;
    for (double snr : {5.0, 10.0}) {
        const double rho = calibrate_power(cfg, snr);
        const double edge = channel::pathloss(cfg.radius_m, cfg.pathloss_exponent, cfg.pathloss_intercept);
        CHECK(10.0 * std::log10(rho * edge) == doctest::Approx(snr));
    }
    CHECK(calibrate_power(cfg, 10.0) / calibrate_power(cfg, 5.0) == doctest::Approx(std::pow(10.0, 0.5)));
}

TEST_CASE("drop_users")
{
    SimConfig cfg;
    cfg.users = 1;
    SUBCASE("uniform over the disc")
    {
        cfg.min_distance_m = 0.0;
        Rng rng(12);
        const long n = 100000;
        double sum_r2 = 0.0;
        for (long i = 0; i < n; ++i) {
            const auto link = drop_users(cfg, 1.0, rng)[0];
            const double r = std::pow(link.mean_gain / cfg.pathloss_intercept, -1.0 / cfg.pathloss_exponent);
            sum_r2 += r * r;
        }
        CHECK(sum_r2 / n == doctest::Approx(cfg.radius_m * cfg.radius_m / 2.0).epsilon(0.01));
    }
    SUBCASE("every user sees at least the edge SNR")
    {
        cfg.users = 4;
        const double rho = calibrate_power(cfg, 5.0);
        const double edge = channel::pathloss(cfg.radius_m, cfg.pathloss_exponent, cfg.pathloss_intercept);
        Rng rng(13);
        for (int i = 0; i < 1000; ++i) {
            for (const auto& link : drop_users(cfg, rho, rng)) {
                CHECK(link.mean_gain >= edge * (1.0 - 1e-12));
                CHECK(link.power == rho);
                CHECK(link.coherence_slots == cfg.coherence_slots);
            }
        }
    }
}

TEST_CASE("fulfilled_fraction")
{
    const std::vector<OutageTally> t{{100, 10}, {100, 11}, {100, 12}, {10, 1}};
    CHECK(fulfilled_fraction(t, 0.1) == doctest::Approx(2.0 / 3.0));
    CHECK(fulfilled_fraction(std::vector<OutageTally>{{10, 1}}, 0.1) == 0.0);
    CHECK(fulfilled_fraction(std::vector<OutageTally>{}, 0.1) == 0.0);
    CHECK(fulfilled_fraction(std::vector<OutageTally>{{100, 9}}, 0.1) == 1.0);
    CHECK(fulfilled_fraction(std::vector<OutageTally>{{100, 8}}, 0.1) == 0.0);
}

TEST_CASE("schemes")
{
    const std::vector<double> backoffs{1.0, 0.95};
    const std::vector<std::string> all{"all"};
    const auto s = parse_schemes(all, backoffs);
    REQUIRE(s.size() == 5);
    CHECK(s[0].id() == "perfect-csi");
    CHECK(s[1].id() == "nonrobust-a1");
    CHECK(s[2].id() == "nonrobust-a0.95");
    CHECK(s[3].id() == "robust-alg1");
    CHECK(s[4].id() == "robust-alg2");
    const std::vector<std::string> some{"nonrobust-a0.9", "robust-alg2"};
    const auto t = parse_schemes(some, backoffs);
    REQUIRE(t.size() == 2);
    CHECK(t[0] == Scheme{SchemeKind::nonrobust, 0.9});
    const std::vector<std::string> bad{"robust-alg3"};
    CHECK_THROWS(parse_schemes(bad, backoffs));
    const std::vector<std::string> bad_backoff{"nonrobust-a1.5"};
    CHECK_THROWS(parse_schemes(bad_backoff, backoffs));
}

TEST_CASE("config JSON")
{
    auto cfg = small_config();
    cfg.feedback_bits = 6;
    cfg.schemes = {{SchemeKind::robust_alg1}, {SchemeKind::nonrobust, 0.95}};
    const auto back = config_from_json(config_to_json(cfg));
    CHECK(back.drops == cfg.drops);
    CHECK(back.slots == cfg.slots);
    CHECK(back.delays == cfg.delays);
    CHECK(back.snr_edge_db == cfg.snr_edge_db);
    CHECK(back.feedback_bits == cfg.feedback_bits);
    CHECK(back.seed == cfg.seed);
    CHECK(back.schemes == cfg.schemes);
    CHECK(config_to_json(back) == config_to_json(cfg));

    const auto scalar = config_from_json(R"({"snr_edge_db": 10, "delays": 6})");
    CHECK(scalar.snr_edge_db == std::vector<double>{10.0});
    CHECK(scalar.delays == std::vector<int>{6});
    CHECK(scalar.schemes.size() == 5);

    CHECK_THROWS(config_from_json(R"({"drop": 3})"));
    CHECK_THROWS(config_from_json(R"({"drops": -3})"));
    CHECK_THROWS(config_from_json(R"({"p_target": 1.5})"));
    CHECK_THROWS(config_from_json("{not json"));
}

TEST_CASE("perfect CSI never fails and tracks the capacity")
{
    auto cfg = small_config();
    cfg.drops = 1;
    cfg.delays = {0};
    cfg.schemes = {{SchemeKind::perfect_csi}};
    std::vector<SlotRecord> recs;
    const auto res = run_experiment(cfg, [&](const SlotRecord& r) { recs.push_back(r); });
    REQUIRE(res.rows.size() == 1);
    CHECK(res.rows[0].outage_rate == 0.0);
    REQUIRE(recs.size() == static_cast<std::size_t>(cfg.slots));

    std::stringstream dump;
    dump_traces(cfg, 5.0, 0, dump);
    std::string line;
    std::getline(dump, line);
    CHECK(line == "snr_db,drop,user,mean_gain,slot,h_re,h_im");
    std::map<std::pair<int, long>, double> capacity;
    const double rho = calibrate_power(cfg, 5.0);
    while (std::getline(dump, line)) {
        std::stringstream row(line);
        std::string f[7];
        for (auto& x : f) {
            std::getline(row, x, ',');
        }
        const double re = std::stod(f[5]);
        const double im = std::stod(f[6]);
        capacity[{std::stoi(f[2]), std::stol(f[4])}] = std::log2(1.0 + rho * (re * re + im * im));
    }
    std::vector<double> delivered(static_cast<std::size_t>(cfg.users), 0.0);
    for (const auto& r : recs) {
        CHECK(r.success);
        CHECK(r.rate == doctest::Approx(capacity.at({static_cast<int>(r.user), r.slot})).epsilon(1e-12));
        delivered[r.user] += r.rate;
    }
    const auto& last = recs.back();
    for (std::size_t k = 0; k < delivered.size(); ++k) {
        CHECK(last.throughputs[k] ==
              doctest::Approx(std::max(delivered[k] / cfg.slots, scheduler::kThroughputFloor)).epsilon(1e-12));
    }
}

TEST_CASE("common random numbers across scheme subsets")
{
    auto cfg = small_config();
    const auto full = run_experiment(cfg);
    for (const auto* id : {"robust-alg2", "nonrobust-a0.95"}) {
        auto sub = cfg;
        const std::vector<std::string> names{id};
        sub.schemes = parse_schemes(names, cfg.backoffs);
        const auto part = run_experiment(sub);
        for (const auto& row : part.rows) {
            const auto& ref = find_row(full, row.scheme, row.delay);
            CHECK(row.pf_utility == ref.pf_utility);
            CHECK(row.outage_rate == ref.outage_rate);
            CHECK(row.transmissions == ref.transmissions);
        }
    }
}

TEST_CASE("both robust schedulers coincide at zero delay")
{
    auto cfg = small_config();
    cfg.delays = {0};
    cfg.schemes = {{SchemeKind::robust_alg1}, {SchemeKind::robust_alg2}};
    std::vector<std::pair<long, std::size_t>> a1, a2;
    run_experiment(cfg, [&](const SlotRecord& r) {
        (r.scheme == "robust-alg1" ? a1 : a2).emplace_back(r.slot, r.user);
    });
    CHECK(a1.size() == static_cast<std::size_t>(cfg.drops * cfg.slots));
    CHECK(a1 == a2);
}

TEST_CASE("perfect CSI is flat in the delay")
{
    const auto res = run_experiment(small_config());
    const auto& ref = find_row(res, "perfect-csi", 0);
    for (int d : {4, 10}) {
        CHECK(find_row(res, "perfect-csi", d).pf_utility == ref.pf_utility);
    }
}

TEST_CASE("single drop, single slot")
{
    auto cfg = small_config();
    cfg.drops = 1;
    cfg.slots = 1;
    cfg.delays = {0};
    cfg.schemes = {{SchemeKind::robust_alg1}};
    const auto res = run_experiment(cfg);
    REQUIRE(res.rows.size() == 1);
    CHECK(res.rows[0].transmissions == 1);
    CHECK(res.rows[0].drops == 1);
    CHECK(std::isfinite(res.rows[0].pf_utility));
    CHECK(res.rows[0].pf_utility_se == 0.0);
    std::ostringstream ss;
    write_metrics_csv(res.rows, ss);
    std::istringstream in(ss.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == kMetricsHeader);
    int data = 0;
    while (std::getline(in, line)) {
        ++data;
    }
    CHECK(data == 1);
}

TEST_CASE("worker count does not change the output")
{
    auto cfg = small_config();
    cfg.workers = 1;
    const auto one = csv_of(run_experiment(cfg));
    cfg.workers = 3;
    CHECK(csv_of(run_experiment(cfg)) == one);
}

TEST_CASE("more drops stay within sampling error")
{
    auto cfg = small_config();
    cfg.delays = {4};
    cfg.schemes = {{SchemeKind::robust_alg1}};
    cfg.drops = 10;
    const auto a = run_experiment(cfg).rows[0];
    cfg.drops = 20;
    const auto b = run_experiment(cfg).rows[0];
    const auto [lo, hi] = oracle::binomial_band(b.transmissions, a.outage_rate, 0.999);
    CHECK(b.outage_rate >= lo);
    CHECK(b.outage_rate <= hi);
    CHECK(std::abs(a.pf_utility - b.pf_utility) <= 4.0 * std::hypot(a.pf_utility_se, b.pf_utility_se));
}

TEST_CASE("slot trace format")
{
    CHECK(slot_trace_header(2) == "drop,snr_db,delay,scheme,slot,user,rate,outage,success,T0,T1");
    SlotRecord r;
    r.drop = 3;
    r.snr_db = 5.0;
    r.delay = 2;
    r.scheme = "robust-alg1";
    r.slot = 7;
    r.user = 1;
    r.rate = 1.5;
    r.outage = 0.1;
    r.success = true;
    r.throughputs = {0.25, 0.5};
    std::ostringstream ss;
    write_slot_record(r, ss);
    CHECK(ss.str() == "3,5,2,robust-alg1,7,1,1.5,0.1,1,0.25,0.5\n");
}

TEST_CASE("bad output path is reported")
{
    const std::vector<MetricsRow> rows(1);
    const std::string path = "/nonexistent-dir/x/metrics.csv";
    try {
        write_metrics_csv(rows, path);
        FAIL("expected an exception");
    } catch (const std::exception& e) {
        CHECK(std::string(e.what()).find(path) != std::string::npos);
    }
}

}  // TEST_SUITE
