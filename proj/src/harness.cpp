// SPDX-License-Identifier: Apache-2.0

#include "robustlink/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "robustlink/csi.hpp"
#include "robustlink/rate_adapt.hpp"
#include "robustlink/scheduler.hpp"

namespace robustlink::harness {

namespace {

// Substream ids for derive_seed(seed, {drop, stream, user}).
enum Stream : std::uint64_t { kPlacement = 1, kFading = 2, kCsiNoise = 3, kFallback = 4 };

using json = nlohmann::json;

std::string format_g(double v, int digits = 10)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

double mean_of(const std::vector<double>& v)
{
    double s = 0.0;
    for (double x : v) {
        s += x;
    }
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double standard_error(const std::vector<double>& v)
{
    if (v.size() < 2) {
        return 0.0;
    }
    const double m = mean_of(v);
    double ss = 0.0;
    for (double x : v) {
        ss += (x - m) * (x - m);
    }
    return std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

}  // namespace

std::string Scheme::id() const
{
    switch (kind) {
    case SchemeKind::perfect_csi:
        return "perfect-csi";
    case SchemeKind::nonrobust:
        return "nonrobust-a" + format_g(backoff, 6);
    case SchemeKind::robust_alg1:
        return "robust-alg1";
    case SchemeKind::robust_alg2:
        return "robust-alg2";
    }
    return "unknown";
}

std::vector<Scheme> parse_schemes(std::span<const std::string> names,
                                  std::span<const double> backoffs)
{
    std::vector<Scheme> out;
    const auto add = [&out](Scheme s) {
        if (std::find(out.begin(), out.end(), s) == out.end()) {
            out.push_back(s);
        }
    };
    const auto add_nonrobust = [&] {
        if (backoffs.empty()) {
            throw std::invalid_argument("parse_schemes: 'nonrobust' needs at least one back-off");
        }
        for (double a : backoffs) {
            add({SchemeKind::nonrobust, a});
        }
    };
    for (const auto& name : names) {
        if (name == "all") {
            add({SchemeKind::perfect_csi});
            add_nonrobust();
            add({SchemeKind::robust_alg1});
            add({SchemeKind::robust_alg2});
        } else if (name == "perfect-csi") {
            add({SchemeKind::perfect_csi});
        } else if (name == "robust-alg1") {
            add({SchemeKind::robust_alg1});
        } else if (name == "robust-alg2") {
            add({SchemeKind::robust_alg2});
        } else if (name == "nonrobust") {
            add_nonrobust();
        } else if (name.rfind("nonrobust-a", 0) == 0) {
            std::size_t used = 0;
            const auto text = name.substr(11);
            double a = 0.0;
            try {
                a = std::stod(text, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used == 0 || used != text.size() || !(a > 0.0 && a <= 1.0)) {
                throw std::invalid_argument("parse_schemes: bad back-off in '" + name + "'");
            }
            add({SchemeKind::nonrobust, a});
        } else {
            throw std::invalid_argument("parse_schemes: unknown scheme '" + name + "'");
        }
    }
    return out;
}

void SimConfig::validate() const
{
    if (users < 1 || drops < 1 || slots < 1 || pilots < 1 || window < 1 || workers < 1 ||
        lut_points < 2 || min_transmissions < 1) {
        throw std::invalid_argument("SimConfig: counts must be positive");
    }
    if (!(radius_m > 0.0) || !(min_distance_m >= 0.0) || !(min_distance_m < radius_m)) {
        throw std::invalid_argument("SimConfig: need 0 <= min_distance_m < radius_m");
    }
    if (!(pathloss_exponent > 0.0) || !(pathloss_intercept > 0.0) || !(coherence_slots > 0.0)) {
        throw std::invalid_argument("SimConfig: path-loss parameters and coherence time must be > 0");
    }
    if (!(p_target > 0.0 && p_target < 1.0)) {
        throw std::invalid_argument("SimConfig: p_target must lie in (0, 1)");
    }
    if (!(fulfilled_band > 0.0) || !(rate_tolerance > 0.0)) {
        throw std::invalid_argument("SimConfig: band and rate tolerance must be > 0");
    }
    if (feedback_bits && *feedback_bits < 1) {
        throw std::invalid_argument("SimConfig: feedback bits must be positive");
    }
    if (snr_edge_db.empty() || delays.empty() || schemes.empty()) {
        throw std::invalid_argument("SimConfig: SNR list, delay list and schemes must be nonempty");
    }
    for (int d : delays) {
        if (d < 0) {
            throw std::invalid_argument("SimConfig: delays must be >= 0");
        }
    }
    for (const auto& s : schemes) {
        if (s.kind == SchemeKind::nonrobust && !(s.backoff > 0.0 && s.backoff <= 1.0)) {
            throw std::invalid_argument("SimConfig: back-off factors must lie in (0, 1]");
        }
    }
}

SimConfig config_from_json(const std::string& text)
{
    const json j = json::parse(text);
    if (!j.is_object()) {
        throw std::invalid_argument("config: top level must be an object");
    }
    SimConfig cfg;
    std::vector<std::string> scheme_names;
    bool have_schemes = false;
    for (const auto& [key, value] : j.items()) {
        if (key == "users") {
            cfg.users = value.get<int>();
        } else if (key == "radius_m") {
            cfg.radius_m = value.get<double>();
        } else if (key == "min_distance_m") {
            cfg.min_distance_m = value.get<double>();
        } else if (key == "pathloss_exponent") {
            cfg.pathloss_exponent = value.get<double>();
        } else if (key == "pathloss_intercept") {
            cfg.pathloss_intercept = value.get<double>();
        } else if (key == "snr_edge_db") {
            cfg.snr_edge_db = value.is_array() ? value.get<std::vector<double>>()
                                               : std::vector<double>{value.get<double>()};
        } else if (key == "coherence_slots") {
            cfg.coherence_slots = value.get<double>();
        } else if (key == "pilots") {
            cfg.pilots = value.get<int>();
        } else if (key == "feedback_bits") {
            cfg.feedback_bits = value.is_null() ? std::nullopt
                                                : std::optional<int>(value.get<int>());
        } else if (key == "window") {
            cfg.window = value.get<int>();
        } else if (key == "delays") {
            cfg.delays = value.is_array() ? value.get<std::vector<int>>()
                                          : std::vector<int>{value.get<int>()};
        } else if (key == "p_target") {
            cfg.p_target = value.get<double>();
        } else if (key == "backoffs") {
            cfg.backoffs = value.get<std::vector<double>>();
        } else if (key == "drops") {
            cfg.drops = value.get<int>();
        } else if (key == "slots") {
            cfg.slots = value.get<int>();
        } else if (key == "seed") {
            cfg.seed = value.get<std::uint64_t>();
        } else if (key == "schemes") {
            scheme_names = value.get<std::vector<std::string>>();
            have_schemes = true;
        } else if (key == "use_lut") {
            cfg.use_lut = value.get<bool>();
        } else if (key == "lut_points") {
            cfg.lut_points = value.get<int>();
        } else if (key == "workers") {
            cfg.workers = value.get<int>();
        } else if (key == "fulfilled_band") {
            cfg.fulfilled_band = value.get<double>();
        } else if (key == "min_transmissions") {
            cfg.min_transmissions = value.get<int>();
        } else if (key == "rate_tolerance") {
            cfg.rate_tolerance = value.get<double>();
        } else {
            throw std::invalid_argument("config: unknown key '" + key + "'");
        }
    }
    if (have_schemes) {
        cfg.schemes = parse_schemes(scheme_names, cfg.backoffs);
    } else {
        const std::vector<std::string> all{"all"};
        cfg.schemes = parse_schemes(all, cfg.backoffs);
    }
    cfg.validate();
    return cfg;
}

std::string config_to_json(const SimConfig& cfg)
{
    json j;
    j["users"] = cfg.users;
    j["radius_m"] = cfg.radius_m;
    j["min_distance_m"] = cfg.min_distance_m;
    j["pathloss_exponent"] = cfg.pathloss_exponent;
    j["pathloss_intercept"] = cfg.pathloss_intercept;
    j["snr_edge_db"] = cfg.snr_edge_db;
    j["coherence_slots"] = cfg.coherence_slots;
    j["pilots"] = cfg.pilots;
    j["feedback_bits"] = cfg.feedback_bits ? json(*cfg.feedback_bits) : json(nullptr);
    j["window"] = cfg.window;
    j["delays"] = cfg.delays;
    j["p_target"] = cfg.p_target;
    j["backoffs"] = cfg.backoffs;
    j["drops"] = cfg.drops;
    j["slots"] = cfg.slots;
    j["seed"] = cfg.seed;
    std::vector<std::string> names;
    for (const auto& s : cfg.schemes) {
        names.push_back(s.id());
    }
    j["schemes"] = names;
    j["use_lut"] = cfg.use_lut;
    j["lut_points"] = cfg.lut_points;
    j["workers"] = cfg.workers;
    j["fulfilled_band"] = cfg.fulfilled_band;
    j["min_transmissions"] = cfg.min_transmissions;
    j["rate_tolerance"] = cfg.rate_tolerance;
    return j.dump(2);
}

double fulfilled_fraction(std::span<const OutageTally> tallies, double p_target, double band,
                          int min_transmissions)
{
    // Slack for rates such as 0.11 that sit exactly on the band edge.
    constexpr double kEdgeSlack = 1e-12;
    long counted = 0;
    long inside = 0;
    for (const auto& t : tallies) {
        if (t.transmissions < min_transmissions) {
            continue;
        }
        ++counted;
        const double rate = static_cast<double>(t.outages) / t.transmissions;
        if (std::abs(rate - p_target) <= band * p_target + kEdgeSlack) {
            ++inside;
        }
    }
    return counted == 0 ? 0.0 : static_cast<double>(inside) / static_cast<double>(counted);
}

double calibrate_power(const SimConfig& cfg, double snr_edge_db)
{
    const double edge_gain =
        channel::pathloss(cfg.radius_m, cfg.pathloss_exponent, cfg.pathloss_intercept);
    return std::pow(10.0, snr_edge_db / 10.0) / edge_gain;
}

std::vector<channel::LinkParams> drop_users(const SimConfig& cfg, double power, Rng& rng)
{
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double r0 = cfg.min_distance_m * cfg.min_distance_m;
    const double r1 = cfg.radius_m * cfg.radius_m;
    std::vector<channel::LinkParams> links;
    links.reserve(static_cast<std::size_t>(cfg.users));
    for (int k = 0; k < cfg.users; ++k) {
        const double u = unit(rng);
        [[maybe_unused]] const double angle = 2.0 * std::numbers::pi * unit(rng);
        const double r = std::max(std::sqrt(r0 + u * (r1 - r0)), 1e-3);
        channel::LinkParams link;
        link.mean_gain = channel::pathloss(r, cfg.pathloss_exponent, cfg.pathloss_intercept);
        link.coherence_slots = cfg.coherence_slots;
        link.power = power;
        links.push_back(link);
    }
    return links;
}

std::vector<SchemeDropResult> run_drop(const SimConfig& cfg, double snr_edge_db, int delay,
                                       int drop, const channel::FadingGenerator& fading,
                                       const SlotSink& sink)
{
    const auto users = static_cast<std::size_t>(cfg.users);
    const auto slots = static_cast<std::size_t>(cfg.slots);
    const auto drop_id = static_cast<std::uint64_t>(drop);
    const double power = calibrate_power(cfg, snr_edge_db);

    Rng placement(derive_seed(cfg.seed, {drop_id, kPlacement}));
    const auto links = drop_users(cfg, power, placement);

    bool need_robust = false;
    bool need_perfect = false;
    std::vector<double> backoffs;
    for (const auto& s : cfg.schemes) {
        need_robust |= s.kind == SchemeKind::robust_alg1 || s.kind == SchemeKind::robust_alg2;
        need_perfect |= s.kind == SchemeKind::perfect_csi;
        if (s.kind == SchemeKind::nonrobust &&
            std::find(backoffs.begin(), backoffs.end(), s.backoff) == backoffs.end()) {
            backoffs.push_back(s.backoff);
        }
    }

    rate_adapt::RobustOptions robust_opts;
    robust_opts.tolerance = cfg.rate_tolerance;

    // Per-user channel, CSI and rate decisions, shared by every scheme.
    std::vector<std::vector<double>> capacity(users, std::vector<double>(slots));
    std::vector<std::vector<rate_adapt::RateDecision>> perfect(users), robust(users);
    std::vector<std::vector<std::vector<rate_adapt::RateDecision>>> nonrobust(
        backoffs.size(), std::vector<std::vector<rate_adapt::RateDecision>>(users));
    for (std::size_t k = 0; k < users; ++k) {
        Rng fading_rng(derive_seed(cfg.seed, {drop_id, kFading, k}));
        Rng noise_rng(derive_seed(cfg.seed, {drop_id, kCsiNoise, k}));
        const auto trace = fading.draw(links[k], fading_rng);

        csi::CsiConfig csi_cfg;
        csi_cfg.delay = delay;
        csi_cfg.window = cfg.window;
        csi_cfg.pilots = cfg.pilots;
        csi_cfg.feedback_bits = cfg.feedback_bits;
        csi_cfg.link = links[k];
        const double eps = csi::error_variance(csi_cfg);

        std::optional<rate_adapt::RateLut> lut;
        if (need_robust && cfg.use_lut) {
            const auto grid = rate_adapt::default_lut_grid(links[k].mean_gain, cfg.lut_points);
            lut = rate_adapt::build_lut(grid, eps, power, links[k].mean_gain, cfg.p_target,
                                        robust_opts);
        }

        for (std::size_t n = 0; n < slots; ++n) {
            const auto h = trace.h[n];
            capacity[k][n] = channel::capacity(power, h);
            const auto noise = complex_normal(noise_rng);
            const auto view = csi::synthesize_view(h, eps, links[k].mean_gain, noise,
                                                   static_cast<int>(n));
            const double g_hat = view.amplitude();
            if (need_perfect) {
                perfect[k].push_back(rate_adapt::make_decision(capacity[k][n], 0.0));
            }
            if (need_robust) {
                robust[k].push_back(lut ? rate_adapt::lut_rate(*lut, g_hat)
                                        : rate_adapt::robust_rate(g_hat, eps, power, cfg.p_target,
                                                                  robust_opts));
            }
            for (std::size_t b = 0; b < backoffs.size(); ++b) {
                nonrobust[b][k].push_back(
                    rate_adapt::nonrobust_rate(g_hat, power, backoffs[b], eps));
            }
        }
    }

    const double band_lo = cfg.p_target * (1.0 - cfg.fulfilled_band);
    const double band_hi = cfg.p_target * (1.0 + cfg.fulfilled_band);
    Rng fallback_rng(derive_seed(cfg.seed, {drop_id, kFallback, static_cast<std::uint64_t>(delay)}));

    std::vector<SchemeDropResult> results;
    results.reserve(cfg.schemes.size());
    std::vector<double> metrics(users);
    for (const auto& scheme : cfg.schemes) {
        const int ledger_delay = scheme.kind == SchemeKind::perfect_csi ? 0 : delay;
        std::vector<scheduler::UserLedger> ledgers(users, scheduler::UserLedger(ledger_delay));
        SchemeDropResult res;
        res.tallies.assign(users, {});

        const auto* decisions = &robust;
        if (scheme.kind == SchemeKind::perfect_csi) {
            decisions = &perfect;
        } else if (scheme.kind == SchemeKind::nonrobust) {
            const auto b = static_cast<std::size_t>(
                std::find(backoffs.begin(), backoffs.end(), scheme.backoff) - backoffs.begin());
            decisions = &nonrobust[b];
        }

        for (std::size_t n = 0; n < slots; ++n) {
            for (std::size_t k = 0; k < users; ++k) {
                const auto& d = (*decisions)[k][n];
                switch (scheme.kind) {
                case SchemeKind::perfect_csi:
                case SchemeKind::nonrobust:
                    // Rate treated as certain: metric R / T.
                    metrics[k] = scheduler::metric_immediate(
                        d.rate, ledgers[k].acknowledged_throughput());
                    break;
                case SchemeKind::robust_alg1:
                    metrics[k] = scheduler::metric_immediate(
                        d.expected_rate, ledgers[k].acknowledged_throughput());
                    break;
                case SchemeKind::robust_alg2:
                    metrics[k] = scheduler::metric_delayed(d.expected_rate, ledgers[k], {},
                                                           &fallback_rng);
                    break;
                }
            }
            const std::size_t chosen = scheduler::select_user(metrics);
            bool success = false;
            for (std::size_t k = 0; k < users; ++k) {
                if (k == chosen) {
                    const auto& d = (*decisions)[k][n];
                    success = ledgers[k].advance(capacity[k][n], d);
                    ++res.transmissions;
                    ++res.tallies[k].transmissions;
                    if (!success) {
                        ++res.outages;
                        ++res.tallies[k].outages;
                    }
                    if (d.outage >= band_lo && d.outage <= band_hi) {
                        ++res.model_fulfilled;
                    }
                } else {
                    ledgers[k].advance(capacity[k][n], std::nullopt);
                }
            }
            if (sink) {
                SlotRecord rec;
                rec.drop = drop;
                rec.snr_db = snr_edge_db;
                rec.delay = delay;
                rec.scheme = scheme.id();
                rec.slot = static_cast<long>(n) + 1;
                rec.user = chosen;
                rec.rate = (*decisions)[chosen][n].rate;
                rec.outage = (*decisions)[chosen][n].outage;
                rec.success = success;
                for (const auto& l : ledgers) {
                    rec.throughputs.push_back(l.throughput());
                }
                sink(rec);
            }
        }

        for (const auto& l : ledgers) {
            res.throughputs.push_back(l.throughput());
        }
        res.utility = scheduler::utility(res.throughputs);
        res.mean_throughput = mean_of(res.throughputs);
        results.push_back(std::move(res));
    }
    return results;
}

std::vector<SchemeDropResult> run_drop(const SimConfig& cfg, double snr_edge_db, int delay, int drop)
{
    const channel::FadingGenerator fading(cfg.coherence_slots, cfg.slots);
    return run_drop(cfg, snr_edge_db, delay, drop, fading);
}

ExperimentResult run_experiment(const SimConfig& cfg, const SlotSink& sink)
{
    cfg.validate();
    const channel::FadingGenerator fading(cfg.coherence_slots, cfg.slots);
    const std::size_t n_snr = cfg.snr_edge_db.size();
    const auto n_drops = static_cast<std::size_t>(cfg.drops);

    ExperimentResult out;
    out.per_drop.assign(n_snr, std::vector<std::vector<std::vector<SchemeDropResult>>>(n_drops));

    const std::size_t jobs = n_snr * n_drops;
    const auto run_job = [&](std::size_t job) {
        const std::size_t s = job / n_drops;
        const std::size_t drop = job % n_drops;
        auto& slot = out.per_drop[s][drop];
        slot.reserve(cfg.delays.size());
        for (int delay : cfg.delays) {
            slot.push_back(run_drop(cfg, cfg.snr_edge_db[s], delay, static_cast<int>(drop),
                                    fading, sink));
        }
    };

    // A slot sink sees records in a fixed order only when run serially.
    const std::size_t workers =
        sink ? 1 : std::min<std::size_t>(static_cast<std::size_t>(cfg.workers), jobs);
    if (workers <= 1) {
        for (std::size_t job = 0; job < jobs; ++job) {
            run_job(job);
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::exception_ptr error;
        std::mutex error_mutex;
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t job = next++; job < jobs; job = next++) {
                    try {
                        run_job(job);
                    } catch (...) {
                        std::lock_guard lock(error_mutex);
                        if (!error) {
                            error = std::current_exception();
                        }
                        next = jobs;
                    }
                }
            });
        }
        for (auto& t : pool) {
            t.join();
        }
        if (error) {
            std::rethrow_exception(error);
        }
    }

    for (std::size_t s = 0; s < n_snr; ++s) {
        for (std::size_t di = 0; di < cfg.delays.size(); ++di) {
            for (std::size_t si = 0; si < cfg.schemes.size(); ++si) {
                MetricsRow row;
                row.scheme = cfg.schemes[si].id();
                row.delay = cfg.delays[di];
                row.snr_db = cfg.snr_edge_db[s];
                row.drops = cfg.drops;
                row.seed = cfg.seed;
                std::vector<double> utilities, throughputs;
                std::vector<OutageTally> tallies;
                long outages = 0;
                long fulfilled = 0;
                for (std::size_t drop = 0; drop < n_drops; ++drop) {
                    const auto& r = out.per_drop[s][drop][di][si];
                    utilities.push_back(r.utility);
                    throughputs.push_back(r.mean_throughput);
                    tallies.insert(tallies.end(), r.tallies.begin(), r.tallies.end());
                    row.transmissions += r.transmissions;
                    outages += r.outages;
                    fulfilled += r.model_fulfilled;
                }
                row.pf_utility = mean_of(utilities);
                row.pf_utility_se = standard_error(utilities);
                row.mean_throughput = mean_of(throughputs);
                row.mean_throughput_se = standard_error(throughputs);
                if (row.transmissions > 0) {
                    const auto tx = static_cast<double>(row.transmissions);
                    row.outage_rate = static_cast<double>(outages) / tx;
                    row.fulfilled_fraction = static_cast<double>(fulfilled) / tx;
                }
                row.fulfilled_empirical = fulfilled_fraction(
                    tallies, cfg.p_target, cfg.fulfilled_band, cfg.min_transmissions);
                out.rows.push_back(std::move(row));
            }
        }
    }
    return out;
}

void write_metrics_csv(std::span<const MetricsRow> rows, std::ostream& out)
{
    out << kMetricsHeader << '\n';
    for (const auto& r : rows) {
        out << r.scheme << ',' << r.delay << ',' << format_g(r.snr_db) << ','
            << format_g(r.pf_utility) << ',' << format_g(r.pf_utility_se) << ','
            << format_g(r.mean_throughput) << ',' << format_g(r.mean_throughput_se) << ','
            << format_g(r.outage_rate) << ',' << format_g(r.fulfilled_fraction) << ','
            << format_g(r.fulfilled_empirical) << ',' << r.transmissions << ',' << r.drops << ','
            << r.seed << '\n';
    }
}

void write_metrics_csv(std::span<const MetricsRow> rows, const std::string& path)
{
    std::ofstream file(path);
    if (!file) {
        throw std::runtime_error("cannot open '" + path + "' for writing");
    }
    write_metrics_csv(rows, file);
    file.flush();
    if (!file) {
        throw std::runtime_error("write to '" + path + "' failed");
    }
}

std::string slot_trace_header(int users)
{
    std::string h = "drop,snr_db,delay,scheme,slot,user,rate,outage,success";
    for (int k = 0; k < users; ++k) {
        h += ",T" + std::to_string(k);
    }
    return h;
}

void write_slot_record(const SlotRecord& rec, std::ostream& out)
{
    out << rec.drop << ',' << format_g(rec.snr_db) << ',' << rec.delay << ',' << rec.scheme << ','
        << rec.slot << ',' << rec.user << ',' << format_g(rec.rate) << ','
        << format_g(rec.outage) << ',' << (rec.success ? 1 : 0);
    for (double t : rec.throughputs) {
        out << ',' << format_g(t);
    }
    out << '\n';
}

void dump_traces(const SimConfig& cfg, double snr_edge_db, int drop, std::ostream& out)
{
    const auto drop_id = static_cast<std::uint64_t>(drop);
    const double power = calibrate_power(cfg, snr_edge_db);
    Rng placement(derive_seed(cfg.seed, {drop_id, kPlacement}));
    const auto links = drop_users(cfg, power, placement);
    const channel::FadingGenerator fading(cfg.coherence_slots, cfg.slots);
    out << "snr_db,drop,user,mean_gain,slot,h_re,h_im\n";
    for (std::size_t k = 0; k < links.size(); ++k) {
        Rng fading_rng(derive_seed(cfg.seed, {drop_id, kFading, k}));
        const auto trace = fading.draw(links[k], fading_rng);
        for (std::size_t n = 0; n < trace.h.size(); ++n) {
            out << format_g(snr_edge_db) << ',' << drop << ',' << k << ','
                << format_g(links[k].mean_gain, 17) << ',' << n + 1 << ','
                << format_g(trace.h[n].real(), 17) << ',' << format_g(trace.h[n].imag(), 17)
                << '\n';
        }
    }
}

}  // namespace robustlink::harness
