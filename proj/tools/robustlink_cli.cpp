// SPDX-License-Identifier: Apache-2.0
//
// robustlink command-line tool. Every subcommand writes CSV to --out, or to
// stdout when --out is omitted.

#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "robustlink/curves.hpp"
#include "robustlink/harness.hpp"
#include "robustlink/rate_adapt.hpp"

namespace {

using namespace robustlink;

class Output {
public:
    explicit Output(const std::string& path)
    {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_) {
                throw std::runtime_error("cannot open '" + path + "' for writing");
            }
        }
        path_ = path;
    }

    std::ostream& stream() { return file_ ? *file_ : std::cout; }

    void finish()
    {
        stream().flush();
        if (!stream()) {
            throw std::runtime_error("write to '" + (path_.empty() ? "stdout" : path_) + "' failed");
        }
    }

private:
    std::unique_ptr<std::ofstream> file_;
    std::string path_;
};

std::string read_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open '" + path + "'");
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct SimOptions {
    std::string config;
    std::string out;
    std::string trace_out;
    std::string dump_traces;
    bool paper_scale = false;
    bool print_config = false;
    std::optional<std::uint64_t> seed;
    std::optional<int> drops;
    std::optional<int> slots;
    std::optional<int> workers;
    std::vector<double> snr_db;
    std::vector<int> delays;
    std::vector<std::string> schemes;
    std::vector<double> backoffs;
    std::optional<double> p_target;
    std::optional<bool> use_lut;
};

int run_schedule_sim(const SimOptions& o)
{
    harness::SimConfig cfg =
        o.config.empty() ? harness::SimConfig{} : harness::config_from_json(read_file(o.config));
    if (o.paper_scale) {
        cfg.drops = 10000;
        cfg.snr_edge_db = {5.0, 10.0};
    }
    if (o.seed) cfg.seed = *o.seed;
    if (o.drops) cfg.drops = *o.drops;
    if (o.slots) cfg.slots = *o.slots;
    if (o.workers) cfg.workers = *o.workers;
    if (o.p_target) cfg.p_target = *o.p_target;
    if (o.use_lut) cfg.use_lut = *o.use_lut;
    if (!o.snr_db.empty()) cfg.snr_edge_db = o.snr_db;
    if (!o.delays.empty()) cfg.delays = o.delays;
    if (!o.backoffs.empty()) cfg.backoffs = o.backoffs;
    if (!o.schemes.empty()) {
        cfg.schemes = harness::parse_schemes(o.schemes, cfg.backoffs);
    } else if (!o.backoffs.empty()) {
        const std::vector<std::string> all{"all"};
        cfg.schemes = harness::parse_schemes(all, cfg.backoffs);
    }
    cfg.validate();

    if (o.print_config) {
        std::cout << harness::config_to_json(cfg) << '\n';
        return 0;
    }
    if (!o.dump_traces.empty()) {
        Output dump(o.dump_traces);
        harness::dump_traces(cfg, cfg.snr_edge_db.front(), 0, dump.stream());
        dump.finish();
    }

    std::unique_ptr<Output> trace;
    harness::SlotSink sink;
    if (!o.trace_out.empty()) {
        trace = std::make_unique<Output>(o.trace_out);
        trace->stream() << harness::slot_trace_header(cfg.users) << '\n';
        sink = [&trace](const harness::SlotRecord& r) { harness::write_slot_record(r, trace->stream()); };
    }
    const auto result = harness::run_experiment(cfg, sink);
    if (trace) {
        trace->finish();
    }
    Output out(o.out);
    harness::write_metrics_csv(result.rows, out.stream());
    out.finish();
    return 0;
}

std::vector<double> amplitude_grid(double lo, double hi, int points)
{
    return curves::linspace(lo, hi, points);
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Robust rate adaptation and proportional fair scheduling with imperfect CSI"};
    app.require_subcommand(1);

    // Single-link curves share these.
    std::string out;
    std::uint64_t seed = 1;
    double snr_db = 10.0;
    std::vector<double> eps{0.1};
    std::vector<double> p_targets{0.1, 0.01};
    std::vector<double> backoffs{1.0};
    double g_lo = 0.05;
    double g_hi = 3.0;
    int g_points = 60;
    long draws = 100000;

    const auto add_link_flags = [&](CLI::App* sub) {
        sub->add_option("--out", out, "CSV output path (default stdout)");
        sub->add_option("--snr-db", snr_db, "Mean SNR of the normalized link, dB")->capture_default_str();
        sub->add_option("--eps", eps, "Normalized CSI error variance(s)")->capture_default_str();
        sub->add_option("--backoff", backoffs, "Non-robust back-off factor(s)")->capture_default_str();
    };
    const auto add_grid_flags = [&](CLI::App* sub) {
        sub->add_option("--p-target", p_targets, "Target outage probability(ies)")->capture_default_str();
        sub->add_option("--g-min", g_lo, "Smallest estimated amplitude")->capture_default_str();
        sub->add_option("--g-max", g_hi, "Largest estimated amplitude")->capture_default_str();
        sub->add_option("--points", g_points, "Amplitude grid points")->capture_default_str()->check(CLI::PositiveNumber);
    };

    auto* rate = app.add_subcommand("rate-curve", "Assigned rate versus estimated amplitude");
    add_link_flags(rate);
    add_grid_flags(rate);

    auto* outage = app.add_subcommand("outage-curve", "Resulting outage versus estimated amplitude");
    add_link_flags(outage);
    add_grid_flags(outage);
    outage->add_option("--seed", seed, "Master seed")->capture_default_str();
    outage->add_option("--draws", draws, "Conditional channel draws per point")->capture_default_str()->check(CLI::PositiveNumber);

    std::vector<double> tp_targets;
    long tp_draws = 20000;
    auto* tput = app.add_subcommand("throughput-vs-target", "Mean throughput versus target outage");
    add_link_flags(tput);
    tput->add_option("--p-target", tp_targets, "Target outage values (default 25 log-spaced on [1e-3, 0.9])");
    tput->add_option("--seed", seed, "Master seed")->capture_default_str();
    tput->add_option("--draws", tp_draws, "Channel draws per eps")->capture_default_str()->check(CLI::PositiveNumber);

    curves::UncertaintySpec unc;
    std::vector<int> feedback;
    auto* uncert = app.add_subcommand("uncertainty-curve", "CSI error variance versus delay");
    uncert->add_option("--out", out, "CSV output path (default stdout)");
    uncert->add_option("--snr-db", unc.snr_db, "Mean SNR(s), dB")->capture_default_str();
    uncert->add_option("--delay", unc.delays, "Delays in slots (default 0..20)");
    uncert->add_option("--coherence", unc.coherence_slots, "Coherence time, slots")->capture_default_str();
    uncert->add_option("--window", unc.window, "Observations used for prediction")->capture_default_str();
    uncert->add_option("--pilots", unc.pilots, "Pilots per block")->capture_default_str();
    uncert->add_option("--feedback-bits", feedback, "Feedback quantization bits (default unquantized)")->expected(0, 1);

    SimOptions sim;
    auto* sched = app.add_subcommand("schedule-sim", "Multi-user drop simulation swept over delay");
    sched->add_option("--config", sim.config, "JSON config file; command-line flags override it");
    sched->add_option("--out", sim.out, "Metrics CSV path (default stdout)");
    sched->add_option("--seed", sim.seed, "Master seed");
    sched->add_option("--drops", sim.drops, "User drops")->check(CLI::PositiveNumber);
    sched->add_option("--slots", sim.slots, "Slots per drop")->check(CLI::PositiveNumber);
    sched->add_option("--snr-db", sim.snr_db, "Cell-edge SNR(s), dB");
    sched->add_option("--delay", sim.delays, "Delay(s) in slots");
    sched->add_option("--scheme", sim.schemes,
                      "Scheme(s): all, perfect-csi, nonrobust, nonrobust-a<factor>, robust-alg1, robust-alg2");
    sched->add_option("--backoff", sim.backoffs, "Back-off factors expanded by 'nonrobust'");
    sched->add_option("--p-target", sim.p_target, "Target outage probability");
    sched->add_option("--workers", sim.workers, "Worker threads")->check(CLI::PositiveNumber);
    sched->add_flag("--lut{true},--no-lut{false}", sim.use_lut, "Robust rates from a per-user lookup table");
    sched->add_flag("--paper-scale", sim.paper_scale, "10000 drops at 5 and 10 dB");
    sched->add_option("--trace-out", sim.trace_out, "Per-slot decision trace CSV (runs single-threaded)");
    sched->add_option("--dump-traces", sim.dump_traces, "Fading traces of drop 0 at the first SNR, CSV");
    sched->add_flag("--print-config", sim.print_config, "Print the effective config as JSON and exit");

    auto* lut = app.add_subcommand("lut", "Rate lookup tables");
    lut->require_subcommand(1);
    double lut_eps = 0.1;
    double lut_p = 0.1;
    int lut_points = 512;
    auto* lut_build = lut->add_subcommand("build", "Tabulate robust rates on a log-spaced amplitude grid");
    lut_build->add_option("--out", out, "LUT CSV path (default stdout)");
    lut_build->add_option("--snr-db", snr_db, "Mean SNR of the normalized link, dB")->capture_default_str();
    lut_build->add_option("--eps", lut_eps, "Normalized CSI error variance")->capture_default_str();
    lut_build->add_option("--p-target", lut_p, "Target outage probability")->capture_default_str();
    lut_build->add_option("--points", lut_points, "Grid points")->capture_default_str()->check(CLI::Range(2, 1 << 20));
    std::string lut_in;
    std::vector<double> queries;
    auto* lut_inspect = lut->add_subcommand("inspect", "Summarize a LUT file or query rates from it");
    lut_inspect->add_option("file", lut_in, "LUT CSV path")->required();
    lut_inspect->add_option("--g-hat", queries, "Amplitudes to look up (CSV g_hat,rate,model_outage)");
    lut_inspect->add_option("--out", out, "Output path (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*rate || *outage) {
            curves::CurveSpec spec;
            spec.snr_db = snr_db;
            spec.eps = eps;
            spec.p_targets = p_targets;
            spec.backoffs = backoffs;
            spec.amplitudes = amplitude_grid(g_lo, g_hi, g_points);
            spec.seed = seed;
            spec.draws = *outage ? draws : 0;
            const auto points = curves::rate_curve(spec);
            Output o(out);
            if (*outage) {
                curves::write_outage_curve(points, o.stream());
            } else {
                curves::write_rate_curve(points, o.stream());
            }
            o.finish();
        } else if (*tput) {
            curves::ThroughputSpec spec;
            spec.snr_db = snr_db;
            spec.eps = eps;
            spec.p_targets = tp_targets;
            spec.backoffs = backoffs;
            spec.draws = tp_draws;
            spec.seed = seed;
            Output o(out);
            curves::write_throughput(curves::throughput_vs_target(spec), o.stream());
            o.finish();
        } else if (*uncert) {
            if (!feedback.empty()) {
                unc.feedback_bits = feedback.front();
            }
            Output o(out);
            curves::write_uncertainty(curves::uncertainty_curve(unc), o.stream());
            o.finish();
        } else if (*sched) {
            return run_schedule_sim(sim);
        } else if (*lut_build) {
            const double power = std::pow(10.0, snr_db / 10.0);
            const auto grid = rate_adapt::default_lut_grid(1.0, lut_points);
            const auto table = rate_adapt::build_lut(grid, lut_eps, power, 1.0, lut_p);
            Output o(out);
            rate_adapt::write_lut_csv(table, o.stream());
            o.finish();
        } else if (*lut_inspect) {
            std::ifstream in(lut_in);
            if (!in) {
                throw std::runtime_error("cannot open '" + lut_in + "'");
            }
            const auto table = rate_adapt::read_lut_csv(in);
            Output o(out);
            auto& s = o.stream();
            if (queries.empty()) {
                bool monotone = true;
                for (std::size_t i = 1; i < table.rates.size(); ++i) {
                    monotone = monotone && table.rates[i] >= table.rates[i - 1];
                }
                s << "key,value\n"
                  << "points," << table.amplitudes.size() << '\n'
                  << "mean_snr," << table.mean_snr() << '\n'
                  << "eps," << table.eps << '\n'
                  << "p_target," << table.p_target << '\n'
                  << "g_hat_min," << table.amplitudes.front() << '\n'
                  << "g_hat_max," << table.amplitudes.back() << '\n'
                  << "rate_min," << table.rates.front() << '\n'
                  << "rate_max," << table.rates.back() << '\n'
                  << "monotone," << (monotone ? "true" : "false") << '\n';
            } else {
                s << "g_hat,rate,model_outage\n";
                for (double g : queries) {
                    const auto d = rate_adapt::lut_rate(table, g);
                    s << g << ',' << d.rate << ',' << d.outage << '\n';
                }
            }
            o.finish();
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
