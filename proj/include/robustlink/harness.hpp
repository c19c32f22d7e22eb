// SPDX-License-Identifier: Apache-2.0
//
// Monte-Carlo experiment driver: user drops in a single cell, SNR calibration
// at the cell edge, scheme sweeps over the feedback/acknowledgement delay and
// aggregation into CSV rows.
//
// Reproducibility: every random stream is seeded from (master seed, drop,
// stream id, user) only. All schemes, delays and SNR points of one drop see
// the same user positions, fading traces and CSI noise, and the result does
// not depend on the number of worker threads.

#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "robustlink/channel.hpp"
#include "robustlink/random.hpp"

namespace robustlink::harness {

enum class SchemeKind { perfect_csi, nonrobust, robust_alg1, robust_alg2 };

struct Scheme {
    SchemeKind kind = SchemeKind::robust_alg1;
    double backoff = 1.0;  // nonrobust only

    std::string id() const;
    bool operator==(const Scheme&) const = default;
};

/// Accepts "perfect-csi", "robust-alg1", "robust-alg2", "nonrobust" (one
/// scheme per back-off factor), "nonrobust-a<factor>" and "all".
std::vector<Scheme> parse_schemes(std::span<const std::string> names,
                                  std::span<const double> backoffs);

struct SimConfig {
    int users = 2;
    double radius_m = 250.0;
    double min_distance_m = 35.0;
    double pathloss_exponent = 3.5;
    double pathloss_intercept = 3.5481338923357533e-15;  // 10^-14.45
    std::vector<double> snr_edge_db{5.0};
    double coherence_slots = 10.0;
    int pilots = 8;
    std::optional<int> feedback_bits;  // empty: no quantization
    int window = 4;
    std::vector<int> delays{0, 2, 4, 6, 8, 10, 12, 14, 16, 18, 20};
    double p_target = 0.1;
    std::vector<double> backoffs{1.0, 0.95};
    int drops = 500;
    int slots = 100;
    std::uint64_t seed = 1;
    std::vector<Scheme> schemes{{SchemeKind::perfect_csi},
                                {SchemeKind::nonrobust, 1.0},
                                {SchemeKind::nonrobust, 0.95},
                                {SchemeKind::robust_alg1},
                                {SchemeKind::robust_alg2}};
    bool use_lut = false;
    int lut_points = 512;
    int workers = 1;
    double fulfilled_band = 0.1;  // relative half-width around p_target
    int min_transmissions = 20;
    double rate_tolerance = 1e-4;

    void validate() const;
};

/// Reads the JSON config layout documented in the README. Keys left out keep
/// their defaults; unknown keys are rejected.
SimConfig config_from_json(const std::string& text);
std::string config_to_json(const SimConfig& cfg);

struct OutageTally {
    int transmissions = 0;
    int outages = 0;
};

/// Fraction of tallies with at least min_transmissions whose empirical outage
/// rate lies within +-band (relative) of p_target. Zero if none qualifies.
double fulfilled_fraction(std::span<const OutageTally> tallies, double p_target,
                          double band = 0.1, int min_transmissions = 20);

/// rho such that the mean SNR at the cell edge equals snr_edge_db.
double calibrate_power(const SimConfig& cfg, double snr_edge_db);

/// Uniform placement over the annulus [min_distance_m, radius_m].
std::vector<channel::LinkParams> drop_users(const SimConfig& cfg, double power, Rng& rng);

struct SchemeDropResult {
    std::vector<double> throughputs;   // final T_k
    std::vector<OutageTally> tallies;  // per user
    long transmissions = 0;
    long outages = 0;
    long model_fulfilled = 0;  // transmissions whose conditional outage is within the band
    double utility = 0.0;
    double mean_throughput = 0.0;
};

/// One scheduled transmission, for the optional per-slot trace.
struct SlotRecord {
    int drop = 0;
    double snr_db = 0.0;
    int delay = 0;
    std::string scheme;
    long slot = 0;
    std::size_t user = 0;
    double rate = 0.0;
    double outage = 0.0;
    bool success = false;
    std::vector<double> throughputs;
};

using SlotSink = std::function<void(const SlotRecord&)>;

/// Simulates one drop at one SNR and delay for every scheme in cfg.schemes.
std::vector<SchemeDropResult> run_drop(const SimConfig& cfg, double snr_edge_db, int delay,
                                       int drop, const channel::FadingGenerator& fading,
                                       const SlotSink& sink = {});

std::vector<SchemeDropResult> run_drop(const SimConfig& cfg, double snr_edge_db, int delay,
                                       int drop);

struct MetricsRow {
    std::string scheme;
    int delay = 0;
    double snr_db = 0.0;
    double pf_utility = 0.0;
    double pf_utility_se = 0.0;
    double mean_throughput = 0.0;
    double mean_throughput_se = 0.0;
    double outage_rate = 0.0;
    double fulfilled_fraction = 0.0;   // per transmission, conditional outage within band
    double fulfilled_empirical = 0.0;  // per (drop, user), empirical outage within band
    long transmissions = 0;
    int drops = 0;
    std::uint64_t seed = 0;
};

/// per_drop[snr][drop][delay][scheme]
using DropTable = std::vector<std::vector<std::vector<std::vector<SchemeDropResult>>>>;

struct ExperimentResult {
    std::vector<MetricsRow> rows;  // ordered by snr, delay, scheme
    DropTable per_drop;
};

ExperimentResult run_experiment(const SimConfig& cfg, const SlotSink& sink = {});

inline constexpr const char* kMetricsHeader =
    "scheme,delay,snr_db,pf_utility,pf_utility_se,mean_throughput,mean_throughput_se,"
    "outage_rate,fulfilled_fraction,fulfilled_empirical,transmissions,drops,seed";

void write_metrics_csv(std::span<const MetricsRow> rows, std::ostream& out);

/// Writes the CSV to `path`; I/O failures are reported with the path.
void write_metrics_csv(std::span<const MetricsRow> rows, const std::string& path);

/// Header for per-slot records: drop,snr_db,delay,scheme,slot,user,rate,outage,success,T0..T{K-1}
std::string slot_trace_header(int users);
void write_slot_record(const SlotRecord& rec, std::ostream& out);

/// Fading traces of one drop at one SNR:
///   snr_db,drop,user,mean_gain,slot,h_re,h_im
void dump_traces(const SimConfig& cfg, double snr_edge_db, int drop, std::ostream& out);

}  // namespace robustlink::harness
