// SPDX-License-Identifier: Apache-2.0
//
// Single-link curves on a normalized link (mean gain 1, mean SNR = power):
// assigned rate and outage versus the estimated amplitude, throughput versus
// the target outage, and CSI error variance versus delay.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace robustlink::curves {

struct CurveSpec {
    double snr_db = 10.0;
    std::vector<double> eps{0.1};             // error variance (normalized)
    std::vector<double> p_targets{0.1, 0.01}; // robust rows
    std::vector<double> backoffs{1.0};        // non-robust rows
    std::vector<double> amplitudes;           // empty: linspace(0.05, 3, 60)
    long draws = 0;                           // conditional draws per point; 0 skips
    std::uint64_t seed = 1;
};

struct CurvePoint {
    std::string scheme;  // "robust" or "nonrobust-a<factor>"
    double snr_db = 0.0;
    double eps = 0.0;
    std::optional<double> p_target;
    double g_hat = 0.0;
    double rate = 0.0;
    double model_outage = 0.0;
    std::optional<double> empirical_outage;
    long draws = 0;
};

std::vector<double> linspace(double lo, double hi, int points);

/// Rate and model outage per (eps, scheme, amplitude). With draws > 0 the
/// outage is also measured on draws of h ~ CN(g_hat, eps).
std::vector<CurvePoint> rate_curve(const CurveSpec& spec);

inline constexpr const char* kRateCurveHeader =
    "scheme,snr_db,eps,p_target,g_hat,rate,model_outage";
inline constexpr const char* kOutageCurveHeader =
    "scheme,snr_db,eps,p_target,g_hat,rate,model_outage,empirical_outage,draws";

void write_rate_curve(std::span<const CurvePoint> points, std::ostream& out);
void write_outage_curve(std::span<const CurvePoint> points, std::ostream& out);

struct ThroughputSpec {
    double snr_db = 10.0;
    std::vector<double> eps{0.1};
    std::vector<double> p_targets;  // empty: 25 log-spaced values on [1e-3, 0.9]
    std::vector<double> backoffs{1.0};
    long draws = 20000;
    std::uint64_t seed = 1;
};

struct ThroughputPoint {
    std::string scheme;
    double snr_db = 0.0;
    double eps = 0.0;
    std::optional<double> p_target;
    double throughput = 0.0;  // mean delivered rate, bits/s/Hz
    double outage_rate = 0.0;
    long draws = 0;
};

/// Delivered rate averaged over h ~ CN(0, 1) and the estimate built from it.
/// All rows of one eps share the same draws.
std::vector<ThroughputPoint> throughput_vs_target(const ThroughputSpec& spec);

inline constexpr const char* kThroughputHeader =
    "scheme,snr_db,eps,p_target,throughput,outage_rate,draws";
void write_throughput(std::span<const ThroughputPoint> points, std::ostream& out);

struct UncertaintySpec {
    std::vector<double> snr_db{5.0, 10.0};
    std::vector<int> delays;  // empty: 0..20
    double coherence_slots = 10.0;
    int window = 4;
    int pilots = 8;
    std::optional<int> feedback_bits;
};

struct UncertaintyPoint {
    double snr_db = 0.0;
    int delay = 0;
    double eps = 0.0;  // normalized by the mean gain
};

std::vector<UncertaintyPoint> uncertainty_curve(const UncertaintySpec& spec);

inline constexpr const char* kUncertaintyHeader = "snr_db,delay,eps";
void write_uncertainty(std::span<const UncertaintyPoint> points, std::ostream& out);

}  // namespace robustlink::curves
