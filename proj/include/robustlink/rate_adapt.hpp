// SPDX-License-Identifier: Apache-2.0
//
// Rate assignment from an imperfect channel estimate. The robust rule picks
// the largest rate whose conditional outage probability does not exceed a
// target; the back-off rule scales the estimated capacity. Rates can be
// precomputed on an amplitude grid and looked up with a floor rule.

#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "robustlink/numerics.hpp"

namespace robustlink::rate_adapt {

struct RateDecision {
    double rate = 0.0;           // assigned rate, bits/s/Hz
    double outage = 0.0;         // model outage probability at that rate
    double expected_rate = 0.0;  // (1 - outage) * rate
};

RateDecision make_decision(double rate, double outage);

/// P{log2(1 + rho g^2) < rate | g_hat}. eps == 0 is the perfect-CSI step.
double outage_prob(double rate, double g_hat, double eps, double power,
                   const numerics::SeriesConfig& series = {});

struct RobustOptions {
    double tolerance = 1e-4;  // bisection bracket width, bits/s/Hz
    double max_rate = 64.0;   // upper bracket growth stops here
    numerics::SeriesConfig series;
};

/// Largest rate (to within options.tolerance, from below) whose conditional
/// outage probability is at most p_target.
RateDecision robust_rate(double g_hat, double eps, double power, double p_target,
                         const RobustOptions& options = {});

/// rate = backoff * log2(1 + rho g_hat^2). The outage field is filled in with
/// the model outage at eps for bookkeeping only.
RateDecision nonrobust_rate(double g_hat, double power, double backoff, double eps,
                            const numerics::SeriesConfig& series = {});

struct RateLut {
    std::vector<double> amplitudes;  // strictly increasing
    std::vector<double> rates;       // nondecreasing
    double power = 1.0;
    double mean_gain = 1.0;
    double eps = 0.0;
    double p_target = 0.1;

    double mean_snr() const { return power * mean_gain; }
};

/// `points` log-spaced amplitudes on [1e-3, 6] * sqrt(mean_gain).
std::vector<double> default_lut_grid(double mean_gain, int points = 512);

/// Right-to-left clamp r_i <- min(r_i, r_{i+1}).
void enforce_monotone(std::span<double> rates);

RateLut build_lut(std::span<const double> grid, double eps, double power, double mean_gain,
                  double p_target, const RobustOptions& options = {});

/// Rate at the largest grid amplitude <= g_hat; zero below the grid.
RateDecision lut_rate(const RateLut& lut, double g_hat,
                      const numerics::SeriesConfig& series = {});

/// CSV layout:
///   # robustlink-rate-lut v1
///   # mean_snr=<g>,eps=<e>,p_target=<p>,power=<rho>,mean_gain=<lambda>
///   g_hat,rate
///   <amplitude>,<rate>   (one line per grid point)
void write_lut_csv(const RateLut& lut, std::ostream& out);
RateLut read_lut_csv(std::istream& in);

}  // namespace robustlink::rate_adapt
