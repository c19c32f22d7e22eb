// SPDX-License-Identifier: Apache-2.0
//
// Mean channel gains and temporally correlated Rayleigh fading.

#pragma once

#include <complex>
#include <vector>

#include <Eigen/Core>

#include "robustlink/random.hpp"

namespace robustlink::channel {

struct LinkParams {
    double mean_gain = 1.0;        // lambda, linear power gain
    double coherence_slots = 10.0; // T_c, 50% coherence time in slots
    double power = 1.0;            // rho, relative to unit noise power

    /// gamma = rho * lambda
    double mean_snr() const { return power * mean_gain; }
    void validate() const;
};

/// lambda = intercept * distance^-exponent
double pathloss(double distance_m, double exponent, double intercept);

/// q with J_0(q) = 0.5 (smallest positive root), found once by bisection.
double coherence_constant();

/// c[delta] = J_0(q * delta / T_c)
double correlation(double delta, double coherence_slots);

/// C = log2(1 + rho |h|^2)
double capacity(double power, std::complex<double> h);

struct FadingTrace {
    LinkParams link;
    std::vector<std::complex<double>> h;
    /// Diagonal loading (relative to lambda) that the covariance factorization needed.
    double jitter = 0.0;
};

/// Draws stationary CN(0, lambda) sequences whose covariance is
/// lambda * Toeplitz(c[0], ..., c[N-1]). The Cholesky factor is computed once
/// and shared by every draw.
class FadingGenerator {
public:
    FadingGenerator(double coherence_slots, int slots);

    FadingTrace draw(const LinkParams& link, Rng& rng) const;

    int slots() const { return slots_; }
    double coherence_slots() const { return coherence_slots_; }
    double jitter() const { return jitter_; }

private:
    double coherence_slots_;
    int slots_;
    double jitter_ = 0.0;
    bool fully_correlated_ = false;
    Eigen::MatrixXd factor_;
};

/// One-shot convenience wrapper around FadingGenerator.
FadingTrace gen_trace(const LinkParams& link, int slots, Rng& rng);

}  // namespace robustlink::channel
