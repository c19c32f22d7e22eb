// SPDX-License-Identifier: Apache-2.0
//
// Transmitter-side channel knowledge: MMSE prediction error variance as a
// function of feedback delay, prediction window, pilot count and feedback
// resolution, and synthesis of estimates that follow that error model.

#pragma once

#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "robustlink/channel.hpp"
#include "robustlink/random.hpp"

namespace robustlink::csi {

enum class EpsilonFormula {
    /// eps = lambda * (1 - (1 - 2^-Q) c^T (C + (gamma N_P)^-1 I)^-1 c)
    mmse_complement,
    /// eps = (1 - 2^-Q) c^T (C + rho N_P I)^-1 c, evaluated as written
    literal,
};

struct CsiConfig {
    int delay = 0;                    // Delta, slots
    int window = 4;                   // W observations used for prediction
    int pilots = 8;                   // N_P per block
    std::optional<int> feedback_bits; // Q; empty means unquantized
    channel::LinkParams link;
    EpsilonFormula formula = EpsilonFormula::mmse_complement;

    void validate() const;
};

struct CsiView {
    std::complex<double> estimate;  // h_hat
    double error_variance = 0.0;    // eps
    int slot = 0;

    double amplitude() const { return std::abs(estimate); }
};

/// [c[Delta], ..., c[Delta + W - 1]]
std::vector<double> cov_vector(const CsiConfig& cfg);

/// W x W Toeplitz matrix with first row [c[0], ..., c[W - 1]].
Eigen::MatrixXd cov_matrix(const CsiConfig& cfg);

/// Prediction error variance eps (absolute power units, i.e. scaled by lambda).
double error_variance(const CsiConfig& cfg);

/// h_hat = ((lambda - eps) / lambda) (h + v) with v = sqrt(eps lambda / (lambda - eps)) * unit_noise,
/// where unit_noise ~ CN(0, 1). Then h | h_hat ~ CN(h_hat, eps).
CsiView synthesize_view(std::complex<double> h, double eps, double mean_gain,
                        std::complex<double> unit_noise, int slot);

CsiView synthesize_view(const channel::FadingTrace& trace, int slot, const CsiConfig& cfg, Rng& rng);

}  // namespace robustlink::csi
