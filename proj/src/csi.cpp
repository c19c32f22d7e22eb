// SPDX-License-Identifier: Apache-2.0

#include "robustlink/csi.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Cholesky>

namespace robustlink::csi {

namespace {

double quantization_factor(const std::optional<int>& bits)
{
    return bits ? 1.0 - std::exp2(-double(*bits)) : 1.0;
}

}  // namespace

void CsiConfig::validate() const
{
    if (delay < 0 || window < 1 || pilots < 1) {
        throw std::invalid_argument("CsiConfig: need delay >= 0, window >= 1, pilots >= 1");
    }
    if (feedback_bits && *feedback_bits < 1) {
        throw std::invalid_argument("CsiConfig: feedback bits must be positive");
    }
    link.validate();
}

std::vector<double> cov_vector(const CsiConfig& cfg)
{
    cfg.validate();
    std::vector<double> c(static_cast<std::size_t>(cfg.window));
    for (int i = 0; i < cfg.window; ++i) {
        c[static_cast<std::size_t>(i)] = channel::correlation(cfg.delay + i, cfg.link.coherence_slots);
    }
    return c;
}

Eigen::MatrixXd cov_matrix(const CsiConfig& cfg)
{
    cfg.validate();
    const int w = cfg.window;
    Eigen::MatrixXd cov(w, w);
    for (int i = 0; i < w; ++i) {
        for (int j = 0; j < w; ++j) {
            cov(i, j) = channel::correlation(std::abs(i - j), cfg.link.coherence_slots);
        }
    }
    return cov;
}

double error_variance(const CsiConfig& cfg)
{
    const auto c_std = cov_vector(cfg);
    const Eigen::Map<const Eigen::VectorXd> c(c_std.data(), cfg.window);
    Eigen::MatrixXd system = cov_matrix(cfg);
    const double quant = quantization_factor(cfg.feedback_bits);

    if (cfg.formula == EpsilonFormula::literal) {
        system.diagonal().array() += cfg.link.power * cfg.pilots;
    } else {
        system.diagonal().array() += 1.0 / (cfg.link.mean_snr() * cfg.pilots);
    }
    Eigen::LLT<Eigen::MatrixXd> llt(system);
    if (llt.info() != Eigen::Success) {
        throw std::runtime_error("error_variance: prediction system is singular");
    }
    const double explained = quant * c.dot(llt.solve(c));

    if (cfg.formula == EpsilonFormula::literal) {
        return explained;
    }
    const double lambda = cfg.link.mean_gain;
    return std::clamp(lambda * (1.0 - explained), 0.0, lambda);
}

CsiView synthesize_view(std::complex<double> h, double eps, double mean_gain,
                        std::complex<double> unit_noise, int slot)
{
    if (!(mean_gain > 0.0) || !(eps >= 0.0)) {
        throw std::invalid_argument("synthesize_view: need mean gain > 0 and eps >= 0");
    }
    CsiView view;
    view.slot = slot;
    view.error_variance = std::min(eps, mean_gain);
    if (eps == 0.0) {
        view.estimate = h;
        return view;
    }
    if (eps >= mean_gain) {
        view.estimate = 0.0;
        return view;
    }
    const double residual = mean_gain - eps;
    const double noise_std = std::sqrt(eps * mean_gain / residual);
    view.estimate = (residual / mean_gain) * (h + noise_std * unit_noise);
    return view;
}

CsiView synthesize_view(const channel::FadingTrace& trace, int slot, const CsiConfig& cfg, Rng& rng)
{
    if (slot < 0 || slot >= static_cast<int>(trace.h.size())) {
        throw std::out_of_range("synthesize_view: slot outside the trace");
    }
    const double eps = error_variance(cfg);
    return synthesize_view(trace.h[static_cast<std::size_t>(slot)], eps, trace.link.mean_gain,
                           complex_normal(rng), slot);
}

}  // namespace robustlink::csi
