// SPDX-License-Identifier: Apache-2.0

#include "robustlink/channel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Cholesky>

#include "robustlink/numerics.hpp"

namespace robustlink::channel {

namespace {

constexpr double kInitialJitter = 1e-10;

}  // namespace

void LinkParams::validate() const
{
    if (!(mean_gain > 0.0) || !(coherence_slots > 0.0) || !(power > 0.0)) {
        throw std::invalid_argument("LinkParams: mean gain, coherence time and power must be > 0");
    }
}

double pathloss(double distance_m, double exponent, double intercept)
{
    if (!(distance_m > 0.0)) {
        throw std::invalid_argument("pathloss: distance must be > 0");
    }
    return intercept * std::pow(distance_m, -exponent);
}

double coherence_constant()
{
    // 1 - J_0 increases on [0, j_{0,1}] with j_{0,1} ~ 2.405.
    static const double q = numerics::invert_monotone(
        [](double x) { return 1.0 - numerics::bessel_j0(x); }, 0.5, 0.0, 2.4, 1e-15);
    return q;
}

double correlation(double delta, double coherence_slots)
{
    if (!(coherence_slots > 0.0)) {
        throw std::invalid_argument("correlation: coherence time must be > 0");
    }
    if (std::isinf(coherence_slots)) {
        return 1.0;
    }
    return numerics::bessel_j0(coherence_constant() * delta / coherence_slots);
}

double capacity(double power, std::complex<double> h)
{
    return std::log2(1.0 + power * std::norm(h));
}

FadingGenerator::FadingGenerator(double coherence_slots, int slots)
    : coherence_slots_(coherence_slots), slots_(slots)
{
    if (slots < 1) {
        throw std::invalid_argument("FadingGenerator: need at least one slot");
    }
    if (!(coherence_slots > 0.0)) {
        throw std::invalid_argument("FadingGenerator: coherence time must be > 0");
    }
    if (std::isinf(coherence_slots)) {
        fully_correlated_ = true;
        return;
    }

    Eigen::MatrixXd cov(slots, slots);
    for (int i = 0; i < slots; ++i) {
        for (int j = 0; j < slots; ++j) {
            cov(i, j) = correlation(std::abs(i - j), coherence_slots);
        }
    }
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    double jitter = kInitialJitter;
    while (llt.info() != Eigen::Success) {
        if (jitter > 1e-3) {
            throw std::runtime_error("FadingGenerator: covariance is not positive semidefinite");
        }
        llt.compute(cov + jitter * Eigen::MatrixXd::Identity(slots, slots));
        jitter_ = jitter;
        jitter *= 10.0;
    }
    factor_ = llt.matrixL();
}

FadingTrace FadingGenerator::draw(const LinkParams& link, Rng& rng) const
{
    link.validate();
    FadingTrace trace;
    trace.link = link;
    trace.jitter = jitter_;
    trace.h.resize(static_cast<std::size_t>(slots_));
    const double scale = std::sqrt(link.mean_gain);

    if (fully_correlated_) {
        const auto h = scale * complex_normal(rng);
        std::fill(trace.h.begin(), trace.h.end(), h);
        return trace;
    }

    std::vector<std::complex<double>> z(static_cast<std::size_t>(slots_));
    for (auto& v : z) {
        v = complex_normal(rng);
    }
    for (int i = 0; i < slots_; ++i) {
        std::complex<double> acc = 0.0;
        for (int j = 0; j <= i; ++j) {
            acc += factor_(i, j) * z[static_cast<std::size_t>(j)];
        }
        trace.h[static_cast<std::size_t>(i)] = scale * acc;
    }
    return trace;
}

FadingTrace gen_trace(const LinkParams& link, int slots, Rng& rng)
{
    return FadingGenerator(link.coherence_slots, slots).draw(link, rng);
}

}  // namespace robustlink::channel
