// SPDX-License-Identifier: Apache-2.0

#include "robustlink/curves.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "robustlink/channel.hpp"
#include "robustlink/csi.hpp"
#include "robustlink/random.hpp"
#include "robustlink/rate_adapt.hpp"

namespace robustlink::curves {

namespace {

std::string fmt(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string fmt(const std::optional<double>& v)
{
    return v ? fmt(*v) : std::string{};
}

std::string nonrobust_id(double a)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "nonrobust-a%.6g", a);
    return buf;
}

double db_to_linear(double db)
{
    return std::pow(10.0, db / 10.0);
}

void check_eps(double eps)
{
    if (!(eps >= 0.0 && eps < 1.0)) {
        throw std::invalid_argument("eps must lie in [0, 1) for a normalized link");
    }
}

}  // namespace

std::vector<double> linspace(double lo, double hi, int points)
{
    if (points < 1) {
        throw std::invalid_argument("linspace: need at least one point");
    }
    std::vector<double> v(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) {
        v[static_cast<std::size_t>(i)] = points == 1 ? lo : lo + (hi - lo) * i / (points - 1);
    }
    return v;
}

std::vector<CurvePoint> rate_curve(const CurveSpec& spec)
{
    const double power = db_to_linear(spec.snr_db);
    const auto amplitudes = spec.amplitudes.empty() ? linspace(0.05, 3.0, 60) : spec.amplitudes;
    std::vector<CurvePoint> out;
    std::uint64_t index = 0;

    const auto measure = [&](CurvePoint& p) {
        if (spec.draws <= 0) {
            return;
        }
        Rng rng(derive_seed(spec.seed, {index}));
        const double sd = std::sqrt(p.eps);
        long outages = 0;
        for (long i = 0; i < spec.draws; ++i) {
            const auto h = std::complex<double>(p.g_hat, 0.0) + sd * complex_normal(rng);
            if (channel::capacity(power, h) < p.rate) {
                ++outages;
            }
        }
        p.empirical_outage = static_cast<double>(outages) / static_cast<double>(spec.draws);
        p.draws = spec.draws;
    };

    for (double eps : spec.eps) {
        check_eps(eps);
        for (double p_target : spec.p_targets) {
            for (double g : amplitudes) {
                const auto d = rate_adapt::robust_rate(g, eps, power, p_target);
                CurvePoint p{"robust", spec.snr_db, eps, p_target, g, d.rate, d.outage, {}, 0};
                measure(p);
                ++index;
                out.push_back(p);
            }
        }
        for (double a : spec.backoffs) {
            for (double g : amplitudes) {
                const auto d = rate_adapt::nonrobust_rate(g, power, a, eps);
                CurvePoint p{nonrobust_id(a), spec.snr_db, eps, {}, g, d.rate, d.outage, {}, 0};
                measure(p);
                ++index;
                out.push_back(p);
            }
        }
    }
    return out;
}

void write_rate_curve(std::span<const CurvePoint> points, std::ostream& out)
{
    out << kRateCurveHeader << '\n';
    for (const auto& p : points) {
        out << p.scheme << ',' << fmt(p.snr_db) << ',' << fmt(p.eps) << ',' << fmt(p.p_target)
            << ',' << fmt(p.g_hat) << ',' << fmt(p.rate) << ',' << fmt(p.model_outage) << '\n';
    }
}

void write_outage_curve(std::span<const CurvePoint> points, std::ostream& out)
{
    out << kOutageCurveHeader << '\n';
    for (const auto& p : points) {
        out << p.scheme << ',' << fmt(p.snr_db) << ',' << fmt(p.eps) << ',' << fmt(p.p_target)
            << ',' << fmt(p.g_hat) << ',' << fmt(p.rate) << ',' << fmt(p.model_outage) << ','
            << fmt(p.empirical_outage) << ',' << p.draws << '\n';
    }
}

std::vector<ThroughputPoint> throughput_vs_target(const ThroughputSpec& spec)
{
    if (spec.draws < 1) {
        throw std::invalid_argument("throughput_vs_target: need at least one draw");
    }
    const double power = db_to_linear(spec.snr_db);
    std::vector<double> targets = spec.p_targets;
    if (targets.empty()) {
        for (double x : linspace(std::log(1e-3), std::log(0.9), 25)) {
            targets.push_back(std::exp(x));
        }
    }
    std::vector<ThroughputPoint> out;
    for (std::size_t e = 0; e < spec.eps.size(); ++e) {
        const double eps = spec.eps[e];
        check_eps(eps);
        Rng rng(derive_seed(spec.seed, {e}));
        std::vector<double> capacity(static_cast<std::size_t>(spec.draws));
        std::vector<double> g_hat(capacity.size());
        for (std::size_t i = 0; i < capacity.size(); ++i) {
            const auto h = complex_normal(rng);
            const auto z = complex_normal(rng);
            capacity[i] = channel::capacity(power, h);
            g_hat[i] = csi::synthesize_view(h, eps, 1.0, z, 0).amplitude();
        }
        const auto accumulate = [&](ThroughputPoint p, auto&& rule) {
            double delivered = 0.0;
            long outages = 0;
            for (std::size_t i = 0; i < capacity.size(); ++i) {
                const double r = rule(g_hat[i]);
                if (r <= capacity[i]) {
                    delivered += r;
                } else {
                    ++outages;
                }
            }
            const auto n = static_cast<double>(capacity.size());
            p.throughput = delivered / n;
            p.outage_rate = static_cast<double>(outages) / n;
            p.draws = spec.draws;
            out.push_back(p);
        };
        for (double p_target : targets) {
            accumulate(ThroughputPoint{"robust", spec.snr_db, eps, p_target},
                       [&](double g) { return rate_adapt::robust_rate(g, eps, power, p_target).rate; });
        }
        for (double a : spec.backoffs) {
            accumulate(ThroughputPoint{nonrobust_id(a), spec.snr_db, eps, {}},
                       [&](double g) { return rate_adapt::nonrobust_rate(g, power, a, eps).rate; });
        }
    }
    return out;
}

void write_throughput(std::span<const ThroughputPoint> points, std::ostream& out)
{
    out << kThroughputHeader << '\n';
    for (const auto& p : points) {
        out << p.scheme << ',' << fmt(p.snr_db) << ',' << fmt(p.eps) << ',' << fmt(p.p_target)
            << ',' << fmt(p.throughput) << ',' << fmt(p.outage_rate) << ',' << p.draws << '\n';
    }
}

std::vector<UncertaintyPoint> uncertainty_curve(const UncertaintySpec& spec)
{
    std::vector<int> delays = spec.delays;
    if (delays.empty()) {
        for (int d = 0; d <= 20; ++d) {
            delays.push_back(d);
        }
    }
    std::vector<UncertaintyPoint> out;
    for (double snr : spec.snr_db) {
        csi::CsiConfig cfg;
        cfg.window = spec.window;
        cfg.pilots = spec.pilots;
        cfg.feedback_bits = spec.feedback_bits;
        cfg.link.mean_gain = 1.0;
        cfg.link.power = db_to_linear(snr);
        cfg.link.coherence_slots = spec.coherence_slots;
        for (int d : delays) {
            cfg.delay = d;
            out.push_back({snr, d, csi::error_variance(cfg)});
        }
    }
    return out;
}

void write_uncertainty(std::span<const UncertaintyPoint> points, std::ostream& out)
{
    out << kUncertaintyHeader << '\n';
    for (const auto& p : points) {
        out << fmt(p.snr_db) << ',' << p.delay << ',' << fmt(p.eps) << '\n';
    }
}

}  // namespace robustlink::curves
