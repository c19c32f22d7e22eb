// SPDX-License-Identifier: Apache-2.0

#include "robustlink/rate_adapt.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace robustlink::rate_adapt {

namespace {

double shannon_rate(double power, double amplitude)
{
    return std::log2(1.0 + power * amplitude * amplitude);
}

std::string format_double(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

RateDecision make_decision(double rate, double outage)
{
    RateDecision d;
    d.rate = rate;
    d.outage = std::clamp(outage, 0.0, 1.0);
    d.expected_rate = (1.0 - d.outage) * rate;
    return d;
}

double outage_prob(double rate, double g_hat, double eps, double power,
                   const numerics::SeriesConfig& series)
{
    if (!(power > 0.0) || !(eps >= 0.0) || !(g_hat >= 0.0)) {
        throw std::invalid_argument("outage_prob: need power > 0, eps >= 0, g_hat >= 0");
    }
    if (!(rate > 0.0)) {
        return 0.0;
    }
    if (eps == 0.0) {
        return rate <= shannon_rate(power, g_hat) ? 0.0 : 1.0;
    }
    const double threshold = std::sqrt(std::expm1(rate * std::numbers::ln2) / power);
    return numerics::rician_cdf(threshold, g_hat, eps, series);
}

RateDecision robust_rate(double g_hat, double eps, double power, double p_target,
                         const RobustOptions& options)
{
    if (!(p_target > 0.0 && p_target < 1.0)) {
        throw std::invalid_argument("robust_rate: target outage must lie in (0, 1)");
    }
    if (!(eps >= 0.0)) {
        throw std::invalid_argument("robust_rate: eps must be >= 0");
    }
    if (eps == 0.0) {
        return make_decision(shannon_rate(power, g_hat), 0.0);
    }
    const auto outage = [&](double r) { return outage_prob(r, g_hat, eps, power, options.series); };

    double hi = std::max(1.0, std::ceil(shannon_rate(power, g_hat + 3.0 * std::sqrt(eps))));
    while (outage(hi) < p_target) {
        if (hi >= options.max_rate) {
            throw numerics::BracketError("robust_rate: no rate up to max_rate reaches the target");
        }
        hi = std::min(2.0 * hi, options.max_rate);
    }
    const double rate = numerics::invert_monotone(outage, p_target, 0.0, hi, options.tolerance);
    return make_decision(rate, outage(rate));
}

RateDecision nonrobust_rate(double g_hat, double power, double backoff, double eps,
                            const numerics::SeriesConfig& series)
{
    if (!(backoff > 0.0 && backoff <= 1.0)) {
        throw std::invalid_argument("nonrobust_rate: back-off factor must lie in (0, 1]");
    }
    const double rate = backoff * shannon_rate(power, g_hat);
    return make_decision(rate, outage_prob(rate, g_hat, eps, power, series));
}

std::vector<double> default_lut_grid(double mean_gain, int points)
{
    if (points < 2 || !(mean_gain > 0.0)) {
        throw std::invalid_argument("default_lut_grid: need >= 2 points and mean gain > 0");
    }
    const double root = std::sqrt(mean_gain);
    const double lo = std::log(1e-3 * root);
    const double hi = std::log(6.0 * root);
    std::vector<double> grid(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) {
        grid[static_cast<std::size_t>(i)] = std::exp(lo + (hi - lo) * i / (points - 1));
    }
    return grid;
}

void enforce_monotone(std::span<double> rates)
{
    for (std::size_t i = rates.size(); i-- > 1;) {
        rates[i - 1] = std::min(rates[i - 1], rates[i]);
    }
}

RateLut build_lut(std::span<const double> grid, double eps, double power, double mean_gain,
                  double p_target, const RobustOptions& options)
{
    if (grid.empty()) {
        throw std::invalid_argument("build_lut: empty grid");
    }
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(grid[i] > grid[i - 1])) {
            throw std::invalid_argument("build_lut: grid must be strictly increasing");
        }
    }
    RateLut lut;
    lut.amplitudes.assign(grid.begin(), grid.end());
    lut.power = power;
    lut.mean_gain = mean_gain;
    lut.eps = eps;
    lut.p_target = p_target;
    lut.rates.reserve(grid.size());
    for (double g : grid) {
        lut.rates.push_back(robust_rate(g, eps, power, p_target, options).rate);
    }
    enforce_monotone(lut.rates);
    return lut;
}

RateDecision lut_rate(const RateLut& lut, double g_hat, const numerics::SeriesConfig& series)
{
    const auto it = std::upper_bound(lut.amplitudes.begin(), lut.amplitudes.end(), g_hat);
    if (it == lut.amplitudes.begin()) {
        return make_decision(0.0, 0.0);
    }
    const auto index = static_cast<std::size_t>(std::distance(lut.amplitudes.begin(), it) - 1);
    const double rate = lut.rates[index];
    return make_decision(rate, outage_prob(rate, g_hat, lut.eps, lut.power, series));
}

void write_lut_csv(const RateLut& lut, std::ostream& out)
{
    out << "# robustlink-rate-lut v1\n";
    out << "# mean_snr=" << format_double(lut.mean_snr()) << ",eps=" << format_double(lut.eps)
        << ",p_target=" << format_double(lut.p_target) << ",power=" << format_double(lut.power)
        << ",mean_gain=" << format_double(lut.mean_gain) << '\n';
    out << "g_hat,rate\n";
    for (std::size_t i = 0; i < lut.amplitudes.size(); ++i) {
        out << format_double(lut.amplitudes[i]) << ',' << format_double(lut.rates[i]) << '\n';
    }
}

RateLut read_lut_csv(std::istream& in)
{
    RateLut lut;
    std::string line;
    bool have_params = false;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        if (line[0] == '#') {
            if (line.find("mean_gain=") == std::string::npos) {
                continue;
            }
            std::stringstream fields(line.substr(1));
            std::string kv;
            while (std::getline(fields, kv, ',')) {
                const auto eq = kv.find('=');
                if (eq == std::string::npos) {
                    continue;
                }
                auto key = kv.substr(0, eq);
                key.erase(0, key.find_first_not_of(' '));
                const double value = std::stod(kv.substr(eq + 1));
                if (key == "eps") {
                    lut.eps = value;
                } else if (key == "p_target") {
                    lut.p_target = value;
                } else if (key == "power") {
                    lut.power = value;
                } else if (key == "mean_gain") {
                    lut.mean_gain = value;
                }
            }
            have_params = true;
            continue;
        }
        if (!have_header) {
            if (line != "g_hat,rate") {
                throw std::runtime_error("read_lut_csv: unexpected header '" + line + "'");
            }
            have_header = true;
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw std::runtime_error("read_lut_csv: malformed row '" + line + "'");
        }
        lut.amplitudes.push_back(std::stod(line.substr(0, comma)));
        lut.rates.push_back(std::stod(line.substr(comma + 1)));
    }
    if (!have_params || !have_header || lut.amplitudes.empty()) {
        throw std::runtime_error("read_lut_csv: incomplete table");
    }
    return lut;
}

}  // namespace robustlink::rate_adapt
