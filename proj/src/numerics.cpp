// SPDX-License-Identifier: Apache-2.0

#include "robustlink/numerics.hpp"

#include <algorithm>
#include <array>
#include <cfloat>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

namespace robustlink::numerics {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLogMax = 709.782712893384;  // ln(DBL_MAX)
constexpr int kOrderCap = 1 << 22;
constexpr int kCachedFits = 512;
// Above this argument ln I_0 is taken from the large-argument expansion.
constexpr double kAsymptoticI0 = 1.0e4;

void require_order_and_argument(int m, double x, const char* who)
{
    if (m < 0) {
        throw std::invalid_argument(std::string(who) + ": negative order");
    }
    if (!(x >= 0.0) || !std::isfinite(x)) {
        throw std::invalid_argument(std::string(who) + ": argument must be finite and >= 0");
    }
}

double log_add(double a, double b)
{
    if (a == -kInf) {
        return b;
    }
    if (b == -kInf) {
        return a;
    }
    const double hi = std::max(a, b);
    return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

// r[m] = I_{m+1}(x) / I_m(x) for m = 0 .. count-1, by backward recurrence
// r_{m-1} = x / (2m + x r_m) started well above the requested range.
void bessel_i_ratios(double x, int count, std::vector<double>& r)
{
    r.resize(static_cast<std::size_t>(count));
    const int top = count + 20 + static_cast<int>(std::ceil(6.0 * std::sqrt(x)));
    const double nu = top + 1.0;
    double ratio = x / (nu + std::sqrt(nu * nu + x * x));
    for (int m = top; m >= 1; --m) {
        ratio = x / (2.0 * m + x * ratio);
        if (m - 1 < count) {
            r[static_cast<std::size_t>(m - 1)] = ratio;
        }
    }
}

MarcumResult marcum_log_series(double alpha, double beta, const SeriesConfig& cfg)
{
    const double x = alpha * beta;
    const bool direct = alpha <= beta;
    const double ratio = direct ? alpha / beta : beta / alpha;
    const int first = direct ? 0 : 1;
    const double log_lead = -0.5 * (alpha - beta) * (alpha - beta) + log_scaled_bessel_i0(x);

    int orders = std::max(cfg.max_terms, 1);
    if (cfg.extend_truncation) {
        double estimate = 7.5 * std::sqrt(x) + 20.0;
        if (ratio < 1.0) {
            estimate = std::min(estimate, 30.0 / -std::log(ratio) + 20.0);
        }
        orders = std::max(orders, static_cast<int>(std::min(estimate, double(kOrderCap))));
    }

    std::vector<double> r;
    MarcumResult out;
    for (;;) {
        bessel_i_ratios(x, orders, r);
        double sum = 0.0;
        double term = std::exp(log_lead);
        bool converged = false;
        int m = 0;
        for (; m <= orders; ++m) {
            if (m >= first) {
                sum += term;
            }
            if (m == orders) {
                break;
            }
            const double q = ratio * r[static_cast<std::size_t>(m)];
            if (m >= first && (term == 0.0 || term * q / (1.0 - q) <= cfg.tolerance * sum)) {
                converged = true;
                break;
            }
            term *= q;
        }
        out.terms = m + 1;
        if (converged || !cfg.extend_truncation || orders >= kOrderCap) {
            const double s = std::clamp(sum, 0.0, 1.0);
            out.q = direct ? s : 1.0 - s;
            out.complement = direct ? 1.0 - s : s;
            return out;
        }
        orders = std::min(2 * orders, kOrderCap);
    }
}

MarcumResult marcum_linear_fit(double alpha, double beta, const SeriesConfig& cfg)
{
    const double x = alpha * beta;
    const double log_ratio = std::log(alpha / beta);
    const double log_lead = -0.5 * (alpha * alpha + beta * beta);
    const double log_tol = std::log(cfg.tolerance);
    const int orders = std::max(cfg.max_terms, 1);

    double log_sum = -kInf;
    double previous = -kInf;
    int m = 0;
    for (;; ++m) {
        const double log_term =
            m * log_ratio + bessel_i_stable(m, x, default_tail_fit(m), cfg) + log_lead;
        log_sum = log_add(log_sum, log_term);
        if (m >= orders && (!cfg.extend_truncation || m >= kOrderCap)) {
            break;
        }
        if (log_term == -kInf && m > 0) {
            break;
        }
        if (m > 0 && log_term < previous) {
            const double q = std::exp(log_term - previous);
            if (log_term + std::log(q / (1.0 - q)) - log_sum < log_tol) {
                break;
            }
        }
        previous = log_term;
    }
    MarcumResult out;
    out.terms = m + 1;
    out.q = std::clamp(std::exp(log_sum), 0.0, 1.0);
    out.complement = 1.0 - out.q;
    return out;
}

}  // namespace

double bessel_i(int m, double x, const SeriesConfig& cfg)
{
    require_order_and_argument(m, x, "bessel_i");
    if (x == 0.0) {
        return m == 0 ? 1.0 : 0.0;
    }
    const double half = 0.5 * x;
    const double half_sq = half * half;
    const double log_first = m * std::log(half) - std::lgamma(m + 1.0);
    if (log_first > kLogMax) {
        throw BesselOverflow("bessel_i: leading term overflows at order " + std::to_string(m));
    }
    double term = std::exp(log_first);
    double sum = term;
    const long cap = 100000L + static_cast<long>(4.0 * x);
    for (long l = 0; l < cap; ++l) {
        const double q = half_sq / ((l + 1.0) * (l + m + 1.0));
        term *= q;
        sum += term;
        if (!std::isfinite(sum)) {
            throw BesselOverflow("bessel_i: series overflows at x = " + std::to_string(x));
        }
        if (q < 1.0 && term * q / (1.0 - q) <= cfg.tolerance * sum) {
            break;
        }
    }
    return sum;
}

double log_bessel_i(int m, double x)
{
    require_order_and_argument(m, x, "log_bessel_i");
    if (x == 0.0) {
        return m == 0 ? 0.0 : -kInf;
    }
    if (m == 0 && x > kAsymptoticI0) {
        return x + log_scaled_bessel_i0(x);
    }
    const double half = 0.5 * x;
    const double half_sq = half * half;
    // Largest term: (l+1)(l+m+1) crosses half^2.
    const double root = 0.5 * (-(m + 2.0) + std::sqrt(double(m) * m + 4.0 * half_sq));
    const long peak = std::max(0L, static_cast<long>(std::ceil(root)));
    const double log_peak =
        (2.0 * peak + m) * std::log(half) - std::lgamma(peak + 1.0) - std::lgamma(peak + m + 1.0);

    constexpr double kTiny = 1e-18;
    double sum = 1.0;
    double term = 1.0;
    for (long l = peak;; ++l) {
        term *= half_sq / ((l + 1.0) * (l + m + 1.0));
        sum += term;
        if (term < kTiny * sum) {
            break;
        }
    }
    term = 1.0;
    for (long l = peak; l > 0; --l) {
        term *= (double(l) * (l + m)) / half_sq;
        sum += term;
        if (term < kTiny * sum) {
            break;
        }
    }
    return log_peak + std::log(sum);
}

double log_scaled_bessel_i0(double x)
{
    require_order_and_argument(0, x, "log_scaled_bessel_i0");
    if (x <= kAsymptoticI0) {
        return log_bessel_i(0, x) - x;
    }
    // e^{-x} I_0(x) sqrt(2 pi x) = sum_k ((2k-1)!!)^2 / (k! (8x)^k)
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 64; ++k) {
        term *= (2.0 * k - 1.0) * (2.0 * k - 1.0) / (8.0 * k * x);
        sum += term;
        if (term < 1e-18 * sum) {
            break;
        }
    }
    return -0.5 * std::log(2.0 * std::numbers::pi * x) + std::log(sum);
}

TailFit fit_tail(int m, double x1, double x2, const SeriesConfig& cfg)
{
    if (!(x1 > 0.0) || !(x2 > x1)) {
        throw std::invalid_argument("fit_tail: need 0 < x1 < x2");
    }
    const double low = std::log(bessel_i(m, x1, cfg));
    const double high = std::log(bessel_i(m, x2, cfg));
    if (!std::isfinite(low) || !std::isfinite(high)) {
        throw BesselOverflow("fit_tail: I_m not representable at the fit points");
    }
    TailFit fit;
    fit.order = m;
    fit.threshold = x2;
    fit.slope = (high - low) / (x2 - x1);
    fit.intercept = low - fit.slope * x1;
    return fit;
}

namespace {

// Largest argument at which the direct series for I_m stays finite, with a
// small margin below ln(DBL_MAX).
double series_limit(int m)
{
    constexpr double kMargin = 1e-3;
    double lo = kDefaultFitHigh;
    double hi = 2.0 * kDefaultFitHigh;
    while (log_bessel_i(m, hi) < kLogMax - kMargin) {
        lo = hi;
        hi *= 2.0;
    }
    while (hi - lo > 1e-9 * hi) {
        const double mid = 0.5 * (lo + hi);
        (log_bessel_i(m, mid) < kLogMax - kMargin ? lo : hi) = mid;
    }
    return lo;
}

TailFit make_default_fit(int m)
{
    TailFit fit = fit_tail(m, kDefaultFitLow, kDefaultFitHigh);
    fit.threshold = series_limit(m);
    return fit;
}

}  // namespace

const TailFit& default_tail_fit(int m)
{
    static const std::array<TailFit, kCachedFits> cache = [] {
        std::array<TailFit, kCachedFits> fits{};
        for (int order = 0; order < kCachedFits; ++order) {
            fits[static_cast<std::size_t>(order)] = make_default_fit(order);
        }
        return fits;
    }();
    if (m >= 0 && m < kCachedFits) {
        return cache[static_cast<std::size_t>(m)];
    }
    thread_local TailFit scratch;
    scratch = make_default_fit(m);
    return scratch;
}

double bessel_i_stable(int m, double x, const TailFit& fit, const SeriesConfig& cfg)
{
    require_order_and_argument(m, x, "bessel_i_stable");
    if (fit.order != m) {
        throw std::invalid_argument("bessel_i_stable: tail fit belongs to another order");
    }
    if (x <= fit.threshold) {
        return std::log(bessel_i(m, x, cfg));
    }
    return fit.slope * x + fit.intercept;
}

MarcumResult marcum_q1_detail(double alpha, double beta, const SeriesConfig& cfg)
{
    if (!(alpha >= 0.0) || !(beta >= 0.0) || std::isnan(alpha) || std::isnan(beta)) {
        throw std::invalid_argument("marcum_q1: arguments must be >= 0");
    }
    MarcumResult out;
    if (beta == 0.0) {
        return out;
    }
    if (std::isinf(beta)) {
        out.q = 0.0;
        out.complement = 1.0;
        return out;
    }
    if (alpha == 0.0) {
        out.q = std::exp(-0.5 * beta * beta);
        out.complement = -std::expm1(-0.5 * beta * beta);
        out.terms = 1;
        return out;
    }
    if (std::isinf(alpha)) {
        return out;
    }
    return cfg.tail == TailModel::linear_fit ? marcum_linear_fit(alpha, beta, cfg)
                                             : marcum_log_series(alpha, beta, cfg);
}

double marcum_q1(double alpha, double beta, const SeriesConfig& cfg)
{
    return marcum_q1_detail(alpha, beta, cfg).q;
}

double rician_pdf(double g, double g_hat, double eps)
{
    if (!(eps > 0.0)) {
        throw std::invalid_argument("rician_pdf: eps must be > 0");
    }
    if (!(g_hat >= 0.0)) {
        throw std::invalid_argument("rician_pdf: g_hat must be >= 0");
    }
    if (!(g > 0.0) || std::isinf(g)) {
        return 0.0;
    }
    const double log_density = std::log(2.0 * g / eps) - (g * g + g_hat * g_hat) / eps +
                               log_bessel_i(0, 2.0 * g * g_hat / eps);
    return std::exp(log_density);
}

double rician_cdf(double b, double g_hat, double eps, const SeriesConfig& cfg)
{
    if (!(eps > 0.0)) {
        throw std::invalid_argument("rician_cdf: eps must be > 0");
    }
    if (!(g_hat >= 0.0)) {
        throw std::invalid_argument("rician_cdf: g_hat must be >= 0");
    }
    if (!(b > 0.0)) {
        return 0.0;
    }
    if (std::isinf(b)) {
        return 1.0;
    }
    const double scale = std::sqrt(2.0 / eps);
    return std::clamp(marcum_q1_detail(g_hat * scale, b * scale, cfg).complement, 0.0, 1.0);
}

double invert_monotone(const std::function<double(double)>& f, double target, double lo,
                       double hi, double tol)
{
    if (!(hi >= lo) || !(tol > 0.0)) {
        throw std::invalid_argument("invert_monotone: need lo <= hi and tol > 0");
    }
    const double f_lo = f(lo);
    const double f_hi = f(hi);
    if (!(f_lo <= target) || !(target <= f_hi)) {
        throw BracketError("invert_monotone: target " + std::to_string(target) +
                           " outside [" + std::to_string(f_lo) + ", " + std::to_string(f_hi) + "]");
    }
    for (int iter = 0; iter < 2000 && hi - lo > tol; ++iter) {
        const double mid = lo + 0.5 * (hi - lo);
        if (mid <= lo || mid >= hi) {
            break;
        }
        if (f(mid) <= target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return lo;
}

double bessel_j0(double x)
{
    return std::cyl_bessel_j(0.0, std::abs(x));
}

}  // namespace robustlink::numerics
