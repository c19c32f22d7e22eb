// SPDX-License-Identifier: Apache-2.0
//
// Special functions for conditional outage evaluation: modified Bessel
// functions of the first kind (direct series, log-domain series and a
// linear log-tail approximation), the first-order Marcum Q-function, the
// Rician amplitude distribution and a bracketing inverse for monotone maps.

#pragma once

#include <functional>
#include <stdexcept>

namespace robustlink::numerics {

/// Raised when a linear-domain series leaves the double range.
class BesselOverflow : public std::overflow_error {
public:
    using std::overflow_error::overflow_error;
};

/// Raised when a root bracket does not contain the requested target.
class BracketError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// How ln I_m(x) is obtained inside the Marcum series.
///
/// `log_series` sums the ascending series around its largest term in the log
/// domain and never overflows. `linear_fit` is the piecewise model that
/// switches from the direct series to exp(a_m x + b_m) above X_m.
enum class TailModel { log_series, linear_fit };

struct SeriesConfig {
    /// Truncation M_max of the Marcum sum over Bessel orders.
    int max_terms = 150;
    /// Relative increment below which a series is considered converged.
    double tolerance = 1e-12;
    /// Keep summing past max_terms while the Marcum sum has not converged.
    /// With `false` the sum is cut at exactly max_terms.
    bool extend_truncation = true;
    TailModel tail = TailModel::log_series;
};

/// Linear model of ln I_m(x) beyond the threshold X_m.
struct TailFit {
    int order = 0;
    double threshold = 0.0;  // X_m
    double slope = 0.0;      // a_m
    double intercept = 0.0;  // b_m
};

/// Fit points used by default_tail_fit(). 700 is close to the largest argument
/// for which I_m(x) is still representable as a double (I_0 overflows near 713).
inline constexpr double kDefaultFitLow = 650.0;
inline constexpr double kDefaultFitHigh = 700.0;

/// Modified Bessel function I_m(x) by its ascending series.
/// Throws BesselOverflow if the sum leaves the double range.
double bessel_i(int m, double x, const SeriesConfig& cfg = {});

/// ln I_m(x) evaluated in the log domain (exact series, no overflow).
double log_bessel_i(int m, double x);

/// ln(e^{-x} I_0(x)).
double log_scaled_bessel_i0(double x);

/// Two-point fit of ln I_m between x1 < x2; threshold is set to x2.
TailFit fit_tail(int m, double x1, double x2, const SeriesConfig& cfg = {});

/// Cached fit through (kDefaultFitLow, kDefaultFitHigh) for order m. Its
/// threshold is the largest argument at which the direct series is finite, so
/// the linear model only replaces values the series cannot represent.
const TailFit& default_tail_fit(int m);

/// ln of the piecewise Bessel model: direct series up to fit.threshold,
/// fit.slope * x + fit.intercept above.
double bessel_i_stable(int m, double x, const TailFit& fit, const SeriesConfig& cfg = {});

struct MarcumResult {
    double q = 1.0;           // Q_1(alpha, beta)
    double complement = 0.0;  // 1 - Q_1, computed without cancellation where possible
    int terms = 0;            // Bessel orders summed
};

MarcumResult marcum_q1_detail(double alpha, double beta, const SeriesConfig& cfg = {});

/// First-order Marcum Q-function, clamped to [0, 1].
double marcum_q1(double alpha, double beta, const SeriesConfig& cfg = {});

/// Density of g = |h| for h ~ CN(h_hat, eps) with |h_hat| = g_hat.
double rician_pdf(double g, double g_hat, double eps);

/// P{g <= b} for the same law; nondecreasing in b.
double rician_cdf(double b, double g_hat, double eps, const SeriesConfig& cfg = {});

/// Bisection inverse of a nondecreasing f on [lo, hi].
///
/// Requires f(lo) <= target <= f(hi), otherwise throws BracketError. Returns
/// the lower end of the final bracket, so f(result) <= target always holds and
/// the bracket width is at most tol.
double invert_monotone(const std::function<double(double)>& f, double target, double lo,
                       double hi, double tol);

/// Bessel function of the first kind, order zero.
double bessel_j0(double x);

}  // namespace robustlink::numerics
