#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>

#include "eqp/errors.hpp"

namespace eqp {

/// A real number in [0, 1]. Construction outside that range throws DomainError.
class Probability {
public:
    constexpr Probability() = default;
    explicit Probability(double v) : value_(v) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw DomainError("probability outside [0, 1]: " + std::to_string(v));
        }
    }

    [[nodiscard]] constexpr double value() const noexcept { return value_; }
    constexpr auto operator<=>(const Probability&) const = default;

private:
    double value_ = 0.0;
};

/// Standard normal CDF, evaluated through erfc so that both tails keep full
/// relative precision.
inline Probability norm_cdf(double x) {
    if (!std::isfinite(x)) {
        throw DomainError("norm_cdf: non-finite argument");
    }
    return Probability(0.5 * std::erfc(-x * (1.0 / std::numbers::sqrt2)));
}

namespace detail {

inline double norm_pdf(double x) noexcept {
    return std::exp(-0.5 * x * x) * (0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2);
}

// Acklam's rational approximation of the lower half (p <= 0.5) of the normal
// quantile. Relative error about 1.15e-9; refined by Halley steps afterwards.
inline double quantile_initial_guess(double p) noexcept {
    constexpr std::array a{-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                           1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
    constexpr std::array b{-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                           6.680131188771972e+01,  -1.328068155288572e+01};
    constexpr std::array c{-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                           -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
    constexpr std::array d{7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                           3.754408661907416e+00};
    constexpr double p_low = 0.02425;

    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

// Lower-half quantile, refined against norm_cdf so the two stay consistent.
inline double lower_quantile(double p) noexcept {
    double x = quantile_initial_guess(p);
    for (int i = 0; i < 2; ++i) {
        const double err = 0.5 * std::erfc(-x * (1.0 / std::numbers::sqrt2)) - p;
        const double u = err / norm_pdf(x);
        if (!std::isfinite(u)) break;
        x -= u / (1.0 + 0.5 * x * u);
    }
    return x;
}

}  // namespace detail

/// Inverse of norm_cdf on the open interval (0, 1).
///
/// The upper half is obtained by reflection, x(p) = -x(1 - p), which is exact
/// in floating point for p >= 0.5 and keeps the refinement step working on the
/// small, accurately represented tail probability.
inline double norm_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw DomainError("norm_quantile: probability must lie in (0, 1)");
    }
    if (p == 0.5) return 0.0;
    if (p < 0.5) return detail::lower_quantile(p);
    return -detail::lower_quantile(1.0 - p);
}

inline double norm_quantile(Probability p) { return norm_quantile(p.value()); }

/// Search interval and stopping rule for find_root.
class RootBracket {
public:
    RootBracket(double lo, double hi, double tol_abs, int max_iter = 200)
        : lo_(lo), hi_(hi), tol_abs_(tol_abs), max_iter_(max_iter) {
        if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
            throw DomainError("RootBracket: requires finite lo < hi");
        }
        if (!(tol_abs > 0.0)) throw DomainError("RootBracket: tol_abs must be positive");
        if (max_iter < 1) throw DomainError("RootBracket: max_iter must be positive");
    }

    [[nodiscard]] double lo() const noexcept { return lo_; }
    [[nodiscard]] double hi() const noexcept { return hi_; }
    [[nodiscard]] double tol_abs() const noexcept { return tol_abs_; }
    [[nodiscard]] int max_iter() const noexcept { return max_iter_; }

private:
    double lo_;
    double hi_;
    double tol_abs_;
    int max_iter_;
};

/// Brent's method (inverse quadratic interpolation / secant with bisection
/// fallback). Stops when |f(x)| <= tol_abs or the bracket has shrunk to
/// tol_abs (or to a few ulps of x when tol_abs is below machine resolution).
template <class F>
double find_root(F&& f, const RootBracket& bracket) {
    double a = bracket.lo();
    double b = bracket.hi();
    double fa = f(a);
    double fb = f(b);
    const double tol = bracket.tol_abs();

    if (std::isnan(fa) || std::isnan(fb)) {
        throw DomainError("find_root: function is NaN at a bracket endpoint");
    }
    if (std::abs(fa) <= tol && std::abs(fa) <= std::abs(fb)) return a;
    if (std::abs(fb) <= tol) return b;
    if ((fa > 0.0) == (fb > 0.0)) {
        std::ostringstream msg;
        msg << "find_root: no sign change on [" << a << ", " << b << "] (f = " << fa << ", " << fb
            << ")";
        throw BracketError(msg.str());
    }

    double c = a;
    double fc = fa;
    double d = b - a;
    double e = d;
    constexpr double eps = std::numeric_limits<double>::epsilon();

    for (int iter = 0; iter < bracket.max_iter(); ++iter) {
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if (std::abs(fc) < std::abs(fb)) {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        const double width_floor = std::max(tol, 4.0 * eps * std::abs(b));
        const double tol1 = 0.25 * width_floor;
        const double m = 0.5 * (c - b);
        if (std::abs(fb) <= tol || std::abs(c - b) <= width_floor || fb == 0.0) {
            return b;
        }

        if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
            double p;
            double q;
            const double s = fb / fa;
            if (a == c) {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                const double qa = fa / fc;
                const double r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q;
            p = std::abs(p);
            if (2.0 * p < std::min(3.0 * m * q - std::abs(tol1 * q), std::abs(e * q))) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = d;
            }
        } else {
            d = m;
            e = d;
        }
        a = b;
        fa = fb;
        b += (std::abs(d) > tol1) ? d : (m > 0.0 ? tol1 : -tol1);
        fb = f(b);
        if (std::isnan(fb)) throw ConvergenceError("find_root: function returned NaN");
    }
    std::ostringstream msg;
    msg << "find_root: no convergence after " << bracket.max_iter() << " iterations on ["
        << bracket.lo() << ", " << bracket.hi() << "]";
    throw ConvergenceError(msg.str());
}

}  // namespace eqp
