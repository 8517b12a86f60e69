// Small order-statistic and distribution helpers shared by the
// estimation, EDA and outlier modules.

#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "bayesfda/errors.hpp"

namespace bayesfda {

/// Consistency factor making the MAD estimate the standard deviation
/// at the normal model.
inline constexpr double kMadScale = 1.4826;

/// Quantile by linear interpolation of order statistics with plotting
/// position (k-1)/(n-1) ("type 7"). Input need not be sorted.
inline double quantile_type7(std::span<const double> x, double p) {
    if (x.empty()) throw invalid_input("quantile: empty input");
    if (!(p >= 0.0 && p <= 1.0)) throw invalid_input("quantile: p outside [0,1]");
    std::vector<double> s(x.begin(), x.end());
    std::sort(s.begin(), s.end());
    const double h = p * (s.size() - 1);
    const std::size_t i = static_cast<std::size_t>(std::floor(h));
    if (i + 1 >= s.size()) return s.back();
    const double frac = h - static_cast<double>(i);
    return s[i] + frac * (s[i + 1] - s[i]);
}

inline double median(std::span<const double> x) { return quantile_type7(x, 0.5); }

/// Median absolute deviation about the median (raw, unscaled).
inline double mad_raw(std::span<const double> x) {
    const double m = median(x);
    std::vector<double> d(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) d[i] = std::abs(x[i] - m);
    return median(d);
}

/// Sample mean.
inline double mean(std::span<const double> x) {
    if (x.empty()) throw invalid_input("mean: empty input");
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

/// Sample standard deviation (n-1 denominator).
inline double sample_sd(std::span<const double> x) {
    if (x.size() < 2) throw invalid_input("sample_sd: need at least 2 values");
    const double m = mean(x);
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return std::sqrt(s / static_cast<double>(x.size() - 1));
}

/// Standard normal quantile function. Acklam's rational approximation
/// polished with one Halley step on erfc, accurate to ~1e-15.
inline double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw invalid_input("normal_quantile: p outside (0,1)");

    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};

    const double plow = 0.02425;
    double x;
    if (p < plow) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - plow) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }

    // One Halley refinement against the exact CDF.
    const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
    const double u = e * std::sqrt(2.0 * M_PI) * std::exp(x * x / 2.0);
    x = x - u / (1.0 + x * u / 2.0);
    return x;
}

} // namespace bayesfda
