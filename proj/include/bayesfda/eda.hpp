// Conventional univariate EDA: empirical CDF, quartiles, IQR and the
// Tukey upper fence on the linear scale.

#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "bayesfda/errors.hpp"
#include "bayesfda/stats.hpp"

namespace bayesfda {

/// Right-continuous empirical CDF: F(x) = #{values <= x} / n.
class Ecdf {
  public:
    explicit Ecdf(std::span<const double> x) {
        if (x.empty()) throw invalid_input("ecdf: empty input");
        sorted_.assign(x.begin(), x.end());
        for (double v : sorted_)
            if (!std::isfinite(v)) throw invalid_input("ecdf: non-finite value");
        std::sort(sorted_.begin(), sorted_.end());
    }

    double operator()(double x) const {
        auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
        return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
    }

    std::size_t size() const { return sorted_.size(); }
    const std::vector<double>& sorted_values() const { return sorted_; }

    /// (value, cumulative fraction) pairs, one per sample, for plotting.
    std::vector<std::pair<double, double>> steps() const {
        std::vector<std::pair<double, double>> out(sorted_.size());
        for (std::size_t i = 0; i < sorted_.size(); ++i)
            out[i] = {sorted_[i], static_cast<double>(i + 1) / static_cast<double>(sorted_.size())};
        return out;
    }

  private:
    std::vector<double> sorted_;
};

inline Ecdf ecdf(std::span<const double> x) { return Ecdf(x); }

/// Five-number summary plus IQR, Tukey upper fence and fence exceedances.
struct UnivariateSummary {
    std::size_t n = 0;
    double min = 0, q1 = 0, q2 = 0, q3 = 0, max = 0;
    double iqr = 0;
    double tuf = 0;
    std::size_t exceed_count = 0;
    double exceed_fraction = 0;
};

/// Quartiles use type-7 interpolation; the fence Q3 + 1.5*IQR is taken on
/// the untransformed (linear) scale.
inline UnivariateSummary summary(std::span<const double> x) {
    if (x.size() < 4) throw invalid_input("summary: need at least 4 values");
    UnivariateSummary s;
    s.n = x.size();
    s.min = *std::min_element(x.begin(), x.end());
    s.max = *std::max_element(x.begin(), x.end());
    s.q1 = quantile_type7(x, 0.25);
    s.q2 = quantile_type7(x, 0.50);
    s.q3 = quantile_type7(x, 0.75);
    s.iqr = s.q3 - s.q1;
    s.tuf = s.q3 + 1.5 * s.iqr;
    for (double v : x)
        if (v > s.tuf) ++s.exceed_count;
    s.exceed_fraction = static_cast<double>(s.exceed_count) / static_cast<double>(s.n);
    return s;
}

/// The exceedance set {i : x_i > TUF}.
inline std::vector<std::size_t> tuf_exceedances(std::span<const double> x) {
    const UnivariateSummary s = summary(x);
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i] > s.tuf) idx.push_back(i);
    return idx;
}

} // namespace bayesfda
