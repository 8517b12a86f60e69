// Test-only helpers: independent oracle implementations and random
// input generators. Everything here deliberately avoids the library's
// own computation paths so the two sides stay independent.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "bayesfda/grid.hpp"

namespace testsupport {

// ---------------------------------------------------------------------------
// quadrature oracles

/// Trapezoid weight of node i on an m-node uniform grid over [a,b],
/// recomputed from scratch.
inline double trap_weight(double a, double b, int m, int i) {
    const double h = (b - a) / (m - 1);
    return (i == 0 || i == m - 1) ? h / 2.0 : h;
}

/// Full tensor trapezoid sum, nested-loop reimplementation (up to 3D).
inline double brute_integral(const bayesfda::Grid& g, const std::vector<double>& v) {
    const int d = g.dim();
    const int m0 = g.nodes(0);
    const int m1 = d > 1 ? g.nodes(1) : 1;
    const int m2 = d > 2 ? g.nodes(2) : 1;
    double total = 0.0;
    std::size_t flat = 0;
    for (int i = 0; i < m0; ++i)
        for (int j = 0; j < m1; ++j)
            for (int k = 0; k < m2; ++k, ++flat) {
                double w = trap_weight(g.box().lo(0), g.box().hi(0), m0, i);
                if (d > 1) w *= trap_weight(g.box().lo(1), g.box().hi(1), m1, j);
                if (d > 2) w *= trap_weight(g.box().lo(2), g.box().hi(2), m2, k);
                total += w * v[flat];
            }
    return total;
}

/// The defining Bayes inner product as a literal double sum:
/// 1/(2 eta) sum_x sum_y w(x) w(y) ln(f(x)/f(y)) ln(g(x)/g(y)).
inline double brute_double_integral_inner_product(const bayesfda::Grid& g,
                                                  const std::vector<double>& f,
                                                  const std::vector<double>& gg) {
    const std::size_t n = g.size();
    std::vector<double> w(n, 1.0);
    for (std::size_t flat = 0; flat < n; ++flat) {
        auto ix = g.unravel(flat);
        for (int k = 0; k < g.dim(); ++k)
            w[flat] *= trap_weight(g.box().lo(k), g.box().hi(k), g.nodes(k), ix[k]);
    }
    double s = 0.0;
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = 0; y < n; ++y)
            s += w[x] * w[y] * std::log(f[x] / f[y]) * std::log(gg[x] / gg[y]);
    return s / (2.0 * g.box().volume());
}

// ---------------------------------------------------------------------------
// marginal oracles (3D input)

/// Geometric marginal by brute-force log-mean quadrature over the removed
/// dimensions. keep lists retained dimensions in ascending order.
/// Returns unnormalized exp(log-mean) values on the sub-grid.
inline std::vector<double> brute_geometric_marginal(const bayesfda::Grid& g,
                                                    const std::vector<double>& f,
                                                    const std::vector<int>& keep) {
    std::vector<int> drop;
    for (int k = 0; k < g.dim(); ++k)
        if (std::find(keep.begin(), keep.end(), k) == keep.end()) drop.push_back(k);

    std::vector<int> msub;
    for (int k : keep) msub.push_back(g.nodes(k));
    std::size_t nsub = 1;
    for (int m : msub) nsub *= m;

    double volDrop = 1.0;
    for (int k : drop) volDrop *= g.box().length(k);

    std::vector<double> out(nsub);
    std::array<int, 3> ix{};
    for (std::size_t s = 0; s < nsub; ++s) {
        // decode sub-index
        std::size_t rem = s;
        std::vector<int> sub(keep.size());
        for (int k = static_cast<int>(keep.size()) - 1; k >= 0; --k) {
            sub[k] = static_cast<int>(rem % msub[k]);
            rem /= msub[k];
        }
        double acc = 0.0;
        // iterate removed dims with nested loops via counters
        std::vector<int> cnt(drop.size(), 0);
        bool done = false;
        while (!done) {
            for (std::size_t k = 0; k < keep.size(); ++k) ix[keep[k]] = sub[k];
            double w = 1.0;
            for (std::size_t k = 0; k < drop.size(); ++k) {
                ix[drop[k]] = cnt[k];
                w *= trap_weight(g.box().lo(drop[k]), g.box().hi(drop[k]), g.nodes(drop[k]), cnt[k]);
            }
            acc += w * std::log(f[g.index(std::span<const int>(ix.data(), g.dim()))]);
            // advance counters
            int k = static_cast<int>(drop.size()) - 1;
            while (k >= 0 && ++cnt[k] == g.nodes(drop[k])) cnt[k--] = 0;
            if (k < 0) done = true;
        }
        out[s] = std::exp(acc / volDrop);
    }
    return out;
}

/// Arithmetic marginal by brute-force quadrature (unnormalized).
inline std::vector<double> brute_arithmetic_marginal(const bayesfda::Grid& g,
                                                     const std::vector<double>& f,
                                                     const std::vector<int>& keep) {
    std::vector<int> drop;
    for (int k = 0; k < g.dim(); ++k)
        if (std::find(keep.begin(), keep.end(), k) == keep.end()) drop.push_back(k);

    std::vector<int> msub;
    for (int k : keep) msub.push_back(g.nodes(k));
    std::size_t nsub = 1;
    for (int m : msub) nsub *= m;

    std::vector<double> out(nsub);
    std::array<int, 3> ix{};
    for (std::size_t s = 0; s < nsub; ++s) {
        std::size_t rem = s;
        std::vector<int> sub(keep.size());
        for (int k = static_cast<int>(keep.size()) - 1; k >= 0; --k) {
            sub[k] = static_cast<int>(rem % msub[k]);
            rem /= msub[k];
        }
        double acc = 0.0;
        std::vector<int> cnt(drop.size(), 0);
        bool done = false;
        while (!done) {
            for (std::size_t k = 0; k < keep.size(); ++k) ix[keep[k]] = sub[k];
            double w = 1.0;
            for (std::size_t k = 0; k < drop.size(); ++k) {
                ix[drop[k]] = cnt[k];
                w *= trap_weight(g.box().lo(drop[k]), g.box().hi(drop[k]), g.nodes(drop[k]), cnt[k]);
            }
            acc += w * f[g.index(std::span<const int>(ix.data(), g.dim()))];
            int k = static_cast<int>(drop.size()) - 1;
            while (k >= 0 && ++cnt[k] == g.nodes(drop[k])) cnt[k--] = 0;
            if (k < 0) done = true;
        }
        out[s] = acc;
    }
    return out;
}

// ---------------------------------------------------------------------------
// univariate EDA oracles

/// Type-7 quantile, independent implementation.
inline double naive_quantile(std::vector<double> x, double p) {
    std::sort(x.begin(), x.end());
    const double h = p * (x.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(h);
    if (lo + 1 >= x.size()) return x.back();
    return x[lo] * (1.0 - (h - lo)) + x[lo + 1] * (h - lo);
}

struct NaiveSummary {
    double q1, q2, q3, iqr, tuf;
    std::size_t exceed;
};

inline NaiveSummary naive_summary(const std::vector<double>& x) {
    NaiveSummary s{};
    s.q1 = naive_quantile(x, 0.25);
    s.q2 = naive_quantile(x, 0.50);
    s.q3 = naive_quantile(x, 0.75);
    s.iqr = s.q3 - s.q1;
    s.tuf = s.q3 + 1.5 * s.iqr;
    s.exceed = 0;
    for (double v : x)
        if (v > s.tuf) ++s.exceed;
    return s;
}

// ---------------------------------------------------------------------------
// random inputs

inline std::vector<double> random_positive_values(std::mt19937_64& rng, std::size_t n,
                                                  double log_sd = 1.0) {
    std::normal_distribution<double> nd(0.0, log_sd);
    std::vector<double> v(n);
    for (double& x : v) x = std::exp(nd(rng));
    return v;
}

} // namespace testsupport
