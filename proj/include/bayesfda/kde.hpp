// Kernel density estimation of concentration samples on the
// log-concentration scale: common support construction, Silverman's
// bandwidth rule, and Gaussian product-kernel evaluation on a grid.

#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "bayesfda/density.hpp"
#include "bayesfda/stats.hpp"

namespace bayesfda {

enum class Element { Cu = 0, Pb = 1, Zn = 2 };

inline const char* element_label(Element e) {
    switch (e) {
        case Element::Cu: return "Cu";
        case Element::Pb: return "Pb";
        case Element::Zn: return "Zn";
    }
    return "?";
}

/// n x d matrix of strictly positive concentrations (mg/kg) with element
/// column labels; d in {1,2,3}.
class SampleMatrix {
  public:
    SampleMatrix() = default;

    SampleMatrix(std::vector<Element> elements, std::vector<double> data)
        : elements_(std::move(elements)), data_(std::move(data)) {
        if (elements_.empty() || elements_.size() > 3)
            throw invalid_input("SampleMatrix: need 1 to 3 element columns");
        if (data_.empty() || data_.size() % elements_.size() != 0)
            throw invalid_input("SampleMatrix: data size not a multiple of column count");
        for (double v : data_)
            if (!(v > 0.0) || !std::isfinite(v))
                throw invalid_input("SampleMatrix: concentrations must be positive and finite");
    }

    int dim() const { return static_cast<int>(elements_.size()); }
    std::size_t rows() const { return data_.size() / elements_.size(); }
    Element element(int k) const { return elements_[k]; }
    const std::vector<Element>& elements() const { return elements_; }
    double operator()(std::size_t i, int k) const { return data_[i * elements_.size() + k]; }

    /// Natural logs of one column.
    std::vector<double> log_column(int k) const {
        std::vector<double> out(rows());
        for (std::size_t i = 0; i < rows(); ++i) out[i] = std::log((*this)(i, k));
        return out;
    }

    /// Columns restricted to a subset of the element positions.
    SampleMatrix select(std::span<const int> cols) const {
        std::vector<Element> e;
        for (int k : cols) e.push_back(elements_[k]);
        std::vector<double> d;
        d.reserve(rows() * cols.size());
        for (std::size_t i = 0; i < rows(); ++i)
            for (int k : cols) d.push_back((*this)(i, k));
        return SampleMatrix(std::move(e), std::move(d));
    }

  private:
    std::vector<Element> elements_;
    std::vector<double> data_;
};

/// Per-dimension bandwidths, either fixed or derived by Silverman's rule.
struct BandwidthSpec {
    enum class Rule { Silverman, Fixed };
    Rule rule = Rule::Silverman;
    std::vector<double> widths; // log-concentration units; used when Fixed

    static BandwidthSpec silverman() { return {}; }

    static BandwidthSpec fixed(std::vector<double> w) {
        for (double h : w)
            if (!(h > 0.0) || !std::isfinite(h))
                throw invalid_input("BandwidthSpec: fixed bandwidths must be positive");
        return {Rule::Fixed, std::move(w)};
    }
};

/// Minimum node-to-max value ratio enforced on every estimate; keeps the
/// log square-integrable without erasing tail structure.
inline constexpr double kKdeFloor = 1e-9;

inline constexpr double kDefaultPadFactor = 0.5;

/// Common support box on the log scale: per element, the pooled range of
/// log-values widened by pad_factor times the pooled log-scale standard
/// deviation on each side.
inline Box common_support(std::span<const SampleMatrix> datasets, std::span<const int> element_cols,
                          double pad_factor = kDefaultPadFactor) {
    if (datasets.empty()) throw invalid_input("common_support: no datasets");
    std::vector<double> lo, hi;
    for (int k : element_cols) {
        std::vector<double> pooled;
        for (const SampleMatrix& s : datasets) {
            auto col = s.log_column(k);
            pooled.insert(pooled.end(), col.begin(), col.end());
        }
        if (pooled.size() < 2) throw invalid_input("common_support: need at least 2 pooled samples");
        const double sd = sample_sd(pooled);
        if (!(sd > 0.0))
            throw degenerate_data(std::string("common_support: zero spread in element column ") +
                                  element_label(datasets[0].element(k)));
        const double pad = pad_factor * sd;
        lo.push_back(*std::min_element(pooled.begin(), pooled.end()) - pad);
        hi.push_back(*std::max_element(pooled.begin(), pooled.end()) + pad);
    }
    return Box(lo, hi);
}

/// Rule-of-thumb bandwidth h = 0.9 min(sd, IQR/1.34) n^(-1/5) for a column
/// of log-values.
inline double silverman_bandwidth(std::span<const double> log_values) {
    if (log_values.size() < 2) throw degenerate_data("silverman_bandwidth: need at least 2 values");
    const double sd = sample_sd(log_values);
    if (!(sd > 0.0)) throw degenerate_data("silverman_bandwidth: zero spread");
    const double iqr = quantile_type7(log_values, 0.75) - quantile_type7(log_values, 0.25);
    const double spread = std::min(sd, iqr / 1.34);
    const double h = 0.9 * spread * std::pow(static_cast<double>(log_values.size()), -0.2);
    if (!(h > 0.0)) throw degenerate_data("silverman_bandwidth: zero spread in the central half");
    return h;
}

/// Resolve a BandwidthSpec into per-dimension bandwidths for a sample set.
inline std::vector<double> resolve_bandwidths(const SampleMatrix& samples, const BandwidthSpec& bw) {
    std::vector<double> h(samples.dim());
    if (bw.rule == BandwidthSpec::Rule::Fixed) {
        if (bw.widths.size() == 1) {
            std::fill(h.begin(), h.end(), bw.widths[0]);
        } else if (static_cast<int>(bw.widths.size()) == samples.dim()) {
            h = bw.widths;
        } else {
            throw invalid_input("resolve_bandwidths: bandwidth count does not match dimension");
        }
    } else {
        for (int k = 0; k < samples.dim(); ++k) h[k] = silverman_bandwidth(samples.log_column(k));
    }
    return h;
}

/// Gaussian product-kernel density estimate of the log-concentration
/// distribution, evaluated at the grid nodes, floored for strict
/// positivity and normalized to unit integral.
inline DensityGrid kde(const SampleMatrix& samples, const Grid& grid, const BandwidthSpec& bw = {}) {
    const int d = grid.dim();
    if (d != samples.dim()) throw invalid_input("kde: sample and grid dimensions differ");
    const std::size_t n = samples.rows();
    const std::vector<double> h = resolve_bandwidths(samples, bw);

    // per-dimension log columns, checked against the support
    std::vector<std::vector<double>> logs(d);
    for (int k = 0; k < d; ++k) {
        logs[k] = samples.log_column(k);
        for (std::size_t i = 0; i < n; ++i) {
            const double x = logs[k][i];
            if (!(x > grid.box().lo(k) && x < grid.box().hi(k)))
                throw out_of_support("kde: log sample " + std::to_string(x) + " outside support [" +
                                     std::to_string(grid.box().lo(k)) + ", " +
                                     std::to_string(grid.box().hi(k)) + ") in dimension " +
                                     std::to_string(k));
        }
    }

    std::vector<double> acc(grid.size(), 0.0);
    std::vector<std::vector<double>> table(d); // per-dim kernel values for one sample
    for (int k = 0; k < d; ++k) table[k].resize(grid.nodes(k));

    for (std::size_t i = 0; i < n; ++i) {
        for (int k = 0; k < d; ++k) {
            for (int j = 0; j < grid.nodes(k); ++j) {
                const double u = (grid.node(k, j) - logs[k][i]) / h[k];
                table[k][j] = std::exp(-0.5 * u * u);
            }
        }
        if (d == 1) {
            for (int a = 0; a < grid.nodes(0); ++a) acc[a] += table[0][a];
        } else if (d == 2) {
            std::size_t flat = 0;
            for (int a = 0; a < grid.nodes(0); ++a)
                for (int b = 0; b < grid.nodes(1); ++b, ++flat) acc[flat] += table[0][a] * table[1][b];
        } else {
            std::size_t flat = 0;
            for (int a = 0; a < grid.nodes(0); ++a)
                for (int b = 0; b < grid.nodes(1); ++b) {
                    const double ab = table[0][a] * table[1][b];
                    for (int c = 0; c < grid.nodes(2); ++c, ++flat) acc[flat] += ab * table[2][c];
                }
        }
    }

    const double vmax = *std::max_element(acc.begin(), acc.end());
    if (!(vmax > 0.0)) throw degenerate_data("kde: estimate vanished everywhere");
    const double floor = kKdeFloor * vmax;
    for (double& v : acc) v = std::max(v, floor);
    return DensityGrid(grid, std::move(acc));
}

} // namespace bayesfda
