// Cellwise outlier detection: robust column standardization, prediction
// of each cell from correlated columns, residual-based cell and row
// flags, and anomaly levels in [-1,1]. On top of the plain matrix
// algorithm sit the functional variant (B-spline coefficient matrices of
// clr densities) and the logratio variant for compositions.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "bayesfda/bspline.hpp"
#include "bayesfda/decompose.hpp"
#include "bayesfda/stats.hpp"

namespace bayesfda {

/// Observations (rows) by variables (columns), finite entries.
class DataMatrix {
  public:
    DataMatrix() = default;

    DataMatrix(std::size_t n, std::size_t p, std::vector<double> data,
               std::vector<std::string> labels = {})
        : n_(n), p_(p), data_(std::move(data)), labels_(std::move(labels)) {
        if (n_ < 3 || p_ < 1)
            throw invalid_input("DataMatrix: need at least 3 rows and 1 column");
        if (data_.size() != n_ * p_) throw invalid_input("DataMatrix: data size mismatch");
        for (double v : data_)
            if (!std::isfinite(v)) throw invalid_input("DataMatrix: non-finite entry");
        if (labels_.empty()) {
            labels_.resize(p_);
            for (std::size_t j = 0; j < p_; ++j) labels_[j] = "c" + std::to_string(j);
        } else if (labels_.size() != p_) {
            throw invalid_input("DataMatrix: label count mismatch");
        }
    }

    std::size_t rows() const { return n_; }
    std::size_t cols() const { return p_; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * p_ + j]; }
    double& at(std::size_t i, std::size_t j) { return data_[i * p_ + j]; }
    const std::vector<std::string>& labels() const { return labels_; }
    const std::vector<double>& data() const { return data_; }

    std::vector<double> column(std::size_t j) const {
        std::vector<double> c(n_);
        for (std::size_t i = 0; i < n_; ++i) c[i] = data_[i * p_ + j];
        return c;
    }

  private:
    std::size_t n_ = 0, p_ = 0;
    std::vector<double> data_;
    std::vector<std::string> labels_;
};

/// Column-wise (x - median) / (1.4826 MAD). Throws if any column has zero
/// MAD; ddc() below handles such columns itself.
inline DataMatrix robust_standardize(const DataMatrix& x) {
    std::vector<double> out(x.rows() * x.cols());
    for (std::size_t j = 0; j < x.cols(); ++j) {
        const std::vector<double> col = x.column(j);
        const double med = median(col);
        const double scale = kMadScale * mad_raw(col);
        if (!(scale > 0.0))
            throw degenerate_data("robust_standardize: zero MAD in column " + x.labels()[j]);
        for (std::size_t i = 0; i < x.rows(); ++i) out[i * x.cols() + j] = (col[i] - med) / scale;
    }
    return DataMatrix(x.rows(), x.cols(), std::move(out), x.labels());
}

/// sqrt of the p-quantile of chi-squared with 1 d.o.f., i.e. the standard
/// normal quantile at (1+p)/2.
inline double cutoff(double p_cut) {
    if (!(p_cut > 0.0 && p_cut < 1.0)) throw invalid_input("cutoff: p_cut outside (0,1)");
    return normal_quantile((1.0 + p_cut) / 2.0);
}

/// Robust correlation from MAD-based scales of the sum and difference:
/// (Q(a+b)^2 - Q(a-b)^2) / (Q(a+b)^2 + Q(a-b)^2), clipped to [-1,1].
inline double robust_correlation(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.size() < 3)
        throw invalid_input("robust_correlation: need two equally sized columns, n >= 3");
    std::vector<double> sum(a.size()), diff(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        sum[i] = a[i] + b[i];
        diff[i] = a[i] - b[i];
    }
    const double qs = kMadScale * mad_raw(sum);
    const double qd = kMadScale * mad_raw(diff);
    const double denom = qs * qs + qd * qd;
    if (!(denom > 0.0)) throw degenerate_data("robust_correlation: both combined scales vanish");
    return std::clamp((qs * qs - qd * qd) / denom, -1.0, 1.0);
}

/// Anomaly levels, flags and row statistics produced by ddc().
struct CellFlagMatrix {
    std::size_t n = 0, p = 0;
    std::vector<double> levels;        // n x p, clipped to [-1,1]
    std::vector<std::uint8_t> flags;   // n x p cell flags
    std::vector<std::uint8_t> row_flags;
    std::vector<double> row_stat;
    double p_cut = 0.0;
    double cutoff_value = 0.0;
    double row_cutoff = 0.0;
    std::vector<std::string> labels;
    std::vector<std::size_t> degenerate_columns;

    double level(std::size_t i, std::size_t j) const { return levels[i * p + j]; }
    bool flagged(std::size_t i, std::size_t j) const { return flags[i * p + j] != 0; }
};

inline constexpr double kDdcCorrelationThreshold = 0.5;
inline constexpr double kDefaultPcut = 0.99;

namespace detail {

inline bool all_columns_constant(const DataMatrix& x) {
    for (std::size_t j = 0; j < x.cols(); ++j)
        if (kMadScale * mad_raw(x.column(j)) > 0.0) return false;
    return true;
}

/// All-quiet result for inputs with no spread anywhere: nothing deviates,
/// so nothing is flagged.
inline CellFlagMatrix quiet_result(const DataMatrix& x, double p_cut) {
    CellFlagMatrix out;
    out.n = x.rows();
    out.p = x.cols();
    out.p_cut = p_cut;
    out.cutoff_value = cutoff(p_cut);
    out.labels = x.labels();
    out.levels.assign(out.n * out.p, 0.0);
    out.flags.assign(out.n * out.p, 0);
    out.row_flags.assign(out.n, 0);
    out.row_stat.assign(out.n, 0.0);
    for (std::size_t j = 0; j < out.p; ++j) out.degenerate_columns.push_back(j);
    return out;
}

/// p_cut-quantile of the permutation distribution of the row statistic:
/// means of `per_row` draws from the pooled (sorted, hence row-order
/// independent) transformed residuals.
inline double row_statistic_cutoff(std::vector<double> pooled, std::size_t per_row, double p_cut) {
    std::sort(pooled.begin(), pooled.end());
    std::mt19937_64 rng(0x5eedc0deULL);
    std::uniform_int_distribution<std::size_t> pick(0, pooled.size() - 1);
    const int replicates = 1000;
    std::vector<double> stats(replicates);
    for (int b = 0; b < replicates; ++b) {
        double s = 0.0;
        for (std::size_t k = 0; k < per_row; ++k) s += pooled[pick(rng)];
        stats[b] = s / static_cast<double>(per_row);
    }
    return quantile_type7(stats, p_cut);
}

} // namespace detail

/// The cellwise detector. Steps: robust standardization; univariate
/// pre-flags at the cutoff; prediction of every cell from columns with
/// |robust correlation| > 0.5 (pre-flagged cells never serve as
/// predictors, and a cell with no usable predictor is predicted as 0);
/// deshrinking by the robust slope of observed on predicted; residual
/// flags at the same cutoff; bounded-mean row statistic against a
/// permutation quantile. Zero-MAD columns are reported, excluded from
/// prediction and row statistics, and flagged wholesale.
inline CellFlagMatrix ddc(const DataMatrix& x, double p_cut = kDefaultPcut) {
    const std::size_t n = x.rows(), p = x.cols();
    const double c = cutoff(p_cut);

    CellFlagMatrix out;
    out.n = n;
    out.p = p;
    out.p_cut = p_cut;
    out.cutoff_value = c;
    out.labels = x.labels();
    out.levels.assign(n * p, 0.0);
    out.flags.assign(n * p, 0);
    out.row_flags.assign(n, 0);
    out.row_stat.assign(n, 0.0);

    // 1. column scales; zero-MAD columns are set aside
    std::vector<bool> degenerate(p, false);
    std::vector<double> med(p, 0.0), scale(p, 0.0);
    for (std::size_t j = 0; j < p; ++j) {
        const std::vector<double> col = x.column(j);
        med[j] = median(col);
        scale[j] = kMadScale * mad_raw(col);
        if (!(scale[j] > 0.0)) {
            degenerate[j] = true;
            out.degenerate_columns.push_back(j);
        }
    }
    if (out.degenerate_columns.size() == p)
        throw degenerate_data("ddc: every column has zero MAD");
    for (std::size_t j : out.degenerate_columns)
        for (std::size_t i = 0; i < n; ++i) out.flags[i * p + j] = 1;

    std::vector<std::size_t> live;
    for (std::size_t j = 0; j < p; ++j)
        if (!degenerate[j]) live.push_back(j);

    // 2. standardized values and univariate pre-flags
    std::vector<double> z(n * p, 0.0);
    std::vector<std::uint8_t> pre(n * p, 0);
    for (std::size_t j : live)
        for (std::size_t i = 0; i < n; ++i) {
            z[i * p + j] = (x(i, j) - med[j]) / scale[j];
            pre[i * p + j] = std::abs(z[i * p + j]) > c ? 1 : 0;
        }

    // 3. robust correlations between live columns
    std::vector<double> rho(p * p, 0.0);
    std::vector<std::vector<double>> zcol(p);
    for (std::size_t j : live) {
        zcol[j].resize(n);
        for (std::size_t i = 0; i < n; ++i) zcol[j][i] = z[i * p + j];
    }
    for (std::size_t a = 0; a < live.size(); ++a)
        for (std::size_t b = a + 1; b < live.size(); ++b) {
            const double r = robust_correlation(zcol[live[a]], zcol[live[b]]);
            rho[live[a] * p + live[b]] = r;
            rho[live[b] * p + live[a]] = r;
        }

    // 4. weighted predictions from correlated columns
    std::vector<double> pred(n * p, 0.0);
    std::vector<std::uint8_t> genuine(n * p, 0);
    for (std::size_t j : live) {
        std::vector<std::size_t> partners;
        for (std::size_t h : live)
            if (h != j && std::abs(rho[j * p + h]) > kDdcCorrelationThreshold) partners.push_back(h);
        if (partners.empty()) continue; // predictions stay 0
        for (std::size_t i = 0; i < n; ++i) {
            double num = 0.0, den = 0.0;
            for (std::size_t h : partners) {
                if (pre[i * p + h]) continue; // outlying cells do not predict
                const double r = rho[j * p + h];
                num += std::abs(r) * (r * z[i * p + h]);
                den += std::abs(r);
            }
            if (den > 0.0) {
                pred[i * p + j] = num / den;
                genuine[i * p + j] = 1;
            }
        }
    }

    // 5. deshrink: robust slope of observed on predicted, per column
    for (std::size_t j : live) {
        std::vector<double> abspred;
        for (std::size_t i = 0; i < n; ++i)
            if (genuine[i * p + j]) abspred.push_back(std::abs(pred[i * p + j]));
        if (abspred.empty()) continue;
        const double medpred = median(abspred);
        std::vector<double> ratios;
        for (std::size_t i = 0; i < n; ++i)
            if (genuine[i * p + j] && std::abs(pred[i * p + j]) > medpred && pred[i * p + j] != 0.0)
                ratios.push_back(z[i * p + j] / pred[i * p + j]);
        double slope = 1.0;
        if (!ratios.empty()) {
            slope = median(ratios);
            if (!std::isfinite(slope)) slope = 1.0;
        }
        for (std::size_t i = 0; i < n; ++i)
            if (genuine[i * p + j]) pred[i * p + j] *= slope;
    }

    // 6. standardized residuals; fallback cells keep the unit scale so a
    // single isolated column reduces exactly to the univariate rule
    std::vector<double> resid(n * p, 0.0);
    for (std::size_t j : live) {
        std::vector<double> absd;
        for (std::size_t i = 0; i < n; ++i)
            if (genuine[i * p + j]) absd.push_back(std::abs(z[i * p + j] - pred[i * p + j]));
        double s = absd.empty() ? 1.0 : kMadScale * median(absd);
        s = std::max(s, 1e-12);
        for (std::size_t i = 0; i < n; ++i) {
            const double d = z[i * p + j] - pred[i * p + j];
            resid[i * p + j] = genuine[i * p + j] ? d / s : d;
        }
    }

    // 7. cell flags and anomaly levels
    for (std::size_t j : live)
        for (std::size_t i = 0; i < n; ++i) {
            const double r = resid[i * p + j];
            out.flags[i * p + j] = std::abs(r) > c ? 1 : 0;
            out.levels[i * p + j] = std::clamp(r / (2.0 * c), -1.0, 1.0);
        }

    // 8. rowwise statistic: bounded mean of squared residuals
    const double cap = c * c;
    std::vector<double> pooled;
    pooled.reserve(n * live.size());
    for (std::size_t i = 0; i < n; ++i) {
        double t = 0.0;
        for (std::size_t j : live) {
            const double r2 = resid[i * p + j] * resid[i * p + j];
            t += std::min(r2, cap);
            pooled.push_back(std::min(r2, cap));
        }
        out.row_stat[i] = t / static_cast<double>(live.size());
    }
    out.row_cutoff = detail::row_statistic_cutoff(std::move(pooled), live.size(), p_cut);
    for (std::size_t i = 0; i < n; ++i) out.row_flags[i] = out.row_stat[i] > out.row_cutoff ? 1 : 0;

    return out;
}

/// DDC over rows of B-spline coefficients, with the anomaly levels
/// weighted back onto the basis grid per compartment.
struct FunctionalDdcResult {
    CellFlagMatrix cells;                      // on the coefficient matrix
    std::vector<std::vector<double>> anomaly;  // per row: grid-node levels in [-1,1]
};

inline FunctionalDdcResult functional_ddc(const DataMatrix& coefs, const BsplineBasis& basis,
                                          double p_cut = kDefaultPcut) {
    if (static_cast<int>(coefs.cols()) != basis.size())
        throw invalid_input("functional_ddc: coefficient columns do not match basis size");
    FunctionalDdcResult out;
    // identical functional observations deviate nowhere: report zero
    // anomaly instead of propagating the all-degenerate error
    out.cells = detail::all_columns_constant(coefs) ? detail::quiet_result(coefs, p_cut)
                                                    : ddc(coefs, p_cut);
    out.anomaly.reserve(coefs.rows());
    for (std::size_t i = 0; i < coefs.rows(); ++i) {
        std::vector<double> row(coefs.cols());
        for (std::size_t j = 0; j < coefs.cols(); ++j) row[j] = out.cells.level(i, j);
        out.anomaly.push_back(anomaly_to_grid(row, basis));
    }
    return out;
}

inline DataMatrix coefficient_matrix(const std::vector<SplineCoefficients>& rows) {
    if (rows.size() < 3) throw invalid_input("coefficient_matrix: need at least 3 compartments");
    const std::size_t k = rows.front().values.size();
    std::vector<double> data;
    data.reserve(rows.size() * k);
    for (const auto& r : rows) {
        if (r.values.size() != k)
            throw invalid_input("coefficient_matrix: rows use different basis sizes");
        data.insert(data.end(), r.values.begin(), r.values.end());
    }
    std::vector<std::string> labels(k);
    for (std::size_t j = 0; j < k; ++j) labels[j] = "b" + std::to_string(j);
    return DataMatrix(rows.size(), k, std::move(data), std::move(labels));
}

/// DDC on all pairwise logratios of 7-part compositions, aggregated back
/// to the parts.
struct LrDdcResult {
    CellFlagMatrix logratio_cells;                    // n x 21
    std::vector<std::array<double, 7>> part_levels;   // signed mean of involved logratios
    std::vector<std::array<std::uint8_t, 7>> part_flags;
    double agg_fraction = 0.0;
};

inline constexpr double kDefaultAggFraction = 0.30;

inline LrDdcResult lr_ddc(const std::vector<InformationComposition>& comps,
                          double p_cut = kDefaultPcut, double agg_fraction = kDefaultAggFraction) {
    if (comps.size() < 3) throw invalid_input("lr_ddc: need at least 3 compositions");
    if (!(agg_fraction > 0.0 && agg_fraction <= 1.0))
        throw invalid_input("lr_ddc: agg_fraction outside (0,1]");

    // 21 = 7*6/2 pairwise logratios, part i in the numerator for i < j
    std::vector<std::array<int, 2>> pairs;
    std::vector<std::string> labels;
    for (int i = 0; i < 7; ++i)
        for (int j = i + 1; j < 7; ++j) {
            pairs.push_back({i, j});
            labels.push_back("ln(" + InformationComposition::labels()[i] + "/" +
                             InformationComposition::labels()[j] + ")");
        }

    const std::size_t n = comps.size();
    std::vector<double> data(n * pairs.size());
    for (std::size_t r = 0; r < n; ++r) {
        std::array<double, 7> lp{};
        for (int k = 0; k < 7; ++k) lp[k] = std::log(std::max(comps[r].parts[k], kCompositionFloor));
        for (std::size_t q = 0; q < pairs.size(); ++q)
            data[r * pairs.size() + q] = lp[pairs[q][0]] - lp[pairs[q][1]];
    }

    LrDdcResult out;
    out.agg_fraction = agg_fraction;
    DataMatrix lr(n, pairs.size(), std::move(data), labels);
    // identical compositions deviate nowhere
    out.logratio_cells = detail::all_columns_constant(lr) ? detail::quiet_result(lr, p_cut)
                                                          : ddc(lr, p_cut);

    out.part_levels.assign(n, {});
    out.part_flags.assign(n, {});
    for (std::size_t r = 0; r < n; ++r) {
        for (int k = 0; k < 7; ++k) {
            double level_sum = 0.0;
            int involved = 0, flagged = 0;
            for (std::size_t q = 0; q < pairs.size(); ++q) {
                int sign = 0;
                if (pairs[q][0] == k) sign = 1;
                else if (pairs[q][1] == k) sign = -1;
                else continue;
                ++involved;
                level_sum += sign * out.logratio_cells.level(r, q);
                if (out.logratio_cells.flagged(r, q)) ++flagged;
            }
            out.part_levels[r][k] = level_sum / involved;
            out.part_flags[r][k] =
                static_cast<double>(flagged) >= agg_fraction * involved - 1e-9 ? 1 : 0;
        }
    }
    return out;
}

} // namespace bayesfda
