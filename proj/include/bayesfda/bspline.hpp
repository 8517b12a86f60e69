// B-spline representation of clr-transformed univariate densities:
// clamped uniform basis on a 1D grid, least-squares coefficients under a
// zero-integral constraint, and mapping per-coefficient anomaly levels
// back to grid functions.

#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bayesfda/density.hpp"

namespace bayesfda {

/// Clamped uniform B-spline basis of a given order (degree + 1) and size
/// K over a 1D grid, with the node evaluation matrix and per-function
/// quadrature integrals precomputed. Basis values lie in [0,1] and sum to
/// one at every node.
class BsplineBasis {
  public:
    BsplineBasis() = default;

    BsplineBasis(const Grid& grid, int K, int order = 4) : grid_(grid), K_(K), order_(order) {
        if (grid.dim() != 1) throw invalid_input("BsplineBasis: grid must be one-dimensional");
        if (order < 1) throw invalid_input("BsplineBasis: order must be at least 1");
        if (K < order)
            throw invalid_input("BsplineBasis: basis size " + std::to_string(K) +
                                " smaller than order " + std::to_string(order));

        const double a = grid.box().lo(0), b = grid.box().hi(0);
        knots_.assign(K + order, 0.0);
        const int cells = K - order + 1; // interior intervals
        for (int i = 0; i < K + order; ++i) {
            if (i < order)
                knots_[i] = a;
            else if (i >= K)
                knots_[i] = b;
            else
                knots_[i] = a + (b - a) * static_cast<double>(i - order + 1) / cells;
        }

        const int m = grid.nodes(0);
        eval_ = Eigen::MatrixXd::Zero(m, K);
        std::vector<double> local(order);
        for (int i = 0; i < m; ++i) {
            const double x = grid.node(0, i);
            const int span = find_span(x);
            basis_funs(span, x, local);
            for (int r = 0; r < order; ++r) eval_(i, span - order + 1 + r) = local[r];
            double s = 0.0;
            for (int k = 0; k < K; ++k) s += eval_(i, k);
            if (std::abs(s - 1.0) > 1e-12)
                throw error("BsplineBasis: partition of unity violated at node " + std::to_string(i));
        }

        // quadrature integral of each basis function over the grid
        integrals_.assign(K, 0.0);
        const std::vector<double> w = grid.weights(0);
        for (int k = 0; k < K; ++k)
            for (int i = 0; i < m; ++i) integrals_[k] += w[i] * eval_(i, k);
    }

    const Grid& grid() const { return grid_; }
    int size() const { return K_; }
    int order() const { return order_; }
    const std::vector<double>& knots() const { return knots_; }
    const Eigen::MatrixXd& eval_matrix() const { return eval_; }
    const std::vector<double>& integrals() const { return integrals_; }

    /// Value of basis function k at grid node i.
    double at(int i, int k) const { return eval_(i, k); }

  private:
    int find_span(double x) const {
        // largest span index j with knots[j] <= x, clamped to valid range
        const int degree = order_ - 1;
        int lo = degree, hi = K_ - 1;
        if (x >= knots_[K_]) return K_ - 1;
        if (x <= knots_[degree]) return degree;
        auto it = std::upper_bound(knots_.begin() + degree, knots_.begin() + K_ + 1, x);
        int span = static_cast<int>(it - knots_.begin()) - 1;
        return std::clamp(span, lo, hi);
    }

    void basis_funs(int span, double x, std::vector<double>& N) const {
        const int degree = order_ - 1;
        std::vector<double> left(order_), right(order_);
        N[0] = 1.0;
        for (int d = 1; d <= degree; ++d) {
            left[d] = x - knots_[span + 1 - d];
            right[d] = knots_[span + d] - x;
            double saved = 0.0;
            for (int r = 0; r < d; ++r) {
                const double denom = right[r + 1] + left[d - r];
                const double temp = denom != 0.0 ? N[r] / denom : 0.0;
                N[r] = saved + right[r + 1] * temp;
                saved = left[d - r] * temp;
            }
            N[d] = saved;
        }
    }

    Grid grid_;
    int K_ = 0;
    int order_ = 0;
    std::vector<double> knots_;
    Eigen::MatrixXd eval_;
    std::vector<double> integrals_;
};

inline BsplineBasis build_basis(const Grid& grid, int K, int order = 4) {
    return BsplineBasis(grid, K, order);
}

/// Basis weights of one clr density, tagged with its compartment.
struct SplineCoefficients {
    std::vector<double> values;
    std::string label;
};

/// Least-squares fit of a clr grid in the basis, subject to the exact
/// linear constraint that the fitted function's quadrature integral
/// vanishes. Solved through Lagrange-multiplier augmented normal
/// equations.
inline SplineCoefficients fit_clr_spline(const ClrGrid& z, const BsplineBasis& basis,
                                         std::string label = {}) {
    require_same_grid(z.grid(), basis.grid(), "fit_clr_spline");
    const int K = basis.size();
    const int m = static_cast<int>(z.size());
    if (K > m)
        throw invalid_input("fit_clr_spline: underdetermined fit, basis size " + std::to_string(K) +
                            " exceeds " + std::to_string(m) + " nodes");

    const Eigen::MatrixXd& B = basis.eval_matrix();
    Eigen::VectorXd zv = Eigen::Map<const Eigen::VectorXd>(z.values().data(), m);
    Eigen::VectorXd a = Eigen::Map<const Eigen::VectorXd>(basis.integrals().data(), K);

    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(K + 1, K + 1);
    kkt.topLeftCorner(K, K) = B.transpose() * B;
    kkt.topRightCorner(K, 1) = a;
    kkt.bottomLeftCorner(1, K) = a.transpose();
    Eigen::VectorXd rhs(K + 1);
    rhs.head(K) = B.transpose() * zv;
    rhs(K) = 0.0;

    Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
    if (!lu.isInvertible())
        throw invalid_input("fit_clr_spline: underdetermined fit, design matrix is rank deficient");
    Eigen::VectorXd sol = lu.solve(rhs);

    SplineCoefficients c;
    c.label = std::move(label);
    c.values.assign(sol.data(), sol.data() + K);
    return c;
}

/// Evaluate a coefficient vector on the basis grid.
inline std::vector<double> spline_to_grid(const SplineCoefficients& c, const BsplineBasis& basis) {
    if (static_cast<int>(c.values.size()) != basis.size())
        throw invalid_input("spline_to_grid: coefficient count does not match basis size");
    Eigen::VectorXd v =
        basis.eval_matrix() * Eigen::Map<const Eigen::VectorXd>(c.values.data(), c.values.size());
    return std::vector<double>(v.data(), v.data() + v.size());
}

/// Weight per-coefficient anomaly levels by the basis functions; since
/// the basis forms a partition of unity the result is a node-wise convex
/// combination of the levels.
inline std::vector<double> anomaly_to_grid(std::span<const double> levels, const BsplineBasis& basis) {
    if (static_cast<int>(levels.size()) != basis.size())
        throw invalid_input("anomaly_to_grid: level count does not match basis size");
    const int m = basis.grid().nodes(0);
    std::vector<double> out(m, 0.0);
    for (int i = 0; i < m; ++i)
        for (int k = 0; k < basis.size(); ++k) out[i] += levels[k] * basis.at(i, k);
    return out;
}

} // namespace bayesfda
