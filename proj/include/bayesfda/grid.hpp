// Rectangular supports, regular grids on them, and tensor-product
// trapezoidal quadrature. Every function-valued object in the library
// lives on one of these grids; values are stored flat, row-major with
// the last dimension fastest.

#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "bayesfda/errors.hpp"

namespace bayesfda {

inline constexpr int kMaxDim = 3;

/// Axis-aligned box (a_1,b_1) x ... x (a_d,b_d), d in {1,2,3}.
class Box {
  public:
    Box() = default;

    Box(std::span<const double> lo, std::span<const double> hi) {
        if (lo.size() != hi.size() || lo.empty() || lo.size() > kMaxDim)
            throw invalid_input("Box: need 1 to 3 matching bounds, got " +
                                std::to_string(lo.size()) + "/" + std::to_string(hi.size()));
        dim_ = static_cast<int>(lo.size());
        for (int k = 0; k < dim_; ++k) {
            if (!std::isfinite(lo[k]) || !std::isfinite(hi[k]) || !(lo[k] < hi[k]))
                throw invalid_input("Box: require finite a_k < b_k in dimension " +
                                    std::to_string(k));
            lo_[k] = lo[k];
            hi_[k] = hi[k];
        }
    }

    Box(std::initializer_list<double> lo, std::initializer_list<double> hi)
        : Box(std::span<const double>(lo.begin(), lo.size()),
              std::span<const double>(hi.begin(), hi.size())) {}

    static Box interval(double a, double b) { return Box({a}, {b}); }

    int dim() const { return dim_; }
    double lo(int k) const { return lo_[k]; }
    double hi(int k) const { return hi_[k]; }
    double length(int k) const { return hi_[k] - lo_[k]; }

    /// eta = prod_k (b_k - a_k)
    double volume() const {
        double v = 1.0;
        for (int k = 0; k < dim_; ++k) v *= length(k);
        return v;
    }

    /// Sub-box spanned by the given dimensions, in the given order.
    Box sub(std::span<const int> dims) const {
        std::vector<double> l, h;
        for (int k : dims) {
            l.push_back(lo_[k]);
            h.push_back(hi_[k]);
        }
        return Box(l, h);
    }

    bool contains(std::span<const double> x) const {
        if (static_cast<int>(x.size()) != dim_) return false;
        for (int k = 0; k < dim_; ++k)
            if (!(x[k] > lo_[k] && x[k] < hi_[k])) return false;
        return true;
    }

    friend bool operator==(const Box& a, const Box& b) {
        if (a.dim_ != b.dim_) return false;
        for (int k = 0; k < a.dim_; ++k)
            if (a.lo_[k] != b.lo_[k] || a.hi_[k] != b.hi_[k]) return false;
        return true;
    }

  private:
    int dim_ = 0;
    std::array<double, kMaxDim> lo_{};
    std::array<double, kMaxDim> hi_{};
};

/// Regular grid over a Box: m_k equally spaced nodes per dimension,
/// endpoints included, m_k >= 4.
class Grid {
  public:
    Grid() = default;

    Grid(Box box, std::span<const int> nodes) : box_(box) {
        if (static_cast<int>(nodes.size()) != box.dim())
            throw invalid_input("Grid: node counts must match box dimension");
        size_ = 1;
        for (int k = 0; k < box.dim(); ++k) {
            if (nodes[k] < 4)
                throw invalid_input("Grid: need at least 4 nodes per dimension, got " +
                                    std::to_string(nodes[k]));
            m_[k] = nodes[k];
            size_ *= static_cast<std::size_t>(nodes[k]);
        }
    }

    Grid(Box box, std::initializer_list<int> nodes)
        : Grid(box, std::span<const int>(nodes.begin(), nodes.size())) {}

    static Grid uniform_1d(double a, double b, int m) { return Grid(Box::interval(a, b), {m}); }

    const Box& box() const { return box_; }
    int dim() const { return box_.dim(); }
    int nodes(int k) const { return m_[k]; }
    std::size_t size() const { return size_; }

    double spacing(int k) const { return box_.length(k) / (m_[k] - 1); }

    double node(int k, int i) const {
        // Hit the upper endpoint exactly.
        return i == m_[k] - 1 ? box_.hi(k) : box_.lo(k) + i * spacing(k);
    }

    /// Flat index of a multi-index, last dimension fastest.
    std::size_t index(std::span<const int> ix) const {
        std::size_t flat = 0;
        for (int k = 0; k < dim(); ++k) flat = flat * m_[k] + ix[k];
        return flat;
    }

    /// Inverse of index().
    std::array<int, kMaxDim> unravel(std::size_t flat) const {
        std::array<int, kMaxDim> ix{};
        for (int k = dim() - 1; k >= 0; --k) {
            ix[k] = static_cast<int>(flat % m_[k]);
            flat /= m_[k];
        }
        return ix;
    }

    std::array<double, kMaxDim> coords(std::size_t flat) const {
        auto ix = unravel(flat);
        std::array<double, kMaxDim> x{};
        for (int k = 0; k < dim(); ++k) x[k] = node(k, ix[k]);
        return x;
    }

    /// Trapezoidal weights along one dimension: h/2 at the ends, h inside.
    std::vector<double> weights(int k) const {
        const double h = spacing(k);
        std::vector<double> w(m_[k], h);
        w.front() = w.back() = h / 2.0;
        return w;
    }

    /// 1D grid along a single dimension of this grid.
    Grid axis(int k) const {
        return Grid(Box::interval(box_.lo(k), box_.hi(k)), {m_[k]});
    }

    /// Sub-grid over a subset of dimensions.
    Grid sub(std::span<const int> dims) const {
        std::vector<int> n;
        for (int k : dims) n.push_back(m_[k]);
        return Grid(box_.sub(dims), n);
    }

    friend bool operator==(const Grid& a, const Grid& b) {
        if (!(a.box_ == b.box_)) return false;
        for (int k = 0; k < a.dim(); ++k)
            if (a.m_[k] != b.m_[k]) return false;
        return true;
    }

  private:
    Box box_;
    std::array<int, kMaxDim> m_{};
    std::size_t size_ = 0;
};

inline void require_same_grid(const Grid& a, const Grid& b, const char* where) {
    if (!(a == b)) throw grid_mismatch(std::string(where) + ": operands live on different grids");
}

/// Tensor-product trapezoidal integral of node values over the grid's box.
/// Exact for the piecewise-(multi)linear interpolant of the values.
inline double integrate(const Grid& grid, std::span<const double> values) {
    if (values.size() != grid.size())
        throw invalid_input("integrate: value count does not match grid size");
    std::array<std::vector<double>, kMaxDim> w;
    for (int k = 0; k < grid.dim(); ++k) w[k] = grid.weights(k);

    double total = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double v = values[i];
        if (!std::isfinite(v))
            throw invalid_input("integrate: non-finite value at node " + std::to_string(i));
        auto ix = grid.unravel(i);
        double wt = 1.0;
        for (int k = 0; k < grid.dim(); ++k) wt *= w[k][ix[k]];
        total += wt * v;
    }
    return total;
}

} // namespace bayesfda
