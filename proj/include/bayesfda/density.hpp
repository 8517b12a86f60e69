// Grid-based Bayes space core: densities as equivalence classes of
// positive functions, the clr transform, perturbation/powering and the
// induced inner product, norm and distance.
//
// The inner product is evaluated in clr form,
//   <f,g> = int clr(f) clr(g) dx,
// which agrees with the defining double integral
//   1/(2 eta) intint ln(f(x)/f(y)) ln(g(x)/g(y)) dx dy
// identically (expand the product and integrate term by term).

#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "bayesfda/grid.hpp"

namespace bayesfda {

/// Zero-integral tolerance for clr grids: scales with the box volume and
/// the magnitude of the values.
inline double clr_integral_tolerance(const Grid& grid, std::span<const double> values) {
    double vmax = 0.0;
    for (double v : values) vmax = std::max(vmax, std::abs(v));
    return 1e-8 * grid.box().volume() * std::max(vmax, 1.0);
}

/// Real-valued function on a grid with (quadrature) integral zero.
/// The image of a density under the clr transform.
class ClrGrid {
  public:
    ClrGrid() = default;

    ClrGrid(Grid grid, std::vector<double> values) : grid_(std::move(grid)), values_(std::move(values)) {
        if (values_.size() != grid_.size())
            throw invalid_input("ClrGrid: value count does not match grid size");
        const double z = integrate(grid_, values_); // also rejects non-finite values
        if (std::abs(z) > clr_integral_tolerance(grid_, values_))
            throw invalid_input("ClrGrid: integral " + std::to_string(z) + " violates zero-integral constraint");
    }

    const Grid& grid() const { return grid_; }
    const std::vector<double>& values() const { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }
    std::size_t size() const { return values_.size(); }

  private:
    Grid grid_;
    std::vector<double> values_;
};

/// Strictly positive function on a grid, one representative of a
/// scale-invariance class. Construction normalizes to unit integral,
/// the conventional PDF representative.
class DensityGrid {
  public:
    DensityGrid() = default;

    DensityGrid(Grid grid, std::vector<double> values) : grid_(std::move(grid)), values_(std::move(values)) {
        if (values_.size() != grid_.size())
            throw invalid_input("DensityGrid: value count does not match grid size");
        for (std::size_t i = 0; i < values_.size(); ++i)
            if (!(values_[i] > 0.0) || !std::isfinite(values_[i]))
                throw error_at(i, values_[i]);
        normalize();
    }

    static DensityGrid uniform(const Grid& grid) {
        return DensityGrid(grid, std::vector<double>(grid.size(), 1.0));
    }

    const Grid& grid() const { return grid_; }
    const std::vector<double>& values() const { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }
    std::size_t size() const { return values_.size(); }

  private:
    static invalid_input error_at(std::size_t i, double v) {
        return invalid_input("DensityGrid: non-positive or non-finite value " + std::to_string(v) +
                             " at node " + std::to_string(i));
    }

    void normalize() {
        const double total = integrate(grid_, values_);
        for (double& v : values_) v /= total;
    }

    Grid grid_;
    std::vector<double> values_;
};

/// clr(f) = ln f - (1/eta) int ln f. Scale invariant by construction.
inline ClrGrid clr(const DensityGrid& f) {
    const Grid& grid = f.grid();
    std::vector<double> logs(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) logs[i] = std::log(f[i]);
    const double logmean = integrate(grid, logs) / grid.box().volume();
    for (double& v : logs) v -= logmean;
    return ClrGrid(grid, std::move(logs));
}

/// Inverse transform: exp then normalize. The exponent is shifted by its
/// maximum first so the exp never overflows; values that underflow to
/// zero are reported instead of silently clamped.
inline DensityGrid clr_inverse(const ClrGrid& z) {
    double zmax = -std::numeric_limits<double>::infinity();
    std::size_t at = 0;
    for (std::size_t i = 0; i < z.size(); ++i)
        if (z[i] > zmax) zmax = z[i], at = i;

    std::vector<double> vals(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) {
        vals[i] = std::exp(z[i] - zmax);
        if (vals[i] == 0.0)
            throw range_failure("clr_inverse: exp underflow at node " + std::to_string(i) +
                                " (clr range too wide; max " + std::to_string(zmax) + " at node " +
                                std::to_string(at) + ")");
    }
    return DensityGrid(z.grid(), std::move(vals));
}

/// Perturbation (f + g in the Bayes space): pointwise product.
inline DensityGrid perturb(const DensityGrid& f, const DensityGrid& g) {
    require_same_grid(f.grid(), g.grid(), "perturb");
    std::vector<double> vals(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) vals[i] = f[i] * g[i];
    return DensityGrid(f.grid(), std::move(vals));
}

/// Powering (scalar action): pointwise alpha-th power.
inline DensityGrid power(double alpha, const DensityGrid& f) {
    std::vector<double> vals(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) vals[i] = std::pow(f[i], alpha);
    return DensityGrid(f.grid(), std::move(vals));
}

/// f - g in the Bayes space: pointwise ratio.
inline DensityGrid subtract(const DensityGrid& f, const DensityGrid& g) {
    require_same_grid(f.grid(), g.grid(), "subtract");
    std::vector<double> vals(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) vals[i] = f[i] / g[i];
    return DensityGrid(f.grid(), std::move(vals));
}

inline double inner_product(const ClrGrid& a, const ClrGrid& b) {
    require_same_grid(a.grid(), b.grid(), "inner_product");
    std::vector<double> prod(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) prod[i] = a[i] * b[i];
    return integrate(a.grid(), prod);
}

inline double inner_product(const DensityGrid& f, const DensityGrid& g) {
    require_same_grid(f.grid(), g.grid(), "inner_product");
    return inner_product(clr(f), clr(g));
}

inline double norm(const ClrGrid& z) { return std::sqrt(std::max(0.0, inner_product(z, z))); }

inline double norm(const DensityGrid& f) {
    const ClrGrid z = clr(f);
    return norm(z);
}

inline double distance(const DensityGrid& f, const DensityGrid& g) {
    require_same_grid(f.grid(), g.grid(), "distance");
    const ClrGrid zf = clr(f), zg = clr(g);
    std::vector<double> sq(zf.size());
    for (std::size_t i = 0; i < zf.size(); ++i) {
        const double d = zf[i] - zg[i];
        sq[i] = d * d;
    }
    return std::sqrt(std::max(0.0, integrate(zf.grid(), sq)));
}

} // namespace bayesfda
