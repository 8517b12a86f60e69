// Geometric and arithmetic marginals, the orthogonal decomposition of a
// trivariate density into marginal and interaction parts, and the
// information composition of relative squared norms.
//
// Marginalization and clr use the same tensor-product quadrature, so the
// discrete decomposition inherits the exact orthogonality of its
// continuous counterpart: the log-mean over removed dimensions is the
// orthogonal projection in the discrete weighted inner product.

#pragma once

#include <array>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "bayesfda/density.hpp"

namespace bayesfda {

namespace detail {

inline void check_marginal_dims(const Grid& grid, std::span<const int> keep) {
    if (keep.empty() || static_cast<int>(keep.size()) >= grid.dim())
        throw invalid_input("marginal: kept dimensions must be a proper nonempty subset");
    int prev = -1;
    for (int k : keep) {
        if (k <= prev || k >= grid.dim())
            throw invalid_input("marginal: dimensions must be strictly increasing and in range");
        prev = k;
    }
}

inline std::vector<int> removed_dims(const Grid& grid, std::span<const int> keep) {
    std::vector<int> drop;
    for (int k = 0; k < grid.dim(); ++k)
        if (std::find(keep.begin(), keep.end(), k) == keep.end()) drop.push_back(k);
    return drop;
}

/// Accumulate w_removed * transform(f) into sub-grid buckets.
template <typename Transform>
std::vector<double> reduce_over_removed(const DensityGrid& f, std::span<const int> keep,
                                        Transform&& transform) {
    const Grid& grid = f.grid();
    const Grid sub = grid.sub(keep);
    std::array<std::vector<double>, kMaxDim> w;
    for (int k = 0; k < grid.dim(); ++k) w[k] = grid.weights(k);
    const std::vector<int> drop = removed_dims(grid, keep);

    std::vector<double> acc(sub.size(), 0.0);
    std::array<int, kMaxDim> subix{};
    for (std::size_t flat = 0; flat < grid.size(); ++flat) {
        const auto ix = grid.unravel(flat);
        double wt = 1.0;
        for (int k : drop) wt *= w[k][ix[k]];
        for (std::size_t k = 0; k < keep.size(); ++k) subix[k] = ix[keep[k]];
        acc[sub.index(std::span<const int>(subix.data(), keep.size()))] += wt * transform(f[flat]);
    }
    return acc;
}

} // namespace detail

/// Geometric marginal: exp of the quadrature mean of ln f over the removed
/// dimensions, normalized on the sub-box. This is the orthogonal
/// projection of f onto densities depending only on the kept dimensions.
inline DensityGrid geometric_marginal(const DensityGrid& f, std::span<const int> keep) {
    detail::check_marginal_dims(f.grid(), keep);
    const Grid sub = f.grid().sub(keep);
    double vol_removed = 1.0;
    for (int k : detail::removed_dims(f.grid(), keep)) vol_removed *= f.grid().box().length(k);
    std::vector<double> acc = detail::reduce_over_removed(f, keep, [](double v) { return std::log(v); });
    for (double& v : acc) v = std::exp(v / vol_removed);
    return DensityGrid(sub, std::move(acc));
}

inline DensityGrid geometric_marginal(const DensityGrid& f, std::initializer_list<int> keep) {
    return geometric_marginal(f, std::span<const int>(keep.begin(), keep.size()));
}

/// Ordinary probability marginal: quadrature integral over the removed
/// dimensions, normalized.
inline DensityGrid arithmetic_marginal(const DensityGrid& f, std::span<const int> keep) {
    detail::check_marginal_dims(f.grid(), keep);
    const Grid sub = f.grid().sub(keep);
    std::vector<double> acc = detail::reduce_over_removed(f, keep, [](double v) { return v; });
    return DensityGrid(sub, std::move(acc));
}

inline DensityGrid arithmetic_marginal(const DensityGrid& f, std::initializer_list<int> keep) {
    return arithmetic_marginal(f, std::span<const int>(keep.begin(), keep.size()));
}

/// Cylindrical extension of a lower-dimensional density onto a full grid,
/// constant along the missing axes. dims maps the part's axes to full-grid
/// dimensions (ascending).
inline DensityGrid lift(const DensityGrid& part, const Grid& full, std::span<const int> dims) {
    if (!(part.grid() == full.sub(dims)))
        throw grid_mismatch("lift: part grid is not the sub-grid of the target");
    std::vector<double> vals(full.size());
    std::array<int, kMaxDim> subix{};
    for (std::size_t flat = 0; flat < full.size(); ++flat) {
        const auto ix = full.unravel(flat);
        for (std::size_t k = 0; k < dims.size(); ++k) subix[k] = ix[dims[k]];
        vals[flat] = part[part.grid().index(std::span<const int>(subix.data(), dims.size()))];
    }
    return DensityGrid(full, std::move(vals));
}

inline DensityGrid lift(const DensityGrid& part, const Grid& full, std::initializer_list<int> dims) {
    return lift(part, full, std::span<const int>(dims.begin(), dims.size()));
}

/// Squared Bayes norm of a part measured after cylindrical extension to
/// the full box. Under tensor-product quadrature the extension multiplies
/// the squared norm by the removed volume, so no explicit lift is needed.
inline double lifted_sq_norm(const DensityGrid& part, const Box& full_box) {
    double removed_vol = full_box.volume() / part.grid().box().volume();
    const double n = norm(part);
    return removed_vol * n * n;
}

/// Orthogonal parts of a trivariate density: univariate geometric
/// marginals, bivariate interactions, the trivariate interaction, and the
/// independence part (perturbation of the univariate marginals).
struct Decomposition {
    std::array<DensityGrid, 3> marginal;      // f1, f2, f3 on 1D axes
    std::array<DensityGrid, 3> interaction2;  // i12, i13, i23 on 2D faces
    DensityGrid interaction3;                 // trivariate remainder
    DensityGrid independence;                 // f1 x f2 x f3 on the 3D grid
    Grid grid;                                // the full 3D grid

    static constexpr std::array<std::array<int, 2>, 3> kPairs{{{0, 1}, {0, 2}, {1, 2}}};
};

inline Decomposition decompose(const DensityGrid& f) {
    if (f.grid().dim() != 3) throw invalid_input("decompose: expected a trivariate density");
    Decomposition d;
    d.grid = f.grid();

    for (int k = 0; k < 3; ++k) d.marginal[k] = geometric_marginal(f, {k});

    for (int p = 0; p < 3; ++p) {
        const auto [a, b] = std::pair(Decomposition::kPairs[p][0], Decomposition::kPairs[p][1]);
        const std::array<int, 2> pair{a, b};
        DensityGrid fab = geometric_marginal(f, std::span<const int>(pair.data(), 2));
        const Grid face = f.grid().sub(std::span<const int>(pair.data(), 2));
        DensityGrid la = lift(d.marginal[a], face, {0});
        DensityGrid lb = lift(d.marginal[b], face, {1});
        d.interaction2[p] = subtract(subtract(fab, la), lb);
    }

    std::array<DensityGrid, 3> lifted1;
    for (int k = 0; k < 3; ++k) lifted1[k] = lift(d.marginal[k], f.grid(), {k});
    d.independence = perturb(perturb(lifted1[0], lifted1[1]), lifted1[2]);

    // i123 = f - f12 - f13 - f23 + f1 + f2 + f3 (Bayes-space arithmetic)
    DensityGrid rem = f;
    for (int p = 0; p < 3; ++p) {
        const auto& pr = Decomposition::kPairs[p];
        const std::array<int, 2> pair{pr[0], pr[1]};
        DensityGrid fab = geometric_marginal(f, std::span<const int>(pair.data(), 2));
        rem = subtract(rem, lift(fab, f.grid(), std::span<const int>(pair.data(), 2)));
    }
    for (int k = 0; k < 3; ++k) rem = perturb(rem, lifted1[k]);
    d.interaction3 = std::move(rem);
    return d;
}

/// Perturb all (lifted) parts back together; recovers the original
/// density up to rounding.
inline DensityGrid recompose(const Decomposition& d) {
    DensityGrid out = d.independence;
    for (int p = 0; p < 3; ++p) {
        const auto& pr = Decomposition::kPairs[p];
        const std::array<int, 2> pair{pr[0], pr[1]};
        out = perturb(out, lift(d.interaction2[p], d.grid, std::span<const int>(pair.data(), 2)));
    }
    return perturb(out, d.interaction3);
}

/// Bivariate specialization: f = f1 + f2 + interaction.
struct BivariateDecomposition {
    std::array<DensityGrid, 2> marginal;
    DensityGrid interaction;
    Grid grid;
};

inline BivariateDecomposition decompose_bivariate(const DensityGrid& f) {
    if (f.grid().dim() != 2) throw invalid_input("decompose_bivariate: expected a bivariate density");
    BivariateDecomposition d;
    d.grid = f.grid();
    d.marginal[0] = geometric_marginal(f, {0});
    d.marginal[1] = geometric_marginal(f, {1});
    d.interaction = subtract(subtract(f, lift(d.marginal[0], f.grid(), {0})),
                             lift(d.marginal[1], f.grid(), {1}));
    return d;
}

/// Relative squared norms of the seven decomposition parts; sums to one
/// by the Pythagorean identity.
struct InformationComposition {
    std::array<double, 7> parts{};

    static const std::array<std::string, 7>& labels() {
        static const std::array<std::string, 7> l{"f(Cu)",    "f(Pb)",    "f(Zn)",   "f(Cu,Pb)",
                                                  "f(Cu,Zn)", "f(Pb,Zn)", "f(Cu,Pb,Zn)"};
        return l;
    }
};

inline constexpr double kTauPythagoras = 1e-6;

inline InformationComposition information_composition(const Decomposition& d, const DensityGrid& f) {
    const double total = inner_product(f, f);
    if (!(total > 1e-16))
        throw degenerate_data("information_composition: undefined for the uniform density (zero norm)");

    InformationComposition ic;
    for (int k = 0; k < 3; ++k) ic.parts[k] = lifted_sq_norm(d.marginal[k], f.grid().box()) / total;
    for (int p = 0; p < 3; ++p)
        ic.parts[3 + p] = lifted_sq_norm(d.interaction2[p], f.grid().box()) / total;
    {
        const double n3 = norm(d.interaction3);
        ic.parts[6] = n3 * n3 / total;
    }

    double sum = 0.0;
    for (double p : ic.parts) sum += p;
    if (std::abs(sum - 1.0) > kTauPythagoras)
        throw error("information_composition: parts sum to " + std::to_string(sum) +
                    ", Pythagorean identity violated");
    return ic;
}

inline InformationComposition information_composition(const DensityGrid& f) {
    return information_composition(decompose(f), f);
}

/// Floor applied to composition parts before taking logratios.
inline constexpr double kCompositionFloor = 1e-12;

/// clr of a 7-part composition: log parts centred by their mean log.
inline std::array<double, 7> clr_composition(const InformationComposition& ic) {
    std::array<double, 7> out{};
    double mean_log = 0.0;
    for (int k = 0; k < 7; ++k) {
        out[k] = std::log(std::max(ic.parts[k], kCompositionFloor));
        mean_log += out[k];
    }
    mean_log /= 7.0;
    for (double& v : out) v -= mean_log;
    return out;
}

} // namespace bayesfda
