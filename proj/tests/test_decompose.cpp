#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "bayesfda/decompose.hpp"
#include "support.hpp"

using namespace bayesfda;

namespace {

DensityGrid random_density(std::mt19937_64& rng, const Grid& g, double log_sd = 1.0) {
    return DensityGrid(g, testsupport::random_positive_values(rng, g.size(), log_sd));
}

/// Product of three 1D profiles on a 3D grid.
DensityGrid product_density(const Grid& g, auto&& g1, auto&& g2, auto&& g3) {
    std::vector<double> v(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        auto x = g.coords(i);
        v[i] = g1(x[0]) * g2(x[1]) * g3(x[2]);
    }
    return DensityGrid(g, std::move(v));
}

/// Trivariate Gaussian with a single nonzero correlation rho between the
/// first two coordinates, sampled on the grid.
DensityGrid gaussian_pair_corr(const Grid& g, double rho) {
    std::vector<double> v(g.size());
    const double c = 1.0 / (1.0 - rho * rho);
    for (std::size_t i = 0; i < g.size(); ++i) {
        auto x = g.coords(i);
        const double q = c * (x[0] * x[0] - 2.0 * rho * x[0] * x[1] + x[1] * x[1]) + x[2] * x[2];
        v[i] = std::exp(-q / 2.0);
    }
    return DensityGrid(g, std::move(v));
}

double quadrature_mean(const Grid& g1d, const DensityGrid& f) {
    std::vector<double> xv(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) xv[i] = g1d.node(0, static_cast<int>(i)) * f[i];
    return integrate(g1d, xv);
}

double quadrature_var(const Grid& g1d, const DensityGrid& f) {
    const double m = quadrature_mean(g1d, f);
    std::vector<double> xv(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double d = g1d.node(0, static_cast<int>(i)) - m;
        xv[i] = d * d * f[i];
    }
    return integrate(g1d, xv);
}

} // namespace

TEST_CASE("marginals of an independent product recover the factors") {
    Grid g(Box({0.0, 0.0, 0.0}, {1.0, 2.0, 1.5}), {10, 12, 8});
    auto e1 = [](double x) { return std::exp(-x); };
    auto e2 = [](double x) { return 1.0 + x; };
    auto e3 = [](double x) { return std::exp(std::sin(2.0 * x)); };
    DensityGrid f = product_density(g, e1, e2, e3);

    DensityGrid m1g = geometric_marginal(f, {0});
    DensityGrid m1a = arithmetic_marginal(f, {0});
    Grid axis0 = g.axis(0);
    std::vector<double> want(axis0.size());
    for (std::size_t i = 0; i < want.size(); ++i) want[i] = e1(axis0.node(0, static_cast<int>(i)));
    DensityGrid ref(axis0, want);
    for (std::size_t i = 0; i < ref.size(); ++i) {
        CHECK(m1g[i] == Catch::Approx(ref[i]).epsilon(1e-10));
        CHECK(m1a[i] == Catch::Approx(ref[i]).epsilon(1e-10));
    }
}

TEST_CASE("marginals of the uniform are uniform; invalid dims rejected") {
    Grid g(Box({0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}), {6, 6, 6});
    DensityGrid u = DensityGrid::uniform(g);
    for (auto dims : std::vector<std::vector<int>>{{0}, {1}, {2}, {0, 1}, {0, 2}, {1, 2}}) {
        DensityGrid m = geometric_marginal(u, std::span<const int>(dims.data(), dims.size()));
        DensityGrid uref = DensityGrid::uniform(g.sub(std::span<const int>(dims.data(), dims.size())));
        for (std::size_t i = 0; i < m.size(); ++i) CHECK(m[i] == Catch::Approx(uref[i]).margin(1e-13));
    }
    CHECK_THROWS_AS(geometric_marginal(u, std::vector<int>{}), invalid_input);
    CHECK_THROWS_AS(geometric_marginal(u, std::vector<int>{0, 1, 2}), invalid_input);
    CHECK_THROWS_AS(geometric_marginal(u, std::vector<int>{1, 0}), invalid_input);
}

TEST_CASE("geometric marginal of a correlated Gaussian: brute oracle and narrowing") {
    Grid g(Box({-5.0, -5.0, -5.0}, {5.0, 5.0, 5.0}), {33, 33, 17});
    // equicorrelated rho = 0.5: density ~ exp(-sum x^2 + 0.25 (sum x)^2)
    std::vector<double> v(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        auto x = g.coords(i);
        const double s = x[0] + x[1] + x[2];
        v[i] = std::exp(-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) + 0.25 * s * s);
    }
    DensityGrid f(g, v);

    DensityGrid mg = geometric_marginal(f, {0});
    auto brute = testsupport::brute_geometric_marginal(g, f.values(), {0});
    DensityGrid mg_ref(g.axis(0), brute);
    for (std::size_t i = 0; i < mg.size(); ++i)
        CHECK(mg[i] == Catch::Approx(mg_ref[i]).epsilon(1e-10).margin(1e-12));

    DensityGrid ma = arithmetic_marginal(f, {0});
    CHECK(quadrature_var(g.axis(0), mg) < 0.8 * quadrature_var(g.axis(0), ma));
}

TEST_CASE("arithmetic marginal of a pair-correlated Gaussian matches the analytic marginal") {
    Grid g(Box({-5.0, -5.0, -5.0}, {5.0, 5.0, 5.0}), {65, 65, 17});
    DensityGrid f = gaussian_pair_corr(g, 0.5);
    DensityGrid m = arithmetic_marginal(f, {0});

    const double mass = std::erf(5.0 / std::sqrt(2.0));
    double worst = 0.0, peak = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        const double x = g.node(0, static_cast<int>(i));
        const double truth = std::exp(-x * x / 2.0) / (std::sqrt(2.0 * M_PI) * mass);
        worst = std::max(worst, std::abs(m[i] - truth));
        peak = std::max(peak, truth);
    }
    CHECK(worst <= 1e-6 * peak);
}

TEST_CASE("decompose: independent product has uniform interactions") {
    Grid g(Box({0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}), {9, 8, 7});
    DensityGrid f = product_density(
        g, [](double x) { return std::exp(-2.0 * x); }, [](double x) { return 1.0 + 3.0 * x * x; },
        [](double x) { return std::exp(std::cos(3.0 * x)); });
    Decomposition d = decompose(f);
    for (int p = 0; p < 3; ++p) CHECK(norm(d.interaction2[p]) < 1e-10);
    CHECK(norm(d.interaction3) < 1e-10);

    // geometric and arithmetic univariate marginals coincide
    for (int k = 0; k < 3; ++k) {
        DensityGrid ma = arithmetic_marginal(f, std::span<const int>(&k, 1));
        for (std::size_t i = 0; i < ma.size(); ++i)
            CHECK(d.marginal[k][i] == Catch::Approx(ma[i]).epsilon(1e-10));
    }
}

TEST_CASE("decompose: recomposition, orthogonality, Pythagoras on random densities") {
    std::mt19937_64 rng(2024);
    Grid g(Box({0.0, -1.0, 2.0}, {2.0, 1.0, 3.0}), {12, 10, 11});
    for (int trial = 0; trial < 10; ++trial) {
        DensityGrid f = random_density(rng, g, 0.8);
        Decomposition d = decompose(f);

        CHECK(distance(f, recompose(d)) <= 1e-6 * norm(f));

        // lift all parts to 3D and test pairwise orthogonality
        std::vector<DensityGrid> parts;
        for (int k = 0; k < 3; ++k) parts.push_back(lift(d.marginal[k], g, {k}));
        for (int p = 0; p < 3; ++p) {
            const auto& pr = Decomposition::kPairs[p];
            const std::array<int, 2> pair{pr[0], pr[1]};
            parts.push_back(lift(d.interaction2[p], g, std::span<const int>(pair.data(), 2)));
        }
        parts.push_back(d.interaction3);
        double total_sq = 0.0;
        for (std::size_t a = 0; a < parts.size(); ++a) {
            total_sq += inner_product(parts[a], parts[a]);
            for (std::size_t b = a + 1; b < parts.size(); ++b) {
                const double ip = inner_product(parts[a], parts[b]);
                const double na = norm(parts[a]), nb = norm(parts[b]);
                CHECK(std::abs(ip) <= std::max(1e-6 * na * nb, 1e-10));
            }
        }
        const double fsq = inner_product(f, f);
        CHECK(std::abs(fsq - total_sq) <= 1e-6 * fsq);

        // lifted_sq_norm shortcut agrees with the explicit lift
        for (int k = 0; k < 3; ++k)
            CHECK(lifted_sq_norm(d.marginal[k], g.box()) ==
                  Catch::Approx(inner_product(parts[k], parts[k])).epsilon(1e-9).margin(1e-12));
    }
}

TEST_CASE("decompose: single pairwise correlation concentrates in one interaction") {
    Grid g(Box({-4.0, -4.0, -4.0}, {4.0, 4.0, 4.0}), {24, 24, 24});
    DensityGrid f = gaussian_pair_corr(g, 0.6);
    Decomposition d = decompose(f);

    const double n12 = norm(d.interaction2[0]);
    CHECK(n12 > 0.01);
    CHECK(norm(d.interaction2[1]) <= 1e-6 * n12);
    CHECK(norm(d.interaction2[2]) <= 1e-6 * n12);
    CHECK(norm(d.interaction3) <= 1e-6 * n12);

    InformationComposition ic = information_composition(d, f);
    CHECK(ic.parts[3] > 10.0 * ic.parts[4]);
    CHECK(ic.parts[3] > 10.0 * ic.parts[5]);
    CHECK(ic.parts[3] > 10.0 * ic.parts[6]);
}

TEST_CASE("projection property: lifted 1D perturbation moves only its own marginal") {
    std::mt19937_64 rng(55);
    Grid g(Box({0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}), {8, 9, 10});
    DensityGrid f = random_density(rng, g, 0.7);
    DensityGrid bump = random_density(rng, g.axis(1), 0.5);

    Decomposition before = decompose(f);
    Decomposition after = decompose(perturb(f, lift(bump, g, {1})));

    DensityGrid want = perturb(before.marginal[1], bump);
    for (std::size_t i = 0; i < want.size(); ++i)
        CHECK(after.marginal[1][i] == Catch::Approx(want[i]).epsilon(1e-10).margin(1e-13));
    for (std::size_t i = 0; i < before.marginal[0].size(); ++i)
        CHECK(after.marginal[0][i] == Catch::Approx(before.marginal[0][i]).epsilon(1e-10).margin(1e-13));
    for (int p = 0; p < 3; ++p)
        for (std::size_t i = 0; i < before.interaction2[p].size(); ++i)
            CHECK(after.interaction2[p][i] ==
                  Catch::Approx(before.interaction2[p][i]).epsilon(1e-9).margin(1e-12));
    for (std::size_t i = 0; i < before.interaction3.size(); ++i)
        CHECK(after.interaction3[i] == Catch::Approx(before.interaction3[i]).epsilon(1e-9).margin(1e-12));
}

TEST_CASE("bivariate decomposition recomposes and separates independence") {
    Grid g(Box({0.0, 0.0}, {1.0, 1.0}), {16, 14});
    std::mt19937_64 rng(66);
    DensityGrid f = DensityGrid(g, testsupport::random_positive_values(rng, g.size(), 0.6));
    BivariateDecomposition d = decompose_bivariate(f);
    DensityGrid back = perturb(perturb(lift(d.marginal[0], g, {0}), lift(d.marginal[1], g, {1})),
                               d.interaction);
    CHECK(distance(f, back) <= 1e-6 * norm(f));
}

TEST_CASE("information composition: uniform input is rejected; parts sum to one") {
    Grid g(Box({0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}), {6, 6, 6});
    CHECK_THROWS_AS(information_composition(DensityGrid::uniform(g)), degenerate_data);

    std::mt19937_64 rng(77);
    DensityGrid f = random_density(rng, g, 0.5);
    InformationComposition ic = information_composition(f);
    double sum = 0.0;
    for (double p : ic.parts) {
        CHECK(p >= 0.0);
        CHECK(p <= 1.0 + 1e-12);
        sum += p;
    }
    CHECK(sum == Catch::Approx(1.0).margin(1e-6));
}

TEST_CASE("clr_composition: zero for equal parts, zero sum, frozen example") {
    InformationComposition equal;
    equal.parts.fill(1.0 / 7.0);
    for (double v : clr_composition(equal)) CHECK(std::abs(v) < 1e-14);

    InformationComposition ic;
    ic.parts = {0.4, 0.3, 0.1, 0.05, 0.05, 0.05, 0.05};
    auto v = clr_composition(ic);
    double mean_log = 0.0;
    for (double p : ic.parts) mean_log += std::log(p);
    mean_log /= 7.0;
    for (int k = 0; k < 7; ++k) CHECK(v[k] == Catch::Approx(std::log(ic.parts[k]) - mean_log).margin(1e-12));

    double s = 0.0;
    for (double x : v) s += x;
    CHECK(std::abs(s) < 1e-12);
}
