#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <functional>
#include <vector>

#include "hypdisp/errors.hpp"
#include "hypdisp/lorentz.hpp"

using namespace hypdisp;

namespace {

RadialFunction sample(const RadialGrid& grid, const std::function<double(double)>& fn) {
    RadialFunction f;
    f.values.reserve(grid.r_nodes.size());
    for (double r : grid.r_nodes) f.values.emplace_back(fn(r), 0.0);
    return f;
}

const GeometryParams geom3{3};

} // namespace

TEST_CASE("two-piece Lq surrogate against the exact polar integral") {
    const RadialGrid grid = RadialGrid::gauss_sinh(geom3, 30.0, 2048);
    const RadialFunction f = sample(grid, [](double r) { return std::exp(-2.0 * r); });
    const NormResult got = lq_norm_radial(f, grid, 2.0);
    CHECK(!got.divergent);
    // exact L2: |S^2| int e^{-4r} sinh^2 r dr = 4 pi / 24
    const double exact = std::sqrt(4.0 * M_PI / 24.0);
    const double ratio = got.value / exact;
    CHECK(ratio > 0.25);
    CHECK(ratio < 4.0);

    // homogeneity with a negative scalar
    RadialFunction g = f;
    for (auto& z : g.values) z *= -3.0;
    CHECK(lq_norm_radial(g, grid, 2.0).value ==
          doctest::Approx(3.0 * got.value).epsilon(1e-12));

    const RadialFunction zero = sample(grid, [](double) { return 0.0; });
    CHECK(lq_norm_radial(zero, grid, 2.0).value == 0.0);
    CHECK(lq_norm_radial(zero, grid,
                         std::numeric_limits<double>::infinity()).value == 0.0);
}

TEST_CASE("divergence flag when the tail integrand grows") {
    const RadialGrid grid = RadialGrid::gauss_sinh(geom3, 30.0, 1024);
    const RadialFunction one = sample(grid, [](double) { return 1.0; });
    CHECK(lq_norm_radial(one, grid, 2.0).divergent);
    const RadialFunction ok = sample(grid, [](double r) { return std::exp(-3.0 * r); });
    CHECK(!lq_norm_radial(ok, grid, 2.0).divergent);
}

TEST_CASE("monotone sup-form norm against analytic suprema") {
    const RadialGrid grid = RadialGrid::uniform(geom3, 1e-3, 25.0, 8192);
    const RadialFunction f = sample(grid, [](double r) { return std::exp(-r); });
    const LorentzParams p4inf{4.0, std::numeric_limits<double>::infinity()};
    const NormResult got = lorentz_norm_monotone(f, grid, p4inf);
    // sup_(0,1) r^(3/4) e^-r peaks at r = 3/4; sup_[1,inf) e^(r/2) e^-r = e^(-1/2)
    const double inner = std::pow(0.75, 0.75) * std::exp(-0.75);
    const double outer = std::exp(-0.5);
    CHECK(got.value == doctest::Approx(inner + outer).epsilon(1e-3));
    CHECK(got.method == NormMethod::monotone_formula);

    RadialFunction g = f;
    for (auto& z : g.values) z *= 5.0;
    CHECK(lorentz_norm_monotone(g, grid, p4inf).value ==
          doctest::Approx(5.0 * got.value).epsilon(1e-12));

    const RadialFunction zero = sample(grid, [](double) { return 0.0; });
    CHECK(lorentz_norm_monotone(zero, grid, p4inf).value == 0.0);

    // growing and sign-changing profiles are rejected toward the other path
    const RadialFunction up = sample(grid, [](double r) { return r; });
    CHECK_THROWS_AS(lorentz_norm_monotone(up, grid, p4inf), DomainError);
    const RadialFunction osc = sample(grid, [](double r) { return std::cos(r); });
    CHECK_THROWS_AS(lorentz_norm_monotone(osc, grid, p4inf), DomainError);
}

TEST_CASE("rearranged (p,inf) norm of a ball indicator is V^(1/p)") {
    const RadialGrid grid = RadialGrid::gauss_sinh(geom3, 20.0, 4096);
    const double rb = 1.3;
    const RadialFunction ind =
        sample(grid, [rb](double r) { return r <= rb ? 1.0 : 0.0; });
    double vol = 0.0;
    for (std::size_t i = 0; i < grid.r_nodes.size(); ++i)
        if (grid.r_nodes[i] <= rb) vol += unit_sphere_area(3) * grid.r_weights[i];
    for (double p : {2.0, 4.0, 7.5}) {
        const NormResult got =
            lorentz_norm_rearranged(ind, grid,
                                    {p, std::numeric_limits<double>::infinity()});
        CHECK(got.value == doctest::Approx(std::pow(vol, 1.0 / p)).epsilon(1e-12));
        CHECK(got.low_resolution); // a single positive level
    }
    // continuum volume of the geodesic ball: 4 pi (sinh(2 rb)/4 - rb/2);
    // the grid indicator resolves the boundary only to one cell width
    const double exact_vol = 4.0 * M_PI * (std::sinh(2.0 * rb) / 4.0 - rb / 2.0);
    CHECK(vol == doctest::Approx(exact_vol).epsilon(2e-3));
}

TEST_CASE("rearranged (q,q) norm equals the plain weighted Lq sum") {
    const RadialGrid grid = RadialGrid::gauss_sinh(geom3, 25.0, 1024);
    const RadialFunction f =
        sample(grid, [](double r) { return std::exp(-r) * std::cos(3.0 * r); });
    for (double q : {2.0, 3.0}) {
        double acc = 0.0;
        for (std::size_t i = 0; i < grid.r_nodes.size(); ++i)
            acc += std::pow(std::abs(f.values[i]), q) * unit_sphere_area(3) *
                   grid.r_weights[i];
        const NormResult got = lorentz_norm_rearranged(f, grid, {q, q});
        CHECK(got.value == doctest::Approx(std::pow(acc, 1.0 / q)).epsilon(1e-10));
        CHECK(!got.low_resolution);
    }
}

TEST_CASE("rearranged and monotone paths agree up to equivalence constants") {
    const RadialGrid grid = RadialGrid::gauss_sinh(geom3, 25.0, 2048);
    const RadialFunction f = sample(grid, [](double r) { return std::exp(-r); });
    const double inf = std::numeric_limits<double>::infinity();
    for (const LorentzParams& lp :
         {LorentzParams{3.0, 1.0}, LorentzParams{4.0, 2.0}, LorentzParams{4.0, inf}}) {
        const double a = lorentz_norm_monotone(f, grid, lp).value;
        const double b = lorentz_norm_rearranged(f, grid, lp).value;
        CHECK(a > 0.0);
        CHECK(b > 0.0);
        const double ratio = a / b;
        CHECK(ratio > 1.0 / 8.0);
        CHECK(ratio < 8.0);
    }
    // two-piece Lq vs (q,q) rearranged, same equivalence window
    for (double q : {2.0, 4.0}) {
        const double a = lq_norm_radial(f, grid, q).value;
        const double b = lorentz_norm_rearranged(f, grid, {q, q}).value;
        const double ratio = a / b;
        CHECK(ratio > 1.0 / 8.0);
        CHECK(ratio < 8.0);
    }
}

TEST_CASE("Holder pairing: bounded ratio, stable under refinement") {
    const LorentzParams l42{4.0, 2.0};
    std::vector<double> ratios;
    for (int count : {1024, 2048}) {
        const RadialGrid grid = RadialGrid::gauss_sinh(geom3, 25.0, count);
        const RadialFunction f = sample(grid, [](double r) { return std::exp(-r); });
        const HolderReport rep = holder_check(f, f, grid, l42, l42);
        CHECK(rep.p3 == doctest::Approx(2.0).epsilon(1e-15));
        CHECK(rep.d3 == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(rep.ratio > 0.0);
        CHECK(std::isfinite(rep.ratio));
        ratios.push_back(rep.ratio);
    }
    CHECK(std::fabs(ratios[1] - ratios[0]) < 0.2 * ratios[0]);

    const RadialGrid grid = RadialGrid::gauss_sinh(geom3, 25.0, 1024);
    const RadialFunction f = sample(grid, [](double r) { return std::exp(-r); });
    const RadialFunction g =
        sample(grid, [](double r) { return std::exp(-0.5 * r) / (1.0 + r); });
    const HolderReport fg = holder_check(f, g, grid, l42, l42);
    const HolderReport gf = holder_check(g, f, grid, l42, l42);
    CHECK(fg.lhs == doctest::Approx(gf.lhs).epsilon(1e-12));
    CHECK(fg.rhs == doctest::Approx(gf.rhs).epsilon(1e-12));

    const RadialFunction zero = sample(grid, [](double) { return 0.0; });
    const HolderReport z = holder_check(zero, f, grid, l42, l42);
    CHECK(z.lhs == 0.0);

    // p3 <= 1 is rejected
    CHECK_THROWS_AS(holder_check(f, g, grid, {1.5, 2.0}, {2.0, 2.0}), DomainError);
}

TEST_CASE("inclusion chain in the secondary exponent with one fitted constant") {
    const RadialGrid grid = RadialGrid::gauss_sinh(geom3, 25.0, 2048);
    double c_hat = 0.0;
    for (int k = 0; k < 10; ++k) {
        const double a = 0.5 + 0.5 * k;
        const RadialFunction f =
            sample(grid, [a](double r) { return std::exp(-a * r); });
        const double n_inf =
            lorentz_norm_rearranged(f, grid,
                                    {4.0, std::numeric_limits<double>::infinity()})
                .value;
        const double n_p = lorentz_norm_rearranged(f, grid, {4.0, 4.0}).value;
        const double n_1 = lorentz_norm_rearranged(f, grid, {4.0, 1.0}).value;
        CHECK(n_inf > 0.0);
        c_hat = std::max(c_hat, n_inf / n_p);
        c_hat = std::max(c_hat, n_p / n_1);
    }
    CHECK(c_hat < 10.0);
}

TEST_CASE("quasi-triangle inequality with fitted constant") {
    const RadialGrid grid = RadialGrid::gauss_sinh(geom3, 25.0, 1024);
    const LorentzParams lp{4.0, 2.0};
    std::vector<RadialFunction> family;
    family.push_back(sample(grid, [](double r) { return std::exp(-r); }));
    family.push_back(sample(grid, [](double r) { return std::exp(-2.0 * r) * r; }));
    family.push_back(sample(grid, [](double r) { return std::cos(2.0 * r) * std::exp(-r); }));
    family.push_back(sample(grid, [](double r) { return 1.0 / (1.0 + r * r * r); }));
    double k_hat = 0.0;
    for (std::size_t i = 0; i < family.size(); ++i) {
        for (std::size_t j = i; j < family.size(); ++j) {
            RadialFunction sum;
            sum.values.resize(family[i].values.size());
            for (std::size_t q = 0; q < sum.values.size(); ++q)
                sum.values[q] = family[i].values[q] + family[j].values[q];
            const double lhs = lorentz_norm_rearranged(sum, grid, lp).value;
            const double rhs = lorentz_norm_rearranged(family[i], grid, lp).value +
                               lorentz_norm_rearranged(family[j], grid, lp).value;
            k_hat = std::max(k_hat, lhs / rhs);
        }
    }
    CHECK(k_hat <= std::pow(2.0, 1.0 / std::min(lp.p, lp.d) + 1.0));
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(LorentzParams(1.0, 2.0), DomainError);
    CHECK_THROWS_AS(LorentzParams(4.0, 0.5), DomainError);
    const LorentzParams lp{4.0, 2.0};
    CHECK(lp.conjugate() == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
    const RadialGrid grid = RadialGrid::gauss_sinh(geom3, 10.0, 64);
    RadialFunction bad;
    bad.values.resize(32);
    CHECK_THROWS_AS(lorentz_norm_rearranged(bad, grid, lp), GridError);
    const RadialFunction f = sample(grid, [](double r) { return std::exp(-r); });
    CHECK_THROWS_AS(lq_norm_radial(f, grid, 0.5), DomainError);
}
