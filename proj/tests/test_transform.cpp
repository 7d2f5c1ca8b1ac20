#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <map>

#include "hypdisp/errors.hpp"
#include "hypdisp/transform.hpp"

using namespace hypdisp;

namespace {

// shared calibrated plans, one per dimension; grids sized so every profile in
// this file is fully resolved in both variables
TransformPlan& plan_for(int n) {
    static std::map<int, TransformPlan> cache;
    auto it = cache.find(n);
    if (it == cache.end()) {
        GeometryParams g(n);
        TransformPlan plan(g, RadialGrid::gauss_sinh(g, 25.0, 2048),
                           SpectralGrid::uniform(16.0, 513));
        plan.calibrate();
        it = cache.emplace(n, std::move(plan)).first;
    }
    return it->second;
}

RadialFunction sample(const RadialGrid& g, double (*f)(double)) {
    RadialFunction out;
    for (double r : g.r_nodes) out.values.push_back({f(r), 0.0});
    return out;
}

// direct quadrature of the n=3 forward transform of e^(-r^2) using the closed
// form of the radial eigenfunction, independent of the plan machinery
double brute_fhat3(double lambda) {
    const int kN = 200000;
    const double kR = 14.0;
    const double h = kR / kN;
    double s = 0.0;
    for (int i = 1; i <= kN; ++i) {
        const double r = i * h;
        const double w = (i == kN) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        s += w * std::exp(-r * r) * std::sin(lambda * r) * std::sinh(r);
    }
    return 4.0 * M_PI * s * h / (3.0 * lambda);
}

} // namespace

TEST_CASE("radial grid weights integrate the volume factor") {
    // closed forms: int_0^R sinh^(n-1)
    const double R = 25.0;
    auto g2 = RadialGrid::gauss_sinh(GeometryParams(2), R, 400);
    auto g3 = RadialGrid::gauss_sinh(GeometryParams(3), R, 400);
    auto g4 = RadialGrid::gauss_sinh(GeometryParams(4), 10.0, 400);
    double s2 = 0.0, s3 = 0.0, s4 = 0.0;
    for (double w : g2.r_weights) { CHECK(w > 0.0); s2 += w; }
    for (double w : g3.r_weights) { CHECK(w > 0.0); s3 += w; }
    for (double w : g4.r_weights) { CHECK(w > 0.0); s4 += w; }
    const double e2 = std::cosh(R) - 1.0;
    const double e3 = 0.5 * (std::sinh(R) * std::cosh(R) - R);
    const double c = std::cosh(10.0);
    const double e4 = c * c * c / 3.0 - c + 2.0 / 3.0;
    CHECK(std::fabs(s2 - e2) < 1e-8 * e2);
    CHECK(std::fabs(s3 - e3) < 1e-8 * e3);
    CHECK(std::fabs(s4 - e4) < 1e-8 * e4);
    for (std::size_t i = 1; i < g3.r_nodes.size(); ++i)
        CHECK(g3.r_nodes[i] > g3.r_nodes[i - 1]);
    CHECK(g3.r_nodes.front() > 0.0);
    CHECK(g3.r_nodes.back() <= R);
}

TEST_CASE("spectral grid integrates smooth even profiles") {
    auto sg = SpectralGrid::uniform(16.0, 1025);
    CHECK(sg.lambda_nodes.front() == 0.0);
    CHECK(sg.lambda_nodes.back() == 16.0);
    double s0 = 0.0, s1 = 0.0;
    for (int j = 0; j < sg.size(); ++j) {
        CHECK(sg.lambda_weights[j] >= 0.0);
        const double l = sg.lambda_nodes[j];
        s0 += sg.lambda_weights[j] * std::exp(-l * l);
        s1 += sg.lambda_weights[j] * std::exp(-l * l) * std::cos(3.0 * l);
    }
    // integrals over all of R of e^(-l^2) and e^(-l^2) cos(3 l)
    CHECK(std::fabs(s0 - std::sqrt(M_PI)) < 1e-10);
    CHECK(std::fabs(s1 - std::sqrt(M_PI) * std::exp(-2.25)) < 1e-8);
    CHECK_THROWS_AS(SpectralGrid::uniform(16.0, 8), GridError);
}

TEST_CASE("forward transform matches a direct quadrature") {
    // reference values from an independent fine trapezoid of
    // (4 pi / l) int e^(-r^2) sin(l r) sinh(r) dr
    const double frozen[3][2] = {{0.5, 6.646938509785665},
                                 {2.0, 2.2133143157601096},
                                 {7.0, -3.428955127099909e-6}};
    for (auto& [l, v] : frozen) CHECK(std::fabs(brute_fhat3(l) - v) < 1e-9);

    auto& plan = plan_for(3);
    auto fh = plan.forward(reference_bump(plan.radial()));
    const double h = plan.spectral().spacing();
    for (auto& [l, v] : frozen) {
        const int j = static_cast<int>(std::lround(l / h));
        REQUIRE(std::fabs(plan.spectral().lambda_nodes[j] - l) < 1e-12);
        CHECK(std::fabs(fh.values[j].real() - v) < 1e-7);
    }
}

TEST_CASE("forward is linear and real for real input") {
    auto& plan = plan_for(2);
    auto f = sample(plan.radial(), +[](double r) { return std::exp(-r * r) * (1.0 + r); });
    auto g = sample(plan.radial(), +[](double r) { return r * r * std::exp(-2.0 * r * r); });
    auto fh = plan.forward(f);
    auto gh = plan.forward(g);
    RadialFunction mix;
    for (std::size_t i = 0; i < f.values.size(); ++i)
        mix.values.push_back(2.0 * f.values[i] - 3.0 * g.values[i]);
    auto mh = plan.forward(mix);
    double peak = 0.0;
    for (auto& v : fh.values) peak = std::max(peak, std::abs(v));
    for (std::size_t j = 0; j < mh.values.size(); ++j) {
        CHECK(std::abs(mh.values[j] - (2.0 * fh.values[j] - 3.0 * gh.values[j])) <
              1e-12 * peak);
        CHECK(std::fabs(fh.values[j].imag()) < 1e-13 * peak);
    }
}

TEST_CASE("transform diagonalizes the radial Laplacian") {
    for (int n : {2, 3, 4}) {
        auto& plan = plan_for(n);
        auto f = sample(plan.radial(),
                        +[](double r) { return std::exp(-r * r) * (1.0 + 0.3 * r * r); });
        auto lf = laplace_beltrami_radial(f, plan.radial());
        auto fh = plan.forward(f);
        auto lfh = plan.forward(lf);
        const double rho = plan.geometry().rho;
        double num = 0.0, den = 0.0;
        for (int j = 0; j < plan.spectral().size(); ++j) {
            const double l = plan.spectral().lambda_nodes[j];
            if (l > 0.8 * plan.spectral().lambda_max) continue;
            const double mu = plan.density()(l) * plan.spectral().lambda_weights[j];
            num += std::norm(lfh.values[j] + (l * l + rho * rho) * fh.values[j]) * mu;
            den += std::norm(fh.values[j]) * mu;
        }
        CHECK(std::sqrt(num / den) < 1e-3);
    }
}

TEST_CASE("radial Laplacian matches the eigenfunction closed form") {
    GeometryParams g3(3);
    auto grid = RadialGrid::uniform(g3, 0.05, 20.0, 12000);
    auto f = sample(grid, +[](double r) { return std::sin(r) / std::sinh(r); });
    auto lf = laplace_beltrami_radial(f, grid);
    for (int i = 2; i < grid.size() - 2; ++i) {
        const double r = grid.r_nodes[i];
        if (r > 10.0) break;
        // relative to the local amplitude 1/sinh r; |f| itself crosses zero
        CHECK(std::abs(lf.values[i] + 2.0 * f.values[i]) <= 1e-4 / std::sinh(r));
    }

    auto c = sample(grid, +[](double) { return 0.7; });
    auto lc = laplace_beltrami_radial(c, grid);
    for (auto& v : lc.values) CHECK(std::abs(v) < 1e-8);

    RadialFunction s;
    for (std::size_t i = 0; i < f.values.size(); ++i)
        s.values.push_back(f.values[i] + 2.0 * c.values[i]);
    auto ls = laplace_beltrami_radial(s, grid);
    // roundoff in the stencil sums scales like eps / h^2
    const double h = grid.r_nodes[1] - grid.r_nodes[0];
    const double tol = 64.0 * 2.2e-16 / (h * h);
    for (std::size_t i = 0; i < s.values.size(); ++i)
        CHECK(std::abs(ls.values[i] - lf.values[i] - lc.values[i]) < tol);

    auto tiny = RadialGrid::uniform(g3, 0.1, 1.0, 3);
    RadialFunction t;
    t.values.assign(3, {1.0, 0.0});
    CHECK_THROWS_AS(laplace_beltrami_radial(t, tiny), GridError);
}

TEST_CASE("calibration is idempotent, transfers, and scales with the matrix") {
    auto& plan = plan_for(3);
    const double c1 = plan.inverse_calibration();
    CHECK(plan.calibrated());
    plan.calibrate();
    CHECK(std::fabs(plan.inverse_calibration() - c1) < 1e-12 * c1);

    // independence from the calibration profile
    auto f2 = sample(plan.radial(), +[](double r) { return std::exp(-2.0 * r * r); });
    CHECK(plan.round_trip_error(f2) < 1e-5);

    // forward and inverse each gain a factor 2, so calibration drops by 4
    std::vector<double> scaled = plan.phi_matrix();
    for (double& v : scaled) v *= 2.0;
    TransformPlan doubled(plan.geometry(), plan.radial(), plan.spectral(), std::move(scaled));
    doubled.calibrate();
    CHECK(std::fabs(doubled.inverse_calibration() - 0.25 * c1) < 1e-9 * c1);
}

TEST_CASE("round trip and Plancherel hold on a family of profiles") {
    auto profiles = std::vector<double (*)(double)>{
        +[](double r) { return std::exp(-r * r); },
        +[](double r) { return std::exp(-2.0 * r * r); },
        +[](double r) { return r * r * std::exp(-r * r); },
        +[](double r) { return std::exp(-0.5 * r * r) * std::cos(2.0 * r); },
        +[](double r) { double c = std::cosh(r); return 1.0 / (c * c); }};
    for (int n : {2, 3, 4}) {
        auto& plan = plan_for(n);
        for (auto* p : profiles) {
            auto f = sample(plan.radial(), p);
            CHECK(plan.round_trip_error(f) < 1e-5);
            CHECK(plan.plancherel_gap(f) < 1e-6);
        }
    }
}

TEST_CASE("truncation warnings and shape errors") {
    auto& plan = plan_for(2);
    std::vector<std::string> warn;
    plan.forward(reference_bump(plan.radial()), &warn);
    CHECK(warn.empty());
    auto wide = sample(plan.radial(), +[](double r) { return std::exp(-r * r / 400.0); });
    plan.forward(wide, &warn);
    REQUIRE(warn.size() == 1);
    CHECK(warn[0].find("radial truncation") != std::string::npos);

    SpectralFunction broad;
    for (double l : plan.spectral().lambda_nodes)
        broad.values.push_back({1.0 / (1.0 + l * l), 0.0});
    warn.clear();
    plan.inverse(broad, &warn);
    REQUIRE(warn.size() == 1);
    CHECK(warn[0].find("spectral truncation") != std::string::npos);

    SpectralFunction zero;
    zero.values.assign(plan.spectral().size(), {0.0, 0.0});
    auto z = plan.inverse(zero);
    for (auto& v : z.values) CHECK(std::abs(v) == 0.0);

    RadialFunction bad;
    bad.values.assign(7, {1.0, 0.0});
    CHECK_THROWS_AS(plan.forward(bad), GridError);
    SpectralFunction sbad;
    sbad.values.assign(3, {1.0, 0.0});
    CHECK_THROWS_AS(plan.inverse(sbad), GridError);
}
