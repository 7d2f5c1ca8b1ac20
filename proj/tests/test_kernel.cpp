#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "hypdisp/errors.hpp"
#include "hypdisp/grids.hpp"
#include "hypdisp/kernel.hpp"
#include "hypdisp/oscillatory.hpp"
#include "hypdisp/phase.hpp"
#include "hypdisp/plancherel.hpp"
#include "hypdisp/slope.hpp"
#include "hypdisp/spherical.hpp"

using namespace hypdisp;
using cplx = std::complex<double>;

namespace {

double phi3_closed(double lambda, double r) {
    if (r == 0.0) return 1.0;
    const double x = lambda * r;
    const double s = std::fabs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x;
    return s * r / std::sinh(r);
}

// fixed-step Simpson oracle for the regularized kernel, independent of the
// panel scheme under test
cplx brute_kernel(int n, double t, double r, double eps, int intervals) {
    const GeometryParams geom{n};
    const PlancherelDensity dens(geom);
    const Phase phase(geom);
    const double top = kernel_truncation_lambda(dens, eps);
    SphericalEvaluator evaluator(geom);
    SphericalEvaluator::FrozenRule rule;
    if (n != 3) rule = evaluator.frozen_rule(r, top);
    const double h = top / intervals;
    cplx acc{0.0, 0.0};
    for (int i = 0; i <= intervals; ++i) {
        const double l = h * i;
        const double phi =
            n == 3 ? phi3_closed(l, r) : SphericalEvaluator::eval_frozen(rule, l);
        const double g = dens(l) * std::exp(-eps * eps * l * l) * phi;
        const double ph = t * phase.psi(l);
        const double w = (i == 0 || i == intervals) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        acc += w * g * cplx(std::cos(ph), -std::sin(ph));
    }
    return acc * (2.0 * h / 3.0);
}

} // namespace

TEST_CASE("regularized kernel matches brute-force Simpson, n=3") {
    const GeometryParams geom{3};
    const cplx oracle = brute_kernel(3, 0.5, 1.0, 0.05, 1000000);
    KernelRequest req{geom, 0.5, 1.0, 0.05, {}};
    const KernelResult got = kernel_I_eps(req);
    CHECK(got.converged);
    CHECK(std::abs(got.value - oracle) < 1e-6 * std::abs(oracle));
    CHECK(got.est_error < 1e-6 * std::abs(oracle));
}

TEST_CASE("regularized kernel matches brute-force Simpson, n=2 generic path") {
    const GeometryParams geom{2};
    const double t = 0.7, r = 1.3, eps = 0.3;
    const cplx oracle = brute_kernel(2, t, r, eps, 200000);
    KernelRequest req{geom, t, r, eps, {}};
    const KernelResult got = kernel_I_eps(req);
    CHECK(got.converged);
    CHECK(std::abs(got.value - oracle) < 1e-6 * std::abs(oracle));
}

TEST_CASE("conjugate symmetry under time reversal") {
    const GeometryParams geom{3};
    KernelRequest fwd{geom, 1.7, 0.8, 0.05, {}};
    KernelRequest bwd{geom, -1.7, 0.8, 0.05, {}};
    const cplx a = kernel_I_eps(fwd).value;
    const cplx b = kernel_I_eps(bwd).value;
    CHECK(std::abs(b - std::conj(a)) < 1e-13 * std::abs(a));

    const cplx ia = kernel_I(geom, 2.0, 1.0, 1e-5).value;
    const cplx ib = kernel_I(geom, -2.0, 1.0, 1e-5).value;
    CHECK(std::abs(ib - std::conj(ia)) < 1e-12 * std::abs(ia));
}

TEST_CASE("sweep agrees with pointwise evaluation and handles r=0") {
    const GeometryParams geom{3};
    const double t = 1.1, eps = 0.08;
    const std::vector<double> r{0.0, 0.45, 1.0, 3.3};
    KernelSweep sweep(geom, eps);
    const SweepResult got = sweep.eval(t, r);
    CHECK(got.converged);
    for (std::size_t j = 0; j < r.size(); ++j) {
        const cplx oracle = brute_kernel(3, t, r[j], eps, 400000);
        CHECK(std::abs(got.values[j] - oracle) < 1e-6 * std::abs(oracle));
    }
    // continuity at the axis
    const SweepResult near0 = sweep.eval(t, {1e-7});
    CHECK(std::abs(near0.values[0] - got.values[0]) < 1e-6 * std::abs(got.values[0]));
}

TEST_CASE("epsilon extrapolation is consistent with small-epsilon evaluation") {
    const GeometryParams geom{3};
    const KernelResult lim = kernel_I(geom, 2.0, 1.0, 1e-5);
    CHECK(lim.converged);
    CHECK(lim.est_error < 1e-5);
    double prev = std::numeric_limits<double>::infinity();
    for (double eps : {0.05, 0.025, 0.0125}) {
        KernelRequest req{geom, 2.0, 1.0, eps, {}};
        req.quad.estimate_error = false;
        const double diff = std::abs(kernel_I_eps(req).value - lim.value);
        CHECK(diff < prev);
        prev = diff;
    }
    CHECK(prev < 3e-4 * std::abs(lim.value));
}

TEST_CASE("panel budget exhaustion is flagged, value still finite") {
    const GeometryParams geom{3};
    KernelRequest req{geom, 40.0, 1.0, 0.05, {}};
    req.quad.max_panels = 64;
    const KernelResult got = kernel_I_eps(req);
    CHECK(!got.converged);
    CHECK(std::isfinite(std::abs(got.value)));

    QuadratureBudget tiny;
    tiny.max_panels = 512;
    CHECK_THROWS_AS(kernel_I(geom, 40.0, 1.0, 1e-18, tiny), NumericsError);
    CHECK_THROWS_AS(kernel_I(geom, 0.0, 1.0, 1e-6), DomainError);
}

TEST_CASE("dispersive decay trend of the L4 norm, n=3") {
    const GeometryParams geom{3};
    const RadialGrid grid = RadialGrid::gauss_sinh(geom, 12.0, 48);
    QuadratureBudget quad;
    quad.phase_per_panel = 2.0 * M_PI; // trend check, accuracy headroom to spare
    quad.estimate_error = false;
    KernelSweep sweep(geom, 0.1, quad);
    std::vector<double> ts{10.0, 14.0, 20.0, 28.0, 40.0}, norms;
    for (double t : ts) {
        const SweepResult sr = sweep.eval(t, grid.r_nodes);
        double acc = 0.0;
        for (std::size_t j = 0; j < grid.r_nodes.size(); ++j)
            acc += std::pow(std::abs(sr.values[j]), 4.0) * grid.r_weights[j];
        norms.push_back(std::pow(acc * unit_sphere_area(3), 0.25));
    }
    const SlopeFit fit = fit_loglog(ts, norms);
    CHECK(fit.slope == doctest::Approx(-1.5).epsilon(0.1));
}

TEST_CASE("kernel bound ratio is stable in epsilon" * doctest::timeout(300)) {
    // sup over a small (t,r) set of |I_eps| / (t^-3/2 r^(3/2) e^-r) must not
    // drift as eps drops three decades
    const GeometryParams geom{3};
    const std::vector<double> ts{1.0, 2.0};
    const std::vector<double> rs{0.1, 0.5, 1.0, 2.0, 4.0, 7.0};
    std::vector<double> sups;
    for (double eps : {1e-1, 1e-2, 1e-3}) {
        QuadratureBudget quad;
        quad.phase_per_panel = 4.0 * M_PI;
        quad.estimate_error = false;
        KernelSweep sweep(geom, eps, quad);
        double sup = 0.0;
        for (double t : ts) {
            const SweepResult sr = sweep.eval(t, rs);
            for (std::size_t j = 0; j < rs.size(); ++j) {
                const double envelope = std::pow(t, -1.5) *
                                        std::pow(rs[j], 1.5) * std::exp(-rs[j]);
                sup = std::max(sup, std::abs(sr.values[j]) / envelope);
            }
        }
        sups.push_back(sup);
    }
    const double lo = *std::min_element(sups.begin(), sups.end());
    const double hi = *std::max_element(sups.begin(), sups.end());
    CHECK(hi / lo < 1.2);
}

TEST_CASE("van der Corput bound: ratio bounded and settling") {
    const GeometryParams geom{3};
    const BumpAmplitude m{1.25, 0.75, 1.0};
    // total variation of the bump is exactly 2 (up once, down once)
    const OsciReport unit = vdc_bound_check(geom, m, 1.0, 0.0);
    CHECK(unit.rhs == doctest::Approx(2.0).epsilon(1e-8));

    const std::vector<double> ts{1.0, 10.0, 100.0, 1000.0};
    const OsciReport worst = vdc_bound_sweep(geom, m, ts, 0.0);
    CHECK(worst.ratio > 0.0);
    CHECK(worst.ratio < 10.0);
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < ts.size(); ++i) {
        const OsciReport rep = vdc_bound_check(geom, m, ts[i], 0.0);
        CHECK(rep.ratio <= prev * 1.0000001);
        prev = rep.ratio;
    }

    BumpAmplitude zero = m;
    zero.amplitude = 0.0;
    CHECK(vdc_bound_check(geom, zero, 10.0, 0.0).ratio == 0.0);

    BumpAmplitude twice = m;
    twice.amplitude = 2.0;
    const OsciReport a = vdc_bound_check(geom, m, 10.0, 0.5);
    const OsciReport b = vdc_bound_check(geom, twice, 10.0, 0.5);
    CHECK(b.lhs == doctest::Approx(2.0 * a.lhs).epsilon(1e-12));
    CHECK(b.ratio == doctest::Approx(a.ratio).epsilon(1e-12));
}

TEST_CASE("non-stationary phase bound") {
    const GeometryParams geom{3};
    const BumpAmplitude m{1.25, 0.75, 1.0};
    const OsciReport at50 = nonstationary_bound_check(geom, m, 50.0, 0.0, 2);
    const OsciReport at100 = nonstationary_bound_check(geom, m, 100.0, 0.0, 2);
    CHECK(at50.ratio > 0.0);
    CHECK(std::isfinite(at50.ratio));
    CHECK(at100.ratio <= at50.ratio * 1.1);
    CHECK(at100.D > at50.D);

    // k=0 bound is the triangle inequality, so the ratio cannot exceed 1
    const OsciReport k0 = nonstationary_bound_check(geom, m, 7.0, 0.3, 0);
    CHECK(k0.ratio <= 1.0);

    // r=0: both signs give the same modulus
    const OsciReport sp = nonstationary_bound_check(geom, m, 25.0, 0.0, 1, +1);
    const OsciReport sm = nonstationary_bound_check(geom, m, 25.0, 0.0, 1, -1);
    CHECK(sp.lhs == doctest::Approx(sm.lhs).epsilon(1e-12));

    // -t dpsi + r vanishes inside the support: precondition violated
    CHECK_THROWS_AS(nonstationary_bound_check(geom, m, 1.0, 2.0, 2), DomainError);
}
