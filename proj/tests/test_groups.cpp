#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "hypdisp/errors.hpp"
#include "hypdisp/groups.hpp"
#include "hypdisp/slope.hpp"
#include "hypdisp/spline.hpp"

using namespace hypdisp;
using cplx = std::complex<double>;

namespace {

TransformPlan& shared_plan() {
    static TransformPlan plan = [] {
        const GeometryParams geom{3};
        TransformPlan p(geom, RadialGrid::gauss_sinh(geom, 25.0, 1024),
                        SpectralGrid::uniform(16.0, 513));
        p.calibrate();
        return p;
    }();
    return plan;
}

SpectralFunction random_spectral(const SpectralGrid& grid, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> pick(-1.0, 1.0);
    SpectralFunction f;
    f.values.reserve(grid.lambda_nodes.size());
    for (std::size_t j = 0; j < grid.lambda_nodes.size(); ++j)
        f.values.emplace_back(pick(rng), pick(rng));
    return f;
}

// coarser radial grid for the sweep-driven trend tests; slope fits do not
// need the norm resolution the algebra tests above rely on
TransformPlan& trend_plan() {
    static TransformPlan plan = [] {
        const GeometryParams geom{3};
        TransformPlan p(geom, RadialGrid::gauss_sinh(geom, 25.0, 256),
                        SpectralGrid::uniform(16.0, 513));
        p.calibrate();
        return p;
    }();
    return plan;
}

double max_abs_diff(const SpectralFunction& a, const SpectralFunction& b) {
    double worst = 0.0;
    for (std::size_t j = 0; j < a.values.size(); ++j)
        worst = std::max(worst, std::abs(a.values[j] - b.values[j]));
    return worst;
}

} // namespace

TEST_CASE("prototype group: identity, group law, isometry") {
    TransformPlan& plan = shared_plan();
    const Phase phase(plan.geometry());
    const SpectralGrid& grid = plan.spectral();
    const SpectralFunction z = random_spectral(grid, 11u);

    const SpectralFunction id = apply_prototype_group(z, grid, phase, 0.0);
    CHECK(max_abs_diff(id, z) == 0.0);

    const SpectralFunction a =
        apply_prototype_group(apply_prototype_group(z, grid, phase, 0.7), grid, phase, 1.9);
    const SpectralFunction b = apply_prototype_group(z, grid, phase, 2.6);
    CHECK(max_abs_diff(a, b) < 1e-12);

    const double before = plan.spectral_norm2(z);
    const double after = plan.spectral_norm2(apply_prototype_group(z, grid, phase, 3.3));
    CHECK(std::fabs(after - before) < 1e-12 * before);
}

TEST_CASE("Boussinesq group: identity, composition, pointwise invariant") {
    TransformPlan& plan = shared_plan();
    const Phase phase(plan.geometry());
    const SpectralGrid& grid = plan.spectral();
    PairState s;
    s.u_hat = random_spectral(grid, 21u);
    s.w_hat = random_spectral(grid, 22u);

    const PairState id = apply_boussinesq_group(s, grid, phase, 0.0);
    CHECK(max_abs_diff(id.u_hat, s.u_hat) == 0.0);
    CHECK(max_abs_diff(id.w_hat, s.w_hat) == 0.0);

    const PairState ab =
        apply_boussinesq_group(apply_boussinesq_group(s, grid, phase, 0.6), grid, phase, -2.1);
    const PairState c = apply_boussinesq_group(s, grid, phase, -1.5);
    CHECK(max_abs_diff(ab.u_hat, c.u_hat) < 1e-12);
    CHECK(max_abs_diff(ab.w_hat, c.w_hat) < 1e-12);

    const PairState moved = apply_boussinesq_group(s, grid, phase, 1.234);
    for (std::size_t j = 0; j < grid.lambda_nodes.size(); ++j) {
        const double before = std::norm(s.u_hat.values[j]) + std::norm(s.w_hat.values[j]);
        const double after =
            std::norm(moved.u_hat.values[j]) + std::norm(moved.w_hat.values[j]);
        REQUIRE(std::fabs(after - before) < 1e-12 * (before + 1.0));
    }
}

TEST_CASE("cos and sin components decompose into half-wave exponentials") {
    TransformPlan& plan = shared_plan();
    const Phase phase(plan.geometry());
    const SpectralGrid& grid = plan.spectral();
    const SpectralFunction f = random_spectral(grid, 31u);
    const double t = 1.42;

    // first component of G(t)[f, 0] = cos(t psi) f = (e^{-itP} + e^{itP}) f / 2
    PairState s;
    s.u_hat = f;
    s.w_hat.values.assign(f.values.size(), {0.0, 0.0});
    const PairState moved = apply_boussinesq_group(s, grid, phase, t);
    const SpectralFunction fwd = apply_prototype_group(f, grid, phase, t);
    const SpectralFunction bwd = apply_prototype_group(f, grid, phase, -t);
    SpectralFunction half_sum;
    half_sum.values.resize(f.values.size());
    for (std::size_t j = 0; j < f.values.size(); ++j)
        half_sum.values[j] = 0.5 * (fwd.values[j] + bwd.values[j]);
    CHECK(max_abs_diff(moved.u_hat, half_sum) < 1e-12);

    // g3 multiplier = Q^{-1} (e^{itP} - e^{-itP}) / 2i
    const SpectralFunction g3 =
        apply_multiplier({SymbolKind::sin_tpsi_g3, t}, f, grid, phase);
    SpectralFunction sin_part;
    sin_part.values.resize(f.values.size());
    const cplx two_i{0.0, 2.0};
    for (std::size_t j = 0; j < f.values.size(); ++j)
        sin_part.values[j] = (bwd.values[j] - fwd.values[j]) / two_i;
    const SpectralFunction qinv_sin = apply_multiplier(
        {SymbolKind::j_power, 1.0},
        apply_multiplier({SymbolKind::lambda_power, -1.0}, sin_part, grid, phase), grid,
        phase);
    CHECK(max_abs_diff(g3, qinv_sin) < 1e-12);
}

TEST_CASE("symbol identities: J^0 = 1 and Q = Lambda J^{-1}") {
    const Phase phase(GeometryParams{3});
    const MultiplierSymbol j0{SymbolKind::j_power, 0.0};
    const MultiplierSymbol q{SymbolKind::q_ratiosym, 0.0};
    const MultiplierSymbol lam{SymbolKind::lambda_power, 1.0};
    const MultiplierSymbol jm1{SymbolKind::j_power, -1.0};
    for (double l : {0.0, 0.03, 0.7, 4.0, 15.9}) {
        CHECK(std::abs(j0(phase, l) - 1.0) == 0.0);
        const cplx composed = lam(phase, l) * jm1(phase, l);
        CHECK(std::abs(q(phase, l) - composed) < 1e-14);
    }
}

TEST_CASE("Lambda^2 applies the radial Laplace-Beltrami operator") {
    const GeometryParams geom{3};
    TransformPlan plan(geom, RadialGrid::gauss_sinh(geom, 25.0, 2048),
                       SpectralGrid::uniform(16.0, 513));
    plan.calibrate();
    const Phase phase(geom);
    const RadialFunction f = reference_bump(plan.radial());
    const SpectralFunction fhat = plan.forward(f);
    const SpectralFunction lhat =
        apply_multiplier({SymbolKind::lambda_power, 2.0}, fhat, plan.spectral(), phase);
    const RadialFunction lf = plan.inverse(lhat);
    const RadialFunction fd = laplace_beltrami_radial(f, plan.radial());
    // compare away from the grid ends where the FD stencil and the spectral
    // truncation both degrade
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < plan.radial().r_nodes.size(); ++i) {
        const double r = plan.radial().r_nodes[i];
        if (r < 0.5 || r > 10.0) continue;
        num += std::norm(lf.values[i] + fd.values[i]);
        den += std::norm(fd.values[i]);
    }
    CHECK(std::sqrt(num / den) < 1e-3);
}

TEST_CASE("pair norm: single component, scaling, constructed w") {
    TransformPlan& plan = shared_plan();
    const Phase phase(plan.geometry());
    const SpectralGrid& grid = plan.spectral();
    const RadialFunction f = reference_bump(plan.radial());
    const SpectralFunction fhat = plan.forward(f);

    PairState s;
    s.u_hat = fhat;
    s.w_hat.values.assign(fhat.values.size(), {0.0, 0.0});
    const double x = x_norm(s, 4.0, 2.0, plan).value;
    const double direct =
        lorentz_norm_rearranged(plan.inverse(fhat), plan.radial(), {4.0, 2.0}).value;
    CHECK(x == doctest::Approx(direct).epsilon(1e-12));

    PairState scaled = s;
    for (auto& z : scaled.u_hat.values) z *= -2.5;
    CHECK(x_norm(scaled, 4.0, 2.0, plan).value == doctest::Approx(2.5 * x).epsilon(1e-12));

    // v_hat chosen so that w_hat lands exactly on a target g_hat
    SpectralFunction ghat = fhat;
    for (auto& z : ghat.values) z *= 0.3;
    const SpectralFunction vhat = v_hat_of(PairState{fhat, ghat}, grid, phase);
    const PairState built = make_pair_state(fhat, vhat, grid, phase);
    CHECK(max_abs_diff(built.w_hat, ghat) < 1e-13);
    const double xm = x_norm(built, 4.0, 2.0, plan).value;
    const double expect =
        std::max(direct, lorentz_norm_rearranged(plan.inverse(ghat), plan.radial(),
                                                 {4.0, 2.0})
                             .value);
    CHECK(xm == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("sweep evolution matches the plan inverse while the grid resolves t") {
    TransformPlan& plan = shared_plan();
    const Phase phase(plan.geometry());
    const SpectralGrid& grid = plan.spectral();
    const RadialFunction probe = reference_bump(plan.radial());
    const SpectralFunction phat = plan.forward(probe);
    const double t = 0.2;
    const double eps = 0.05;

    // damp the plan path by the same Gaussian the sweep carries, so the two
    // evaluate the identical regularized integral
    SpectralFunction moved = apply_prototype_group(phat, grid, phase, t);
    for (int j = 0; j < grid.size(); ++j) {
        const double l = grid.lambda_nodes[j];
        moved.values[j] *= std::exp(-eps * eps * l * l);
    }
    const RadialFunction via_plan = plan.inverse(moved);

    std::vector<double> table(phat.values.size());
    for (std::size_t j = 0; j < table.size(); ++j) table[j] = phat.values[j].real();
    UniformSpline<double> spline(0.0, grid.spacing(), std::move(table));
    const double top = grid.lambda_max;
    KernelSweep sweep(plan.geometry(), eps);
    sweep.set_amplitude([&spline, top](double l) { return l <= top ? spline(l) : 0.0; });
    const SweepResult sr = sweep.eval(t, plan.radial().r_nodes);

    double worst = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < sr.values.size(); ++i) {
        // plan lambda weights are evenness-doubled, matching the sweep's fold
        const cplx field = plan.inverse_calibration() * sr.values[i];
        worst = std::max(worst, std::abs(field - via_plan.values[i]));
        scale = std::max(scale, std::abs(via_plan.values[i]));
    }
    CHECK(worst < 1e-5 * scale);
}

TEST_CASE("dispersive scan: time symmetry and decay slopes") {
    TransformPlan& plan = trend_plan();
    const RadialFunction probe = reference_bump(plan.radial());
    DispersiveOptions opts;
    opts.epsilon = 0.1;
    opts.quad.phase_per_panel = 2.0 * M_PI;
    opts.quad.estimate_error = false;

    const DispersiveReport fwd =
        dispersive_scan(plan, 4.0, {10.0, 16.0, 25.0, 40.0, 63.0, 100.0}, probe, opts);
    CHECK(fwd.slope_kernel == doctest::Approx(-1.5).epsilon(0.1));
    // smooth-probe ratios ride the same large-time kernel decay
    CHECK(fwd.slope_prototype < -1.2);
    CHECK(fwd.slope_prototype > -1.8);
    CHECK(fwd.slope_group < -1.2);
    CHECK(fwd.slope_group > -1.8);

    DispersiveOptions cheap = opts;
    cheap.with_kernel = false;
    const DispersiveReport neg = dispersive_scan(plan, 4.0, {-7.0}, probe, cheap);
    const DispersiveReport pos = dispersive_scan(plan, 4.0, {7.0}, probe, cheap);
    CHECK(neg.rows[0].prototype_ratio ==
          doctest::Approx(pos.rows[0].prototype_ratio).epsilon(1e-12));
    CHECK(neg.rows[0].group_ratio ==
          doctest::Approx(pos.rows[0].group_ratio).epsilon(1e-12));
}

TEST_CASE("interpolation shadow: secondary exponent does not change the slope") {
    TransformPlan& plan = trend_plan();
    const SpectralGrid& grid = plan.spectral();
    const RadialFunction probe = reference_bump(plan.radial());
    const SpectralFunction phat = plan.forward(probe);
    const double p = 4.0, pp = 4.0 / 3.0;
    const std::vector<double> ts{10.0, 18.0, 32.0, 56.0, 100.0};
    const double inf = std::numeric_limits<double>::infinity();

    std::vector<double> table(phat.values.size());
    for (std::size_t j = 0; j < table.size(); ++j) table[j] = phat.values[j].real();
    UniformSpline<double> spline(0.0, grid.spacing(), std::move(table));
    const double top = grid.lambda_max;
    QuadratureBudget quad;
    quad.phase_per_panel = 2.0 * M_PI;
    quad.estimate_error = false;
    KernelSweep sweep(plan.geometry(), 0.1, quad);
    sweep.set_amplitude([&spline, top](double l) { return l <= top ? spline(l) : 0.0; });

    std::vector<std::vector<double>> norms(3);
    for (double t : ts) {
        const SweepResult sr = sweep.eval(t, plan.radial().r_nodes);
        RadialFunction moved;
        moved.values = sr.values;
        for (std::size_t k = 0; k < 3; ++k) {
            const double d = k == 0 ? 1.0 : (k == 1 ? 2.0 : inf);
            norms[k].push_back(
                lorentz_norm_rearranged(moved, plan.radial(), {p, d}).value /
                lorentz_norm_rearranged(probe, plan.radial(), {pp, d}).value);
        }
    }
    std::vector<double> slopes;
    for (const auto& col : norms) slopes.push_back(fit_loglog(ts, col).slope);
    CHECK(std::fabs(slopes[0] - slopes[2]) < 0.1);
    CHECK(std::fabs(slopes[1] - slopes[2]) < 0.1);
}
