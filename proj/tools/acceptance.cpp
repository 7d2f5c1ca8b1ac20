// acceptance --criterion N   (or no argument to run all)
//
// One binary per release gate: each criterion exercises a library claim at
// desk scale with pinned tolerances and prints exactly one PASS/FAIL line.
// Exit status 0 only when every requested criterion passes.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstring>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "checks_common.hpp"
#include "hypdisp/errors.hpp"
#include "hypdisp/groups.hpp"
#include "hypdisp/kernel.hpp"
#include "hypdisp/oscillatory.hpp"
#include "hypdisp/phase.hpp"
#include "hypdisp/plancherel.hpp"
#include "hypdisp/solver.hpp"
#include "hypdisp/spherical.hpp"
#include "hypdisp/transform.hpp"

using namespace hypdisp;
using cplx = std::complex<double>;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

char detail_buf[512];

#define DETAIL(...) std::snprintf(detail_buf, sizeof(detail_buf), __VA_ARGS__)

RadialFunction gaussian(const RadialGrid& grid, double amp, double width,
                        double center = 0.0) {
    RadialFunction f;
    f.values.reserve(grid.r_nodes.size());
    for (double r : grid.r_nodes) {
        const double x = (r - center) / width, y = (r + center) / width;
        f.values.push_back(cplx(0.5 * amp * (std::exp(-x * x) + std::exp(-y * y)), 0.0));
    }
    return f;
}

// 1. round trip and Plancherel equality across dimensions
bool crit_roundtrip() {
    hypcli::Timer timer;
    double worst_rt = 0.0, worst_pl = 0.0;
    for (int n : {2, 3, 4}) {
        const GeometryParams geom(n);
        TransformPlan plan(geom, RadialGrid::gauss_sinh(geom, 25.0, 256),
                           SpectralGrid::uniform(16.0, 2049));
        plan.calibrate();
        const double widths[5] = {0.8, 1.2, 1.7, 2.3, 3.0};
        for (int k = 0; k < 5; ++k) {
            const RadialFunction f =
                gaussian(plan.radial(), 1.0 + 0.2 * k, widths[k], k == 4 ? 1.5 : 0.0);
            worst_rt = std::max(worst_rt, plan.round_trip_error(f));
            worst_pl = std::max(worst_pl, plan.plancherel_gap(f));
        }
    }
    const double secs = timer.seconds();
    DETAIL("roundtrip %.3g (tol 1e-5), plancherel %.3g (tol 1e-6), %.1f s (budget 30)",
           worst_rt, worst_pl, secs);
    return worst_rt < 1e-5 && worst_pl < 1e-6 && secs < 30.0;
}

// 2. closed-form eigenfunction and quadratic density in dimension 3
bool crit_closed_form() {
    hypcli::Timer timer;
    const GeometryParams geom(3);
    const SphericalEvaluator eval(geom);
    double worst_phi = 0.0;
    for (int i = 0; i < 50; ++i) {
        const double l = 0.1 + (20.0 - 0.1) * i / 49.0;
        for (int j = 0; j < 50; ++j) {
            const double r = 0.05 + (10.0 - 0.05) * j / 49.0;
            const double closed = std::sin(l * r) / (l * std::sinh(r));
            worst_phi = std::max(worst_phi, std::fabs(eval(l, r) - closed));
        }
    }
    const PlancherelDensity dens(geom);
    const double ref = dens(1.0);
    double worst_dens = 0.0;
    for (int i = 0; i < 50; ++i) {
        const double l = 0.1 + (12.0 - 0.1) * i / 49.0;
        worst_dens = std::max(worst_dens, std::fabs(dens(l) / (l * l * ref) - 1.0));
    }
    const double secs = timer.seconds();
    DETAIL("phi err %.3g (tol 1e-8), density err %.3g (tol 1e-10), %.1f s (budget 10)",
           worst_phi, worst_dens, secs);
    return worst_phi < 1e-8 && worst_dens < 1e-10 && secs < 10.0;
}

// 3. phase convexity: second derivative exceeds 1 everywhere
bool crit_convexity() {
    hypcli::Timer timer;
    double least = kInf;
    for (int n = 2; n <= 6; ++n) {
        const Phase phase((GeometryParams(n)));
        for (int i = 0; i < 10000; ++i) {
            const double l = 1e-4 + 50.0 * i / 9999.0;
            least = std::min(least, phase.d2psi(l));
        }
    }
    const double secs = timer.seconds();
    DETAIL("min d2psi %.6f (> 1), %.2f s (budget 1)", least, secs);
    return least > 1.0 && secs < 1.0;
}

TransformPlan sweep_plan() {
    const GeometryParams geom(3);
    TransformPlan plan(geom, RadialGrid::gauss_sinh(geom, 25.0, 256),
                       SpectralGrid::uniform(8.0, 1025));
    plan.calibrate(2.0);
    return plan;
}

// 4. large-time decay rate of the kernel L4 norm
bool crit_large_time_slope() {
    hypcli::Timer timer;
    const TransformPlan plan = sweep_plan();
    DispersiveOptions opts;
    opts.epsilon = 0.1;
    opts.quad.estimate_error = false;
    const std::vector<double> ts = hypcli::log_spaced({10.0, 100.0, 16});
    const DispersiveReport rep =
        dispersive_scan(plan, 4.0, ts, reference_bump(plan.radial()), opts);
    const double secs = timer.seconds();
    DETAIL("slope %.4f (target -1.5 +- 0.1), %.0f s (budget 300)", rep.slope_kernel,
           secs);
    return std::fabs(rep.slope_kernel + 1.5) <= 0.1 && secs < 300.0;
}

// 5. small-time decay rate of the kernel L4 norm. The regulator scale is
// matched to the sweep: the regularized kernel shows the small-time rate only
// for t between the phase-winding floor ~eps^2 and the crossover ~eps/2 where
// the wave front reaches the exponential-volume region, so eps = 0.1 centers
// that window on [0.01, 0.2]; slopes stay inside the tolerance for
// eps in [0.08, 0.12].
bool crit_small_time_slope() {
    hypcli::Timer timer;
    const TransformPlan plan = sweep_plan();
    DispersiveOptions opts;
    opts.epsilon = 0.1;
    opts.quad.estimate_error = false;
    const std::vector<double> ts = hypcli::log_spaced({0.01, 0.2, 10});
    const DispersiveReport rep =
        dispersive_scan(plan, 4.0, ts, reference_bump(plan.radial()), opts);
    const double secs = timer.seconds();
    DETAIL("slope %.4f (target -0.75 +- 0.15), %.0f s (budget 300)", rep.slope_kernel,
           secs);
    return std::fabs(rep.slope_kernel + 0.75) <= 0.15 && secs < 300.0;
}

// 6. pointwise kernel bound: fitted constant finite and budget-stable
bool crit_pointwise_bound() {
    hypcli::Timer timer;
    const GeometryParams geom(3);
    QuadratureBudget quad;
    quad.estimate_error = false;
    QuadratureBudget fine = quad;
    fine.phase_per_panel = 0.5 * quad.phase_per_panel;

    const std::vector<double> rs = hypcli::lin_spaced({0.1, 10.0, 40});
    const std::vector<double> tl = hypcli::log_spaced({1.0, 50.0, 12});
    const hypcli::ChatFit big = hypcli::kernel_chat_fit(geom, 0.05, tl, rs, -1.5, quad);
    const hypcli::ChatFit big2 = hypcli::kernel_chat_fit(geom, 0.05, tl, rs, -1.5, fine);
    const double big_shift = std::fabs(big2.c_hat - big.c_hat) / big.c_hat;

    const std::vector<double> tsm = hypcli::log_spaced({0.02, 0.5, 8});
    const double np = -0.5 * geom.n;
    const hypcli::ChatFit sm = hypcli::kernel_chat_fit(geom, 0.05, tsm, rs, np, quad);
    const hypcli::ChatFit sm2 = hypcli::kernel_chat_fit(geom, 0.05, tsm, rs, np, fine);
    const double sm_shift = std::fabs(sm2.c_hat - sm.c_hat) / sm.c_hat;

    const double secs = timer.seconds();
    DETAIL("C %.4g shift %.2g%%, small-time C %.4g shift %.2g%% (tol 10%%), %.0f s",
           big.c_hat, 100.0 * big_shift, sm.c_hat, 100.0 * sm_shift, secs);
    return std::isfinite(big.c_hat) && big.c_hat > 0.0 && big_shift < 0.1 &&
           std::isfinite(sm.c_hat) && sm.c_hat > 0.0 && sm_shift < 0.1;
}

// 7. oscillatory-integral bounds: van der Corput ratio bounded, non-stationary
// ratio trend non-increasing
bool crit_oscillatory() {
    hypcli::Timer timer;
    const GeometryParams geom(3);
    const BumpAmplitude m{};
    const std::vector<double> ts = {1.0, 10.0, 100.0, 1000.0};
    double vdc_max = 0.0;
    for (double t : ts) vdc_max = std::max(vdc_max, vdc_bound_check(geom, m, t, 0.1).ratio);

    bool trends = true;
    for (int k = 1; k <= 3; ++k) {
        std::vector<double> ratios;
        for (double t : ts)
            ratios.push_back(nonstationary_bound_check(geom, m, t, 0.1, k).ratio);
        for (std::size_t i = 1; i < ratios.size(); ++i)
            trends = trends && ratios[i] <= 1.05 * ratios[i - 1];
        trends = trends && ratios.back() < ratios.front();
    }
    const double secs = timer.seconds();
    DETAIL("vdc ratio max %.3g (bounded), trends %s, %.1f s (budget 60)", vdc_max,
           trends ? "non-increasing" : "violated", secs);
    return std::isfinite(vdc_max) && vdc_max < 10.0 && trends && secs < 60.0;
}

// 8. group algebra identities on random states
bool crit_group_algebra() {
    hypcli::Timer timer;
    const GeometryParams geom(3);
    const Phase phase(geom);
    TransformPlan plan(geom, RadialGrid::gauss_sinh(geom, 25.0, 128),
                       SpectralGrid::uniform(6.0, 513));
    plan.calibrate(2.0);
    const SpectralGrid& grid = plan.spectral();
    const std::size_t nl = grid.lambda_nodes.size();

    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> pick(-1.0, 1.0);
    auto random_spectral = [&] {
        SpectralFunction f;
        f.values.reserve(nl);
        for (std::size_t j = 0; j < nl; ++j) f.values.push_back(cplx(pick(rng), 0.0));
        return f;
    };
    auto max_diff = [](const SpectralFunction& a, const SpectralFunction& b) {
        double m = 0.0;
        for (std::size_t j = 0; j < a.values.size(); ++j)
            m = std::max(m, std::abs(a.values[j] - b.values[j]));
        return m;
    };

    double worst = 0.0;
    for (int rep = 0; rep < 4; ++rep) {
        const PairState st = make_pair_state(random_spectral(), random_spectral(), grid, phase);

        // identity element
        const PairState id = apply_boussinesq_group(st, grid, phase, 0.0);
        worst = std::max({worst, max_diff(id.u_hat, st.u_hat), max_diff(id.w_hat, st.w_hat)});

        // composition
        const double t = 0.7 + rep, s = -1.3 + 0.4 * rep;
        const PairState two = apply_boussinesq_group(
            apply_boussinesq_group(st, grid, phase, s), grid, phase, t);
        const PairState one = apply_boussinesq_group(st, grid, phase, t + s);
        worst = std::max({worst, max_diff(two.u_hat, one.u_hat), max_diff(two.w_hat, one.w_hat)});

        // pointwise rotation invariant
        for (std::size_t j = 0; j < nl; ++j) {
            const double before = std::norm(st.u_hat.values[j]) + std::norm(st.w_hat.values[j]);
            const double after = std::norm(one.u_hat.values[j]) + std::norm(one.w_hat.values[j]);
            worst = std::max(worst, std::fabs(after - before));
        }

        // cos and sin multipliers against half-wave combinations
        const SpectralFunction f = random_spectral();
        const SpectralFunction ep = apply_prototype_group(f, grid, phase, -t);
        const SpectralFunction em = apply_prototype_group(f, grid, phase, t);
        const SpectralFunction cosf = apply_multiplier({SymbolKind::cos_tpsi, t}, f, grid, phase);
        const SpectralFunction g2f = apply_multiplier({SymbolKind::sin_tpsi_g2, t}, f, grid, phase);
        const SpectralFunction g3f = apply_multiplier({SymbolKind::sin_tpsi_g3, t}, f, grid, phase);
        const SpectralFunction qf = apply_multiplier({SymbolKind::q_ratiosym, 0.0}, f, grid, phase);
        for (std::size_t j = 0; j < nl; ++j) {
            const cplx half_sum = 0.5 * (ep.values[j] + em.values[j]);
            const cplx half_diff = (ep.values[j] - em.values[j]) / cplx(0.0, 2.0);
            worst = std::max(worst, std::abs(cosf.values[j] - half_sum));
            const double q = phase.xi_norm(grid.lambda_nodes[j]) /
                             phase.xi_bracket(grid.lambda_nodes[j]);
            // l2 = sin(t psi): g3 = l2 / q, g2 = -q l2
            worst = std::max(worst, std::abs(q * g3f.values[j] - half_diff));
            worst = std::max(worst, std::abs(g2f.values[j] + q * half_diff));
        }

        // Q equals Lambda J^{-1}
        const SpectralFunction lam = apply_multiplier({SymbolKind::lambda_power, 1.0}, f, grid, phase);
        const SpectralFunction lj = apply_multiplier({SymbolKind::j_power, -1.0}, lam, grid, phase);
        worst = std::max(worst, max_diff(qf, lj));
    }
    const double secs = timer.seconds();
    DETAIL("worst identity gap %.3g (tol 1e-12), %.1f s (budget 5)", worst, secs);
    return worst < 1e-12 && secs < 5.0;
}

TransformPlan solver_plan(double r_max = 35.0) {
    const GeometryParams geom(3);
    TransformPlan plan(geom, RadialGrid::gauss_sinh(geom, r_max, 256),
                       SpectralGrid::uniform(4.5, 4097));
    plan.calibrate(2.0);
    return plan;
}

PairState solver_data(const TransformPlan& plan, double amp) {
    const SpectralFunction uh = plan.forward(gaussian(plan.radial(), amp, 2.0));
    SpectralFunction vh;
    vh.values.assign(uh.values.size(), cplx(0.0));
    return make_pair_state(uh, vh, plan.spectral(), Phase(plan.geometry()));
}

// 9. small-data fixed point: contraction, weighted norm against the data norm,
// and the integral-equation residual
bool crit_contraction() {
    hypcli::Timer timer;
    const TransformPlan plan = solver_plan();
    SolverParams params =
        make_solver_params(GeometryParams(3), 3.0, 1.0, 0.0, 8.0, SolveMode::global);
    params.epsilon = 1e-2;
    params.picard_tol = 1e-12;
    params.both_signs = true;

    const PairState data = solver_data(plan, 1e-3);
    const double e0 = e0_norm(data, params, plan);
    try {
        const Trajectory traj = picard_solve(data, params, plan);
        const double wn = weighted_norm(traj, WeightMode::global_alpha, params, plan);
        double ratio_max = 0.0;
        for (double r : traj.contraction_ratios) ratio_max = std::max(ratio_max, r);
        const double secs = timer.seconds();
        DETAIL("ratio %.3g (<0.5), iters %d (<=8), weighted %.3g <= %.3g, residual "
               "%.2g (<1e-11), refine shift %.2g, %.0f s (budget 600)",
               ratio_max, traj.iterations, wn, 2.0 * e0, traj.final_residual,
               traj.duhamel_estimate, secs);
        return !traj.contraction_ratios.empty() && ratio_max < 0.5 &&
               traj.iterations <= 8 && wn <= 2.0 * e0 &&
               traj.final_residual < 10.0 * params.picard_tol &&
               !traj.resolution_warning && secs < 600.0;
    } catch (const NumericsError& err) {
        DETAIL("solve refused: %s", err.what());
        return false;
    }
}

// 10. scattering decay: fitted exponent of the weighted gap to the free orbit
bool crit_scattering() {
    hypcli::Timer timer;
    const TransformPlan plan = solver_plan();
    SolverParams params =
        make_solver_params(GeometryParams(3), 3.0, 1.0, 0.0, 128.0, SolveMode::global);
    params.epsilon = 1e-2;
    params.picard_tol = 1e-12;
    params.both_signs = false;
    params.error_check = false;

    const PairState data = solver_data(plan, 1e-3);
    const Trajectory traj = picard_solve(data, params, plan);
    const ScatterReport rep = scattering_state(traj, params, plan);
    const double target = -params.b * (params.alpha2 + params.h) + 0.2;
    const double secs = timer.seconds();
    if (rep.fit_times.empty()) {
        DETAIL("empty fit window");
        return false;
    }
    DETAIL("exponent %.3f (<= %.1f), fit window [%.3g, %.3g], residual %.2g, %.0f s",
           rep.fitted_exponent, target, rep.fit_times.front(), rep.fit_times.back(),
           rep.construction_residual, secs);
    return rep.fitted_exponent <= target && rep.construction_residual < 1e-10 &&
           std::isfinite(rep.tail_bound) && rep.tail_bound > 0.0;
}

// 11. stability: weighted trajectory gap and free gap both decay; identical
// data give identically zero sequences
bool crit_stability() {
    hypcli::Timer timer;
    const TransformPlan plan = solver_plan();
    SolverParams params =
        make_solver_params(GeometryParams(3), 3.0, 1.0, 0.0, 64.0, SolveMode::global);
    params.epsilon = 1e-2;
    params.picard_tol = 1e-12;
    params.both_signs = false;
    params.error_check = false;
    params.backbone_coarse_from = 4.0;

    const PairState d1 = solver_data(plan, 1e-3);
    const PairState d2 = solver_data(plan, 1.2e-3);
    const StabilityReport rep = stability_experiment(d1, d2, params, plan);

    auto decreasing = [](const std::vector<double>& v) {
        for (std::size_t i = 1; i < v.size(); ++i)
            if (v[i] > 1.05 * v[i - 1]) return false;
        return v.back() < v.front();
    };
    const bool dec =
        decreasing(rep.weighted_diff) && decreasing(rep.weighted_linear);

    const StabilityReport zero = stability_experiment(d1, d1, params, plan);
    double zmax = 0.0;
    for (double v : zero.weighted_diff) zmax = std::max(zmax, v);
    for (double v : zero.weighted_linear) zmax = std::max(zmax, v);

    const double secs = timer.seconds();
    DETAIL("gap %.3g->%.3g, free %.3g->%.3g (both decreasing: %s), zero case max "
           "%.1g, %.0f s",
           rep.weighted_diff.front(), rep.weighted_diff.back(),
           rep.weighted_linear.front(), rep.weighted_linear.back(), dec ? "yes" : "no",
           zmax, secs);
    return dec && zero.both_vanish && zmax == 0.0;
}

// 12. exponent arithmetic and the Beta-function time integral
bool crit_exponents() {
    hypcli::Timer timer;
    const Exponents e3 = exponents(3.0, 3);
    const Exponents e2 = exponents(2.0, 3);
    bool ok = std::fabs(e3.b0 - 2.0) < 1e-15 && std::fabs(e3.b1 - 5.0) < 1e-15 &&
              std::fabs(e2.beta - 0.5) < 1e-15 && std::fabs(e2.alpha1 - 0.5) < 1e-15;
    double worst_id = 0.0;
    for (auto [b, n] : {std::pair{3.0, 3}, {2.0, 3}, {1.5, 2}, {2.5, 4}}) {
        const Exponents e = exponents(b, n);
        worst_id = std::max(worst_id, std::fabs(e.beta + (b - 1.0) * e.alpha1 - 1.0));
    }
    double worst_beta = 0.0;
    for (auto [l1, l2, t] : {std::tuple{0.5, 0.5, 1.0}, std::tuple{0.25, 0.5, 2.0},
                             std::tuple{0.125, 0.75, 1.5}}) {
        worst_beta = std::max(worst_beta, beta_identity_check(l1, l2, t).rel_err);
    }
    const double secs = timer.seconds();
    DETAIL("table exact, identity %.2g (tol 1e-15), Beta %.2g (tol 1e-8), %.2f s",
           worst_id, worst_beta, secs);
    return ok && worst_id < 1e-15 && worst_beta < 1e-8 && secs < 1.0;
}

// 13. rough data: weak norm finite and refinement-stable, ball square norm
// divergent under resolution doubling
bool crit_rough_data() {
    hypcli::Timer timer;
    const GeometryParams geom(3);
    TransformPlan plan(geom, RadialGrid::gauss_sinh(geom, 25.0, 256),
                       SpectralGrid::uniform(6.0, 1025));
    plan.calibrate(2.0);

    RoughDataSpec spec;
    RoughDataReport rep;
    try {
        make_rough_data(spec, plan, &rep);
    } catch (const NumericsError& err) {
        DETAIL("construction refused: %s", err.what());
        return false;
    }
    const double lo = *std::min_element(rep.weak_refine.begin(), rep.weak_refine.end());
    const double hi = *std::max_element(rep.weak_refine.begin(), rep.weak_refine.end());
    bool growth = rep.ball_l2.size() == 4;
    double min_ratio = kInf;
    for (std::size_t i = 1; i < rep.ball_l2.size(); ++i) {
        const double ratio = rep.ball_l2[i] / rep.ball_l2[i - 1];
        min_ratio = std::min(min_ratio, ratio);
        growth = growth && ratio > 1.5;
    }
    const double secs = timer.seconds();
    DETAIL("weak norm %.4g (refine spread %.2g%%), ball growth min x%.2f per doubling "
           "(>1.5), %.1f s",
           rep.weak_u, 100.0 * (hi / lo - 1.0), min_ratio, secs);
    return std::isfinite(rep.weak_u) && rep.weak_u > 0.0 && hi / lo < 1.25 && growth &&
           rep.divergence_trend && secs < 900.0;
}

struct Criterion {
    const char* label;
    bool (*fn)();
};

const Criterion criteria[13] = {
    {"transform round-trip", crit_roundtrip},
    {"closed-form eigenfunction", crit_closed_form},
    {"phase convexity", crit_convexity},
    {"large-time decay slope", crit_large_time_slope},
    {"small-time decay slope", crit_small_time_slope},
    {"pointwise kernel bound", crit_pointwise_bound},
    {"oscillatory bounds", crit_oscillatory},
    {"group algebra", crit_group_algebra},
    {"small-data contraction", crit_contraction},
    {"scattering decay", crit_scattering},
    {"stability equivalence", crit_stability},
    {"exponent arithmetic", crit_exponents},
    {"rough data norms", crit_rough_data},
};

} // namespace

int main(int argc, char** argv) {
    int which = 0;
    if (argc == 3 && std::strcmp(argv[1], "--criterion") == 0) {
        which = std::atoi(argv[2]);
        if (which < 1 || which > 13) {
            std::fprintf(stderr, "criterion must be in [1, 13]\n");
            return 2;
        }
    } else if (argc != 1) {
        std::fprintf(stderr, "usage: acceptance [--criterion N]\n");
        return 2;
    }

    bool all_pass = true;
    for (int i = 1; i <= 13; ++i) {
        if (which != 0 && i != which) continue;
        bool pass = false;
        detail_buf[0] = '\0';
        try {
            pass = criteria[i - 1].fn();
        } catch (const std::exception& err) {
            DETAIL("unexpected error: %s", err.what());
        }
        std::printf("criterion %2d (%s): %s | %s\n", i, criteria[i - 1].label,
                    pass ? "PASS" : "FAIL", detail_buf);
        std::fflush(stdout);
        all_pass = all_pass && pass;
    }
    return all_pass ? 0 : 1;
}
