// hypdisp <command> [--config file.json] [--out dir] [flags]
//
// Command-line driver for the transform, kernel, bound, and solver
// experiments. Each command writes <out>/<command>.csv (header row, floats at
// 17 significant digits) and <out>/<command>.summary.json with
// {command, config, wall_time_s, checks:[{name,value,bound,pass}]}.
// Exit status: 0 all checks pass, 1 a check failed, 2 bad configuration.
// Flags win over the JSON config document. Identical config and seed give
// byte-identical CSV and JSON apart from the wall_time_s field.

#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "checks_common.hpp"
#include "hypdisp/errors.hpp"
#include "hypdisp/groups.hpp"
#include "hypdisp/kernel.hpp"
#include "hypdisp/lorentz.hpp"
#include "hypdisp/oscillatory.hpp"
#include "hypdisp/parallel.hpp"
#include "hypdisp/phase.hpp"
#include "hypdisp/slope.hpp"
#include "hypdisp/solver.hpp"
#include "hypdisp/transform.hpp"

using namespace hypdisp;
using hypcli::Check;
using hypcli::CsvWriter;
using hypcli::fmt17;
using hypcli::json;
using hypcli::Range;
using cplx = std::complex<double>;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Cfg {
    std::string config_path;
    std::string out = "out";
    int threads = 0;
    unsigned long long seed = 12345;

    int n = 3;
    double r_max = 25.0;
    int n_r = 256;
    double lambda_max = 16.0;
    int n_lambda = 2048; // spectral intervals; the grid carries n_lambda+1 nodes

    // sweeps
    std::string t_range = "10:100:16";
    std::string r_range = "0.1:10:40";
    std::string t_small = "0.02:0.5:8";
    double q = 4.0;
    double eps = 0.05;
    double probe_width = 1.0;
    double amp_width = 0.0; // >0: probe amplitude e^{-(amp_width lambda)^2}
    bool no_kernel = false;
    double expect_slope = std::nan("");
    double slope_tol = std::nan("");
    double phase_per_panel = M_PI / 4.0;
    double quad_tol = 1e-9;
    bool fast_quad = false;

    // solver
    double b = 3.0;
    double alpha2 = 1.0;
    double h = 0.0;
    double T = 8.0;
    double amp = 1e-3;
    double amp2 = 1.2e-3;
    double data_width = 2.0;
    double eps_gate = 1e-2;
    double picard_tol = 1e-12;
    int max_iter = 8;
    int per_sign = 48;
    double backbone_h = 1.0 / 32.0;
    double coarse_from = 8.0;
    std::string mode = "global";
    bool both_signs = false;
    bool no_error_check = false;
};

struct CmdState {
    std::string name;
    Cfg cfg;
    CLI::App* cmd = nullptr;
    std::vector<std::function<void(const json&)>> appliers;
    std::vector<std::function<void(json&)>> emitters;
    std::function<int(Cfg&, const json&)> run;
};

std::string json_key(const std::string& flag) {
    std::string key = flag.substr(2);
    for (char& ch : key)
        if (ch == '-') ch = '_';
    return key;
}

template <class T>
void bind_opt(CmdState& st, const std::string& flag, T& field, const std::string& help) {
    auto* opt = st.cmd->add_option(flag, field, help)->capture_default_str();
    const std::string key = json_key(flag);
    st.appliers.push_back([&field, key, opt](const json& j) {
        if (opt->count() == 0 && j.contains(key)) field = j.at(key).get<T>();
    });
    st.emitters.push_back([&field, key](json& j) { j[key] = field; });
}

void bind_flag(CmdState& st, const std::string& flag, bool& field,
               const std::string& help) {
    auto* opt = st.cmd->add_flag(flag, field, help);
    const std::string key = json_key(flag);
    st.appliers.push_back([&field, key, opt](const json& j) {
        if (opt->count() == 0 && j.contains(key)) field = j.at(key).get<bool>();
    });
    st.emitters.push_back([&field, key](json& j) { j[key] = field; });
}

void bind_common(CmdState& st) {
    st.cmd->add_option("--config", st.cfg.config_path, "JSON config document");
    bind_opt(st, "--out", st.cfg.out, "output directory");
    bind_opt(st, "--threads", st.cfg.threads, "worker count (0 = auto)");
}

void check_grid_sizes(const Cfg& c) {
    if (!hypcli::power_of_two_in(c.n_r, 64, 4096))
        throw std::invalid_argument("n-r must be a power of two in [64, 4096]");
    if (!hypcli::power_of_two_in(c.n_lambda, 64, 4096))
        throw std::invalid_argument("n-lambda must be a power of two in [64, 4096]");
    if (!(c.r_max > 1.0) || !(c.lambda_max > 0.5))
        throw std::invalid_argument("grid extents too small");
}

TransformPlan build_plan(const Cfg& c) {
    check_grid_sizes(c);
    const GeometryParams geom(c.n);
    TransformPlan plan(geom, RadialGrid::gauss_sinh(geom, c.r_max, c.n_r),
                       SpectralGrid::uniform(c.lambda_max, c.n_lambda + 1));
    // narrow spectral windows need a wide calibration probe to keep the
    // reference content inside the grid
    plan.calibrate(c.lambda_max >= 10.0 ? 1.0 : 2.0);
    return plan;
}

PairState bump_pair(const TransformPlan& plan, double amp, double width) {
    RadialFunction f;
    f.values.reserve(plan.radial().r_nodes.size());
    for (double r : plan.radial().r_nodes) {
        const double x = r / width;
        f.values.push_back(cplx(amp * std::exp(-x * x), 0.0));
    }
    const SpectralFunction uh = plan.forward(f);
    SpectralFunction vh;
    vh.values.assign(uh.values.size(), cplx(0.0));
    return make_pair_state(uh, vh, plan.spectral(), Phase(plan.geometry()));
}

SolverParams build_solver_params(const Cfg& c) {
    SolveMode mode;
    if (c.mode == "global")
        mode = SolveMode::global;
    else if (c.mode == "local")
        mode = SolveMode::local;
    else
        throw std::invalid_argument("mode must be global or local");
    SolverParams sp =
        make_solver_params(GeometryParams(c.n), c.b, c.alpha2, c.h, c.T, mode);
    sp.epsilon = c.eps_gate;
    sp.picard_tol = c.picard_tol;
    sp.picard_max_iter = c.max_iter;
    sp.backbone_h = c.backbone_h;
    sp.backbone_coarse_from = c.coarse_from;
    sp.both_signs = c.both_signs;
    sp.error_check = !c.no_error_check;
    sp.time_grid = make_time_grid(c.T, c.per_sign);
    return sp;
}

// non-increasing within 5% slack and strictly lower at the end
bool decreasing_trend(const std::vector<double>& v) {
    if (v.size() < 2) return false;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] > 1.05 * v[i - 1]) return false;
    return v.back() < v.front();
}

int run_exponents(Cfg& c, const json& echo) {
    hypcli::Timer timer;
    const Exponents e = exponents(c.b, c.n);

    CsvWriter csv(std::filesystem::path(c.out) / "exponents.csv",
                  "b,n,beta,alpha1,b0,b1");
    csv.row({fmt17(c.b), std::to_string(c.n), fmt17(e.beta), fmt17(e.alpha1),
             fmt17(e.b0), fmt17(e.b1)});

    std::vector<Check> checks;
    const double ident = std::fabs(e.beta + (c.b - 1.0) * e.alpha1 - 1.0);
    checks.push_back({"exponent_identity", ident, 1e-15, ident <= 1e-15});

    double worst = 0.0;
    for (auto [l1, l2, t] : {std::tuple{0.5, 0.5, 1.0}, std::tuple{0.25, 0.5, 2.0},
                             std::tuple{0.125, 0.75, 1.5}}) {
        const BetaReport r = beta_identity_check(l1, l2, t);
        worst = std::max(worst, r.rel_err);
    }
    checks.push_back({"beta_identity", worst, 1e-8, worst <= 1e-8});

    json extras = {{"beta", e.beta},
                   {"alpha1", e.alpha1},
                   {"b0", e.b0},
                   {"b1", std::isfinite(e.b1) ? json(e.b1) : json("inf")}};
    std::printf("{\"beta\": %.17g, \"alpha1\": %.17g, \"b0\": %.17g, \"b1\": %s}\n",
                e.beta, e.alpha1, e.b0,
                std::isfinite(e.b1) ? fmt17(e.b1).c_str() : "\"inf\"");
    return hypcli::finish_summary("exponents", echo, checks, timer.seconds(), c.out,
                                  extras);
}

int run_transform_selfcheck(Cfg& c, const json& echo) {
    hypcli::Timer timer;
    const TransformPlan plan = build_plan(c);
    std::mt19937_64 rng(c.seed);

    CsvWriter csv(std::filesystem::path(c.out) / "transform-selfcheck.csv",
                  "profile,roundtrip_rel_err,plancherel_rel_err");
    double worst_rt = 0.0, worst_pl = 0.0;
    for (int k = 0; k < 5; ++k) {
        const RadialFunction f = hypcli::seeded_profile(plan.radial(), rng);
        const double rt = plan.round_trip_error(f);
        const double pl = plan.plancherel_gap(f);
        worst_rt = std::max(worst_rt, rt);
        worst_pl = std::max(worst_pl, pl);
        csv.row({std::to_string(k), fmt17(rt), fmt17(pl)});
    }

    std::vector<Check> checks;
    checks.push_back({"roundtrip_max", worst_rt, 1e-5, worst_rt < 1e-5});
    checks.push_back({"plancherel_max", worst_pl, 1e-6, worst_pl < 1e-6});
    return hypcli::finish_summary("transform-selfcheck", echo, checks, timer.seconds(),
                                  c.out);
}

int run_kernel_scan(Cfg& c, const json& echo) {
    hypcli::Timer timer;
    if (c.n != 3) throw std::invalid_argument("kernel-scan sweeps require n = 3");
    const std::vector<double> ts = hypcli::log_spaced(hypcli::parse_range(c.t_range));
    const std::vector<double> rs = hypcli::lin_spaced(hypcli::parse_range(c.r_range));

    QuadratureBudget quad;
    quad.phase_per_panel = c.phase_per_panel;
    quad.tolerance = c.quad_tol;
    KernelSweep sweep(GeometryParams(c.n), c.eps, quad);

    CsvWriter csv(std::filesystem::path(c.out) / "kernel-scan.csv",
                  "t,r,re,im,abs,est_error,panels");
    double worst_err = 0.0;
    bool all_conv = true;
    for (double t : ts) {
        const SweepResult res = sweep.eval(t, rs);
        all_conv = all_conv && res.converged;
        worst_err = std::max(worst_err, res.est_error);
        for (std::size_t i = 0; i < rs.size(); ++i)
            csv.row({fmt17(t), fmt17(rs[i]), fmt17(res.values[i].real()),
                     fmt17(res.values[i].imag()), fmt17(std::abs(res.values[i])),
                     fmt17(res.est_error), std::to_string(res.panels_used)});
    }

    std::vector<Check> checks;
    checks.push_back({"panels_converged", all_conv ? 1.0 : 0.0, 1.0, all_conv});
    checks.push_back(
        {"est_error_max", worst_err, 10.0 * c.quad_tol, worst_err < 10.0 * c.quad_tol});
    return hypcli::finish_summary("kernel-scan", echo, checks, timer.seconds(), c.out);
}

int run_dispersive_fit(Cfg& c, const json& echo) {
    hypcli::Timer timer;
    if (c.n != 3) throw std::invalid_argument("dispersive-fit sweeps require n = 3");
    const TransformPlan plan = build_plan(c);
    const std::vector<double> ts = hypcli::log_spaced(hypcli::parse_range(c.t_range));

    DispersiveOptions opts;
    opts.epsilon = c.eps;
    opts.with_kernel = !c.no_kernel;
    opts.quad.phase_per_panel = c.phase_per_panel;
    opts.quad.tolerance = c.quad_tol;
    opts.quad.estimate_error = !c.fast_quad;
    if (c.amp_width > 0.0) {
        const double w = c.amp_width;
        opts.amplitude_override = [w](double l) { return std::exp(-(w * l) * (w * l)); };
    }
    const RadialFunction probe = reference_bump(plan.radial(), c.probe_width);
    const DispersiveReport rep = dispersive_scan(plan, c.q, ts, probe, opts);

    CsvWriter csv(std::filesystem::path(c.out) / "dispersive-fit.csv",
                  "t,prototype_ratio,group_ratio,kernel_lq");
    for (const DispersiveRow& row : rep.rows)
        csv.row({fmt17(row.t), fmt17(row.prototype_ratio), fmt17(row.group_ratio),
                 fmt17(row.kernel_lq)});

    // default expectations: the kernel norm decays like |t|^{-3/2} past t = 1
    // and like |t|^{-(n/2)(1-2/q)} before it
    double expect = c.expect_slope, tol = c.slope_tol;
    const bool large_time = ts.front() >= 1.0;
    if (std::isnan(expect)) expect = large_time ? -1.5 : -0.5 * c.n * (1.0 - 2.0 / c.q);
    if (std::isnan(tol)) tol = large_time ? 0.1 : 0.15;
    const double fitted = opts.with_kernel ? rep.slope_kernel : rep.slope_prototype;

    std::vector<Check> checks;
    checks.push_back(
        {"slope_deviation", std::fabs(fitted - expect), tol, std::fabs(fitted - expect) <= tol});
    json extras = {{"slope_kernel", rep.slope_kernel},
                   {"slope_prototype", rep.slope_prototype},
                   {"slope_group", rep.slope_group},
                   {"expected_slope", expect}};
    return hypcli::finish_summary("dispersive-fit", echo, checks, timer.seconds(), c.out,
                                  extras);
}

int run_bounds_check(Cfg& c, const json& echo) {
    hypcli::Timer timer;
    if (c.n != 3) throw std::invalid_argument("bounds-check sweeps require n = 3");
    const GeometryParams geom(c.n);
    CsvWriter csv(std::filesystem::path(c.out) / "bounds-check.csv",
                  "experiment,t,param,lhs,rhs,ratio");
    std::vector<Check> checks;

    QuadratureBudget quad;
    quad.phase_per_panel = c.phase_per_panel;
    quad.tolerance = c.quad_tol;
    QuadratureBudget fine = quad;
    fine.phase_per_panel = 0.5 * quad.phase_per_panel;
    fine.tolerance = 0.25 * quad.tolerance;

    // pointwise kernel bound, large time: |I| <= C |t|^{-3/2} r^{(n+3)/4} e^{-(n-1)r/2}
    const std::vector<double> ts = hypcli::log_spaced(hypcli::parse_range(c.t_range));
    const std::vector<double> rs = hypcli::lin_spaced(hypcli::parse_range(c.r_range));
    const hypcli::ChatFit big = hypcli::kernel_chat_fit(geom, c.eps, ts, rs, -1.5, quad);
    const hypcli::ChatFit big2 = hypcli::kernel_chat_fit(geom, c.eps, ts, rs, -1.5, fine);
    const double big_shift = std::fabs(big2.c_hat - big.c_hat) / big.c_hat;
    csv.row({"kernel_large_t", fmt17(big.arg_t), fmt17(big.arg_r), fmt17(big.c_hat),
             fmt17(big2.c_hat), fmt17(big_shift)});
    checks.push_back({"chat_large_finite", big.c_hat, kInf,
                      std::isfinite(big.c_hat) && big.c_hat > 0.0});
    checks.push_back({"chat_large_budget_shift", big_shift, 0.1, big_shift < 0.1});

    // small time: |t|^{-n/2} in place of the decay rate
    const std::vector<double> ts2 = hypcli::log_spaced(hypcli::parse_range(c.t_small));
    const hypcli::ChatFit small =
        hypcli::kernel_chat_fit(geom, c.eps, ts2, rs, -0.5 * c.n, quad);
    const hypcli::ChatFit small2 =
        hypcli::kernel_chat_fit(geom, c.eps, ts2, rs, -0.5 * c.n, fine);
    const double small_shift = std::fabs(small2.c_hat - small.c_hat) / small.c_hat;
    csv.row({"kernel_small_t", fmt17(small.arg_t), fmt17(small.arg_r),
             fmt17(small.c_hat), fmt17(small2.c_hat), fmt17(small_shift)});
    checks.push_back({"chat_small_finite", small.c_hat, kInf,
                      std::isfinite(small.c_hat) && small.c_hat > 0.0});
    checks.push_back({"chat_small_budget_shift", small_shift, 0.1, small_shift < 0.1});

    // van der Corput shape over decades of t
    const BumpAmplitude m{};
    const std::vector<double> osci_t = {1.0, 10.0, 100.0, 1000.0};
    double vdc_worst = 0.0;
    for (double t : osci_t) {
        const OsciReport r = vdc_bound_check(geom, m, t, 0.1);
        vdc_worst = std::max(vdc_worst, r.ratio);
        csv.row({"vdc", fmt17(t), fmt17(0.1), fmt17(r.lhs), fmt17(r.rhs),
                 fmt17(r.ratio)});
    }
    checks.push_back({"vdc_bounded", vdc_worst, 10.0, vdc_worst < 10.0});

    // non-stationary bound: ratio trend in t for derivative orders 1..3
    for (int k = 1; k <= 3; ++k) {
        std::vector<double> ratios;
        for (double t : osci_t) {
            const OsciReport r = nonstationary_bound_check(geom, m, t, 0.1, k);
            ratios.push_back(r.ratio);
            csv.row({"nonstationary_k" + std::to_string(k), fmt17(t), fmt17(double(k)),
                     fmt17(r.lhs), fmt17(r.rhs), fmt17(r.ratio)});
        }
        const bool ok = decreasing_trend(ratios);
        checks.push_back({"nonstationary_trend_k" + std::to_string(k),
                          ratios.back() / ratios.front(), 1.0, ok});
    }
    return hypcli::finish_summary("bounds-check", echo, checks, timer.seconds(), c.out);
}

int run_lorentz_check(Cfg& c, const json& echo) {
    hypcli::Timer timer;
    const GeometryParams geom(c.n);
    const RadialGrid grid = RadialGrid::gauss_sinh(geom, c.r_max, c.n_r);
    std::mt19937_64 rng(c.seed);
    CsvWriter csv(std::filesystem::path(c.out) / "lorentz-check.csv",
                  "case,lhs,rhs,ratio");
    std::vector<Check> checks;

    // (p,p) Lorentz norm through the rearrangement equals the volume integral
    double worst_pp = 0.0;
    for (int k = 0; k < 4; ++k) {
        const RadialFunction f = hypcli::seeded_profile(grid, rng);
        const double lor = lorentz_norm_rearranged(f, grid, {c.q, c.q}).value;
        double direct = 0.0;
        for (std::size_t i = 0; i < f.values.size(); ++i)
            direct += std::pow(std::abs(f.values[i]), c.q) * grid.r_weights[i];
        direct = std::pow(unit_sphere_area(c.n) * direct, 1.0 / c.q);
        const double rel = std::fabs(lor - direct) / direct;
        worst_pp = std::max(worst_pp, rel);
        csv.row({"pp_vs_volume_" + std::to_string(k), fmt17(lor), fmt17(direct),
                 fmt17(rel)});
    }
    checks.push_back({"pp_matches_volume_lp", worst_pp, 2e-2, worst_pp < 2e-2});

    // positive homogeneity of the quasinorm
    const RadialFunction f0 = hypcli::seeded_profile(grid, rng);
    RadialFunction f2 = f0;
    for (cplx& v : f2.values) v *= 2.0;
    const double n1 = lorentz_norm_rearranged(f0, grid, {c.q, kInf}).value;
    const double n2 = lorentz_norm_rearranged(f2, grid, {c.q, kInf}).value;
    const double hom = std::fabs(n2 - 2.0 * n1) / (2.0 * n1);
    csv.row({"homogeneity", fmt17(n2), fmt17(2.0 * n1), fmt17(hom)});
    checks.push_back({"homogeneity", hom, 1e-12, hom < 1e-12});

    // quasi-triangle inequality with the classical factor 2^{1/p}
    const RadialFunction g0 = hypcli::seeded_profile(grid, rng);
    RadialFunction sum = f0;
    for (std::size_t i = 0; i < sum.values.size(); ++i) sum.values[i] += g0.values[i];
    const double ns = lorentz_norm_rearranged(sum, grid, {c.q, kInf}).value;
    const double ng = lorentz_norm_rearranged(g0, grid, {c.q, kInf}).value;
    const double tri = ns / (n1 + ng);
    csv.row({"quasi_triangle", fmt17(ns), fmt17(n1 + ng), fmt17(tri)});
    checks.push_back({"quasi_triangle", tri, std::pow(2.0, 1.0 / c.q),
                      tri <= std::pow(2.0, 1.0 / c.q)});

    // Holder pairing in the Lorentz scale
    const HolderReport hr = holder_check(f0, g0, grid, {2.0 * c.q, kInf}, {2.0 * c.q, 1.0});
    csv.row({"holder", fmt17(hr.lhs), fmt17(hr.rhs), fmt17(hr.ratio)});
    checks.push_back({"holder_pairing", hr.ratio, 2.0, hr.ratio <= 2.0});

    // weak norm of the singular model profile stays finite as the grid refines
    std::vector<double> weak;
    for (int nr : {c.n_r / 2, c.n_r}) {
        const RadialGrid g = RadialGrid::gauss_sinh(geom, c.r_max, nr);
        RadialFunction s;
        s.values.reserve(g.r_nodes.size());
        const double p_weak = (c.q > 3.0) ? c.q / 3.0 : 4.0 / 3.0;
        const double a = double(c.n) / p_weak;
        for (double r : g.r_nodes)
            s.values.push_back(std::pow(std::max(r, 1e-12), -a) * std::exp(-r));
        weak.push_back(lorentz_norm_rearranged(s, g, {p_weak, kInf}).value);
    }
    const double spread = std::fabs(weak[1] - weak[0]) / weak[0];
    csv.row({"weak_refinement", fmt17(weak[0]), fmt17(weak[1]), fmt17(spread)});
    checks.push_back({"weak_norm_stable", spread, 0.25, spread < 0.25});

    return hypcli::finish_summary("lorentz-check", echo, checks, timer.seconds(), c.out);
}

void write_trajectory_csv(const std::string& name, const Cfg& c,
                          const Trajectory& traj, const SolverParams& sp,
                          const TransformPlan& plan) {
    CsvWriter csv(std::filesystem::path(c.out) / (name + ".csv"),
                  "t,x_norm,weight,weighted");
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const double t = traj.times[i];
        const double x = x_norm(traj.states[i], sp.b + 1.0, kInf, plan).value;
        const double at = std::fabs(t);
        const double w = sp.mode == SolveMode::local
                             ? std::pow(at, sp.beta)
                             : std::pow(at, at <= 1.0 ? sp.alpha1 : sp.alpha2);
        csv.row({fmt17(t), fmt17(x), fmt17(w), fmt17(w * x)});
    }
}

int run_solve(Cfg& c, const json& echo) {
    hypcli::Timer timer;
    const TransformPlan plan = build_plan(c);
    const SolverParams sp = build_solver_params(c);
    const PairState data = bump_pair(plan, c.amp, c.data_width);
    const double e0 = e0_norm(data, sp, plan);

    std::vector<Check> checks;
    json extras;
    try {
        const Trajectory traj = picard_solve(data, sp, plan);
        write_trajectory_csv("solve", c, traj, sp, plan);

        const double wn = weighted_norm(traj,
                                        sp.mode == SolveMode::local
                                            ? WeightMode::local_beta_T
                                            : WeightMode::global_alpha,
                                        sp, plan);
        double worst_ratio = 0.0;
        for (double r : traj.contraction_ratios) worst_ratio = std::max(worst_ratio, r);

        checks.push_back({"data_within_gate", e0, sp.epsilon, e0 <= sp.epsilon});
        checks.push_back({"contraction_ratio", worst_ratio, 0.5,
                          !traj.contraction_ratios.empty() && worst_ratio < 0.5});
        checks.push_back({"iterations", double(traj.iterations), double(c.max_iter),
                          traj.iterations <= c.max_iter});
        checks.push_back({"weighted_vs_e0", wn, 2.0 * e0, wn <= 2.0 * e0});
        checks.push_back({"residual", traj.final_residual, 10.0 * sp.picard_tol,
                          traj.final_residual < 10.0 * sp.picard_tol});
        if (sp.error_check)
            checks.push_back({"backbone_refinement_shift", traj.duhamel_estimate, 0.05,
                              !traj.resolution_warning});

        extras = {{"e0", e0},
                  {"weighted_norm", wn},
                  {"iterations", traj.iterations},
                  {"history", traj.weighted_norm_history},
                  {"ratios", traj.contraction_ratios}};
    } catch (const DomainError& err) {
        checks.push_back({"data_within_gate", e0, sp.epsilon, false});
        extras = {{"error", err.what()}};
    } catch (const ContractionError& err) {
        checks.push_back({"data_within_gate", e0, sp.epsilon, e0 <= sp.epsilon});
        checks.push_back({"contraction_ratio", kInf, 0.5, false});
        extras = {{"error", err.what()}};
    }
    return hypcli::finish_summary("solve", echo, checks, timer.seconds(), c.out, extras);
}

int run_scatter(Cfg& c, const json& echo) {
    hypcli::Timer timer;
    const TransformPlan plan = build_plan(c);
    const SolverParams sp = build_solver_params(c);
    const PairState data = bump_pair(plan, c.amp, c.data_width);

    const Trajectory traj = picard_solve(data, sp, plan);
    const ScatterReport rep = scattering_state(traj, sp, plan);

    CsvWriter csv(std::filesystem::path(c.out) / "scatter.csv", "t,diff_x_norm");
    for (std::size_t i = 0; i < rep.fit_times.size(); ++i)
        csv.row({fmt17(rep.fit_times[i]), fmt17(rep.diff_norms[i])});

    const double target = -sp.b * (sp.alpha2 + sp.h) + 0.2;
    std::vector<Check> checks;
    checks.push_back({"construction_residual", rep.construction_residual, 1e-10,
                      rep.construction_residual < 1e-10});
    checks.push_back(
        {"decay_exponent", rep.fitted_exponent, target, rep.fitted_exponent <= target});
    checks.push_back({"tail_bound_finite", rep.tail_bound, kInf,
                      std::isfinite(rep.tail_bound) && rep.tail_bound > 0.0});
    json extras = {{"fitted_exponent", rep.fitted_exponent},
                   {"tail_bound", rep.tail_bound}};
    return hypcli::finish_summary("scatter", echo, checks, timer.seconds(), c.out,
                                  extras);
}

int run_stability(Cfg& c, const json& echo) {
    hypcli::Timer timer;
    const TransformPlan plan = build_plan(c);
    const SolverParams sp = build_solver_params(c);
    const PairState d1 = bump_pair(plan, c.amp, c.data_width);
    const PairState d2 = bump_pair(plan, c.amp2, c.data_width);

    const StabilityReport rep = stability_experiment(d1, d2, sp, plan);
    const StabilityReport zero = stability_experiment(d1, d1, sp, plan);

    CsvWriter csv(std::filesystem::path(c.out) / "stability.csv",
                  "t,weighted_diff,weighted_linear,zero_case_diff");
    for (std::size_t i = 0; i < rep.times.size(); ++i)
        csv.row({fmt17(rep.times[i]), fmt17(rep.weighted_diff[i]),
                 fmt17(rep.weighted_linear[i]), fmt17(zero.weighted_diff[i])});

    double zero_max = 0.0;
    for (double v : zero.weighted_diff) zero_max = std::max(zero_max, v);

    std::vector<Check> checks;
    checks.push_back({"diff_trend_decreasing",
                      rep.weighted_diff.back() / rep.weighted_diff.front(), 1.0,
                      decreasing_trend(rep.weighted_diff)});
    checks.push_back({"linear_trend_decreasing",
                      rep.weighted_linear.back() / rep.weighted_linear.front(), 1.0,
                      decreasing_trend(rep.weighted_linear)});
    checks.push_back({"zero_difference_vanishes", zero_max, 0.0,
                      zero.both_vanish && zero_max == 0.0});
    return hypcli::finish_summary("stability", echo, checks, timer.seconds(), c.out);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"harmonic analysis, dispersive bounds, and the mild-solution "
                 "solver on real hyperbolic space"};
    app.require_subcommand(1);

    std::vector<CmdState> states(9);
    auto setup = [&](CmdState& st, const std::string& name, const std::string& help) {
        st.name = name;
        st.cmd = app.add_subcommand(name, help);
        bind_common(st);
    };

    {
        CmdState& st = states[0];
        setup(st, "exponents", "closed-form exponent table and identities");
        bind_opt(st, "--n", st.cfg.n, "dimension");
        bind_opt(st, "--b", st.cfg.b, "nonlinearity power");
        st.run = run_exponents;
    }
    {
        CmdState& st = states[1];
        setup(st, "transform-selfcheck", "round-trip and Plancherel checks");
        bind_opt(st, "--n", st.cfg.n, "dimension");
        bind_opt(st, "--r-max", st.cfg.r_max, "radial extent");
        bind_opt(st, "--n-r", st.cfg.n_r, "radial nodes (power of two)");
        bind_opt(st, "--lambda-max", st.cfg.lambda_max, "spectral extent");
        bind_opt(st, "--n-lambda", st.cfg.n_lambda, "spectral intervals (power of two)");
        bind_opt(st, "--seed", st.cfg.seed, "probe family seed");
        st.run = run_transform_selfcheck;
    }
    {
        CmdState& st = states[2];
        setup(st, "kernel-scan", "tabulate the regularized dispersive kernel");
        st.cfg.t_range = "1:100:10";
        st.cfg.r_range = "0.1:10:25";
        st.cfg.eps = 0.1;
        bind_opt(st, "--n", st.cfg.n, "dimension (sweeps need 3)");
        bind_opt(st, "--t", st.cfg.t_range, "time sweep lo:hi:count (log spaced)");
        bind_opt(st, "--r", st.cfg.r_range, "radius sweep lo:hi:count (linear)");
        bind_opt(st, "--eps", st.cfg.eps, "Gaussian regularization width");
        bind_opt(st, "--phase-per-panel", st.cfg.phase_per_panel, "panel phase cap");
        bind_opt(st, "--quad-tol", st.cfg.quad_tol, "quadrature tolerance");
        st.run = run_kernel_scan;
    }
    {
        CmdState& st = states[3];
        setup(st, "dispersive-fit", "decay-slope fit of the evolved norms");
        st.cfg.lambda_max = 8.0;
        st.cfg.n_lambda = 1024;
        bind_opt(st, "--n", st.cfg.n, "dimension (sweeps need 3)");
        bind_opt(st, "--q", st.cfg.q, "Lebesgue exponent of the fitted norm");
        bind_opt(st, "--t", st.cfg.t_range, "time sweep lo:hi:count (log spaced)");
        bind_opt(st, "--r-max", st.cfg.r_max, "radial extent");
        bind_opt(st, "--n-r", st.cfg.n_r, "radial nodes (power of two)");
        bind_opt(st, "--lambda-max", st.cfg.lambda_max, "spectral extent");
        bind_opt(st, "--n-lambda", st.cfg.n_lambda, "spectral intervals (power of two)");
        bind_opt(st, "--probe-width", st.cfg.probe_width, "probe bump width");
        bind_opt(st, "--amp-width", st.cfg.amp_width,
             "override probe transform with exp(-(w lambda)^2)");
        bind_opt(st, "--eps", st.cfg.eps, "kernel regularization width");
        bind_opt(st, "--expect-slope", st.cfg.expect_slope, "expected log-log slope");
        bind_opt(st, "--slope-tol", st.cfg.slope_tol, "allowed slope deviation");
        bind_flag(st, "--no-kernel", st.cfg.no_kernel, "skip the kernel norm column");
        bind_flag(st, "--fast-quad", st.cfg.fast_quad,
                  "skip the doubled-width quadrature error pass");
        st.run = run_dispersive_fit;
    }
    {
        CmdState& st = states[4];
        setup(st, "bounds-check", "pointwise kernel bound and oscillatory bounds");
        st.cfg.t_range = "1:50:12";
        bind_opt(st, "--n", st.cfg.n, "dimension (sweeps need 3)");
        bind_opt(st, "--t", st.cfg.t_range, "large-time sweep lo:hi:count");
        bind_opt(st, "--t-small", st.cfg.t_small, "small-time sweep lo:hi:count");
        bind_opt(st, "--r", st.cfg.r_range, "radius sweep lo:hi:count");
        bind_opt(st, "--eps", st.cfg.eps, "Gaussian regularization width");
        bind_opt(st, "--phase-per-panel", st.cfg.phase_per_panel, "panel phase cap");
        bind_opt(st, "--quad-tol", st.cfg.quad_tol, "quadrature tolerance");
        st.run = run_bounds_check;
    }
    {
        CmdState& st = states[5];
        setup(st, "lorentz-check", "Lorentz norm properties on seeded profiles");
        st.cfg.n_r = 512;
        bind_opt(st, "--n", st.cfg.n, "dimension");
        bind_opt(st, "--q", st.cfg.q, "primary exponent");
        bind_opt(st, "--r-max", st.cfg.r_max, "radial extent");
        bind_opt(st, "--n-r", st.cfg.n_r, "radial nodes (power of two)");
        bind_opt(st, "--seed", st.cfg.seed, "profile seed");
        st.run = run_lorentz_check;
    }
    auto bind_solver = [&](CmdState& st) {
        bind_opt(st, "--n", st.cfg.n, "dimension");
        bind_opt(st, "--b", st.cfg.b, "nonlinearity power");
        bind_opt(st, "--alpha2", st.cfg.alpha2, "large-time weight exponent");
        bind_opt(st, "--weight-h", st.cfg.h, "auxiliary weight shift");
        bind_opt(st, "--T", st.cfg.T, "time horizon");
        bind_opt(st, "--amp", st.cfg.amp, "data amplitude");
        bind_opt(st, "--data-width", st.cfg.data_width, "data bump width");
        bind_opt(st, "--eps-gate", st.cfg.eps_gate, "smallness gate for the data norm");
        bind_opt(st, "--picard-tol", st.cfg.picard_tol, "fixed-point stopping tolerance");
        bind_opt(st, "--max-iter", st.cfg.max_iter, "iteration cap");
        bind_opt(st, "--per-sign", st.cfg.per_sign, "norm nodes per time sign");
        bind_opt(st, "--backbone-h", st.cfg.backbone_h, "integration backbone spacing");
        bind_opt(st, "--coarse-from", st.cfg.coarse_from, "backbone coarsening time");
        bind_opt(st, "--mode", st.cfg.mode, "global or local");
        bind_opt(st, "--r-max", st.cfg.r_max, "radial extent");
        bind_opt(st, "--n-r", st.cfg.n_r, "radial nodes (power of two)");
        bind_opt(st, "--lambda-max", st.cfg.lambda_max, "spectral extent");
        bind_opt(st, "--n-lambda", st.cfg.n_lambda, "spectral intervals (power of two)");
        bind_flag(st, "--both-signs", st.cfg.both_signs, "solve backwards in time too");
        bind_flag(st, "--no-error-check", st.cfg.no_error_check,
                  "skip the backbone refinement estimate");
    };
    {
        CmdState& st = states[6];
        setup(st, "solve", "small-data fixed-point solve");
        st.cfg.r_max = 35.0;
        st.cfg.lambda_max = 4.5;
        st.cfg.n_lambda = 4096;
        bind_solver(st);
        st.run = run_solve;
    }
    {
        CmdState& st = states[7];
        setup(st, "scatter", "solve and compare against the scattered free orbit");
        st.cfg.r_max = 35.0;
        st.cfg.lambda_max = 4.5;
        st.cfg.n_lambda = 4096;
        st.cfg.T = 32.0;
        st.cfg.no_error_check = true;
        bind_solver(st);
        st.run = run_scatter;
    }
    {
        CmdState& st = states[8];
        setup(st, "stability", "weighted gap between two nearby solves");
        st.cfg.r_max = 35.0;
        st.cfg.lambda_max = 4.5;
        st.cfg.n_lambda = 4096;
        st.cfg.T = 64.0;
        st.cfg.coarse_from = 4.0;
        st.cfg.no_error_check = true;
        bind_solver(st);
        bind_opt(st, "--amp2", st.cfg.amp2, "second data amplitude");
        st.run = run_stability;
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    for (CmdState& st : states) {
        if (!st.cmd->parsed()) continue;
        try {
            if (!st.cfg.config_path.empty()) {
                std::ifstream in(st.cfg.config_path);
                if (!in)
                    throw std::invalid_argument("cannot read config " +
                                                st.cfg.config_path);
                json doc = json::parse(in);
                for (auto& apply : st.appliers) apply(doc);
            }
            if (st.cfg.threads > 0) {
                const std::string tv = std::to_string(st.cfg.threads);
                setenv("HYPDISP_THREADS", tv.c_str(), 1);
            }
            json echo = json::object();
            for (auto& emit : st.emitters) emit(echo);
            echo["seed"] = st.cfg.seed;
            std::filesystem::create_directories(st.cfg.out);
            return st.run(st.cfg, echo);
        } catch (const std::invalid_argument& e) {
            std::fprintf(stderr, "config error: %s\n", e.what());
            return 2;
        } catch (const json::exception& e) {
            std::fprintf(stderr, "config error: %s\n", e.what());
            return 2;
        } catch (const std::exception& e) {
            std::fprintf(stderr, "error: %s\n", e.what());
            return 2;
        }
    }
    return 2;
}
