#pragma once

#include <functional>
#include <vector>

#include "hypdisp/groups.hpp"
#include "hypdisp/transform.hpp"

namespace hypdisp {

// closed-form exponent arithmetic for the nonlinearity power b on H^n
struct Exponents {
    double beta;   // n(b-1) / (2(b+1))
    double alpha1; // 1/(b-1) - n/(2(b+1))
    double b0;     // positive root of n b^2 - (n+2) b - 2 = 0
    double b1;     // (n+2)/(n-2) for n >= 3, infinity for n = 2
};
Exponents exponents(double b, int n);

enum class SolveMode { local, global };

struct SolverParams {
    GeometryParams geom{3};
    double b = 3.0;
    double beta = 0.0;   // filled in by make_solver_params
    double alpha1 = 0.0; // filled in by make_solver_params
    double alpha2 = 1.0;
    double h = 0.0;
    double T = 8.0;         // trajectory horizon
    double epsilon = 1e-3;  // smallness budget checked against the E0 norm
    std::vector<double> time_grid; // norm sampling nodes, symmetric, excludes 0
    double picard_tol = 1e-12;
    int picard_max_iter = 8;
    SolveMode mode = SolveMode::global;

    // discretization of the Duhamel backbone: uniform s-step on
    // [geometric_top, min(T, coarse_from)], doubled beyond coarse_from
    double backbone_h = 1.0 / 32.0;
    double backbone_coarse_from = 8.0;
    bool both_signs = true;
    bool error_check = true; // backbone-doubling estimate after convergence

    // pointwise source term; empty means f(u) = |u|^(b-1) u
    std::function<double(double)> source;
};

// validates the mode constraints and fills beta/alpha1 and the default grid
SolverParams make_solver_params(const GeometryParams& geom, double b, double alpha2,
                                double h, double T, SolveMode mode = SolveMode::global);

// symmetric dyadic nodes {T 2^-k} plus small integers, per_sign nodes per sign
std::vector<double> make_time_grid(double T, int per_sign = 48);

// default nonlinearity |u|^(b-1) u applied to the real part, pointwise
RadialFunction nonlinearity(const RadialFunction& u, double b);

struct Trajectory {
    std::vector<double> times;     // the norm sampling grid actually used
    std::vector<PairState> states; // spectral pair per node, final iterate
    std::vector<double> weighted_norm_history; // per Picard iterate
    std::vector<double> contraction_ratios;    // successive difference ratios
    double final_residual = 0.0;      // weighted norm of one extra application
    double duhamel_estimate = 0.0;    // relative backbone-doubling estimate
    bool resolution_warning = false;  // estimate above 5 percent
    int iterations = 0;
    PairState data; // initial pair the trajectory was solved from

    // Duhamel backbone retained for scattering: per sign, times ascending in
    // |t| and the real source transform Q f(u)^ at each backbone node
    std::vector<double> backbone_times_pos, backbone_times_neg;
    std::vector<std::vector<double>> backbone_qhat_pos, backbone_qhat_neg;
};

// -int_0^t G(t-s)[0, g] ds for a source frozen in s; per spectral node the
// exact value is [q (1-cos(t psi))/psi, -q sin(t psi)/psi] with q = Q g
PairState duhamel_frozen(const SpectralFunction& ghat, double t,
                         const TransformPlan& plan);

// -int_0^t G(t-s)[0, f(u(s))] ds with u taken from the trajectory states
PairState duhamel_term(const Trajectory& traj, double t, const SolverParams& params,
                       const TransformPlan& plan);

Trajectory picard_solve(const PairState& data, const SolverParams& params,
                        const TransformPlan& plan);

enum class WeightMode { local_beta_T, global_alpha };

double weighted_norm(const Trajectory& traj, WeightMode mode,
                     const SolverParams& params, const TransformPlan& plan);

// weighted norm of the linear orbit G(t) data over the standard grid
double e0_norm(const PairState& data, const SolverParams& params,
               const TransformPlan& plan);

struct RoughDataSpec {
    std::vector<double> centers{0.0}; // geodesic offsets, radial superposition
    std::vector<double> kappa{1.0};
    std::vector<double> mu{1.0};
    double k = 0.0, s = 0.0;
    double k_tilde = 0.0, s_tilde = 0.0;
    double b = 3.0;
};

struct RoughDataReport {
    double weak_u = 0.0, weak_v = 0.0; // L^((b+1)/b, inf) norms on the plan grid
    std::vector<double> weak_refine;   // weak norm of u0 under grid refinement
    std::vector<double> ball_l2;       // L^2 over the unit ball per doubling
    bool divergence_trend = false;     // every doubling grows by > 1.5x
};

// singular profile r^(-nb/(b+1)-k) near the center, e^(-((n-1)b/(b+1)+s) r)
// outside, modulated to the extremal admissible envelope
PairState make_rough_data(const RoughDataSpec& spec, const TransformPlan& plan,
                          RoughDataReport* report = nullptr);

struct ScatterReport {
    PairState scatter_data; // [u0+, v0+]
    std::vector<double> fit_times;
    std::vector<double> diff_norms;   // X_(b+1,inf) of [u-u+, w-w+]
    double fitted_exponent = 0.0;
    double tail_bound = 0.0;          // estimated source mass beyond the horizon
    double construction_residual = 0.0;
};

ScatterReport scattering_state(const Trajectory& traj, const SolverParams& params,
                               const TransformPlan& plan);

struct StabilityReport {
    std::vector<double> times;          // dyadic comparison grid
    std::vector<double> weighted_diff;  // t^(a2+h) X-norm of the solution gap
    std::vector<double> weighted_linear; // same weight on G(t)[data1 - data2]
    bool both_vanish = false;
};

StabilityReport stability_experiment(const PairState& data1, const PairState& data2,
                                     const SolverParams& params,
                                     const TransformPlan& plan);

struct BetaReport {
    double integral;  // int_0^t (t-s)^(-l1) s^(-l2) ds by quadrature
    double reference; // t^(1-l1-l2) B(1-l1, 1-l2)
    double rel_err;
};

BetaReport beta_identity_check(double l1, double l2, double t);

} // namespace hypdisp
