#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "hypdisp/grids.hpp"
#include "hypdisp/kernel.hpp"
#include "hypdisp/lorentz.hpp"
#include "hypdisp/phase.hpp"
#include "hypdisp/transform.hpp"

namespace hypdisp {

// Spectral symbols of the operators in play. lambda_power and j_power carry
// the exponent s; the trigonometric kinds carry the time t.
enum class SymbolKind {
    cos_tpsi,        // g1 = cos(t psi)
    sin_tpsi_g2,     // g2 = -(|xi|/<xi>) sin(t psi)
    sin_tpsi_g3,     // g3 = (<xi>/|xi|) sin(t psi)
    exp_minus_itpsi, // e^{-i t psi}
    lambda_power,    // |xi|^s = (lambda^2 + rho^2)^(s/2)
    j_power,         // <xi>^s = (1 + lambda^2 + rho^2)^(s/2)
    q_ratiosym       // |xi|/<xi>
};

struct MultiplierSymbol {
    SymbolKind kind;
    double param = 0.0; // t or s depending on kind

    std::complex<double> operator()(const Phase& phase, double lambda) const;
};

SpectralFunction apply_multiplier(const MultiplierSymbol& sym, const SpectralFunction& f,
                                  const SpectralGrid& grid, const Phase& phase);

// half-wave prototype: multiply by e^{-i t psi(lambda)}
SpectralFunction apply_prototype_group(const SpectralFunction& z, const SpectralGrid& grid,
                                       const Phase& phase, double t);

// Pair state in (u_hat, w_hat) coordinates, w = Q v with Q = |xi|/<xi>.
// In these coordinates the Boussinesq group is a pointwise rotation by t psi,
// and the pair norm is the max of two physical-space Lorentz norms.
struct PairState {
    SpectralFunction u_hat;
    SpectralFunction w_hat;
};

// build from natural data (u_hat, v_hat): w_hat = (|xi|/<xi>) v_hat
PairState make_pair_state(const SpectralFunction& u_hat, const SpectralFunction& v_hat,
                          const SpectralGrid& grid, const Phase& phase);

// recover v_hat = (<xi>/|xi|) w_hat; safe since |xi| >= rho > 0
SpectralFunction v_hat_of(const PairState& state, const SpectralGrid& grid,
                          const Phase& phase);

PairState apply_boussinesq_group(const PairState& state, const SpectralGrid& grid,
                                 const Phase& phase, double t);

// max of the physical-space Lorentz (p,d) norms of the two components
NormResult x_norm(const PairState& state, double p, double d, const TransformPlan& plan);

struct DispersiveRow {
    double t = 0.0;
    double prototype_ratio = 0.0; // ||e^{-itP} probe||_q / ||probe||_q'
    double group_ratio = 0.0;     // ||G(t)[probe,probe]||_X(q,inf) / dual max
    double kernel_lq = 0.0;       // ||I_eps(t,.)||_q (n=3 sweeps only)
};

struct DispersiveReport {
    std::vector<DispersiveRow> rows;
    double slope_prototype = 0.0;
    double slope_group = 0.0;
    double slope_kernel = 0.0; // 0 when the kernel column is absent
};

struct DispersiveOptions {
    double epsilon = 0.05;   // kernel regularization for the sweeps
    bool with_kernel = true; // also tabulate the bare-kernel Lq column
    QuadratureBudget quad{};
    // When set, used as the probe's spectral amplitude instead of the plan
    // forward transform (e.g. an analytically computed transform whose support
    // exceeds the plan's spectral window).
    std::function<double(double)> amplitude_override;
};

// Decay scan of the three dispersive quantities over a t sweep; slopes are
// log-log least-squares fits against |t|.
DispersiveReport dispersive_scan(const TransformPlan& plan, double q,
                                 const std::vector<double>& t_values,
                                 const RadialFunction& probe,
                                 const DispersiveOptions& opts = {});

} // namespace hypdisp
