#include "hypdisp/groups.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "hypdisp/errors.hpp"
#include "hypdisp/slope.hpp"
#include "hypdisp/spline.hpp"

namespace hypdisp {

namespace {

void check_size(const SpectralFunction& f, const SpectralGrid& grid, const char* who) {
    if (f.values.size() != grid.lambda_nodes.size())
        throw GridError(std::string(who) + ": sample count does not match the grid");
}

} // namespace

std::complex<double> MultiplierSymbol::operator()(const Phase& phase, double lambda) const {
    const double xi = phase.xi_norm(lambda);
    const double br = phase.xi_bracket(lambda);
    switch (kind) {
        case SymbolKind::cos_tpsi:
            return std::cos(param * phase.psi(lambda));
        case SymbolKind::sin_tpsi_g2:
            return -(xi / br) * std::sin(param * phase.psi(lambda));
        case SymbolKind::sin_tpsi_g3:
            return (br / xi) * std::sin(param * phase.psi(lambda));
        case SymbolKind::exp_minus_itpsi: {
            const double ph = param * phase.psi(lambda);
            return {std::cos(ph), -std::sin(ph)};
        }
        case SymbolKind::lambda_power:
            return std::pow(xi, param);
        case SymbolKind::j_power:
            return std::pow(br, param);
        case SymbolKind::q_ratiosym:
            return xi / br;
    }
    throw DomainError("MultiplierSymbol: unknown kind");
}

SpectralFunction apply_multiplier(const MultiplierSymbol& sym, const SpectralFunction& f,
                                  const SpectralGrid& grid, const Phase& phase) {
    check_size(f, grid, "apply_multiplier");
    SpectralFunction out;
    out.values.resize(f.values.size());
    for (std::size_t j = 0; j < f.values.size(); ++j) {
        const std::complex<double> s = sym(phase, grid.lambda_nodes[j]);
        if (!std::isfinite(std::abs(s)))
            throw NumericsError("apply_multiplier: symbol not finite on the grid");
        out.values[j] = s * f.values[j];
    }
    return out;
}

SpectralFunction apply_prototype_group(const SpectralFunction& z, const SpectralGrid& grid,
                                       const Phase& phase, double t) {
    return apply_multiplier({SymbolKind::exp_minus_itpsi, t}, z, grid, phase);
}

PairState make_pair_state(const SpectralFunction& u_hat, const SpectralFunction& v_hat,
                          const SpectralGrid& grid, const Phase& phase) {
    check_size(u_hat, grid, "make_pair_state");
    check_size(v_hat, grid, "make_pair_state");
    PairState s;
    s.u_hat = u_hat;
    s.w_hat = apply_multiplier({SymbolKind::q_ratiosym, 0.0}, v_hat, grid, phase);
    return s;
}

SpectralFunction v_hat_of(const PairState& state, const SpectralGrid& grid,
                          const Phase& phase) {
    check_size(state.w_hat, grid, "v_hat_of");
    SpectralFunction out;
    out.values.resize(state.w_hat.values.size());
    for (std::size_t j = 0; j < out.values.size(); ++j) {
        const double l = grid.lambda_nodes[j];
        out.values[j] = state.w_hat.values[j] * phase.xi_bracket(l) / phase.xi_norm(l);
    }
    return out;
}

PairState apply_boussinesq_group(const PairState& state, const SpectralGrid& grid,
                                 const Phase& phase, double t) {
    check_size(state.u_hat, grid, "apply_boussinesq_group");
    check_size(state.w_hat, grid, "apply_boussinesq_group");
    PairState out;
    out.u_hat.values.resize(state.u_hat.values.size());
    out.w_hat.values.resize(state.w_hat.values.size());
    for (std::size_t j = 0; j < out.u_hat.values.size(); ++j) {
        const double ph = t * phase.psi(grid.lambda_nodes[j]);
        const double c = std::cos(ph), s = std::sin(ph);
        const std::complex<double> u = state.u_hat.values[j];
        const std::complex<double> w = state.w_hat.values[j];
        out.u_hat.values[j] = c * u - s * w;
        out.w_hat.values[j] = s * u + c * w;
    }
    return out;
}

NormResult x_norm(const PairState& state, double p, double d, const TransformPlan& plan) {
    const RadialFunction u = plan.inverse(state.u_hat);
    const RadialFunction w = plan.inverse(state.w_hat);
    const LorentzParams lp{p, d};
    const NormResult nu = lorentz_norm_rearranged(u, plan.radial(), lp);
    const NormResult nw = lorentz_norm_rearranged(w, plan.radial(), lp);
    NormResult out = nu.value >= nw.value ? nu : nw;
    out.low_resolution = nu.low_resolution || nw.low_resolution;
    return out;
}

DispersiveReport dispersive_scan(const TransformPlan& plan, double q,
                                 const std::vector<double>& t_values,
                                 const RadialFunction& probe,
                                 const DispersiveOptions& opts) {
    if (!(q > 2.0)) throw DomainError("dispersive_scan: q must be > 2");
    if (t_values.empty()) throw DomainError("dispersive_scan: empty t sweep");
    if (plan.geometry().n != 3)
        throw DomainError("dispersive_scan: sweep evolution requires n = 3");
    const double qprime = q / (q - 1.0);
    const double inf = std::numeric_limits<double>::infinity();

    // Spectral amplitude of the probe, spline-interpolated so the sweep can
    // sample it on phase-capped panel nodes. Evolving on the fixed spectral
    // grid instead would alias once t dpsi exceeds the grid resolution.
    std::function<double(double)> amp = opts.amplitude_override;
    if (!amp) {
        const SpectralFunction probe_hat = plan.forward(probe);
        std::vector<double> table(probe_hat.values.size());
        for (std::size_t j = 0; j < table.size(); ++j)
            table[j] = probe_hat.values[j].real();
        const double top = plan.spectral().lambda_max;
        UniformSpline<double> spline(0.0, plan.spectral().spacing(), std::move(table));
        amp = [spline, top](double l) { return l <= top ? spline(l) : 0.0; };
    }

    KernelSweep field_sweep(plan.geometry(), opts.epsilon, opts.quad);
    field_sweep.set_amplitude(amp);
    KernelSweep bare_sweep(plan.geometry(), opts.epsilon, opts.quad);
    // the plan's lambda weights already fold the negative axis (evenness
    // doubling), and the sweep value is likewise 2 int_0^Lambda, so the
    // physical field is calibration * sweep with no extra factor
    const double cal = plan.inverse_calibration();
    const std::vector<double>& r_nodes = plan.radial().r_nodes;

    const double probe_qp =
        lorentz_norm_rearranged(probe, plan.radial(), {qprime, qprime}).value;
    const double dual_max =
        lorentz_norm_rearranged(probe, plan.radial(), {qprime, inf}).value;

    DispersiveReport rep;
    std::vector<double> ts_abs, protos, groups, kernels;
    for (double t : t_values) {
        DispersiveRow row;
        row.t = t;
        const SweepResult fr = field_sweep.eval(t, r_nodes);
        RadialFunction proto, u, w;
        proto.values.resize(fr.values.size());
        u.values.resize(fr.values.size());
        w.values.resize(fr.values.size());
        for (std::size_t i = 0; i < fr.values.size(); ++i) {
            const std::complex<double> z = cal * fr.values[i];
            proto.values[i] = z;
            // int a cos(t psi) phi dens = Re z, int a sin(t psi) phi dens = -Im z;
            // G(t)[a, a] components: u = cos - sin, w = sin + cos of the pair
            u.values[i] = z.real() + z.imag();
            w.values[i] = z.real() - z.imag();
        }
        row.prototype_ratio =
            lorentz_norm_rearranged(proto, plan.radial(), {q, q}).value / probe_qp;
        const double nu = lorentz_norm_rearranged(u, plan.radial(), {q, inf}).value;
        const double nw = lorentz_norm_rearranged(w, plan.radial(), {q, inf}).value;
        row.group_ratio = std::max(nu, nw) / dual_max;
        if (opts.with_kernel) {
            const SweepResult sr = bare_sweep.eval(t, r_nodes);
            RadialFunction kf;
            kf.values = sr.values;
            row.kernel_lq = lorentz_norm_rearranged(kf, plan.radial(), {q, q}).value;
            kernels.push_back(row.kernel_lq);
        }
        ts_abs.push_back(std::fabs(t));
        protos.push_back(row.prototype_ratio);
        groups.push_back(row.group_ratio);
        rep.rows.push_back(row);
    }
    if (ts_abs.size() >= 2) {
        rep.slope_prototype = fit_loglog(ts_abs, protos).slope;
        rep.slope_group = fit_loglog(ts_abs, groups).slope;
        if (opts.with_kernel) rep.slope_kernel = fit_loglog(ts_abs, kernels).slope;
    }
    return rep;
}

} // namespace hypdisp
