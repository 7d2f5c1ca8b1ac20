#include "hypdisp/solver.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <sstream>
#include <utility>

#include "hypdisp/errors.hpp"
#include "hypdisp/phase.hpp"
#include "hypdisp/slope.hpp"

namespace hypdisp {

namespace {

using cplx = std::complex<double>;
constexpr double kInf = std::numeric_limits<double>::infinity();

double power_law(double x, double b) {
    if (x == 0.0) return 0.0;
    if (b == 3.0) return x * x * x;
    if (b == 2.0) return std::abs(x) * x;
    return std::pow(std::abs(x), b - 1.0) * x;
}

std::function<double(double)> resolve_source(const SolverParams& p) {
    if (p.source) return p.source;
    const double b = p.b;
    return [b](double x) { return power_law(x, b); };
}

// int_0^D sigma^k e^(i p sigma) dsigma for k = 0,1,2. Closed-form recurrence;
// power series below |p D| = 0.5 where the recurrence cancels digits.
void osc_moments(double p, double D, cplx& m0, cplx& m1, cplx& m2) {
    const double x = p * D;
    if (std::abs(x) < 0.5) {
        cplx s0 = 0.0, s1 = 0.0, s2 = 0.0, term = 1.0;
        for (int j = 0; j < 26; ++j) {
            s0 += term / double(j + 1);
            s1 += term / double(j + 2);
            s2 += term / double(j + 3);
            term *= cplx(0.0, x) / double(j + 1);
            if (std::abs(term.real()) + std::abs(term.imag()) < 1e-20) break;
        }
        m0 = D * s0;
        m1 = (D * D) * s1;
        m2 = (D * D * D) * s2;
        return;
    }
    const cplx ip(0.0, p);
    const cplx e = std::polar(1.0, x);
    m0 = (e - 1.0) / ip;
    m1 = (D * e - m0) / ip;
    m2 = (D * D * e - 2.0 * m1) / ip;
}

// Panel between consecutive backbone nodes; amplitude is interpolated by the
// parabola through a canonical node triple so that forward and backward
// recurrences integrate the identical per-panel polynomial.
struct Panel {
    double lo = 0.0, hi = 0.0, delta = 0.0;
    int ia = 0, ib = -1, ic = -1; // amplitude sample nodes, ascending index
    int count = 1;
};

std::vector<Panel> make_panels(const std::vector<double>& nodes) {
    const int n = static_cast<int>(nodes.size());
    std::vector<Panel> ps;
    ps.reserve(nodes.size());
    for (int e = 0; e < n; ++e) {
        Panel p;
        p.lo = e ? nodes[e - 1] : 0.0;
        p.hi = nodes[e];
        p.delta = p.hi - p.lo;
        if (n >= 3) {
            if (e >= 2) {
                p.ia = e - 2;
                p.ib = e - 1;
                p.ic = e;
            } else {
                p.ia = 0;
                p.ib = 1;
                p.ic = 2;
            }
            p.count = 3;
        } else if (n == 2) {
            p.ia = 0;
            p.ib = 1;
            p.count = 2;
        }
        ps.push_back(p);
    }
    return ps;
}

// Graded source-sampling magnitudes on (0, T]: geometric refinement below
// 0.25 (the Duhamel integrand is mild there but the norm grid reaches very
// small times), uniform step h up to coarse_from, step 2h beyond. Extra
// magnitudes (the norm grid) are merged in.
std::vector<double> build_backbone(double T, double h, double coarse_from,
                                   const std::vector<double>& extra_mags) {
    std::vector<double> v;
    const double top = std::min(0.25, T);
    for (int k = 40; k >= 1; --k) v.push_back(std::ldexp(top, -k));
    v.push_back(top);
    if (T > top) {
        const double mid = std::min(T, std::max(coarse_from, top));
        if (mid > top) {
            const long m = std::max(1L, std::lround(std::ceil((mid - top) / h - 1e-9)));
            const double hs = (mid - top) / double(m);
            for (long i = 1; i <= m; ++i) v.push_back(top + hs * double(i));
        }
        if (T > mid) {
            const long m =
                std::max(1L, std::lround(std::ceil((T - mid) / (2.0 * h) - 1e-9)));
            const double hs = (T - mid) / double(m);
            for (long i = 1; i <= m; ++i) v.push_back(mid + hs * double(i));
        }
    }
    v.insert(v.end(), extra_mags.begin(), extra_mags.end());
    std::sort(v.begin(), v.end());
    std::vector<double> out;
    out.reserve(v.size());
    for (double x : v) {
        if (!(x > 0.0)) continue;
        if (out.empty() || x - out.back() > 1e-12 * std::max(1.0, x)) out.push_back(x);
    }
    if (out.empty()) throw GridError("solver backbone is empty");
    return out;
}

std::size_t locate_node(const std::vector<double>& nodes, double m, double tol) {
    auto it = std::lower_bound(nodes.begin(), nodes.end(), m);
    std::size_t best = nodes.size();
    double err = kInf;
    if (it != nodes.end()) {
        best = std::size_t(it - nodes.begin());
        err = std::abs(*it - m);
    }
    if (it != nodes.begin()) {
        const double d = std::abs(*std::prev(it) - m);
        if (d < err) {
            err = d;
            best = std::size_t(it - nodes.begin()) - 1;
        }
    }
    if (best == nodes.size() || err > tol * (1.0 + m))
        throw GridError("solver backbone lost a norm node");
    return best;
}

struct SignWork {
    int sign = 1;
    std::vector<double> nodes; // backbone magnitudes, ascending
    std::vector<Panel> panels;
    std::vector<double> norm_mags;     // norm-grid magnitudes, ascending
    std::vector<std::size_t> norm_pos; // backbone index per norm magnitude
};

SignWork make_sign_work(int sign, const std::vector<double>& grid,
                        const SolverParams& pr) {
    SignWork wk;
    wk.sign = sign;
    for (double t : grid)
        if ((sign > 0) == (t > 0.0) && t != 0.0) wk.norm_mags.push_back(std::abs(t));
    std::sort(wk.norm_mags.begin(), wk.norm_mags.end());
    std::vector<double> dedup;
    for (double m : wk.norm_mags)
        if (dedup.empty() || m - dedup.back() > 1e-12 * std::max(1.0, m))
            dedup.push_back(m);
    wk.norm_mags = std::move(dedup);
    wk.nodes = build_backbone(pr.T, pr.backbone_h, pr.backbone_coarse_from, wk.norm_mags);
    wk.panels = make_panels(wk.nodes);
    wk.norm_pos.reserve(wk.norm_mags.size());
    for (double m : wk.norm_mags) wk.norm_pos.push_back(locate_node(wk.nodes, m, 1e-9));
    return wk;
}

struct PassResult {
    std::vector<std::vector<double>> qhat; // source transform per backbone node
    std::vector<PairState> states;         // spectral pair at each norm node
    std::vector<RadialFunction> u, w;      // physical parts at each norm node
};

// One application of the mild-solution map along one time sign. Maintains, per
// spectral node, the cumulative rotation e^(i t psi) for the linear orbit and
// the running oscillatory integral J(t) = int_0^t e^(i(t-s)psi) q(s) ds where
// q is the previous iterate's source transform (null pointer: linear orbit
// only). Panel contributions use closed-form moments, so the kernel phase is
// integrated exactly at any frequency; only the amplitude is interpolated.
PassResult run_pass(const TransformPlan& plan, const Phase& phase, const SignWork& wk,
                    const std::vector<double>& u0h, const std::vector<double>& w0h,
                    const std::vector<std::vector<double>>* qprev,
                    const std::function<double(double)>& src, bool want_q) {
    const auto& sg = plan.spectral();
    const std::size_t nl = sg.lambda_nodes.size();
    const std::size_t nr = std::size_t(plan.radial().size());
    const std::size_t nn = wk.nodes.size();
    const double sgn = double(wk.sign);

    std::vector<double> psi(nl), qsym(nl);
    for (std::size_t j = 0; j < nl; ++j) {
        const double l = sg.lambda_nodes[j];
        psi[j] = phase.psi(l);
        qsym[j] = phase.xi_norm(l) / phase.xi_bracket(l);
    }

    PassResult out;
    if (want_q) out.qhat.assign(nn, {});
    out.states.reserve(wk.norm_mags.size());
    out.u.reserve(wk.norm_mags.size());
    out.w.reserve(wk.norm_mags.size());

    std::vector<cplx> J(nl, cplx(0.0)), cum(nl, cplx(1.0));
    std::vector<cplx> rot(nl), M0(nl), M1(nl), M2(nl);
    double cached = -kInf;
    std::size_t cursor = 0;
    SpectralFunction zspec;
    zspec.values.resize(nl);
    RadialFunction fphys;
    fphys.values.resize(nr);

    for (std::size_t e = 0; e < nn; ++e) {
        const Panel& P = wk.panels[e];
        if (!(std::abs(P.delta - cached) <= 1e-12 * P.delta)) {
            cached = P.delta;
            for (std::size_t j = 0; j < nl; ++j) {
                const double p = sgn * psi[j];
                rot[j] = std::polar(1.0, p * P.delta);
                osc_moments(p, P.delta, M0[j], M1[j], M2[j]);
            }
        }
        if (qprev && P.count == 3) {
            const double* qa = (*qprev)[std::size_t(P.ia)].data();
            const double* qb = (*qprev)[std::size_t(P.ib)].data();
            const double* qc = (*qprev)[std::size_t(P.ic)].data();
            const double s0 = P.hi - wk.nodes[std::size_t(P.ia)];
            const double s1 = P.hi - wk.nodes[std::size_t(P.ib)];
            const double s2 = P.hi - wk.nodes[std::size_t(P.ic)];
            const double i10 = 1.0 / (s1 - s0);
            const double i20 = 1.0 / (s2 - s0);
            const double i21 = 1.0 / (s2 - s1);
            for (std::size_t j = 0; j < nl; ++j) {
                const double q0 = qa[j];
                const double d1 = (qb[j] - q0) * i10;
                const double d2 = ((qc[j] - q0) * i20 - d1) * i21;
                const double A = q0 - s0 * d1 + s0 * s1 * d2;
                const double B = d1 - (s0 + s1) * d2;
                J[j] = rot[j] * J[j] + A * M0[j] + B * M1[j] + d2 * M2[j];
                cum[j] *= rot[j];
            }
        } else if (qprev && P.count == 2) {
            const double* qa = (*qprev)[std::size_t(P.ia)].data();
            const double* qb = (*qprev)[std::size_t(P.ib)].data();
            const double s0 = P.hi - wk.nodes[std::size_t(P.ia)];
            const double s1 = P.hi - wk.nodes[std::size_t(P.ib)];
            const double i10 = 1.0 / (s1 - s0);
            for (std::size_t j = 0; j < nl; ++j) {
                const double d1 = (qb[j] - qa[j]) * i10;
                J[j] = rot[j] * J[j] + (qa[j] - s0 * d1) * M0[j] + d1 * M1[j];
                cum[j] *= rot[j];
            }
        } else if (qprev) {
            const double* qa = (*qprev)[std::size_t(P.ia)].data();
            for (std::size_t j = 0; j < nl; ++j) {
                J[j] = rot[j] * J[j] + qa[j] * M0[j];
                cum[j] *= rot[j];
            }
        } else {
            for (std::size_t j = 0; j < nl; ++j) cum[j] *= rot[j];
        }

        const bool at_norm = cursor < wk.norm_pos.size() && wk.norm_pos[cursor] == e;
        if (!want_q && !at_norm) continue;

        for (std::size_t j = 0; j < nl; ++j) {
            const double cr = cum[j].real(), ci = cum[j].imag();
            double uh = cr * u0h[j] - ci * w0h[j];
            double wh = ci * u0h[j] + cr * w0h[j];
            if (qprev) {
                uh += sgn * J[j].imag();
                wh -= sgn * J[j].real();
            }
            zspec.values[j] = cplx(uh, wh);
        }
        RadialFunction z = plan.inverse(zspec);
        if (at_norm) {
            PairState st;
            st.u_hat.values.resize(nl);
            st.w_hat.values.resize(nl);
            for (std::size_t j = 0; j < nl; ++j) {
                st.u_hat.values[j] = zspec.values[j].real();
                st.w_hat.values[j] = zspec.values[j].imag();
            }
            RadialFunction uf, wf;
            uf.values.resize(nr);
            wf.values.resize(nr);
            for (std::size_t i = 0; i < nr; ++i) {
                uf.values[i] = z.values[i].real();
                wf.values[i] = z.values[i].imag();
            }
            out.states.push_back(std::move(st));
            out.u.push_back(std::move(uf));
            out.w.push_back(std::move(wf));
            ++cursor;
        }
        if (want_q) {
            for (std::size_t i = 0; i < nr; ++i)
                fphys.values[i] = cplx(src(z.values[i].real()), 0.0);
            SpectralFunction fhat = plan.forward(fphys);
            auto& row = out.qhat[e];
            row.resize(nl);
            for (std::size_t j = 0; j < nl; ++j)
                row[j] = qsym[j] * fhat.values[j].real();
        }
    }
    if (cursor != wk.norm_pos.size()) throw GridError("solver pass missed norm nodes");
    return out;
}

double xnorm_fields(const RadialFunction& u, const RadialFunction& w, double p,
                    const RadialGrid& grid) {
    const LorentzParams lp(p, kInf);
    const double a = lorentz_norm_rearranged(u, grid, lp).value;
    const double b = lorentz_norm_rearranged(w, grid, lp).value;
    return std::max(a, b);
}

struct NodeNorms {
    std::vector<double> times;
    std::vector<double> xs;
};

double aggregate(const NodeNorms& nn, WeightMode mode, const SolverParams& pr) {
    double small = 0.0, large = 0.0;
    for (std::size_t i = 0; i < nn.times.size(); ++i) {
        const double at = std::abs(nn.times[i]);
        if (mode == WeightMode::local_beta_T) {
            small = std::max(small, std::pow(at, pr.beta) * nn.xs[i]);
        } else if (at <= 1.0) {
            small = std::max(small, std::pow(at, pr.alpha1) * nn.xs[i]);
        } else {
            large = std::max(large, std::pow(at, pr.alpha2) * nn.xs[i]);
        }
    }
    return mode == WeightMode::local_beta_T ? small : small + large;
}

// norms of the pass fields, optionally of the difference against another pass
NodeNorms field_norms(const std::vector<SignWork>& works,
                      const std::vector<PassResult>& rs,
                      const std::vector<PassResult>* subtract, double p,
                      const RadialGrid& grid) {
    NodeNorms nn;
    for (std::size_t k = 0; k < works.size(); ++k) {
        for (std::size_t i = 0; i < works[k].norm_mags.size(); ++i) {
            RadialFunction du = rs[k].u[i];
            RadialFunction dw = rs[k].w[i];
            if (subtract) {
                for (std::size_t m = 0; m < du.values.size(); ++m) {
                    du.values[m] -= (*subtract)[k].u[i].values[m];
                    dw.values[m] -= (*subtract)[k].w[i].values[m];
                }
            }
            nn.times.push_back(double(works[k].sign) * works[k].norm_mags[i]);
            nn.xs.push_back(xnorm_fields(du, dw, p, grid));
        }
    }
    return nn;
}

// quadratic resample of per-node source rows onto a finer node set
std::vector<std::vector<double>> resample_rows(const std::vector<double>& from,
                                               const std::vector<std::vector<double>>& q,
                                               const std::vector<double>& to) {
    std::vector<std::vector<double>> out(to.size());
    if (from.empty()) return out;
    const std::size_t nl = q[0].size();
    for (std::size_t e = 0; e < to.size(); ++e) {
        const double s = to[e];
        out[e].resize(nl);
        if (from.size() == 1) {
            out[e] = q[0];
            continue;
        }
        auto it = std::lower_bound(from.begin(), from.end(), s);
        if (from.size() == 2) {
            const double t0 = from[0], t1 = from[1];
            const double w1 = (s - t0) / (t1 - t0);
            for (std::size_t j = 0; j < nl; ++j)
                out[e][j] = (1.0 - w1) * q[0][j] + w1 * q[1][j];
            continue;
        }
        std::size_t c = it == from.end() ? from.size() - 1 : std::size_t(it - from.begin());
        std::size_t lo = c == 0 ? 0 : c - 1;
        if (lo + 2 >= from.size()) lo = from.size() - 3;
        const double t0 = from[lo], t1 = from[lo + 1], t2 = from[lo + 2];
        const double w0 = (s - t1) * (s - t2) / ((t0 - t1) * (t0 - t2));
        const double w1 = (s - t0) * (s - t2) / ((t1 - t0) * (t1 - t2));
        const double w2 = (s - t0) * (s - t1) / ((t2 - t0) * (t2 - t1));
        const double* a = q[lo].data();
        const double* b = q[lo + 1].data();
        const double* cc = q[lo + 2].data();
        for (std::size_t j = 0; j < nl; ++j)
            out[e][j] = w0 * a[j] + w1 * b[j] + w2 * cc[j];
    }
    return out;
}

SolverParams validate_params(SolverParams p, int n) {
    if (p.geom.n != n)
        throw GridError("solver params dimension differs from the plan");
    if (!(p.T > 0.0)) throw DomainError("solver horizon T must be positive");
    if (!(p.backbone_h > 0.0)) throw DomainError("backbone step must be positive");
    if (!(p.epsilon > 0.0)) throw DomainError("smallness budget must be positive");
    if (p.picard_max_iter < 1) throw DomainError("need at least one iteration");
    if (!(p.h >= 0.0)) throw DomainError("extra weight h must be nonnegative");
    if (!(p.alpha2 > 0.0)) throw DomainError("large-time weight must be positive");
    const Exponents ex = exponents(p.b, n);
    if (p.beta == 0.0) p.beta = ex.beta;
    if (p.alpha1 == 0.0) p.alpha1 = ex.alpha1;
    if (p.mode == SolveMode::local) {
        if (!(p.b < ex.b0))
            throw DomainError("local mode needs b below the local threshold");
        if (!(p.beta * p.b < 1.0))
            throw DomainError("local mode needs beta * b < 1");
    } else {
        if (!(p.b > ex.b0 && p.b < ex.b1))
            throw DomainError("global mode needs b strictly between the thresholds");
        if (!(p.alpha1 * p.b + p.h < 1.0))
            throw DomainError("global mode needs alpha1 * b + h < 1");
        if (!(p.alpha2 + p.h <= 1.5 + 1e-12))
            throw DomainError("global mode needs alpha2 + h <= 3/2");
    }
    if (p.time_grid.empty()) p.time_grid = make_time_grid(p.T);
    for (double t : p.time_grid) {
        if (t == 0.0) throw DomainError("norm grid must exclude t = 0");
        if (std::abs(t) > p.T * (1.0 + 1e-12))
            throw DomainError("norm grid exceeds the horizon");
    }
    return p;
}

std::vector<double> real_parts(const SpectralFunction& f) {
    std::vector<double> v(f.values.size());
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = f.values[j].real();
    return v;
}

std::size_t find_time(const std::vector<double>& times, double t) {
    for (std::size_t i = 0; i < times.size(); ++i)
        if (std::abs(times[i] - t) <= 1e-9 * (1.0 + std::abs(t))) return i;
    return times.size();
}

} // namespace

Exponents exponents(double b, int n) {
    if (n < 2) throw DomainError("exponents: dimension must be at least 2");
    if (!(b > 1.0)) throw DomainError("exponents: power must exceed 1");
    const double nn = double(n);
    Exponents e;
    e.beta = nn * (b - 1.0) / (2.0 * (b + 1.0));
    e.alpha1 = 1.0 / (b - 1.0) - nn / (2.0 * (b + 1.0));
    e.b0 = (nn + 2.0 + std::sqrt(nn * nn + 12.0 * nn + 4.0)) / (2.0 * nn);
    e.b1 = n == 2 ? kInf : (nn + 2.0) / (nn - 2.0);
    return e;
}

SolverParams make_solver_params(const GeometryParams& geom, double b, double alpha2,
                                double h, double T, SolveMode mode) {
    SolverParams p;
    p.geom = geom;
    p.b = b;
    p.alpha2 = alpha2;
    p.h = h;
    p.T = T;
    p.mode = mode;
    return validate_params(std::move(p), geom.n);
}

std::vector<double> make_time_grid(double T, int per_sign) {
    if (!(T > 0.0)) throw DomainError("make_time_grid: T must be positive");
    if (per_sign < 4) throw DomainError("make_time_grid: need at least 4 nodes per sign");
    // small integers below T that are not dyadic fractions of T
    std::vector<double> extras;
    const int want = per_sign / 4;
    for (int m = 2; double(m) < T && int(extras.size()) < want; ++m) {
        bool dyadic = false;
        for (double w = T; w > 0.5 * double(m); w *= 0.5)
            if (std::abs(w - double(m)) < 1e-12 * double(m)) {
                dyadic = true;
                break;
            }
        if (!dyadic) extras.push_back(double(m));
    }
    std::vector<double> pos;
    const int n_dyadic = per_sign - int(extras.size());
    for (int k = 0; k < n_dyadic; ++k) pos.push_back(std::ldexp(T, -k));
    pos.insert(pos.end(), extras.begin(), extras.end());
    std::sort(pos.begin(), pos.end());
    std::vector<double> grid;
    grid.reserve(2 * pos.size());
    for (auto it = pos.rbegin(); it != pos.rend(); ++it) grid.push_back(-*it);
    grid.insert(grid.end(), pos.begin(), pos.end());
    return grid;
}

RadialFunction nonlinearity(const RadialFunction& u, double b) {
    if (!(b > 1.0)) throw DomainError("nonlinearity: power must exceed 1");
    RadialFunction f;
    f.values.reserve(u.values.size());
    for (const cplx& v : u.values) f.values.push_back(cplx(power_law(v.real(), b), 0.0));
    return f;
}

PairState duhamel_frozen(const SpectralFunction& ghat, double t,
                         const TransformPlan& plan) {
    const auto& sg = plan.spectral();
    const std::size_t nl = sg.lambda_nodes.size();
    if (ghat.values.size() != nl)
        throw GridError("duhamel_frozen: source size differs from the spectral grid");
    const Phase phase(plan.geometry());
    PairState out;
    out.u_hat.values.assign(nl, cplx(0.0));
    out.w_hat.values.assign(nl, cplx(0.0));
    for (std::size_t j = 0; j < nl; ++j) {
        const double l = sg.lambda_nodes[j];
        const double ps = phase.psi(l);
        const double q = phase.xi_norm(l) / phase.xi_bracket(l) * ghat.values[j].real();
        out.u_hat.values[j] = cplx(q * (1.0 - std::cos(t * ps)) / ps, 0.0);
        out.w_hat.values[j] = cplx(-q * std::sin(t * ps) / ps, 0.0);
    }
    return out;
}

PairState duhamel_term(const Trajectory& traj, double t, const SolverParams& params,
                       const TransformPlan& plan) {
    const auto& sg = plan.spectral();
    const std::size_t nl = sg.lambda_nodes.size();
    const std::size_t nr = std::size_t(plan.radial().size());
    PairState out;
    out.u_hat.values.assign(nl, cplx(0.0));
    out.w_hat.values.assign(nl, cplx(0.0));
    if (t == 0.0) return out;
    const int sign = t > 0.0 ? 1 : -1;
    const double at = std::abs(t);

    // trajectory samples on the matching side, ascending magnitude
    std::vector<double> mags;
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < traj.times.size(); ++i)
        if ((sign > 0) == (traj.times[i] > 0.0)) {
            mags.push_back(std::abs(traj.times[i]));
            idx.push_back(i);
        }
    if (sign < 0) {
        std::reverse(mags.begin(), mags.end());
        std::reverse(idx.begin(), idx.end());
    }
    if (mags.empty() || mags.back() < at * (1.0 - 1e-12))
        throw DomainError("duhamel_term: time lies beyond the trajectory");
    if (traj.states.size() != traj.times.size())
        throw GridError("duhamel_term: trajectory states and times disagree");

    // integration nodes: sample magnitudes strictly inside (0, |t|), then |t|
    std::vector<double> nodes;
    for (double m : mags)
        if (m < at * (1.0 - 1e-12)) nodes.push_back(m);
    nodes.push_back(at);

    const Phase phase(plan.geometry());
    std::vector<double> psi(nl), qsym(nl);
    for (std::size_t j = 0; j < nl; ++j) {
        const double l = sg.lambda_nodes[j];
        psi[j] = phase.psi(l);
        qsym[j] = phase.xi_norm(l) / phase.xi_bracket(l);
    }
    const auto src = resolve_source(params);

    // source rows at trajectory samples, computed on demand
    std::vector<std::vector<double>> rows(mags.size());
    SpectralFunction zspec;
    zspec.values.resize(nl);
    RadialFunction fphys;
    fphys.values.resize(nr);
    auto row_of = [&](std::size_t r) -> const std::vector<double>& {
        if (!rows[r].empty()) return rows[r];
        const PairState& st = traj.states[idx[r]];
        if (st.u_hat.values.size() != nl || st.w_hat.values.size() != nl)
            throw GridError("duhamel_term: state size differs from the spectral grid");
        for (std::size_t j = 0; j < nl; ++j)
            zspec.values[j] = cplx(st.u_hat.values[j].real(), st.w_hat.values[j].real());
        RadialFunction z = plan.inverse(zspec);
        for (std::size_t i = 0; i < nr; ++i)
            fphys.values[i] = cplx(src(z.values[i].real()), 0.0);
        SpectralFunction fhat = plan.forward(fphys);
        rows[r].resize(nl);
        for (std::size_t j = 0; j < nl; ++j)
            rows[r][j] = qsym[j] * fhat.values[j].real();
        return rows[r];
    };

    std::vector<cplx> J(nl, cplx(0.0)), rot(nl), M0(nl), M1(nl), M2(nl);
    for (std::size_t e = 0; e < nodes.size(); ++e) {
        const double lo = e ? nodes[e - 1] : 0.0;
        const double hi = nodes[e];
        const double delta = hi - lo;
        for (std::size_t j = 0; j < nl; ++j) {
            const double p = double(sign) * psi[j];
            rot[j] = std::polar(1.0, p * delta);
            osc_moments(p, delta, M0[j], M1[j], M2[j]);
        }
        // amplitude window: the three samples nearest the panel midpoint
        const double mid = 0.5 * (lo + hi);
        auto it = std::lower_bound(mags.begin(), mags.end(), mid);
        std::size_t c = it == mags.end() ? mags.size() - 1 : std::size_t(it - mags.begin());
        std::size_t w0 = c == 0 ? 0 : c - 1;
        if (mags.size() >= 3 && w0 + 2 >= mags.size()) w0 = mags.size() - 3;
        const std::size_t count = std::min<std::size_t>(3, mags.size());
        if (count == 3) {
            const auto& qa = row_of(w0);
            const auto& qb = row_of(w0 + 1);
            const auto& qc = row_of(w0 + 2);
            const double s0 = hi - mags[w0];
            const double s1 = hi - mags[w0 + 1];
            const double s2 = hi - mags[w0 + 2];
            const double i10 = 1.0 / (s1 - s0);
            const double i20 = 1.0 / (s2 - s0);
            const double i21 = 1.0 / (s2 - s1);
            for (std::size_t j = 0; j < nl; ++j) {
                const double q0 = qa[j];
                const double d1 = (qb[j] - q0) * i10;
                const double d2 = ((qc[j] - q0) * i20 - d1) * i21;
                const double A = q0 - s0 * d1 + s0 * s1 * d2;
                const double B = d1 - (s0 + s1) * d2;
                J[j] = rot[j] * J[j] + A * M0[j] + B * M1[j] + d2 * M2[j];
            }
        } else if (count == 2) {
            const auto& qa = row_of(0);
            const auto& qb = row_of(1);
            const double s0 = hi - mags[0];
            const double s1 = hi - mags[1];
            const double i10 = 1.0 / (s1 - s0);
            for (std::size_t j = 0; j < nl; ++j) {
                const double d1 = (qb[j] - qa[j]) * i10;
                J[j] = rot[j] * J[j] + (qa[j] - s0 * d1) * M0[j] + d1 * M1[j];
            }
        } else {
            const auto& qa = row_of(0);
            for (std::size_t j = 0; j < nl; ++j) J[j] = rot[j] * J[j] + qa[j] * M0[j];
        }
    }
    for (std::size_t j = 0; j < nl; ++j) {
        out.u_hat.values[j] = cplx(double(sign) * J[j].imag(), 0.0);
        out.w_hat.values[j] = cplx(-double(sign) * J[j].real(), 0.0);
    }
    return out;
}

Trajectory picard_solve(const PairState& data, const SolverParams& params_in,
                        const TransformPlan& plan) {
    const SolverParams params = validate_params(params_in, plan.geometry().n);
    const auto& sg = plan.spectral();
    const std::size_t nl = sg.lambda_nodes.size();
    if (data.u_hat.values.size() != nl || data.w_hat.values.size() != nl)
        throw GridError("picard_solve: data size differs from the spectral grid");
    if (!plan.calibrated()) throw CalibrationError("picard_solve: plan not calibrated");

    const Phase phase(plan.geometry());
    const auto src = resolve_source(params);
    const std::vector<double> u0h = real_parts(data.u_hat);
    const std::vector<double> w0h = real_parts(data.w_hat);
    const double p_lor = params.b + 1.0;
    const WeightMode mode = params.mode == SolveMode::global ? WeightMode::global_alpha
                                                             : WeightMode::local_beta_T;

    std::vector<SignWork> works;
    {
        SignWork neg = make_sign_work(-1, params.time_grid, params);
        SignWork pos = make_sign_work(+1, params.time_grid, params);
        if (params.both_signs && !neg.norm_mags.empty()) works.push_back(std::move(neg));
        if (!pos.norm_mags.empty()) works.push_back(std::move(pos));
    }
    if (works.empty()) throw DomainError("picard_solve: norm grid has no usable nodes");

    const std::size_t ns = works.size();
    std::vector<PassResult> lin(ns);
    for (std::size_t k = 0; k < ns; ++k)
        lin[k] = run_pass(plan, phase, works[k], u0h, w0h, nullptr, src, true);
    const double e0 = aggregate(field_norms(works, lin, nullptr, p_lor, plan.radial()),
                                mode, params);
    if (params.mode == SolveMode::global && e0 > params.epsilon) {
        std::ostringstream os;
        os << "picard_solve: linear orbit norm " << e0 << " exceeds the smallness budget "
           << params.epsilon;
        throw DomainError(os.str());
    }

    Trajectory traj;
    std::vector<PassResult> prev = std::move(lin);
    std::vector<PassResult> linear_fields(ns);
    for (std::size_t k = 0; k < ns; ++k) {
        linear_fields[k].u = prev[k].u;
        linear_fields[k].w = prev[k].w;
    }
    double prev_diff = -1.0;
    bool converged = false;
    for (int it = 1; it <= params.picard_max_iter; ++it) {
        std::vector<PassResult> cur(ns);
        for (std::size_t k = 0; k < ns; ++k)
            cur[k] = run_pass(plan, phase, works[k], u0h, w0h, &prev[k].qhat, src, true);
        traj.iterations = it;
        const double wn =
            aggregate(field_norms(works, cur, nullptr, p_lor, plan.radial()), mode, params);
        const double diff =
            aggregate(field_norms(works, cur, &prev, p_lor, plan.radial()), mode, params);
        traj.weighted_norm_history.push_back(wn);
        if (prev_diff >= 0.0)
            traj.contraction_ratios.push_back(diff / std::max(prev_diff, 1e-300));
        const std::size_t nr_ratio = traj.contraction_ratios.size();
        if (nr_ratio >= 3 && traj.contraction_ratios[nr_ratio - 1] >= 1.0 &&
            traj.contraction_ratios[nr_ratio - 2] >= 1.0 &&
            traj.contraction_ratios[nr_ratio - 3] >= 1.0) {
            std::ostringstream os;
            os << "picard_solve: iteration is not contracting (ratio "
               << traj.contraction_ratios[nr_ratio - 1] << ")";
            throw ContractionError(os.str());
        }
        prev_diff = diff;
        prev = std::move(cur);
        if (diff < params.picard_tol) {
            converged = true;
            break;
        }
    }
    (void)converged;

    // one extra application of the map measures the fixed-point residual
    {
        std::vector<PassResult> extra(ns);
        for (std::size_t k = 0; k < ns; ++k)
            extra[k] = run_pass(plan, phase, works[k], u0h, w0h, &prev[k].qhat, src, false);
        traj.final_residual =
            aggregate(field_norms(works, extra, &prev, p_lor, plan.radial()), mode, params);
    }

    if (params.error_check) {
        // repeat the final application on a halved backbone; the relative move
        // of the Duhamel part bounds the source-quadrature error
        SolverParams fine_p = params;
        fine_p.backbone_h = 0.5 * params.backbone_h;
        std::vector<PassResult> fine(ns);
        for (std::size_t k = 0; k < ns; ++k) {
            SignWork fwk = make_sign_work(works[k].sign, params.time_grid, fine_p);
            const auto qfine = resample_rows(works[k].nodes, prev[k].qhat, fwk.nodes);
            fine[k] = run_pass(plan, phase, fwk, u0h, w0h, &qfine, src, false);
        }
        const double duh = aggregate(
            field_norms(works, prev, &linear_fields, p_lor, plan.radial()), mode, params);
        const double dd = aggregate(
            field_norms(works, fine, &prev, p_lor, plan.radial()), mode, params);
        traj.duhamel_estimate = duh > 0.0 ? dd / duh : 0.0;
        traj.resolution_warning = traj.duhamel_estimate > 0.05;
    }

    traj.data.u_hat.values.assign(nl, cplx(0.0));
    traj.data.w_hat.values.assign(nl, cplx(0.0));
    for (std::size_t j = 0; j < nl; ++j) {
        traj.data.u_hat.values[j] = cplx(u0h[j], 0.0);
        traj.data.w_hat.values[j] = cplx(w0h[j], 0.0);
    }
    for (std::size_t k = 0; k < ns; ++k) {
        const SignWork& wk = works[k];
        if (wk.sign < 0) {
            for (std::size_t i = wk.norm_mags.size(); i-- > 0;) {
                traj.times.push_back(-wk.norm_mags[i]);
                traj.states.push_back(std::move(prev[k].states[i]));
            }
            traj.backbone_times_neg = wk.nodes;
            traj.backbone_qhat_neg = std::move(prev[k].qhat);
        } else {
            for (std::size_t i = 0; i < wk.norm_mags.size(); ++i) {
                traj.times.push_back(wk.norm_mags[i]);
                traj.states.push_back(std::move(prev[k].states[i]));
            }
            traj.backbone_times_pos = wk.nodes;
            traj.backbone_qhat_pos = std::move(prev[k].qhat);
        }
    }
    return traj;
}

double weighted_norm(const Trajectory& traj, WeightMode mode,
                     const SolverParams& params_in, const TransformPlan& plan) {
    const SolverParams params = validate_params(params_in, plan.geometry().n);
    if (traj.times.size() != traj.states.size())
        throw GridError("weighted_norm: trajectory times and states disagree");
    NodeNorms nn;
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        nn.times.push_back(traj.times[i]);
        nn.xs.push_back(
            x_norm(traj.states[i], params.b + 1.0, kInf, plan).value);
    }
    return aggregate(nn, mode, params);
}

double e0_norm(const PairState& data, const SolverParams& params_in,
               const TransformPlan& plan) {
    const SolverParams params = validate_params(params_in, plan.geometry().n);
    const auto& sg = plan.spectral();
    if (data.u_hat.values.size() != sg.lambda_nodes.size())
        throw GridError("e0_norm: data size differs from the spectral grid");
    const Phase phase(plan.geometry());
    PairState base;
    base.u_hat.values.assign(data.u_hat.values.size(), cplx(0.0));
    base.w_hat.values.assign(data.w_hat.values.size(), cplx(0.0));
    for (std::size_t j = 0; j < data.u_hat.values.size(); ++j) {
        base.u_hat.values[j] = cplx(data.u_hat.values[j].real(), 0.0);
        base.w_hat.values[j] = cplx(data.w_hat.values[j].real(), 0.0);
    }
    NodeNorms nn;
    for (double t : params.time_grid) {
        if (!params.both_signs && t < 0.0) continue;
        const PairState st = apply_boussinesq_group(base, sg, phase, t);
        nn.times.push_back(t);
        nn.xs.push_back(x_norm(st, params.b + 1.0, kInf, plan).value);
    }
    const WeightMode mode = params.mode == SolveMode::global ? WeightMode::global_alpha
                                                             : WeightMode::local_beta_T;
    return aggregate(nn, mode, params);
}

PairState make_rough_data(const RoughDataSpec& spec, const TransformPlan& plan,
                          RoughDataReport* report) {
    const int n = plan.geometry().n;
    if (!(spec.b > 1.0)) throw DomainError("make_rough_data: power must exceed 1");
    if (spec.k < 0.0 || spec.s < 0.0 || spec.k_tilde < 0.0 || spec.s_tilde < 0.0)
        throw DomainError("make_rough_data: roughness offsets must be nonnegative");
    if (spec.centers.empty()) throw DomainError("make_rough_data: need a center");
    if (spec.kappa.size() != spec.centers.size() || spec.mu.size() != spec.centers.size())
        throw DomainError("make_rough_data: weight lists must match the centers");
    for (double c : spec.centers)
        if (c < 0.0) throw DomainError("make_rough_data: centers are radii");

    const double nb = double(n) * spec.b / (spec.b + 1.0);
    const double qdec = double(n - 1) * spec.b / (spec.b + 1.0);
    // profile gamma(z) = z^(-nb/(b+1)-k) inside, e^(-((n-1)b/(b+1)+s)z) outside,
    // times the extremal admissible modulator min(z,1)^k e^(s max(z-1,0))
    auto profile = [&](double z, double k, double s) {
        z = std::max(z, 1e-12);
        if (z < 1.0) return std::pow(z, -(nb + k)) * std::pow(z, k);
        return std::exp(-(qdec + s) * z) * std::exp(s * (z - 1.0));
    };
    auto superpose = [&](double r, const std::vector<double>& wts, double k, double s) {
        double v = 0.0;
        for (std::size_t i = 0; i < spec.centers.size(); ++i)
            v += wts[i] * profile(std::abs(r - spec.centers[i]), k, s);
        return v;
    };

    const RadialGrid& rg = plan.radial();
    RadialFunction u0, v0;
    u0.values.reserve(rg.r_nodes.size());
    v0.values.reserve(rg.r_nodes.size());
    for (double r : rg.r_nodes) {
        u0.values.push_back(cplx(superpose(r, spec.kappa, spec.k, spec.s), 0.0));
        v0.values.push_back(cplx(superpose(r, spec.mu, spec.k_tilde, spec.s_tilde), 0.0));
    }
    const Phase phase(plan.geometry());
    const SpectralFunction uh = plan.forward(u0);
    const SpectralFunction vh = plan.forward(v0);
    const PairState pair = make_pair_state(uh, vh, plan.spectral(), phase);

    if (report) {
        const double pw = (spec.b + 1.0) / spec.b;
        const LorentzParams weak(pw, kInf);
        const NormResult wu = lorentz_norm_rearranged(u0, rg, weak);
        const NormResult wv = lorentz_norm_rearranged(v0, rg, weak);
        if (wu.divergent || wv.divergent)
            throw DomainError("make_rough_data: weak norm diverges; data inadmissible");
        report->weak_u = wu.value;
        report->weak_v = wv.value;
        report->weak_refine.clear();
        for (int nr : {512, 1024, 2048}) {
            const RadialGrid fine = RadialGrid::gauss_sinh(plan.geometry(), rg.r_max, nr);
            RadialFunction uf;
            uf.values.reserve(fine.r_nodes.size());
            for (double r : fine.r_nodes)
                uf.values.push_back(cplx(superpose(r, spec.kappa, spec.k, spec.s), 0.0));
            report->weak_refine.push_back(
                lorentz_norm_rearranged(uf, fine, weak).value);
        }
        // midpoint L^2 over the unit ball; each resolution doubling halves the
        // cutoff radius, so a square-nonintegrable singularity must keep growing
        report->ball_l2.clear();
        for (int d = 0; d < 4; ++d) {
            const long cells = 1024L << d;
            const double dr = 1.0 / double(cells);
            double acc = 0.0;
            for (long i = 0; i < cells; ++i) {
                const double r = (double(i) + 0.5) * dr;
                const double f = superpose(r, spec.kappa, spec.k, spec.s);
                acc += f * f * std::pow(std::sinh(r), double(n - 1)) * dr;
            }
            report->ball_l2.push_back(std::sqrt(acc));
        }
        report->divergence_trend = true;
        for (std::size_t i = 1; i < report->ball_l2.size(); ++i)
            if (!(report->ball_l2[i] > 1.5 * report->ball_l2[i - 1]))
                report->divergence_trend = false;
    }
    return pair;
}

ScatterReport scattering_state(const Trajectory& traj, const SolverParams& params_in,
                               const TransformPlan& plan) {
    const SolverParams params = validate_params(params_in, plan.geometry().n);
    const auto& bt = traj.backbone_times_pos;
    const auto& bq = traj.backbone_qhat_pos;
    if (bt.size() < 3 || bq.size() != bt.size())
        throw DomainError("scattering_state: trajectory has no positive backbone");
    const auto& sg = plan.spectral();
    const std::size_t nl = sg.lambda_nodes.size();
    for (const auto& row : bq)
        if (row.size() != nl)
            throw GridError("scattering_state: backbone rows disagree with the grid");
    if (traj.data.u_hat.values.size() != nl)
        throw GridError("scattering_state: trajectory data disagree with the grid");

    const Phase phase(plan.geometry());
    std::vector<double> psi(nl);
    for (std::size_t j = 0; j < nl; ++j) psi[j] = phase.psi(sg.lambda_nodes[j]);
    const double H = bt.back();
    const std::vector<Panel> panels = make_panels(bt);

    // fit times: half-octave ladder on [H/32, H/2], snapped to backbone nodes
    std::vector<std::size_t> fit_idx;
    for (int k = 0; k <= 8; ++k) {
        const double target = (H / 32.0) * std::pow(2.0, 0.5 * double(k));
        auto it = std::lower_bound(bt.begin(), bt.end(), target);
        std::size_t c = it == bt.end() ? bt.size() - 1 : std::size_t(it - bt.begin());
        if (c > 0 && std::abs(bt[c - 1] - target) < std::abs(bt[c] - target)) --c;
        if (fit_idx.empty() || c > fit_idx.back()) fit_idx.push_back(c);
    }
    if (fit_idx.size() < 4)
        throw DomainError("scattering_state: backbone too coarse for the decay fit");

    // backward recurrence for D(t) = int_t^H e^(i(t-s)psi) q(s) ds
    auto panel_into = [&](std::vector<cplx>& D, const Panel& P) {
        const double s0 = bt[std::size_t(P.ia)] - P.lo;
        const double s1 = P.count > 1 ? bt[std::size_t(P.ib)] - P.lo : 0.0;
        const double s2 = P.count > 2 ? bt[std::size_t(P.ic)] - P.lo : 0.0;
        const double i10 = P.count > 1 ? 1.0 / (s1 - s0) : 0.0;
        const double i20 = P.count > 2 ? 1.0 / (s2 - s0) : 0.0;
        const double i21 = P.count > 2 ? 1.0 / (s2 - s1) : 0.0;
        const double* qa = bq[std::size_t(P.ia)].data();
        const double* qb = P.count > 1 ? bq[std::size_t(P.ib)].data() : nullptr;
        const double* qc = P.count > 2 ? bq[std::size_t(P.ic)].data() : nullptr;
        for (std::size_t j = 0; j < nl; ++j) {
            const double p = -psi[j];
            cplx m0, m1, m2;
            osc_moments(p, P.delta, m0, m1, m2);
            const cplx r = std::polar(1.0, p * P.delta);
            double A = qa[j], B = 0.0, C = 0.0;
            if (P.count == 3) {
                const double d1 = (qb[j] - qa[j]) * i10;
                const double d2 = ((qc[j] - qa[j]) * i20 - d1) * i21;
                A = qa[j] - s0 * d1 + s0 * s1 * d2;
                B = d1 - (s0 + s1) * d2;
                C = d2;
            } else if (P.count == 2) {
                const double d1 = (qb[j] - qa[j]) * i10;
                A = qa[j] - s0 * d1;
                B = d1;
            }
            D[j] = r * D[j] + A * m0 + B * m1 + C * m2;
        }
    };

    std::vector<cplx> D(nl, cplx(0.0));
    std::vector<std::vector<cplx>> D_at(fit_idx.size());
    std::vector<cplx> D0;
    {
        std::size_t want = fit_idx.size();
        // D at the horizon node itself is zero
        while (want > 0 && fit_idx[want - 1] == bt.size() - 1) {
            D_at[want - 1] = D;
            --want;
        }
        for (std::size_t e = bt.size(); e-- > 1;) {
            panel_into(D, panels[e]);
            // D now holds the value at node e-1
            while (want > 0 && fit_idx[want - 1] == e - 1) {
                D_at[want - 1] = D;
                --want;
            }
        }
        panel_into(D, panels[0]);
        D0 = D; // value at t = 0
    }

    ScatterReport rep;
    rep.fit_times.reserve(fit_idx.size());
    rep.diff_norms.reserve(fit_idx.size());
    const double p_lor = params.b + 1.0;
    SpectralFunction zspec;
    zspec.values.resize(nl);
    for (std::size_t m = 0; m < fit_idx.size(); ++m) {
        for (std::size_t j = 0; j < nl; ++j)
            zspec.values[j] = cplx(-D_at[m][j].imag(), D_at[m][j].real());
        const RadialFunction z = plan.inverse(zspec);
        RadialFunction uf, wf;
        uf.values.reserve(z.values.size());
        wf.values.reserve(z.values.size());
        for (const cplx& v : z.values) {
            uf.values.push_back(v.real());
            wf.values.push_back(v.imag());
        }
        rep.fit_times.push_back(bt[fit_idx[m]]);
        rep.diff_norms.push_back(xnorm_fields(uf, wf, p_lor, plan.radial()));
    }
    bool positive = true;
    for (double v : rep.diff_norms)
        if (!(v > 0.0)) positive = false;
    rep.fitted_exponent =
        positive ? fit_loglog(rep.fit_times, rep.diff_norms).slope : 0.0;

    // scattered pair: the state whose free evolution u+ leaves as the residual
    // Duhamel tail vanishes
    rep.scatter_data.u_hat.values.resize(nl);
    rep.scatter_data.w_hat.values.resize(nl);
    for (std::size_t j = 0; j < nl; ++j) {
        rep.scatter_data.u_hat.values[j] =
            cplx(traj.data.u_hat.values[j].real() + D0[j].imag(), 0.0);
        rep.scatter_data.w_hat.values[j] =
            cplx(traj.data.w_hat.values[j].real() - D0[j].real(), 0.0);
    }

    // identity J(t) + D(t) = e^(i t psi) D(0) holds per spectral node because
    // both recurrences integrate the same per-panel polynomials; its numerical
    // defect measures pure roundoff accumulation
    {
        const std::size_t mid = fit_idx[fit_idx.size() / 2];
        std::vector<cplx> Jf(nl, cplx(0.0));
        for (std::size_t e = 0; e <= mid; ++e) {
            const Panel& P = panels[e];
            const double s0 = P.hi - bt[std::size_t(P.ia)];
            const double s1 = P.count > 1 ? P.hi - bt[std::size_t(P.ib)] : 0.0;
            const double s2 = P.count > 2 ? P.hi - bt[std::size_t(P.ic)] : 0.0;
            const double i10 = P.count > 1 ? 1.0 / (s1 - s0) : 0.0;
            const double i20 = P.count > 2 ? 1.0 / (s2 - s0) : 0.0;
            const double i21 = P.count > 2 ? 1.0 / (s2 - s1) : 0.0;
            const double* qa = bq[std::size_t(P.ia)].data();
            const double* qb = P.count > 1 ? bq[std::size_t(P.ib)].data() : nullptr;
            const double* qc = P.count > 2 ? bq[std::size_t(P.ic)].data() : nullptr;
            for (std::size_t j = 0; j < nl; ++j) {
                const double p = psi[j];
                cplx m0, m1, m2;
                osc_moments(p, P.delta, m0, m1, m2);
                const cplx r = std::polar(1.0, p * P.delta);
                double A = qa[j], B = 0.0, C = 0.0;
                if (P.count == 3) {
                    const double d1 = (qb[j] - qa[j]) * i10;
                    const double d2 = ((qc[j] - qa[j]) * i20 - d1) * i21;
                    A = qa[j] - s0 * d1 + s0 * s1 * d2;
                    B = d1 - (s0 + s1) * d2;
                    C = d2;
                } else if (P.count == 2) {
                    const double d1 = (qb[j] - qa[j]) * i10;
                    A = qa[j] - s0 * d1;
                    B = d1;
                }
                Jf[j] = r * Jf[j] + A * m0 + B * m1 + C * m2;
            }
        }
        const std::size_t mslot = fit_idx.size() / 2;
        const double tmid = bt[mid];
        double scale = 1e-300, worst = 0.0;
        for (std::size_t j = 0; j < nl; ++j) scale = std::max(scale, std::abs(D0[j]));
        for (std::size_t j = 0; j < nl; ++j) {
            const cplx lhs = Jf[j] + D_at[mslot][j];
            const cplx rhs = std::polar(1.0, tmid * psi[j]) * D0[j];
            worst = std::max(worst, std::abs(lhs - rhs));
        }
        rep.construction_residual = worst / scale;
    }

    // crude tail estimate: if the source keeps decaying at the fitted rate the
    // neglected mass beyond the horizon is ~ ||f(u(H))|| H / (b alpha2 - 1)
    {
        SpectralFunction last;
        last.values.resize(nl);
        for (std::size_t j = 0; j < nl; ++j) last.values[j] = cplx(bq.back()[j], 0.0);
        const RadialFunction g = plan.inverse(last);
        RadialFunction gr;
        gr.values.reserve(g.values.size());
        for (const cplx& v : g.values) gr.values.push_back(v.real());
        const double m = lorentz_norm_rearranged(gr, plan.radial(),
                                                 LorentzParams(p_lor, kInf))
                             .value;
        const double q = params.b * params.alpha2;
        rep.tail_bound = q > 1.0 ? m * H / (q - 1.0) : kInf;
    }
    return rep;
}

StabilityReport stability_experiment(const PairState& data1, const PairState& data2,
                                     const SolverParams& params_in,
                                     const TransformPlan& plan) {
    const SolverParams params = validate_params(params_in, plan.geometry().n);
    const Trajectory t1 = picard_solve(data1, params, plan);
    const Trajectory t2 = picard_solve(data2, params, plan);
    const auto& sg = plan.spectral();
    const Phase phase(plan.geometry());
    const std::size_t nl = sg.lambda_nodes.size();

    StabilityReport rep;
    // the weighted gap is an asymptotic quantity; ladder within a factor 16 of
    // the horizon so every rung sits in the decay regime
    const double floor_t = std::max(std::min(1.0, params.T), params.T / 16.0);
    for (double t = params.T; t >= floor_t * (1.0 - 1e-12); t *= 0.5) {
        const std::size_t i1 = find_time(t1.times, t);
        const std::size_t i2 = find_time(t2.times, t);
        if (i1 == t1.times.size() || i2 == t2.times.size()) continue;
        rep.times.push_back(t);
    }
    std::reverse(rep.times.begin(), rep.times.end());
    if (rep.times.size() < 2)
        throw DomainError("stability_experiment: norm grid lacks dyadic nodes");

    PairState ddata;
    ddata.u_hat.values.resize(nl);
    ddata.w_hat.values.resize(nl);
    for (std::size_t j = 0; j < nl; ++j) {
        ddata.u_hat.values[j] = cplx(
            data1.u_hat.values[j].real() - data2.u_hat.values[j].real(), 0.0);
        ddata.w_hat.values[j] = cplx(
            data1.w_hat.values[j].real() - data2.w_hat.values[j].real(), 0.0);
    }

    const double p_lor = params.b + 1.0;
    const double wexp = params.alpha2 + params.h;
    for (double t : rep.times) {
        const std::size_t i1 = find_time(t1.times, t);
        const std::size_t i2 = find_time(t2.times, t);
        PairState diff;
        diff.u_hat.values.resize(nl);
        diff.w_hat.values.resize(nl);
        for (std::size_t j = 0; j < nl; ++j) {
            diff.u_hat.values[j] =
                t1.states[i1].u_hat.values[j] - t2.states[i2].u_hat.values[j];
            diff.w_hat.values[j] =
                t1.states[i1].w_hat.values[j] - t2.states[i2].w_hat.values[j];
        }
        const double xd = x_norm(diff, p_lor, kInf, plan).value;
        const PairState lin = apply_boussinesq_group(ddata, sg, phase, t);
        const double xl = x_norm(lin, p_lor, kInf, plan).value;
        rep.weighted_diff.push_back(std::pow(t, wexp) * xd);
        rep.weighted_linear.push_back(std::pow(t, wexp) * xl);
    }
    const double df = rep.weighted_diff.front(), db = rep.weighted_diff.back();
    const double lf = rep.weighted_linear.front(), lb = rep.weighted_linear.back();
    if (df == 0.0 && lf == 0.0 && db == 0.0 && lb == 0.0)
        rep.both_vanish = true;
    else
        rep.both_vanish = db < df && lb < lf;
    return rep;
}

BetaReport beta_identity_check(double l1, double l2, double t) {
    if (!(l1 < 1.0) || !(l2 < 1.0))
        throw DomainError("beta_identity_check: exponents must lie below 1");
    if (l1 < 0.0 || l2 < 0.0)
        throw DomainError("beta_identity_check: exponents must be nonnegative");
    if (!(t > 0.0)) throw DomainError("beta_identity_check: t must be positive");
    // substitute s = t x; double-exponential quadrature absorbs both endpoint
    // singularities of (1-x)^(-l1) x^(-l2) on (0,1)
    const double h = 1.0 / 128.0;
    double sum = 0.0;
    for (int k = -900; k <= 900; ++k) {
        const double u = h * double(k);
        const double sh = (M_PI / 2.0) * std::sinh(u);
        if (std::abs(sh) > 350.0) continue;
        const double em = std::exp(-2.0 * std::abs(sh));
        const double denom = 1.0 + em;
        const double x = sh >= 0.0 ? 1.0 / denom : em / denom;
        const double omx = sh >= 0.0 ? em / denom : 1.0 / denom;
        const double w = M_PI * std::cosh(u) * em / (denom * denom);
        if (w < 1e-320) continue;
        sum += w * std::pow(omx, -l1) * std::pow(x, -l2);
    }
    BetaReport rep;
    const double scale = std::pow(t, 1.0 - l1 - l2);
    rep.integral = scale * h * sum;
    rep.reference = scale * std::exp(std::lgamma(1.0 - l1) + std::lgamma(1.0 - l2) -
                                     std::lgamma(2.0 - l1 - l2));
    rep.rel_err = std::abs(rep.integral - rep.reference) / std::abs(rep.reference);
    return rep;
}

} // namespace hypdisp
