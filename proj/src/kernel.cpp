#include "hypdisp/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hypdisp/errors.hpp"
#include "hypdisp/gauss.hpp"
#include "hypdisp/spherical.hpp"

namespace hypdisp {

namespace {

constexpr double kTailCut = 1e-14;

struct PanelLayout {
    double width = 0.0;
    long panels = 0;
    bool converged = true;
};

PanelLayout layout_panels(const Phase& phase, double t, double r_max, double lambda_top,
                          const QuadratureBudget& quad, double cap_scale) {
    PanelLayout out;
    const double cap = quad.phase_per_panel * cap_scale;
    const double slope = std::fabs(t) * phase.dpsi(lambda_top) + r_max;
    double width = slope > 0.0 ? cap / slope : lambda_top;
    if (width > lambda_top) width = lambda_top;
    long panels = static_cast<long>(std::ceil(lambda_top / width));
    if (panels < 1) panels = 1;
    if (panels > quad.max_panels) {
        panels = quad.max_panels;
        out.converged = false;
    }
    out.width = lambda_top / panels;
    out.panels = panels;
    return out;
}

} // namespace

double kernel_truncation_lambda(const PlancherelDensity& density, double epsilon) {
    if (!(epsilon > 0.0)) throw DomainError("kernel_truncation_lambda: epsilon must be > 0");
    const int kScan = 4096;
    double top = 4.0 / epsilon;
    for (int rounds = 0; rounds < 60; ++rounds) {
        double peak = 0.0;
        double tail = 0.0;
        for (int i = 1; i <= kScan; ++i) {
            const double l = top * i / kScan;
            const double g = std::exp(-epsilon * epsilon * l * l) * density(l);
            peak = std::max(peak, g);
            if (i == kScan) tail = g;
        }
        if (tail < kTailCut * peak) {
            // walk back to the last scan point above the cut
            int idx = kScan;
            while (idx > 1) {
                const double l = top * (idx - 1) / kScan;
                if (std::exp(-epsilon * epsilon * l * l) * density(l) > kTailCut * peak)
                    break;
                --idx;
            }
            return top * idx / kScan;
        }
        top *= 2.0;
    }
    throw NumericsError("kernel_truncation_lambda: no decay found");
}

KernelResult kernel_I_eps(const KernelRequest& req) {
    if (!(req.epsilon > 0.0)) throw DomainError("kernel_I_eps: epsilon must be > 0");
    if (!(req.r >= 0.0)) throw DomainError("kernel_I_eps: r must be >= 0");
    if (req.quad.max_panels < 1) throw DomainError("kernel_I_eps: empty panel budget");

    if (req.geom.n == 3) {
        KernelSweep sweep(req.geom, req.epsilon, req.quad);
        SweepResult sr = sweep.eval(req.t, {req.r});
        KernelResult out;
        out.value = sr.values[0];
        out.est_error = sr.est_error;
        out.panels_used = sr.panels_used;
        out.converged = sr.converged;
        return out;
    }

    const PlancherelDensity density(req.geom);
    const Phase phase(req.geom);
    const double lambda_top = kernel_truncation_lambda(density, req.epsilon);
    const SphericalEvaluator evaluator(req.geom);
    const auto rule = evaluator.frozen_rule(req.r, lambda_top);

    auto one_pass = [&](double cap_scale, long& panels_out, bool& conv_out) {
        const PanelLayout lay =
            layout_panels(phase, req.t, req.r, lambda_top, req.quad, cap_scale);
        panels_out = lay.panels;
        conv_out = lay.converged;
        std::complex<double> acc{0.0, 0.0};
        const double e2 = req.epsilon * req.epsilon;
        for (long p = 0; p < lay.panels; ++p) {
            for (int k = 0; k < 15; ++k) {
                const double l = lay.width * (p + 0.5 * (GaussKronrod15::x[k] + 1.0));
                const double g = density(l) * std::exp(-e2 * l * l) *
                                 SphericalEvaluator::eval_frozen(rule, l);
                const double ph = req.t * phase.psi(l);
                acc += GaussKronrod15::kronrod_w[k] * g *
                       std::complex<double>(std::cos(ph), -std::sin(ph));
            }
        }
        // weights normalized to [-1,1]; factor 2 folds the negative lambda axis
        return acc * lay.width;
    };

    KernelResult out;
    long panels = 0;
    bool conv = true;
    out.value = one_pass(1.0, panels, conv);
    out.panels_used = panels;
    out.converged = conv;
    if (req.quad.estimate_error) {
        long cpanels = 0;
        bool cconv = true;
        const std::complex<double> coarse = one_pass(2.0, cpanels, cconv);
        out.est_error = std::abs(out.value - coarse);
        out.panels_used += cpanels;
    }
    if (!std::isfinite(std::abs(out.value)))
        throw NumericsError("kernel_I_eps: non-finite result");
    return out;
}

KernelResult kernel_I(const GeometryParams& geom, double t, double r, double tol,
                      QuadratureBudget quad) {
    if (t == 0.0) throw DomainError("kernel_I: t must be nonzero");
    if (!(tol > 0.0)) throw DomainError("kernel_I: tolerance must be > 0");
    const int kLevels = 7;
    const double eps0 = 0.1;
    std::vector<std::vector<std::complex<double>>> table;
    std::vector<double> eps_trace, diff_trace;
    KernelResult out;
    quad.estimate_error = false;
    for (int k = 0; k < kLevels; ++k) {
        const double eps = eps0 * std::pow(2.0, -k);
        KernelRequest req{geom, t, r, eps, quad};
        const KernelResult level = kernel_I_eps(req);
        out.panels_used += level.panels_used;
        out.converged = out.converged && level.converged;
        std::vector<std::complex<double>> row(k + 1);
        row[0] = level.value;
        for (int j = 1; j <= k; ++j) {
            const double f = std::pow(4.0, j) - 1.0;
            row[j] = row[j - 1] + (row[j - 1] - table[k - 1][j - 1]) / f;
        }
        eps_trace.push_back(eps);
        if (k >= 1) {
            const double diff = std::abs(row[k] - table[k - 1][k - 1]);
            diff_trace.push_back(diff);
            if (diff < tol) {
                out.value = row[k];
                out.est_error = diff;
                return out;
            }
        }
        table.push_back(std::move(row));
    }
    std::ostringstream msg;
    msg << "kernel_I: extrapolation stalled at t=" << t << " r=" << r << "; trace:";
    for (std::size_t i = 0; i < diff_trace.size(); ++i)
        msg << " eps=" << eps_trace[i + 1] << " diff=" << std::scientific << diff_trace[i];
    throw NumericsError(msg.str());
}

KernelSweep::KernelSweep(GeometryParams geom, double epsilon, QuadratureBudget quad)
    : geom_(geom), epsilon_(epsilon), quad_(quad), density_(geom), phase_(geom),
      lambda_top_(kernel_truncation_lambda(density_, epsilon)) {
    if (geom.n != 3)
        throw DomainError("KernelSweep: closed-form fast path requires n = 3");
    if (!(epsilon > 0.0)) throw DomainError("KernelSweep: epsilon must be > 0");
}

void KernelSweep::one_pass(double t, const std::vector<double>& r, double cap_scale,
                           std::vector<std::complex<double>>& out, long& panels,
                           bool& converged) const {
    const std::size_t nr = r.size();
    double r_max = 0.0;
    for (double v : r) {
        if (!(v >= 0.0)) throw DomainError("KernelSweep: r must be >= 0");
        r_max = std::max(r_max, v);
    }
    const PanelLayout lay = layout_panels(phase_, t, r_max, lambda_top_, quad_, cap_scale);
    panels = lay.panels;
    converged = lay.converged;
    const double w = lay.width;
    const double e2 = epsilon_ * epsilon_;

    // per-radius rotation state: lambda_{p,k} = w (p + off_k), so
    // e^{i lambda r} = e^{i w off_k r} * (e^{i w r})^p
    std::vector<std::complex<double>> state(nr * 15), step(nr);
    std::vector<double> inv_sinh(nr);
    for (std::size_t j = 0; j < nr; ++j) {
        step[j] = std::polar(1.0, w * r[j]);
        inv_sinh[j] = r[j] > 0.0 ? 1.0 / std::sinh(r[j]) : 0.0;
        for (int k = 0; k < 15; ++k) {
            const double off = 0.5 * (GaussKronrod15::x[k] + 1.0);
            state[j * 15 + k] = std::polar(1.0, w * off * r[j]);
        }
    }
    std::fill(out.begin(), out.end(), std::complex<double>{0.0, 0.0});

    const long kBlock = 1 << 14;
    std::vector<std::complex<double>> c(static_cast<std::size_t>(kBlock) * 15);
    std::vector<std::complex<double>> b(static_cast<std::size_t>(kBlock) * 15);
    for (long p0 = 0; p0 < lay.panels; p0 += kBlock) {
        const long pn = std::min(kBlock, lay.panels - p0);
        // node factors for this block: b = weight x density x gaussian x e^{-i t psi},
        // c = b / lambda (the sinc denominator), laid out k-major
        for (int k = 0; k < 15; ++k) {
            const double off = 0.5 * (GaussKronrod15::x[k] + 1.0);
            const double kw = GaussKronrod15::kronrod_w[k] * w;
            for (long p = 0; p < pn; ++p) {
                const double l = w * (p0 + p + off);
                double g = kw * density_(l) * std::exp(-e2 * l * l);
                if (amplitude_) g *= amplitude_(l);
                const double ph = t * phase_.psi(l);
                const std::complex<double> e(std::cos(ph), -std::sin(ph));
                b[k * kBlock + p] = g * e;
                c[k * kBlock + p] = l > 0.0 ? b[k * kBlock + p] / l
                                            : std::complex<double>{0.0, 0.0};
            }
        }
        for (std::size_t j = 0; j < nr; ++j) {
            if (r[j] == 0.0) {
                // phi = 1: plain weighted sum of the node factors
                std::complex<double> acc{0.0, 0.0};
                for (int k = 0; k < 15; ++k)
                    for (long p = 0; p < pn; ++p) acc += b[k * kBlock + p];
                out[j] += acc;
                continue;
            }
            const std::complex<double> z = step[j];
            std::complex<double> acc{0.0, 0.0};
            for (int k = 0; k < 15; ++k) {
                std::complex<double> cur = state[j * 15 + k];
                const std::complex<double>* row = c.data() + k * kBlock;
                for (long p = 0; p < pn; ++p) {
                    acc += row[p] * cur.imag(); // Im e^{i lambda r} = sin(lambda r)
                    cur *= z;
                }
                state[j * 15 + k] = cur;
            }
            out[j] += acc * inv_sinh[j];
        }
    }
}

SweepResult KernelSweep::eval(double t, const std::vector<double>& r) const {
    SweepResult out;
    out.values.assign(r.size(), {0.0, 0.0});
    long panels = 0;
    bool conv = true;
    one_pass(t, r, 1.0, out.values, panels, conv);
    out.panels_used = panels;
    out.converged = conv;
    if (quad_.estimate_error) {
        std::vector<std::complex<double>> coarse(r.size());
        long cpanels = 0;
        bool cconv = true;
        one_pass(t, r, 2.0, coarse, cpanels, cconv);
        out.panels_used += cpanels;
        for (std::size_t j = 0; j < r.size(); ++j)
            out.est_error = std::max(out.est_error, std::abs(out.values[j] - coarse[j]));
    }
    for (auto& v : out.values)
        if (!std::isfinite(std::abs(v))) throw NumericsError("KernelSweep: non-finite value");
    return out;
}

} // namespace hypdisp
