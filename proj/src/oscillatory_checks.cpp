#include "hypdisp/oscillatory.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include "hypdisp/errors.hpp"
#include "hypdisp/gauss.hpp"
#include "hypdisp/phase.hpp"

namespace hypdisp {

namespace {

// base shape B(x) = (1-x^2)^5 on [-1,1] and its derivatives
double shape(int j, double x) {
    const double u = 1.0 - x * x;
    if (u <= 0.0) return 0.0;
    switch (j) {
        case 0: return u * u * u * u * u;
        case 1: return -10.0 * x * u * u * u * u;
        case 2: return (-10.0 * u + 80.0 * x * x) * u * u * u;
        case 3: return (240.0 * x * u - 480.0 * x * x * x) * u * u;
        default: throw DomainError("BumpAmplitude: derivative order must be in [0,3]");
    }
}

// |int_a^b e^{i(-t psi + s r lambda)} m dlambda| built from phase-capped GK15 panels
std::complex<double> branch_integral(const Phase& phase, const BumpAmplitude& m, double t,
                                     double r, double s) {
    const double a = m.lo();
    const double b = m.hi();
    const double slope = std::fabs(t) * std::max(std::fabs(phase.dpsi(a)),
                                                 std::fabs(phase.dpsi(b))) +
                         std::fabs(r);
    long panels = static_cast<long>(std::ceil((b - a) * slope / (M_PI / 4.0)));
    panels = std::max(panels, 8L);
    const double w = (b - a) / panels;
    std::complex<double> acc{0.0, 0.0};
    for (long p = 0; p < panels; ++p) {
        for (int k = 0; k < 15; ++k) {
            const double l = a + w * (p + 0.5 * (GaussKronrod15::x[k] + 1.0));
            const double ph = -t * phase.psi(l) + s * r * l;
            acc += GaussKronrod15::kronrod_w[k] * m.value(l) *
                   std::complex<double>(std::cos(ph), std::sin(ph));
        }
    }
    return acc * (0.5 * w);
}

// int |m^(j)| on the bump support by Simpson on a fine fixed grid
double abs_deriv_integral(const BumpAmplitude& m, int j) {
    const int kPts = 4001; // odd
    const double a = m.lo();
    const double b = m.hi();
    const double h = (b - a) / (kPts - 1);
    double acc = 0.0;
    for (int i = 0; i < kPts; ++i) {
        const double x = a + h * i;
        const double f = std::fabs(m.deriv(j, x));
        const double w = (i == 0 || i == kPts - 1) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        acc += w * f;
    }
    return acc * h / 3.0;
}

} // namespace

double BumpAmplitude::value(double lambda) const { return deriv(0, lambda); }

double BumpAmplitude::deriv(int j, double lambda) const {
    if (!(halfwidth > 0.0)) throw DomainError("BumpAmplitude: halfwidth must be > 0");
    const double x = (lambda - center) / halfwidth;
    return amplitude * shape(j, x) / std::pow(halfwidth, j);
}

OsciReport vdc_bound_check(const GeometryParams& geom, const BumpAmplitude& m, double t,
                           double r, int sign) {
    if (t == 0.0) throw DomainError("vdc_bound_check: t must be nonzero");
    const Phase phase(geom);
    OsciReport rep;
    rep.lhs = std::abs(branch_integral(phase, m, t, r, static_cast<double>(sign)));
    rep.rhs = abs_deriv_integral(m, 1) / std::sqrt(std::fabs(t));
    rep.ratio = rep.rhs > 0.0 ? rep.lhs / rep.rhs : 0.0;
    return rep;
}

OsciReport vdc_bound_sweep(const GeometryParams& geom, const BumpAmplitude& m,
                           const std::vector<double>& t_values, double r, int sign) {
    OsciReport worst;
    for (double t : t_values) {
        const OsciReport rep = vdc_bound_check(geom, m, t, r, sign);
        if (rep.ratio >= worst.ratio) worst = rep;
    }
    return worst;
}

OsciReport nonstationary_bound_check(const GeometryParams& geom, const BumpAmplitude& m,
                                     double t, double r, int k, int sign) {
    if (t == 0.0) throw DomainError("nonstationary_bound_check: t must be nonzero");
    if (k < 0 || k > 3)
        throw DomainError("nonstationary_bound_check: k must be in [0,3]");
    const Phase phase(geom);
    const double s = static_cast<double>(sign);

    // support is the even pair [-hi,-lo] U [lo,hi]; substituting lambda -> -lambda
    // maps the left component to [lo,hi] with the sign of r flipped
    const int kScan = 2001;
    double dmin = std::numeric_limits<double>::infinity();
    for (double branch : {s, -s}) {
        for (int i = 0; i < kScan; ++i) {
            const double l = m.lo() + (m.hi() - m.lo()) * i / (kScan - 1);
            const double dphi = -t * phase.dpsi(l) + branch * r;
            if (std::fabs(dphi) < 1e-9)
                throw DomainError(
                    "nonstationary_bound_check: phase critical point inside the support");
            dmin = std::min(dmin, std::fabs(t * phase.dpsi(l)));
        }
    }
    // the two branches must not straddle a zero either
    for (double branch : {s, -s}) {
        const double da = -t * phase.dpsi(m.lo()) + branch * r;
        const double db = -t * phase.dpsi(m.hi()) + branch * r;
        if (da * db < 0.0)
            throw DomainError(
                "nonstationary_bound_check: phase critical point inside the support");
    }

    OsciReport rep;
    rep.D = dmin + std::fabs(r);
    const std::complex<double> plus = branch_integral(phase, m, t, r, s);
    const std::complex<double> minus = branch_integral(phase, m, t, r, -s);
    rep.lhs = std::abs(plus + minus);
    double sum = 0.0;
    for (int j = 0; j <= k; ++j) sum += 2.0 * abs_deriv_integral(m, j);
    rep.rhs = sum / std::pow(1.0 + rep.D, k);
    rep.ratio = rep.rhs > 0.0 ? rep.lhs / rep.rhs : 0.0;
    return rep;
}

} // namespace hypdisp
