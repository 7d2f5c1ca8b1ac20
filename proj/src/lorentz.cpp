#include "hypdisp/lorentz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "hypdisp/errors.hpp"

namespace hypdisp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_shapes(const RadialFunction& f, const RadialGrid& grid) {
    if (f.values.size() != grid.r_nodes.size())
        throw GridError("lorentz: sample count does not match the grid");
}

std::vector<double> abs_samples(const RadialFunction& f) {
    std::vector<double> out(f.values.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::abs(f.values[i]);
    return out;
}

// f must be real, nonnegative, non-increasing along the radius
std::vector<double> monotone_samples(const RadialFunction& f) {
    std::vector<double> v(f.values.size());
    double peak = 0.0;
    for (const auto& z : f.values) peak = std::max(peak, std::abs(z));
    const double slack = 1e-12 * peak + 1e-300;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (std::fabs(f.values[i].imag()) > slack || f.values[i].real() < -slack)
            throw DomainError(
                "lorentz_norm_monotone: profile must be real nonnegative; "
                "use lorentz_norm_rearranged");
        v[i] = std::max(f.values[i].real(), 0.0);
        if (i > 0 && v[i] > v[i - 1] + slack)
            throw DomainError(
                "lorentz_norm_monotone: profile must be non-increasing; "
                "use lorentz_norm_rearranged");
    }
    return v;
}

// weighted integrals of v^q against w(r) dr, split at r = 1; flags a tail
// integrand that is not decaying at the end of the grid
struct TwoPiece {
    double inner = 0.0;
    double outer = 0.0;
    bool divergent = false;
};

template <typename WeightInner, typename WeightOuter>
TwoPiece two_piece(const std::vector<double>& v, const RadialGrid& grid, double q,
                   WeightInner wi, WeightOuter wo) {
    TwoPiece out;
    double last = 0.0, prev = 0.0, peak = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double r = grid.r_nodes[i];
        const double g = std::pow(v[i], q) * (r < 1.0 ? wi(r) : wo(r));
        if (r < 1.0)
            out.inner += g * grid.dr_weights[i];
        else
            out.outer += g * grid.dr_weights[i];
        peak = std::max(peak, g);
        prev = last;
        last = g;
    }
    if (last > prev && last > 1e-12 * peak) out.divergent = true;
    return out;
}

} // namespace

LorentzParams::LorentzParams(double p_, double d_) : p(p_), d(d_) {
    if (!(p > 1.0)) throw DomainError("LorentzParams: p must be > 1 (inf allowed)");
    if (!(d >= 1.0)) throw DomainError("LorentzParams: d must be >= 1 (inf allowed)");
}

double LorentzParams::conjugate() const { return std::isinf(p) ? 1.0 : p / (p - 1.0); }

bool LorentzParams::d_finite() const { return !std::isinf(d); }

NormResult lq_norm_radial(const RadialFunction& f, const RadialGrid& grid, double q) {
    check_shapes(f, grid);
    if (!(q >= 1.0)) throw DomainError("lq_norm_radial: q must be >= 1 (inf allowed)");
    const std::vector<double> v = abs_samples(f);
    NormResult out;
    out.method = NormMethod::lq_formula;
    if (std::isinf(q)) {
        out.value = v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
        return out;
    }
    const int n = grid.geom.n;
    const TwoPiece tp =
        two_piece(v, grid, q, [n](double r) { return std::pow(r, n - 1); },
                  [n](double r) { return std::exp((n - 1) * r); });
    out.value = std::pow(tp.inner, 1.0 / q) + std::pow(tp.outer, 1.0 / q);
    out.divergent = tp.divergent;
    return out;
}

NormResult lorentz_norm_monotone(const RadialFunction& f, const RadialGrid& grid,
                                 const LorentzParams& lp) {
    check_shapes(f, grid);
    const std::vector<double> v = monotone_samples(f);
    const int n = grid.geom.n;
    NormResult out;
    out.method = NormMethod::monotone_formula;
    if (lp.d_finite()) {
        const double a = lp.d * n / lp.p - 1.0;
        const double b = lp.d * (n - 1) / lp.p;
        const TwoPiece tp =
            two_piece(v, grid, lp.d, [a](double r) { return std::pow(r, a); },
                      [b](double r) { return std::exp(b * r); });
        out.value = std::pow(tp.inner, 1.0 / lp.d) + std::pow(tp.outer, 1.0 / lp.d);
        out.divergent = tp.divergent;
        return out;
    }
    double sup_in = 0.0, sup_out = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double r = grid.r_nodes[i];
        if (r < 1.0)
            sup_in = std::max(sup_in, std::pow(r, n / lp.p) * v[i]);
        else
            sup_out = std::max(sup_out, std::exp((n - 1) * r / lp.p) * v[i]);
    }
    out.value = sup_in + sup_out;
    // sup form: treat an end-of-grid maximizer of the weighted profile as
    // a divergence hint
    if (!v.empty()) {
        const double tail = std::exp((n - 1) * grid.r_nodes.back() / lp.p) * v.back();
        if (tail >= sup_out && sup_out > 0.0) out.divergent = true;
    }
    return out;
}

NormResult lorentz_norm_rearranged(const RadialFunction& f, const RadialGrid& grid,
                                   const LorentzParams& lp) {
    check_shapes(f, grid);
    const std::size_t m = f.values.size();
    const double sphere = unit_sphere_area(grid.geom.n);
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    const std::vector<double> v = abs_samples(f);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return v[a] > v[b]; });

    NormResult out;
    out.method = NormMethod::rearrangement;

    // distinct level count drives the resolution warning
    std::size_t levels = 0;
    double last_level = -1.0;
    for (std::size_t k = 0; k < m; ++k) {
        const double s = v[order[k]];
        if (s == 0.0) break;
        if (levels == 0 || std::fabs(s - last_level) > 1e-12 * last_level) {
            ++levels;
            last_level = s;
        }
    }
    if (levels < 64) out.low_resolution = true;

    // f* is a step function: value v[order[k]] on [t_{k-1}, t_k),
    // t_k the cumulative volume of the k largest cells
    if (lp.d_finite()) {
        const double a = lp.d / lp.p;
        double t = 0.0, acc = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            const double s = v[order[k]];
            if (s == 0.0) break;
            const double t_next = t + sphere * grid.r_weights[order[k]];
            acc += std::pow(s, lp.d) * (std::pow(t_next, a) - std::pow(t, a));
            t = t_next;
        }
        // int over [t_{k-1}, t_k) of t^(d/p - 1) dt = (p/d)(t_k^(d/p) - t_{k-1}^(d/p));
        // for p = d the factor is 1 and the norm reduces to the plain L^p integral
        out.value = std::pow(acc * lp.p / lp.d, 1.0 / lp.d);
        return out;
    }
    double t = 0.0, sup = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        const double s = v[order[k]];
        if (s == 0.0) break;
        t += sphere * grid.r_weights[order[k]];
        sup = std::max(sup, std::pow(t, 1.0 / lp.p) * s);
    }
    out.value = sup;
    return out;
}

HolderReport holder_check(const RadialFunction& f, const RadialFunction& g,
                          const RadialGrid& grid, const LorentzParams& a,
                          const LorentzParams& b) {
    check_shapes(f, grid);
    check_shapes(g, grid);
    const double inv_p3 = 1.0 / a.p + 1.0 / b.p;
    if (!(inv_p3 < 1.0))
        throw DomainError("holder_check: exponents give p3 <= 1");
    const double inv_d3 = std::min(1.0, 1.0 / a.d + 1.0 / b.d);
    HolderReport rep;
    rep.p3 = 1.0 / inv_p3;
    rep.d3 = inv_d3 > 0.0 ? 1.0 / inv_d3 : kInf;

    RadialFunction prod;
    prod.values.resize(f.values.size());
    for (std::size_t i = 0; i < prod.values.size(); ++i)
        prod.values[i] = f.values[i] * g.values[i];
    const LorentzParams c{rep.p3, rep.d3};
    rep.lhs = lorentz_norm_rearranged(prod, grid, c).value;
    rep.rhs = lorentz_norm_rearranged(f, grid, a).value *
              lorentz_norm_rearranged(g, grid, b).value;
    rep.ratio = rep.rhs > 0.0 ? rep.lhs / rep.rhs : 0.0;
    return rep;
}

} // namespace hypdisp
