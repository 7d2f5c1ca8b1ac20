#include "hypdisp/spherical.hpp"

#include <cmath>
#include <complex>
#include <sstream>

#include "hypdisp/errors.hpp"
#include "hypdisp/gauss.hpp"

namespace hypdisp {

namespace {

int next_pow2(int n) {
    int p = 1;
    while (p < n) p <<= 1;
    return p;
}

} // namespace

SphericalEvaluator::SphericalEvaluator(GeometryParams geom, double tol, int max_nodes)
    : geom_(geom), tol_(tol), max_nodes_(max_nodes),
      norm_(std::sqrt(M_PI) * std::exp(std::lgamma(0.5 * (geom.n - 1)) -
                                       std::lgamma(0.5 * geom.n))) {}

SphericalEvaluator::ThetaRule SphericalEvaluator::theta_rule(double r, int nodes) const {
    ThetaRule rule;
    const double emr = std::exp(-r);
    const double shr = std::sinh(r);
    const int pw = geom_.n - 2;
    auto m_of = [&](double th) {
        const double s = std::sin(0.5 * th);
        // cosh r - sinh r cos th = e^-r + 2 sinh(r) sin^2(th/2), cancellation-free
        return std::log(emr + 2.0 * shr * s * s);
    };
    auto add_panel = [&](double lo, double hi, int n, bool logmap) {
        const QuadRule& gl = gauss_legendre(n);
        const double c0 = logmap ? std::log(lo) : lo;
        const double c1 = logmap ? std::log(hi) : hi;
        const double half = 0.5 * (c1 - c0);
        const double mid = 0.5 * (c1 + c0);
        for (int k = 0; k < n; ++k) {
            const double u = mid + half * gl.x[k];
            const double th = logmap ? std::exp(u) : u;
            const double jac = logmap ? th : 1.0;
            const double m = m_of(th);
            rule.m.push_back(m);
            rule.a.push_back(half * gl.w[k] * jac * std::pow(std::sin(th), pw) *
                             std::exp(-geom_.rho * m) / norm_);
        }
    };
    // theta where the two base terms cross; below it the base is flat at e^-r,
    // above it grows like theta^2 until O(1) angles
    const double layer = 2.0 * std::sqrt(emr / (2.0 * shr));
    if (layer > 1e-3) {
        add_panel(0.0, M_PI, nodes, false);
        return rule;
    }
    // a single rule on [0, pi] cannot resolve the e^-r boundary layer at large r;
    // split there and log-map the power-law stretch so each piece is analytic on
    // an O(1) scale in its own variable
    const double b = 0.5;
    const double dm1 = m_of(layer) + r; // m(0) = -r exactly
    const double dm2 = m_of(b) - m_of(layer);
    const double dm3 = m_of(M_PI) - m_of(b);
    // node shares track the phase span lambda*dm each piece carries
    const double wsum = dm1 + dm2 + dm3 + 6.0;
    auto share = [&](double dm) {
        return next_pow2(std::max(16, static_cast<int>(nodes * (dm + 2.0) / wsum)));
    };
    add_panel(0.0, layer, share(dm1), false);
    add_panel(layer, b, share(dm2), true);
    add_panel(b, M_PI, share(dm3), false);
    return rule;
}

double SphericalEvaluator::eval_rule(const ThetaRule& rule, double lambda) const {
    double acc = 0.0;
    for (std::size_t k = 0; k < rule.m.size(); ++k)
        acc += rule.a[k] * std::cos(lambda * rule.m[k]);
    return acc;
}

int SphericalEvaluator::converged_nodes(double lambda, double r, double& out) const {
    // m spans [-r, r], so exp(-i lambda m) completes |lambda| r / pi cycles; below
    // about half a node per cycle two rules can agree on garbage, so refuse early
    const double floor_nodes = 0.5 * std::fabs(lambda) * r;
    if (floor_nodes > static_cast<double>(max_nodes_)) {
        std::ostringstream msg;
        msg << "spherical quadrature budget " << max_nodes_
            << " below oscillation resolution " << static_cast<long>(floor_nodes)
            << " at lambda=" << lambda << " r=" << r;
        throw QuadratureError(msg.str());
    }
    int n0 = next_pow2(
        std::max(64, static_cast<int>(0.8 * std::fabs(lambda) * r) + 32));
    if (n0 > max_nodes_ / 2) n0 = max_nodes_ / 2;
    double prev = eval_rule(theta_rule(r, n0), lambda);
    double delta = 0.0;
    for (int n = 2 * n0; n <= max_nodes_; n *= 2) {
        const ThetaRule rule = theta_rule(r, n);
        double scale = 0.0; // sum a_k = phi_0(r), the natural magnitude at this r
        for (double w : rule.a) scale += w;
        double cur = eval_rule(rule, lambda);
        delta = std::fabs(cur - prev);
        if (delta < tol_ * scale) {
            out = cur;
            return n;
        }
        prev = cur;
    }
    std::ostringstream msg;
    msg << "spherical quadrature not converged at lambda=" << lambda << " r=" << r
        << ": achieved delta " << std::scientific << delta << " with " << max_nodes_
        << " nodes, tolerance " << tol_;
    throw QuadratureError(msg.str());
}

double SphericalEvaluator::operator()(double lambda, double r) const {
    if (!(r >= 0.0)) throw DomainError("SphericalEvaluator: r must be >= 0");
    if (r == 0.0) return 1.0;
    double out;
    converged_nodes(lambda, r, out);
    return out;
}

SphericalEvaluator::FrozenRule SphericalEvaluator::frozen_rule(double r,
                                                               double lambda_cap) const {
    if (!(r >= 0.0)) throw DomainError("SphericalEvaluator: r must be >= 0");
    FrozenRule out;
    if (r == 0.0) {
        out.m = {0.0};
        out.a = {1.0};
        return out;
    }
    double probe;
    const int budget = converged_nodes(lambda_cap, r, probe);
    ThetaRule rule = theta_rule(r, budget);
    out.m = std::move(rule.m);
    out.a = std::move(rule.a);
    return out;
}

double SphericalEvaluator::eval_frozen(const FrozenRule& rule, double lambda) {
    double acc = 0.0;
    for (std::size_t k = 0; k < rule.m.size(); ++k)
        acc += rule.a[k] * std::cos(lambda * rule.m[k]);
    return acc;
}

std::vector<double> SphericalEvaluator::row(double r, double lambda0, double dlambda,
                                            int count) const {
    if (count < 1 || !(dlambda >= 0.0)) throw GridError("SphericalEvaluator::row: bad grid");
    std::vector<double> out(count);
    if (r == 0.0) {
        for (int j = 0; j < count; ++j) out[j] = 1.0;
        return out;
    }
    const double lmax = std::max(std::fabs(lambda0),
                                 std::fabs(lambda0 + dlambda * (count - 1)));
    double probe;
    const int budget = converged_nodes(lmax, r, probe);
    const ThetaRule rule = theta_rule(r, budget);
    const std::size_t nodes = rule.m.size(); // composite rules need not match the budget
    // phi(lambda_j) = Re sum_k a_k exp(-i lambda_j m_k); rotation recurrence in j
    for (std::size_t k = 0; k < nodes; ++k) {
        const double m = rule.m[k];
        std::complex<double> z =
            rule.a[k] * std::complex<double>(std::cos(lambda0 * m), -std::sin(lambda0 * m));
        const std::complex<double> step(std::cos(dlambda * m), -std::sin(dlambda * m));
        for (int j = 0; j < count; ++j) {
            out[j] += z.real();
            z *= step;
        }
    }
    return out;
}

} // namespace hypdisp
