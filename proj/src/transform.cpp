#include "hypdisp/transform.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hypdisp/errors.hpp"
#include "hypdisp/gauss.hpp"
#include "hypdisp/parallel.hpp"
#include "hypdisp/spherical.hpp"

namespace hypdisp {

namespace {

double pow_int(double x, int k) {
    double p = 1.0;
    for (int i = 0; i < k; ++i) p *= x;
    return p;
}

} // namespace

RadialGrid RadialGrid::gauss_sinh(const GeometryParams& geom, double r_max, int count,
                                  double stretch) {
    if (!(r_max > 0.0) || count < 2) throw GridError("RadialGrid::gauss_sinh: bad parameters");
    const QuadRule& gl = gauss_legendre(count);
    RadialGrid grid{geom, {}, {}, {}, r_max};
    grid.r_nodes.resize(count);
    grid.r_weights.resize(count);
    grid.dr_weights.resize(count);
    const double sh = std::sinh(stretch);
    for (int i = 0; i < count; ++i) {
        const double u = 0.5 * (gl.x[i] + 1.0);
        const double r = r_max * std::sinh(stretch * u) / sh;
        const double dr_du = r_max * stretch * std::cosh(stretch * u) / sh;
        grid.r_nodes[i] = r;
        grid.dr_weights[i] = 0.5 * gl.w[i] * dr_du;
        grid.r_weights[i] = grid.dr_weights[i] * pow_int(std::sinh(r), geom.n - 1);
    }
    return grid;
}

RadialGrid RadialGrid::uniform(const GeometryParams& geom, double r0, double r1, int count) {
    if (!(r0 > 0.0) || !(r1 > r0) || count < 2)
        throw GridError("RadialGrid::uniform: bad parameters");
    RadialGrid grid{geom, {}, {}, {}, r1};
    grid.r_nodes.resize(count);
    grid.r_weights.resize(count);
    grid.dr_weights.resize(count);
    const double h = (r1 - r0) / (count - 1);
    for (int i = 0; i < count; ++i) {
        const double r = r0 + h * i;
        const double w = (i == 0 || i == count - 1) ? 0.5 * h : h;
        grid.r_nodes[i] = r;
        grid.dr_weights[i] = w;
        grid.r_weights[i] = w * pow_int(std::sinh(r), geom.n - 1);
    }
    return grid;
}

SpectralGrid SpectralGrid::uniform(double lambda_max, int count) {
    if (!(lambda_max > 0.0) || count < 16)
        throw GridError("SpectralGrid::uniform: need lambda_max > 0 and >= 16 nodes");
    SpectralGrid grid{{}, {}, lambda_max};
    grid.lambda_nodes.resize(count);
    grid.lambda_weights.resize(count);
    const double h = lambda_max / (count - 1);
    // order-6 end-corrected trapezoid (exact through degree 5)
    static const double kEnd[5] = {95.0 / 288.0, 317.0 / 240.0, 23.0 / 30.0,
                                   793.0 / 720.0, 157.0 / 160.0};
    for (int j = 0; j < count; ++j) {
        grid.lambda_nodes[j] = h * j;
        double c = 1.0;
        if (j < 5) c = kEnd[j];
        if (count - 1 - j < 5) c = kEnd[count - 1 - j];
        // doubled: integrands are even and the analysis integrates over all of R
        grid.lambda_weights[j] = 2.0 * h * c;
    }
    grid.lambda_nodes.back() = lambda_max;
    return grid;
}

double SpectralGrid::spacing() const {
    if (lambda_nodes.size() < 2) throw GridError("SpectralGrid::spacing: too few nodes");
    return lambda_nodes[1] - lambda_nodes[0];
}

TransformPlan::TransformPlan(GeometryParams geom, RadialGrid rgrid, SpectralGrid sgrid)
    : geom_(geom), rgrid_(std::move(rgrid)), sgrid_(std::move(sgrid)), density_(geom),
      sphere_area_(unit_sphere_area(geom.n)) {
    check_shapes();
    const int nr = rgrid_.size();
    const int nl = sgrid_.size();
    phi_.assign(static_cast<std::size_t>(nr) * nl, 0.0);
    const double l0 = sgrid_.lambda_nodes.front();
    const double dl = sgrid_.spacing();
    SphericalEvaluator phi(geom_);
    parallel_for(nr, [&](int i) {
        auto row = phi.row(rgrid_.r_nodes[i], l0, dl, nl);
        std::copy(row.begin(), row.end(), phi_.begin() + static_cast<std::size_t>(i) * nl);
    });
    density_at_nodes_.resize(nl);
    for (int j = 0; j < nl; ++j) density_at_nodes_[j] = density_(sgrid_.lambda_nodes[j]);
}

TransformPlan::TransformPlan(GeometryParams geom, RadialGrid rgrid, SpectralGrid sgrid,
                             std::vector<double> phi_matrix)
    : geom_(geom), rgrid_(std::move(rgrid)), sgrid_(std::move(sgrid)), density_(geom),
      phi_(std::move(phi_matrix)), sphere_area_(unit_sphere_area(geom.n)) {
    check_shapes();
    if (phi_.size() != static_cast<std::size_t>(rgrid_.size()) * sgrid_.size())
        throw GridError("TransformPlan: phi matrix size mismatch");
    const int nl = sgrid_.size();
    density_at_nodes_.resize(nl);
    for (int j = 0; j < nl; ++j) density_at_nodes_[j] = density_(sgrid_.lambda_nodes[j]);
}

void TransformPlan::check_shapes() const {
    if (rgrid_.size() < 2 || sgrid_.size() < 2)
        throw GridError("TransformPlan: degenerate grids");
    if (rgrid_.geom.n != geom_.n) throw GridError("TransformPlan: grid geometry mismatch");
    const double dl = sgrid_.spacing();
    for (int j = 1; j < sgrid_.size(); ++j) {
        const double step = sgrid_.lambda_nodes[j] - sgrid_.lambda_nodes[j - 1];
        if (std::fabs(step - dl) > 1e-9 * dl)
            throw GridError("TransformPlan: spectral grid must be uniform");
    }
}

SpectralFunction TransformPlan::forward(const RadialFunction& f,
                                        std::vector<std::string>* warnings) const {
    const int nr = rgrid_.size();
    const int nl = sgrid_.size();
    if (static_cast<int>(f.values.size()) != nr)
        throw GridError("TransformPlan::forward: radial sample count mismatch");
    double peak = 0.0;
    for (const auto& v : f.values) peak = std::max(peak, std::abs(v));
    if (warnings && peak > 0.0 && std::abs(f.values.back()) > 1e-12 * peak) {
        std::ostringstream msg;
        msg << "radial truncation: |f| at r_max is " << std::scientific
            << std::abs(f.values.back()) / peak << " of peak";
        warnings->push_back(msg.str());
    }
    SpectralFunction out;
    out.values.assign(nl, {0.0, 0.0});
    for (int i = 0; i < nr; ++i) {
        const std::complex<double> a = f.values[i] * (sphere_area_ * rgrid_.r_weights[i]);
        const double* row = phi_.data() + static_cast<std::size_t>(i) * nl;
        for (int j = 0; j < nl; ++j) out.values[j] += a * row[j];
    }
    return out;
}

RadialFunction TransformPlan::inverse(const SpectralFunction& fhat,
                                      std::vector<std::string>* warnings) const {
    const int nr = rgrid_.size();
    const int nl = sgrid_.size();
    if (static_cast<int>(fhat.values.size()) != nl)
        throw GridError("TransformPlan::inverse: spectral sample count mismatch");
    double peak = 0.0;
    for (int j = 0; j < nl; ++j)
        peak = std::max(peak, std::abs(fhat.values[j]) * density_at_nodes_[j]);
    if (warnings && peak > 0.0 &&
        std::abs(fhat.values.back()) * density_at_nodes_.back() > 1e-12 * peak) {
        std::ostringstream msg;
        msg << "spectral truncation: |fhat| x density at lambda_max is " << std::scientific
            << std::abs(fhat.values.back()) * density_at_nodes_.back() / peak << " of peak";
        warnings->push_back(msg.str());
    }
    RadialFunction out;
    out.values.assign(nr, {0.0, 0.0});
    std::vector<std::complex<double>> g(nl);
    for (int j = 0; j < nl; ++j)
        g[j] = fhat.values[j] * (density_at_nodes_[j] * sgrid_.lambda_weights[j] * calibration_);
    for (int i = 0; i < nr; ++i) {
        const double* row = phi_.data() + static_cast<std::size_t>(i) * nl;
        std::complex<double> acc{0.0, 0.0};
        for (int j = 0; j < nl; ++j) acc += g[j] * row[j];
        out.values[i] = acc;
    }
    return out;
}

double TransformPlan::round_trip_error(const RadialFunction& f) const {
    const RadialFunction rt = inverse(forward(f));
    double sup = 0.0, ref = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        sup = std::max(sup, std::abs(rt.values[i] - f.values[i]));
        ref = std::max(ref, std::abs(f.values[i]));
    }
    if (ref == 0.0) return sup;
    return sup / ref;
}

double TransformPlan::volume_norm2(const RadialFunction& f) const {
    if (static_cast<int>(f.values.size()) != rgrid_.size())
        throw GridError("TransformPlan::volume_norm2: sample count mismatch");
    double acc = 0.0;
    for (int i = 0; i < rgrid_.size(); ++i)
        acc += std::norm(f.values[i]) * rgrid_.r_weights[i];
    return sphere_area_ * acc;
}

double TransformPlan::spectral_norm2(const SpectralFunction& f) const {
    if (static_cast<int>(f.values.size()) != sgrid_.size())
        throw GridError("TransformPlan::spectral_norm2: sample count mismatch");
    double acc = 0.0;
    for (int j = 0; j < sgrid_.size(); ++j)
        acc += std::norm(f.values[j]) * density_at_nodes_[j] * sgrid_.lambda_weights[j];
    return calibration_ * acc;
}

double TransformPlan::plancherel_gap(const RadialFunction& f) const {
    const double lhs = volume_norm2(f);
    const double rhs = spectral_norm2(forward(f));
    if (lhs == 0.0) return std::fabs(rhs);
    return std::fabs(lhs - rhs) / lhs;
}

void TransformPlan::calibrate(double probe_width) {
    if (!(probe_width > 0.0)) throw CalibrationError("calibrate: probe width must be positive");
    const RadialFunction bump = reference_bump(rgrid_, probe_width);
    const RadialFunction g = inverse(forward(bump));
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < g.values.size(); ++i) {
        num += (g.values[i] * std::conj(bump.values[i])).real();
        den += std::norm(g.values[i]);
    }
    if (!(den > 0.0)) throw CalibrationError("calibrate: degenerate round trip");
    const double m = num / den;
    if (!(m > 0.0) || !std::isfinite(m))
        throw CalibrationError("calibrate: non-positive calibration factor");
    calibration_ *= m;
    const double resid = round_trip_error(bump);
    if (!(resid < 1e-6)) {
        std::ostringstream msg;
        msg << "calibrate: round-trip residual " << std::scientific << resid
            << " exceeds 1e-6";
        calibrated_ = false;
        throw CalibrationError(msg.str());
    }
    calibrated_ = true;
}

RadialFunction reference_bump(const RadialGrid& grid, double width) {
    RadialFunction f;
    f.values.reserve(grid.r_nodes.size());
    for (double r : grid.r_nodes) {
        const double x = r / width;
        f.values.push_back({std::exp(-x * x), 0.0});
    }
    return f;
}

RadialFunction laplace_beltrami_radial(const RadialFunction& f, const RadialGrid& grid) {
    const int nr = grid.size();
    if (nr < 4) throw GridError("laplace_beltrami_radial: need at least 4 nodes");
    if (static_cast<int>(f.values.size()) != nr)
        throw GridError("laplace_beltrami_radial: sample count mismatch");
    RadialFunction out;
    out.values.assign(nr, {0.0, 0.0});
    for (int i = 0; i < nr; ++i) {
        const int i0 = std::clamp(i - 1, 0, nr - 3);
        const std::vector<double> pts{grid.r_nodes[i0], grid.r_nodes[i0 + 1],
                                      grid.r_nodes[i0 + 2]};
        const auto w1 = fornberg_weights(grid.r_nodes[i], pts, 1);
        const auto w2 = fornberg_weights(grid.r_nodes[i], pts, 2);
        const double c = (grid.geom.n - 1) / std::tanh(grid.r_nodes[i]);
        std::complex<double> acc{0.0, 0.0};
        for (int k = 0; k < 3; ++k)
            acc += (w2[k] + c * w1[k]) * f.values[i0 + k];
        out.values[i] = acc;
    }
    return out;
}

} // namespace hypdisp
