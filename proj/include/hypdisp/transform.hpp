#pragma once

#include <complex>
#include <string>
#include <vector>

#include "hypdisp/grids.hpp"
#include "hypdisp/plancherel.hpp"

namespace hypdisp {

// Samples of a radial function at the nodes of a RadialGrid. Values stay
// complex because group evolutions produce complex intermediates; physically
// meaningful profiles are real.
struct RadialFunction {
    std::vector<std::complex<double>> values;
};

// Samples of a spectral function at the nodes of a SpectralGrid.
struct SpectralFunction {
    std::vector<std::complex<double>> values;
};

// Dense spherical-transform plan: phi_matrix[i*nl + j] = phi_{lambda_j}(r_i).
// forward:  fhat_j = |S^(n-1)| sum_i f_i phi_ij w_i
// inverse:  f_i = calibration * sum_j fhat_j phi_ij density_j wl_j
// The analytic inversion constant is absorbed into `inverse_calibration`,
// fitted once by calibrate() on the reference bump e^(-r^2). Immutable after
// calibration; forward/inverse are pure and safe to share across threads.
class TransformPlan {
  public:
    TransformPlan(GeometryParams geom, RadialGrid rgrid, SpectralGrid sgrid);
    // prebuilt matrix variant (row-major, size rgrid.size()*sgrid.size())
    TransformPlan(GeometryParams geom, RadialGrid rgrid, SpectralGrid sgrid,
                  std::vector<double> phi_matrix);

    // fits inverse_calibration on the reference bump; throws CalibrationError
    // if the calibrated round trip exceeds 1e-6 sup-relative error. A wider
    // probe suits plans whose spectral grid stops below the width-1 content.
    void calibrate(double probe_width = 1.0);
    bool calibrated() const { return calibrated_; }
    double inverse_calibration() const { return calibration_; }

    SpectralFunction forward(const RadialFunction& f,
                             std::vector<std::string>* warnings = nullptr) const;
    RadialFunction inverse(const SpectralFunction& fhat,
                           std::vector<std::string>* warnings = nullptr) const;

    // sup |roundtrip - f| / sup |f|
    double round_trip_error(const RadialFunction& f) const;

    double volume_norm2(const RadialFunction& f) const;     // squared L^2 norm
    double spectral_norm2(const SpectralFunction& f) const; // calibrated spectral side
    // |volume_norm2 - spectral_norm2| / volume_norm2
    double plancherel_gap(const RadialFunction& f) const;

    const GeometryParams& geometry() const { return geom_; }
    const RadialGrid& radial() const { return rgrid_; }
    const SpectralGrid& spectral() const { return sgrid_; }
    const std::vector<double>& phi_matrix() const { return phi_; }
    const PlancherelDensity& density() const { return density_; }

  private:
    void check_shapes() const;

    GeometryParams geom_;
    RadialGrid rgrid_;
    SpectralGrid sgrid_;
    PlancherelDensity density_;
    std::vector<double> phi_;
    std::vector<double> density_at_nodes_;
    double calibration_ = 1.0;
    bool calibrated_ = false;
    double sphere_area_;
};

// reference bump e^(-(r/width)^2) used by calibration and self-tests
RadialFunction reference_bump(const RadialGrid& grid, double width = 1.0);

// radial Laplace-Beltrami d^2/dr^2 + (n-1) coth(r) d/dr by 3-point finite
// differences (centered interior, one-sided endpoints); needs >= 4 nodes
RadialFunction laplace_beltrami_radial(const RadialFunction& f, const RadialGrid& grid);

} // namespace hypdisp
