#pragma once

#include "hypdisp/geometry.hpp"

namespace hypdisp {

// Spectral density |c(lambda)|^-2 up to the calibration constant:
//   density(lambda) = calibration * |Gamma(rho + i lambda)|^2 * lambda * sinh(pi lambda) / pi,
// which equals calibration * |Gamma(i lambda + rho)|^2 / |Gamma(i lambda)|^2 with the
// lambda = 0 limit (value 0) built in instead of a 0/0 evaluation.
// Even in lambda; grows like lambda^(2 rho) at infinity.
class PlancherelDensity {
  public:
    explicit PlancherelDensity(GeometryParams geom, double calibration = 1.0);

    double operator()(double lambda) const;
    double log_value(double lambda) const; // requires lambda != 0

    const GeometryParams& geometry() const { return geom_; }
    double calibration() const { return calibration_; }

  private:
    GeometryParams geom_;
    double calibration_;
    double log_gamma_rho_sq_; // 2 log Gamma(rho)
};

} // namespace hypdisp
