#include "hypdisp/plancherel.hpp"

#include <cmath>
#include <complex>

#include "hypdisp/gamma.hpp"

namespace hypdisp {

PlancherelDensity::PlancherelDensity(GeometryParams geom, double calibration)
    : geom_(geom), calibration_(calibration), log_gamma_rho_sq_(2.0 * std::lgamma(geom.rho)) {}

double PlancherelDensity::log_value(double lambda) const {
    const double al = std::fabs(lambda);
    // log sinh(pi l) = pi l + log1p(-exp(-2 pi l)) - log 2, overflow-free
    const double log_sinh = M_PI * al + std::log1p(-std::exp(-2.0 * M_PI * al)) - std::log(2.0);
    const double lg = 2.0 * log_abs_gamma(std::complex<double>(geom_.rho, al));
    return std::log(calibration_) + lg + std::log(al) + log_sinh - std::log(M_PI);
}

double PlancherelDensity::operator()(double lambda) const {
    const double al = std::fabs(lambda);
    if (al == 0.0) return 0.0;
    if (al < 1e-8) {
        // analytic limit: calibration * Gamma(rho)^2 * lambda^2
        return calibration_ * std::exp(log_gamma_rho_sq_) * al * al;
    }
    return std::exp(log_value(al));
}

} // namespace hypdisp
