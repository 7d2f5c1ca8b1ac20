#pragma once

#include <cmath>

#include "hypdisp/geometry.hpp"

namespace hypdisp {

// Dispersion relation of the linearized flow: psi(lambda) = |xi|<xi> with
// |xi|^2 = lambda^2 + rho^2, <xi>^2 = 1 + |xi|^2. Writing T = lambda^2 + rho^2,
//   psi   = sqrt(T(T+1))
//   psi'  = (2T+1) lambda / sqrt(T(T+1))
//   psi'' = (2T^3 + 3T^2 + rho^2) / (T(T+1))^(3/2)
// psi'' > 1 everywhere: the stationary-phase analysis leans on that floor.
class Phase {
  public:
    explicit Phase(GeometryParams geom) : geom_(geom), rho2_(geom.rho * geom.rho) {}

    double T(double lambda) const { return lambda * lambda + rho2_; }
    double xi_norm(double lambda) const { return std::sqrt(T(lambda)); }
    double xi_bracket(double lambda) const { return std::sqrt(1.0 + T(lambda)); }

    double psi(double lambda) const {
        const double t = T(lambda);
        return std::sqrt(t * (t + 1.0));
    }
    double dpsi(double lambda) const {
        const double t = T(lambda);
        return (2.0 * t + 1.0) * lambda / std::sqrt(t * (t + 1.0));
    }
    double d2psi(double lambda) const {
        const double t = T(lambda);
        const double tt = t * (t + 1.0);
        return (2.0 * t * t * t + 3.0 * t * t + rho2_) / (tt * std::sqrt(tt));
    }

    // psi(lambda) >= psi(0) = sqrt(rho^2 (rho^2 + 1))
    double floor() const { return std::sqrt(rho2_ * (rho2_ + 1.0)); }

    const GeometryParams& geometry() const { return geom_; }

  private:
    GeometryParams geom_;
    double rho2_;
};

} // namespace hypdisp
