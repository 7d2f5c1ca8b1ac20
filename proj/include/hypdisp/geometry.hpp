#pragma once

#include <cmath>

#include "hypdisp/errors.hpp"

namespace hypdisp {

// Real hyperbolic space of dimension n >= 2; rho = (n-1)/2, so rho^2 >= 1/4.
struct GeometryParams {
    int n;
    double rho;

    explicit GeometryParams(int dim) : n(dim), rho(0.5 * (dim - 1)) {
        if (dim < 2) throw DomainError("GeometryParams: dimension must be >= 2");
    }
};

// |S^(n-1)| = 2 pi^(n/2) / Gamma(n/2)
inline double unit_sphere_area(int n) {
    return 2.0 * std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n);
}

} // namespace hypdisp
