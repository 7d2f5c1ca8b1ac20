#pragma once

#include <vector>

#include "hypdisp/geometry.hpp"

namespace hypdisp {

// Radial quadrature grid on (0, r_max]. Weights carry the volume factor
// sinh^(n-1)(r), so sum_i w_i f(r_i) approximates the radial part of the
// volume integral of f.
struct RadialGrid {
    GeometryParams geom;
    std::vector<double> r_nodes;    // strictly increasing, in (0, r_max)
    std::vector<double> r_weights;  // positive, include sinh^(n-1)(r)
    std::vector<double> dr_weights; // the same rule without the volume factor
    double r_max;

    // Gauss-Legendre in a sinh-stretched parameter: r(u) = r_max sinh(s u)/sinh(s),
    // u in [0,1]. Clusters nodes at small r where radial profiles vary fastest.
    static RadialGrid gauss_sinh(const GeometryParams& geom, double r_max, int count,
                                 double stretch = 4.0);

    // uniform spacing on [r0, r1] with trapezoid weights (times the volume factor);
    // used by finite-difference checks that need constant spacing
    static RadialGrid uniform(const GeometryParams& geom, double r0, double r1, int count);

    int size() const { return static_cast<int>(r_nodes.size()); }
};

// Spectral grid on [0, lambda_max], uniform spacing. Weights are plain
// d-lambda weights doubled for evenness (the analysis integrates over all of R;
// even integrands reduce to twice the half-line). The uniform spacing is load
// bearing: downstream evaluation uses rotation recurrences in lambda.
struct SpectralGrid {
    std::vector<double> lambda_nodes;
    std::vector<double> lambda_weights;
    double lambda_max;

    // end-corrected trapezoid of order 6 (Gregory weights), count >= 16
    static SpectralGrid uniform(double lambda_max, int count);

    int size() const { return static_cast<int>(lambda_nodes.size()); }
    double spacing() const;
};

} // namespace hypdisp
