#pragma once

#include <vector>

#include "hypdisp/geometry.hpp"

namespace hypdisp {

// Smooth compactly supported amplitude (1-x^2)^5 rescaled to
// [center - halfwidth, center + halfwidth]; derivatives up to order 3 in
// closed form (the bound checks integrate |m^(j)|).
struct BumpAmplitude {
    double center = 1.25;
    double halfwidth = 0.75;
    double amplitude = 1.0;

    double value(double lambda) const;
    double deriv(int j, double lambda) const; // j in [0,3]
    double lo() const { return center - halfwidth; }
    double hi() const { return center + halfwidth; }
};

struct OsciReport {
    double lhs = 0.0;   // |oscillatory integral|
    double rhs = 0.0;   // bound without the unknown constant
    double ratio = 0.0; // lhs / rhs, the fitted constant
    double D = 0.0;     // min |t dpsi| + r (non-stationary check only)
};

// van der Corput shape: |int e^{i(-t psi + sign r lambda)} m dlambda|
// against |t|^{-1/2} int |m'|; single bump on [lo, hi]
OsciReport vdc_bound_check(const GeometryParams& geom, const BumpAmplitude& m, double t,
                           double r, int sign = +1);

// worst case of vdc_bound_check over a t sweep
OsciReport vdc_bound_sweep(const GeometryParams& geom, const BumpAmplitude& m,
                           const std::vector<double>& t_values, double r, int sign = +1);

// non-stationary bound on the symmetric support [-hi,-lo] U [lo,hi]:
// |int e^{i(-t psi + sign r lambda)} m~| against (1+D)^{-k} sum_{j<=k} int |m~^(j)|,
// D = min|t dpsi| + r; requires the phase derivative to stay away from zero on
// the support (throws DomainError otherwise)
OsciReport nonstationary_bound_check(const GeometryParams& geom, const BumpAmplitude& m,
                                     double t, double r, int k, int sign = +1);

} // namespace hypdisp
