#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "hypdisp/errors.hpp"

namespace hypdisp {

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0; // of log|y| against log x
    double max_residual = 0.0;
};

// least-squares slope of log y against log x; x, y must be positive
inline SlopeFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw DomainError("fit_loglog: need >= 2 matching samples");
    const std::size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::vector<double> lx(n), ly(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0))
            throw DomainError("fit_loglog: nonpositive sample");
        lx[i] = std::log(x[i]);
        ly[i] = std::log(y[i]);
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
    }
    const double nn = static_cast<double>(n);
    const double denom = nn * sxx - sx * sx;
    if (denom == 0.0) throw DomainError("fit_loglog: degenerate abscissae");
    SlopeFit fit;
    fit.slope = (nn * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / nn;
    for (std::size_t i = 0; i < n; ++i) {
        double r = std::fabs(ly[i] - (fit.intercept + fit.slope * lx[i]));
        if (r > fit.max_residual) fit.max_residual = r;
    }
    return fit;
}

} // namespace hypdisp
