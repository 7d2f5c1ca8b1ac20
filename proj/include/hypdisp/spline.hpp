#pragma once

#include <cstddef>
#include <vector>

#include "hypdisp/errors.hpp"

namespace hypdisp {

// Natural cubic spline on a uniform grid x_i = x0 + i*dx.
// Value type T is double or std::complex<double>.
template <class T>
class UniformSpline {
  public:
    UniformSpline() = default;

    UniformSpline(double x0, double dx, std::vector<T> y) : x0_(x0), dx_(dx), y_(std::move(y)) {
        const std::size_t n = y_.size();
        if (n < 3 || !(dx > 0.0)) throw GridError("UniformSpline: need >= 3 uniform nodes");
        // second derivatives m_i from the natural-spline tridiagonal system
        m_.assign(n, T{});
        std::vector<double> diag(n, 0.0);
        std::vector<T> rhs(n, T{});
        std::vector<double> upper(n, 0.0);
        diag[0] = 1.0;
        for (std::size_t i = 1; i + 1 < n; ++i) {
            diag[i] = 4.0;
            upper[i] = 1.0;
            rhs[i] = (y_[i + 1] - 2.0 * y_[i] + y_[i - 1]) * (6.0 / (dx_ * dx_));
        }
        diag[n - 1] = 1.0;
        // Thomas sweep (lower coefficients are 1 on interior rows)
        for (std::size_t i = 2; i + 1 < n; ++i) {
            double w = 1.0 / diag[i - 1];
            diag[i] -= w * upper[i - 1];
            rhs[i] = rhs[i] - rhs[i - 1] * w;
        }
        for (std::size_t ii = n - 1; ii-- > 1;) {
            m_[ii] = (rhs[ii] - m_[ii + 1] * upper[ii]) * (1.0 / diag[ii]);
        }
    }

    T operator()(double x) const {
        const std::size_t n = y_.size();
        double s = (x - x0_) / dx_;
        std::ptrdiff_t i = static_cast<std::ptrdiff_t>(s);
        if (i < 0) i = 0;
        if (i > static_cast<std::ptrdiff_t>(n) - 2) i = static_cast<std::ptrdiff_t>(n) - 2;
        const double a = s - static_cast<double>(i); // in [0,1] inside the table
        const double b = 1.0 - a;
        const double h2 = dx_ * dx_ / 6.0;
        return b * y_[i] + a * y_[i + 1] +
               ((b * b * b - b) * m_[i] + (a * a * a - a) * m_[i + 1]) * h2;
    }

    double x_min() const { return x0_; }
    double x_max() const { return x0_ + dx_ * (static_cast<double>(y_.size()) - 1.0); }

  private:
    double x0_ = 0.0, dx_ = 1.0;
    std::vector<T> y_;
    std::vector<T> m_;
};

} // namespace hypdisp
