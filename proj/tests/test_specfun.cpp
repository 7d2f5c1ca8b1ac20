#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "hypdisp/errors.hpp"
#include "hypdisp/geometry.hpp"
#include "hypdisp/plancherel.hpp"
#include "hypdisp/slope.hpp"
#include "hypdisp/spherical.hpp"

using hypdisp::GeometryParams;
using hypdisp::PlancherelDensity;
using hypdisp::SphericalEvaluator;

namespace {

// closed form on the 3-dimensional space, the independent reference
double phi3_exact(double lambda, double r) {
    double x = lambda * r;
    double sinc = std::fabs(x) < 1e-6 ? 1.0 - x * x / 6.0 : std::sin(x) / x;
    return r == 0.0 ? 1.0 : sinc * (r / std::sinh(r));
}

} // namespace

TEST_CASE("density is exactly quadratic in dimension 3") {
    PlancherelDensity dens(GeometryParams(3));
    double base = dens(1.0);
    for (double l : {0.25, 0.5, 2.0, 7.5, 33.0, 128.0, 500.0}) {
        CHECK(std::fabs(dens(l) - base * l * l) < 1e-10 * base * l * l);
    }
}

TEST_CASE("density matches lambda tanh(pi lambda) in dimension 2") {
    PlancherelDensity dens(GeometryParams(2));
    for (double l : {0.05, 0.3, 1.0, 3.0, 10.0, 40.0}) {
        double want = l * std::tanh(M_PI * l);
        CHECK(std::fabs(dens(l) - want) < 1e-12 * want);
    }
}

TEST_CASE("density vanishes at the origin with the analytic limit") {
    for (int n : {2, 3, 4, 5, 6}) {
        PlancherelDensity dens((GeometryParams(n)));
        CHECK(dens(0.0) == 0.0);
        double g2 = std::exp(2.0 * std::lgamma(GeometryParams(n).rho));
        double l = 1e-9;
        CHECK(dens(l) == doctest::Approx(g2 * l * l).epsilon(1e-8));
        CHECK(dens(-3.7) == dens(3.7)); // even
    }
}

TEST_CASE("density growth exponent is 2 rho at high frequency") {
    for (int n : {2, 3, 4, 5}) {
        GeometryParams geom(n);
        PlancherelDensity dens(geom);
        std::vector<double> ls, vals;
        for (int k = 0; k < 16; ++k) {
            double l = 50.0 * std::pow(10.0, k / 15.0);
            ls.push_back(l);
            vals.push_back(dens(l));
        }
        auto fit = hypdisp::fit_loglog(ls, vals);
        CHECK(std::fabs(fit.slope - 2.0 * geom.rho) < 0.05);
    }
}

TEST_CASE("normalized inverse c-function grows like rho - 1") {
    // |lambda^-1 c(lambda)^-1| = sqrt(density)/lambda up to the calibration constant
    for (int n : {2, 3, 4, 5}) {
        GeometryParams geom(n);
        PlancherelDensity dens(geom);
        std::vector<double> ls, vals;
        for (int k = 0; k < 16; ++k) {
            double l = 50.0 * std::pow(10.0, k / 15.0);
            ls.push_back(l);
            vals.push_back(std::sqrt(dens(l)) / l);
        }
        auto fit = hypdisp::fit_loglog(ls, vals);
        CHECK(std::fabs(fit.slope - (geom.rho - 1.0)) < 0.05);
    }
}

TEST_CASE("spherical function matches the closed form in dimension 3") {
    SphericalEvaluator phi((GeometryParams(3)));
    for (int i = 0; i < 12; ++i) {
        for (int j = 0; j < 12; ++j) {
            double l = 0.1 + (20.0 - 0.1) * i / 11.0;
            double r = 0.05 + (10.0 - 0.05) * j / 11.0;
            CHECK(std::fabs(phi(l, r) - phi3_exact(l, r)) < 1e-8);
        }
    }
}

TEST_CASE("spherical function is 1 at the origin and even in lambda") {
    for (int n : {2, 3, 4, 6}) {
        SphericalEvaluator phi((GeometryParams(n)));
        CHECK(phi(0.0, 0.0) == 1.0);
        CHECK(phi(17.3, 0.0) == 1.0);
        CHECK(phi(2.5, 1.7) == phi(-2.5, 1.7));
    }
}

TEST_CASE("phi_0 dominates pointwise") {
    for (int n : {2, 3, 4}) {
        SphericalEvaluator phi((GeometryParams(n)));
        for (double r : {0.2, 1.0, 3.0, 8.0, 15.0}) {
            double cap = phi.phi0(r) * (1.0 + 1e-9) + 1e-14;
            for (double l : {0.3, 1.0, 4.0, 11.0, 29.0}) {
                CHECK(std::fabs(phi(l, r)) <= cap);
            }
        }
    }
}

TEST_CASE("exponential envelope e^(rho r) phi stays bounded out to r = 30") {
    for (int n : {2, 3, 4}) {
        GeometryParams geom(n);
        SphericalEvaluator phi(geom);
        for (double l : {0.5, 1.0, 5.0}) {
            double worst = 0.0;
            for (double r = 1.0; r <= 30.0; r += 1.0) {
                double v = std::fabs(phi(l, r)) * std::exp(geom.rho * r);
                CHECK(std::isfinite(v));
                worst = std::max(worst, v);
            }
            CHECK(worst < 100.0);
        }
    }
}

TEST_CASE("row evaluation agrees with pointwise evaluation") {
    for (int n : {2, 3, 5}) {
        SphericalEvaluator phi((GeometryParams(n)));
        const double l0 = 0.0, dl = 0.37;
        const int count = 25;
        for (double r : {0.01, 0.9, 6.0, 19.0}) {
            auto row = phi.row(r, l0, dl, count);
            for (int j = 0; j < count; j += 6) {
                CHECK(std::fabs(row[j] - phi(l0 + dl * j, r)) < 1e-10);
            }
        }
    }
}

TEST_CASE("radial eigenfunction equation holds on a fine uniform grid") {
    // phi'' + (n-1) coth(r) phi' + (lambda^2 + rho^2) phi = 0, checked with
    // 5-point stencils independent of any library differentiation code
    for (int n : {2, 3, 4}) {
        GeometryParams geom(n);
        SphericalEvaluator phi(geom, 1e-13);
        const double lambda = 1.3;
        const double ev = lambda * lambda + geom.rho * geom.rho;
        const double h = 0.01;
        for (double r : {0.8, 2.5, 6.0}) {
            double f[5];
            for (int k = -2; k <= 2; ++k) f[k + 2] = phi(lambda, r + k * h);
            double d2 = (-f[0] + 16 * f[1] - 30 * f[2] + 16 * f[3] - f[4]) / (12 * h * h);
            double d1 = (f[0] - 8 * f[1] + 8 * f[3] - f[4]) / (12 * h);
            double res = d2 + (n - 1) / std::tanh(r) * d1 + ev * f[2];
            CHECK(std::fabs(res) < 1e-5 * std::max(1.0, std::fabs(ev * f[2])));
        }
    }
}

TEST_CASE("unconverged quadrature is reported, not returned") {
    SphericalEvaluator tight(GeometryParams(3), 1e-12, 1024);
    CHECK_THROWS_AS((void)tight(500.0, 30.0), hypdisp::QuadratureError);
}
