#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "hypdisp/phase.hpp"

using namespace hypdisp;

TEST_CASE("phase values at the origin") {
    // psi(0) = sqrt(rho^2 (rho^2 + 1))
    const Phase p3(GeometryParams{3});
    CHECK(p3.psi(0.0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(p3.dpsi(0.0) == 0.0);
    const Phase p2(GeometryParams{2});
    const double rho2 = 0.25;
    CHECK(p2.psi(0.0) == doctest::Approx(std::sqrt(rho2 * (rho2 + 1.0))).epsilon(1e-15));
    CHECK(p2.floor() == doctest::Approx(p2.psi(0.0)).epsilon(1e-15));
}

TEST_CASE("psi matches |xi| <xi> factorization") {
    for (int n : {2, 3, 4, 5}) {
        const Phase p(GeometryParams{n});
        for (double l : {0.0, 0.3, 1.0, 4.7, 33.0}) {
            const double xi = p.xi_norm(l);
            const double br = p.xi_bracket(l);
            CHECK(p.psi(l) == doctest::Approx(xi * br).epsilon(1e-14));
            CHECK(br * br - xi * xi == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("derivatives agree with central differences") {
    for (int n : {2, 3, 4}) {
        const Phase p(GeometryParams{n});
        for (double l : {-7.0, -0.9, 0.1, 1.0, 2.5, 12.0}) {
            const double h = 1e-5 * std::max(1.0, std::fabs(l));
            const double fd1 = (p.psi(l + h) - p.psi(l - h)) / (2.0 * h);
            const double fd2 = (p.psi(l + h) - 2.0 * p.psi(l) + p.psi(l - h)) / (h * h);
            CHECK(p.dpsi(l) == doctest::Approx(fd1).epsilon(1e-8));
            CHECK(p.d2psi(l) == doctest::Approx(fd2).epsilon(1e-4));
        }
    }
}

TEST_CASE("symmetry: psi even, dpsi odd") {
    const Phase p(GeometryParams{4});
    for (double l : {0.25, 1.5, 9.0}) {
        CHECK(p.psi(-l) == doctest::Approx(p.psi(l)).epsilon(1e-15));
        CHECK(p.dpsi(-l) == doctest::Approx(-p.dpsi(l)).epsilon(1e-15));
        CHECK(p.d2psi(-l) == doctest::Approx(p.d2psi(l)).epsilon(1e-15));
    }
}

TEST_CASE("uniform convexity: second derivative exceeds 1") {
    for (int n : {2, 3, 4, 5}) {
        const Phase p(GeometryParams{n});
        double worst = std::numeric_limits<double>::infinity();
        for (int i = 0; i <= 20000; ++i) {
            const double l = -100.0 + 200.0 * i / 20000.0;
            worst = std::min(worst, p.d2psi(l));
        }
        CHECK(worst > 1.0);
        // large-lambda limit is 2, origin value is (2 rho^2 + 1)/(rho sqrt(rho^2+1))
        const double rho = 0.5 * (n - 1);
        const double at0 = (2.0 * rho * rho + 1.0) / (rho * std::sqrt(rho * rho + 1.0));
        CHECK(p.d2psi(0.0) == doctest::Approx(at0).epsilon(1e-13));
        CHECK(p.d2psi(1e6) == doctest::Approx(2.0).epsilon(1e-9));
    }
}
