#pragma once

#include <vector>

#include "hypdisp/geometry.hpp"

namespace hypdisp {

// Radial eigenfunction phi_lambda(r) of the hyperbolic Laplacian, normalized to
// phi_lambda(0) = 1, evaluated from its interval representation
//   phi_lambda(r) = (1/N_n) int_0^pi (cosh r - sinh r cos th)^(-i lambda - rho) sin^(n-2)th dth,
// N_n = int_0^pi sin^(n-2)th dth. Real and even in lambda; |phi_lambda| <= phi_0.
//
// Quadrature: Gauss-Legendre in theta, node count doubled until two successive
// results agree to `tol`, capped at `max_nodes`. The oscillation rate in theta
// is bounded by |lambda| * r, so converged rules stay accurate for all smaller
// |lambda| at the same r; row() exploits that with a single rule per radius.
class SphericalEvaluator {
  public:
    explicit SphericalEvaluator(GeometryParams geom, double tol = 1e-12,
                                int max_nodes = 1 << 14);

    double operator()(double lambda, double r) const;

    // phi over the uniform grid lambda_j = lambda0 + j*dlambda at fixed r,
    // one theta rule sized at the largest |lambda_j|
    std::vector<double> row(double r, double lambda0, double dlambda, int count) const;

    // a reusable rule converged at lambda_cap: phi_lambda(r) = sum a_k cos(lambda m_k)
    // for every |lambda| <= lambda_cap at the fixed radius
    struct FrozenRule {
        std::vector<double> m, a;
    };
    FrozenRule frozen_rule(double r, double lambda_cap) const;
    static double eval_frozen(const FrozenRule& rule, double lambda);

    double phi0(double r) const { return (*this)(0.0, r); }

    const GeometryParams& geometry() const { return geom_; }

  private:
    struct ThetaRule {
        std::vector<double> m; // log(cosh r - sinh r cos theta_k), in [-r, r]
        std::vector<double> a; // positive weights, sum = phi_0(r)
    };

    ThetaRule theta_rule(double r, int nodes) const;
    double eval_rule(const ThetaRule& rule, double lambda) const;
    // converged rule size for (lambda, r); phi value returned through out
    int converged_nodes(double lambda, double r, double& out) const;

    GeometryParams geom_;
    double tol_;
    int max_nodes_;
    double norm_; // N_n
};

} // namespace hypdisp
