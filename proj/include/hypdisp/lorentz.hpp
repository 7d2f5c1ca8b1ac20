#pragma once

#include <vector>

#include "hypdisp/grids.hpp"
#include "hypdisp/transform.hpp"

namespace hypdisp {

// Lorentz exponent pair (p, d); p in (1, inf], d in [1, inf].
// Infinities are honest std::numeric_limits infinities.
struct LorentzParams {
    double p;
    double d;

    LorentzParams(double p_, double d_);
    double conjugate() const; // p' = p/(p-1), 1 when p = inf
    bool d_finite() const;
};

enum class NormMethod { monotone_formula, rearrangement, lq_formula };

struct NormResult {
    double value = 0.0;
    NormMethod method = NormMethod::lq_formula;
    bool divergent = false;      // tail integrand still growing at r_max
    bool low_resolution = false; // distribution function has < 64 distinct levels
};

// Two-piece L^q surrogate: (int_0^1 |f|^q r^(n-1) dr)^(1/q)
//                        + (int_1^rmax |f|^q e^((n-1)r) dr)^(1/q);
// q = inf gives the sup. Equivalent to the polar-coordinate L^q norm up to
// dimensional constants (near the origin sinh ~ r, past r = 1 sinh ~ e^r/2).
NormResult lq_norm_radial(const RadialFunction& f, const RadialGrid& grid, double q);

// Two-piece Lorentz surrogate for nonnegative non-increasing profiles:
//   d < inf: (int_0^1 f^d r^(dn/p-1) dr)^(1/d) + (int_1^rmax f^d e^(d(n-1)r/p) dr)^(1/d)
//   d = inf: sup_(0,1) r^(n/p) f + sup_[1,rmax) e^((n-1)r/p) f
// Throws DomainError when f is not nonnegative non-increasing; use the
// rearrangement path for general profiles.
NormResult lorentz_norm_monotone(const RadialFunction& f, const RadialGrid& grid,
                                 const LorentzParams& lp);

// Classical Lorentz quasi-norm through the decreasing rearrangement of |f|
// with respect to the volume measure carried by the grid:
//   (int_0^inf (t^(1/p) f*(t))^d dt/t)^(1/d), sup form for d = inf.
// Works for arbitrary sign-changing complex samples.
NormResult lorentz_norm_rearranged(const RadialFunction& f, const RadialGrid& grid,
                                   const LorentzParams& lp);

struct HolderReport {
    double lhs = 0.0;  // ||fg|| in the product space
    double rhs = 0.0;  // ||f|| ||g||
    double ratio = 0.0;
    double p3 = 0.0;
    double d3 = 0.0;
};

// Holder pairing in Lorentz scale: 1/p3 = 1/p1 + 1/p2 (requires p3 > 1),
// 1/d3 = min(1, 1/d1 + 1/d2). Norms via the rearrangement path.
HolderReport holder_check(const RadialFunction& f, const RadialFunction& g,
                          const RadialGrid& grid, const LorentzParams& a,
                          const LorentzParams& b);

} // namespace hypdisp
