#pragma once

#include <cstddef>
#include <vector>

namespace hypdisp {

// nodes/weights on [-1, 1]
struct QuadRule {
    std::vector<double> x;
    std::vector<double> w;
};

// Cached Gauss-Legendre rule. Thread-safe; rules are computed once per n.
const QuadRule& gauss_legendre(int n);

// 15-point Kronrod extension of the 7-point Gauss rule (standard constants).
// kronrod_w pairs with x; gauss_w is nonzero only on the embedded Gauss nodes.
struct GaussKronrod15 {
    static const double x[15];
    static const double kronrod_w[15];
    static const double gauss_w[15];
};

// Finite-difference weights for derivative of order m at x0 over the given
// nodes (Fornberg's recursion). Returns weights for all orders 0..m; row m.
std::vector<double> fornberg_weights(double x0, const std::vector<double>& nodes, int m);

} // namespace hypdisp
