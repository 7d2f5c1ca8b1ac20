#pragma once

#include <complex>

namespace hypdisp {

// log Gamma(z), principal-expansion Lanczos sum with reflection for Re z < 1/2.
// exp(log_gamma(z)) is exactly Gamma(z); the imaginary part may differ from the
// principal branch by multiples of 2*pi across the reflection seam.
std::complex<double> log_gamma(std::complex<double> z);

// Gamma(z); throws DomainError at nonpositive integers
std::complex<double> gamma_complex(std::complex<double> z);

// log |Gamma(z)| (branch-free)
double log_abs_gamma(std::complex<double> z);

// Euler Beta B(a, b) for a, b > 0
double beta_real(double a, double b);

} // namespace hypdisp
