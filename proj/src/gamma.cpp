#include "hypdisp/gamma.hpp"

#include <cmath>

#include "hypdisp/errors.hpp"

namespace hypdisp {

namespace {

using cplx = std::complex<double>;

// Lanczos g = 607/128, 15 terms (Godfrey's coefficients); relative error
// ~1e-15 over the half-plane Re z >= 1/2
constexpr double kLanczosG = 607.0 / 128.0;
constexpr double kLanczosC[15] = {
    0.99999999999999709182,     57.156235665862923517,     -59.597960355475491248,
    14.136097974741747174,      -0.49191381609762019978,   3.3994649984811888699e-5,
    4.6523628927048575665e-5,   -9.8374475304879564677e-5, 1.5808870322491248884e-4,
    -2.1026444172410488319e-4,  2.1743961811521264320e-4,  -1.6431810653676389022e-4,
    8.4418223983852743293e-5,   -2.6190838401581408670e-5, 3.6899182659531622704e-6};

const double kHalfLog2Pi = 0.5 * std::log(2.0 * M_PI);

// valid for Re z >= 1/2
cplx log_gamma_core(cplx z) {
    cplx sum = kLanczosC[0];
    for (int k = 1; k < 15; ++k) sum += kLanczosC[k] / (z - 1.0 + static_cast<double>(k));
    cplx base = z + (kLanczosG - 0.5);
    return kHalfLog2Pi + std::log(sum) + (z - 0.5) * std::log(base) - base;
}

// log sin(pi z) without overflow for large |Im z|
cplx log_sin_pi(cplx z) {
    if (z.imag() < 0.0) return std::conj(log_sin_pi(std::conj(z)));
    if (z.imag() > 1.0) {
        // sin(pi z) = (i/2) exp(-i pi z) (1 - exp(2 i pi z)), |exp(2 i pi z)| < 1
        const cplx ipz = cplx(0.0, M_PI) * z;
        return -ipz + std::log(1.0 - std::exp(2.0 * ipz)) + cplx(-std::log(2.0), 0.5 * M_PI);
    }
    return std::log(std::sin(M_PI * z));
}

bool is_nonpositive_integer(cplx z) {
    return z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real());
}

} // namespace

std::complex<double> log_gamma(std::complex<double> z) {
    if (is_nonpositive_integer(z)) throw DomainError("log_gamma: pole at nonpositive integer");
    if (z.real() >= 0.5) return log_gamma_core(z);
    // reflection: Gamma(z) Gamma(1-z) = pi / sin(pi z)
    return std::log(cplx(M_PI, 0.0)) - log_sin_pi(z) - log_gamma_core(1.0 - z);
}

std::complex<double> gamma_complex(std::complex<double> z) {
    return std::exp(log_gamma(z));
}

double log_abs_gamma(std::complex<double> z) {
    return log_gamma(z).real();
}

double beta_real(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) throw DomainError("beta_real: arguments must be positive");
    return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
}

} // namespace hypdisp
