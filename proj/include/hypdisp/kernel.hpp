#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "hypdisp/geometry.hpp"
#include "hypdisp/phase.hpp"
#include "hypdisp/plancherel.hpp"

namespace hypdisp {

// Equal-width Gauss-Kronrod panels over the truncated spectral axis, panel
// width chosen so |t dpsi + r| * width stays below phase_per_panel.
struct QuadratureBudget {
    long max_panels = 1L << 22;       // hard cap; exceeding it flags the result
    double tolerance = 1e-9;          // absolute target for the extrapolated kernel
    double phase_per_panel = M_PI / 4.0;
    bool estimate_error = true;       // second pass at doubled width
};

struct KernelRequest {
    GeometryParams geom;
    double t = 0.0;
    double r = 0.0;
    double epsilon = 0.1;
    QuadratureBudget quad{};
};

struct KernelResult {
    std::complex<double> value{0.0, 0.0};
    double est_error = 0.0;
    long panels_used = 0;
    bool converged = true; // false when the panel budget forced wider panels
};

// smallest lambda beyond which exp(-eps^2 lambda^2) * density(lambda) stays
// below 1e-14 of its peak
double kernel_truncation_lambda(const PlancherelDensity& density, double epsilon);

// I_eps(t,r) = integral over R of e^{-i t psi(lambda) - eps^2 lambda^2}
//              phi_lambda(r) |c(lambda)|^-2 d lambda
KernelResult kernel_I_eps(const KernelRequest& req);

// eps -> 0 limit: evaluates I_eps along eps_k = eps0 2^-k and Richardson
// extrapolates in eps^2 until successive extrapolants differ by < tol
KernelResult kernel_I(const GeometryParams& geom, double t, double r, double tol,
                      QuadratureBudget quad = {});

struct SweepResult {
    std::vector<std::complex<double>> values;
    double est_error = 0.0;
    long panels_used = 0;
    bool converged = true;
};

// I_eps(t, r_j) for a whole radius grid at fixed t. Phase and density factors
// are computed once per t and shared across radii; the radial eigenfunction
// enters through its n=3 closed form, evaluated by per-panel rotation
// recurrences. n = 3 only.
class KernelSweep {
  public:
    KernelSweep(GeometryParams geom, double epsilon, QuadratureBudget quad = {});

    SweepResult eval(double t, const std::vector<double>& r) const;

    double truncation() const { return lambda_top_; }

    // Optional real spectral amplitude a(lambda) multiplying the integrand:
    // with it the sweep evaluates the evolved field of a radial datum whose
    // transform is a, instead of the bare kernel. Phase-capped panels keep
    // the t oscillations resolved at any t, unlike evaluation on a fixed
    // spectral grid.
    void set_amplitude(std::function<double(double)> a) { amplitude_ = std::move(a); }

  private:
    void one_pass(double t, const std::vector<double>& r, double cap_scale,
                  std::vector<std::complex<double>>& out, long& panels,
                  bool& converged) const;

    GeometryParams geom_;
    double epsilon_;
    QuadratureBudget quad_;
    PlancherelDensity density_;
    Phase phase_;
    double lambda_top_;
    std::function<double(double)> amplitude_;
};

} // namespace hypdisp
