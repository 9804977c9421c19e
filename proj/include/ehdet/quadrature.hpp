#ifndef EHDET_QUADRATURE_HPP
#define EHDET_QUADRATURE_HPP

#include <functional>

namespace ehdet {

struct QuadResult {
    double value = 0.0;
    double abs_error = 0.0;
    bool converged = true;
};

// Adaptive Gauss-Kronrod integration over [a, b], b may be +inf.
// Throws NumericalError (reporting the achieved tolerance) if the requested
// absolute tolerance cannot be met within max_intervals subdivisions.
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double abs_tol = 1e-8, int max_intervals = 200);

// Same, but returns the best estimate instead of throwing on non-convergence.
QuadResult integrate_lenient(const std::function<double(double)>& f, double a, double b,
                             double abs_tol = 1e-8, int max_intervals = 200);

}  // namespace ehdet

#endif
