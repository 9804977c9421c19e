#include "ehdet/special.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <gsl/gsl_cdf.h>
#include <gsl/gsl_sf_expint.h>

#include "ehdet/types.hpp"

namespace ehdet {

double q_function(double x) {
    return 0.5 * std::erfc(x / std::numbers::sqrt2);
}

double inv_q(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw NumericalError("inv_q: argument must lie in (0,1)");
    }
    double x = gsl_cdf_ugaussian_Qinv(p);
    // One Newton step against the erfc-based Q tightens the round trip.
    double f = q_function(x) - p;
    double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
    if (pdf > 0.0) {
        x += f / pdf;
    }
    return x;
}

double normal_pdf(double x, double mean, double var) {
    const double d = x - mean;
    return std::exp(-0.5 * d * d / var) / std::sqrt(2.0 * M_PI * var);
}

double exp_integral(double z) {
    if (!(z < 0.0)) {
        throw NumericalError("exp_integral: only z < 0 is supported");
    }
    return -gsl_sf_expint_E1(-z);
}

double scaled_ei_product(double x, double y) {
    if (std::isinf(y)) {
        return 0.0;
    }
    // e^x Ei(-(x+y)) = -e^{-y} [e^{x+y} E1(x+y)]
    return -std::exp(-y) * gsl_sf_expint_E1_scaled(x + y);
}

}  // namespace ehdet
