#ifndef EHDET_SPECIAL_HPP
#define EHDET_SPECIAL_HPP

namespace ehdet {

// Standard Gaussian tail probability P(Z > x).
double q_function(double x);

// Inverse of q_function on (0,1). Refined with one Newton step so the
// round trip q_function(inv_q(p)) == p holds to ~1e-15.
double inv_q(double p);

// Standard normal density.
double normal_pdf(double x, double mean, double var);

// Exponential integral Ei(z) for z < 0 only (the only arguments that arise
// here). Throws NumericalError for z >= 0.
double exp_integral(double z);

// exp(x) * Ei(-(x + y)) for x > 0, y >= 0, evaluated without overflow via the
// scaled exponential integral. y may be +inf (result 0).
double scaled_ei_product(double x, double y);

}  // namespace ehdet

#endif
