#ifndef EHDET_DIVERGENCE_HPP
#define EHDET_DIVERGENCE_HPP

#include "ehdet/battery.hpp"
#include "ehdet/types.hpp"

namespace ehdet {

// Moment-matched Gaussian surrogates of the FC's per-sensor received-signal
// mixtures under each hypothesis.
struct MomentPair {
    double mean0 = 0.0;
    double var0 = 0.0;
    double mean1 = 0.0;
    double var1 = 0.0;
};

// Coefficients of the rational form of the per-sensor divergence.
struct JnCoefficients {
    double a = 0.0;  // pf(1-pd) + pd(pd-pf)
    double b = 0.0;  // pd(1-pd)
    double c = 0.0;  // pd(1-pf) - pf(pd-pf)
    double d = 0.0;  // pf(1-pf)
};

JnCoefficients jn_coefficients(const OperatingPoint& op);

// Gaussian surrogate for gain g and a transmission of alpha_units cells,
// each worth unit_energy Joules (amplitude = sqrt(units * unit_energy)).
MomentPair moment_match(double gain, double alpha_units, const OperatingPoint& op,
                        double ch_noise_var, double unit_energy = 1.0);

// Divergence of two Gaussians in terms of their means and variances.
// Evaluates to 2 for identical components; all thresholds in this toolkit
// are interpreted on that scale.
double jdiv_gaussian(const MomentPair& pair);

// Per-sensor divergence as a function of g^2 * alpha^2 (signal energy).
double j_n(double g_sq_alpha_sq, const OperatingPoint& op, double ch_noise_var);

// Mean divergence contribution of one gain interval (1-based), averaged over
// the gain distribution restricted to the interval and over the steady-state
// battery level: sum_k phi_k E[J_n(g^2 u_k) 1{g in interval}].
double conditional_j(int interval, const BatteryChain& chain, const PowerPolicy& policy,
                     const Quantizer& quantizer, const OperatingPoint& op,
                     const SensorModel& model);

// Same quantity by adaptive quadrature of j_n against the exponential g^2
// density; the independent check on the closed form above.
double quadrature_conditional_j(int interval, const BatteryChain& chain,
                                const PowerPolicy& policy, const Quantizer& quantizer,
                                const OperatingPoint& op, const SensorModel& model);

// Mean transmit energy (cells per slot) spent in one gain interval:
// transmit_prob * sum_k phi_k pi_i floor(c_i k).
double conditional_alpha(int interval, const BatteryChain& chain, const PowerPolicy& policy,
                         const Quantizer& quantizer, const OperatingPoint& op,
                         const Priors& priors);

// Sums over all intervals.
double total_j(const BatteryChain& chain, const PowerPolicy& policy, const Quantizer& quantizer,
               const OperatingPoint& op, const SensorModel& model);
double total_alpha(const BatteryChain& chain, const PowerPolicy& policy,
                   const Quantizer& quantizer, const OperatingPoint& op, const Priors& priors);

}  // namespace ehdet

#endif
