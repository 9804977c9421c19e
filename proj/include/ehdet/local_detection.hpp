#ifndef EHDET_LOCAL_DETECTION_HPP
#define EHDET_LOCAL_DETECTION_HPP

#include "ehdet/types.hpp"

namespace ehdet {

// Received-intensity distribution induced by uniform placement in the
// annulus (inner_radius, outer_radius) with free-space (r^-2) decay.
struct DeploymentIntensityPdf {
    double source_power;
    double inner_radius;
    double outer_radius;

    double support_lo() const;
    double support_hi() const;
    double density(double s) const;
};

// Local log-likelihood ratio of one observation (fixed-amplitude model).
double llr(double x, const SensorModel& model);

// (P_f, P_d) induced by threshold theta under the fixed-amplitude model.
OperatingPoint operating_point_fixed(double theta, const SensorModel& model);

// Inverse of the theta -> P_d map (fixed-amplitude model).
double threshold_from_pd(double pd, const SensorModel& model);

// (P_f, P_d) averaged over the deployment intensity distribution;
// adaptive quadrature at 1e-8 absolute tolerance.
OperatingPoint operating_point_random(double theta, const SensorModel& model);

// Inverse of the theta -> P_d map for the deployment model (bisection).
double threshold_from_pd_random(double pd, const SensorModel& model);

// Dispatch on the model variant.
OperatingPoint operating_point(double theta, const SensorModel& model);
double threshold_for_pd(double pd, const SensorModel& model);

}  // namespace ehdet

#endif
