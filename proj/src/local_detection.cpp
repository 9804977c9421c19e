#include "ehdet/local_detection.hpp"

#include <cmath>

#include "ehdet/quadrature.hpp"
#include "ehdet/special.hpp"

namespace ehdet {

double DeploymentIntensityPdf::support_lo() const {
    return source_power / (outer_radius * outer_radius);
}

double DeploymentIntensityPdf::support_hi() const {
    return source_power / (inner_radius * inner_radius);
}

double DeploymentIntensityPdf::density(double s) const {
    if (s <= support_lo() || s > support_hi()) {
        return 0.0;
    }
    return std::sqrt(source_power) / (2.0 * s * std::sqrt(s) * (outer_radius - inner_radius));
}

double llr(double x, const SensorModel& model) {
    const double amp = model.signal_amplitude.value();
    return (amp * x - amp * amp / 2.0) / model.obs_noise_var;
}

namespace {

// Q arguments for a given intensity level: (theta +- s^2/(2 var)) / (s/sd).
// The deployment variant feeds intensities through the same shape.
OperatingPoint point_for_level(double theta, double level, double obs_noise_var) {
    const double half = level * level / (2.0 * obs_noise_var);
    const double scale = level / std::sqrt(obs_noise_var);
    OperatingPoint op;
    op.theta = theta;
    op.pf = q_function((theta + half) / scale);
    op.pd = q_function((theta - half) / scale);
    return op;
}

}  // namespace

OperatingPoint operating_point_fixed(double theta, const SensorModel& model) {
    const double amp = model.signal_amplitude.value();
    const double half = amp * amp / (2.0 * model.obs_noise_var);
    const double scale = std::sqrt(amp * amp / model.obs_noise_var);
    OperatingPoint op;
    op.theta = theta;
    op.pf = q_function((theta + half) / scale);
    op.pd = q_function((theta - half) / scale);
    return op;
}

double threshold_from_pd(double pd, const SensorModel& model) {
    if (!(pd > 0.0 && pd < 1.0)) {
        throw NumericalError("threshold_from_pd: target P_d must lie in (0,1)");
    }
    const double amp = model.signal_amplitude.value();
    const double half = amp * amp / (2.0 * model.obs_noise_var);
    const double scale = std::sqrt(amp * amp / model.obs_noise_var);
    return half + scale * inv_q(pd);
}

OperatingPoint operating_point_random(double theta, const SensorModel& model) {
    const Deployment& dep = model.deployment.value();
    DeploymentIntensityPdf pdf{dep.source_power, dep.inner_radius, dep.outer_radius};
    const double lo = pdf.support_lo();
    const double hi = pdf.support_hi();
    const double var = model.obs_noise_var;

    auto pf_integrand = [&](double s) {
        return point_for_level(theta, s, var).pf * pdf.density(s);
    };
    auto pd_integrand = [&](double s) {
        return point_for_level(theta, s, var).pd * pdf.density(s);
    };

    OperatingPoint op;
    op.theta = theta;
    op.pf = integrate(pf_integrand, lo, hi, 1e-8, 200).value;
    op.pd = integrate(pd_integrand, lo, hi, 1e-8, 200).value;
    return op;
}

double threshold_from_pd_random(double pd, const SensorModel& model) {
    if (!(pd > 0.0 && pd < 1.0)) {
        throw NumericalError("threshold_from_pd_random: target P_d must lie in (0,1)");
    }
    // P_d(theta) is continuous and strictly decreasing; bracket then bisect.
    double lo = -1.0, hi = 1.0;
    while (operating_point_random(lo, model).pd < pd && lo > -1e6) lo *= 2.0;
    while (operating_point_random(hi, model).pd > pd && hi < 1e6) hi *= 2.0;
    for (int it = 0; it < 200 && hi - lo > 1e-12 * (1.0 + std::abs(lo)); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (operating_point_random(mid, model).pd >= pd) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

OperatingPoint operating_point(double theta, const SensorModel& model) {
    return model.is_deployment() ? operating_point_random(theta, model)
                                 : operating_point_fixed(theta, model);
}

double threshold_for_pd(double pd, const SensorModel& model) {
    return model.is_deployment() ? threshold_from_pd_random(pd, model)
                                 : threshold_from_pd(pd, model);
}

}  // namespace ehdet
