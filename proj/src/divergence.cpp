#include "ehdet/divergence.hpp"

#include <cmath>
#include <limits>

#include "ehdet/quadrature.hpp"
#include "ehdet/special.hpp"

namespace ehdet {

JnCoefficients jn_coefficients(const OperatingPoint& op) {
    JnCoefficients k;
    k.a = op.pf * (1.0 - op.pd) + op.pd * (op.pd - op.pf);
    k.c = op.pd * (1.0 - op.pf) - op.pf * (op.pd - op.pf);
    k.b = op.pd * (1.0 - op.pd);
    k.d = op.pf * (1.0 - op.pf);
    return k;
}

MomentPair moment_match(double gain, double alpha_units, const OperatingPoint& op,
                        double ch_noise_var, double unit_energy) {
    const double amp = std::sqrt(alpha_units * unit_energy);
    const double ga = gain * amp;
    MomentPair p;
    p.mean0 = ga * op.pf;
    p.var0 = ga * ga * op.pf * (1.0 - op.pf) + ch_noise_var;
    p.mean1 = ga * op.pd;
    p.var1 = ga * ga * op.pd * (1.0 - op.pd) + ch_noise_var;
    return p;
}

double jdiv_gaussian(const MomentPair& pair) {
    const double dm = pair.mean1 - pair.mean0;
    return (pair.var1 + dm * dm) / pair.var0 + (pair.var0 + dm * dm) / pair.var1;
}

double j_n(double g_sq_alpha_sq, const OperatingPoint& op, double ch_noise_var) {
    const JnCoefficients k = jn_coefficients(op);
    const double x = g_sq_alpha_sq;
    return (ch_noise_var + k.a * x) / (ch_noise_var + k.b * x) +
           (ch_noise_var + k.c * x) / (ch_noise_var + k.d * x);
}

namespace {

// E{ (a + b x)/(c + d x) * 1[x in (p,q)] } for x ~ Exp(rate lambda);
// q may be +inf. Written through the scaled exponential integral so the
// e^{large} * Ei(-large) products cannot overflow.
double rational_exp_interval_mean(double a, double b, double c, double d, double lambda,
                                  double p, double q) {
    const double ep = std::exp(-lambda * p);
    const double eq = std::isinf(q) ? 0.0 : std::exp(-lambda * q);
    if (d == 0.0) {
        // Linear integrand: (a + b x)/c.
        double value = (a / c) * (ep - eq);
        double upper = std::isinf(q) ? 0.0 : (q + 1.0 / lambda) * eq;
        value += (b / c) * ((p + 1.0 / lambda) * ep - upper);
        return value;
    }
    const double k = c / d;
    const double w = lambda * k;
    const double hi = std::isinf(q) ? 0.0 : scaled_ei_product(w, lambda * q);
    const double lo = scaled_ei_product(w, lambda * p);
    return (b / d) * (ep - eq) + (a - b * k) * (lambda / d) * (hi - lo);
}

struct IntervalBounds {
    double lo_sq;  // lower threshold squared
    double hi_sq;  // upper threshold squared (may be +inf)
};

IntervalBounds interval_bounds(int interval, const Quantizer& quantizer) {
    if (interval < 1 || interval > quantizer.intervals()) {
        throw ConfigError("interval index out of range");
    }
    const double lo = quantizer.thresholds[interval - 1];
    const double hi = quantizer.thresholds[interval];
    IntervalBounds b;
    b.lo_sq = lo * lo;
    b.hi_sq = std::isinf(hi) ? std::numeric_limits<double>::infinity() : hi * hi;
    return b;
}

}  // namespace

double conditional_j(int interval, const BatteryChain& chain, const PowerPolicy& policy,
                     const Quantizer& quantizer, const OperatingPoint& op,
                     const SensorModel& model) {
    const IntervalBounds bounds = interval_bounds(interval, quantizer);
    const double lambda = 1.0 / model.mean_sq_gain;
    const double s2w = model.ch_noise_var;
    const JnCoefficients k = jn_coefficients(op);

    const double ep = std::exp(-lambda * bounds.lo_sq);
    const double eq = std::isinf(bounds.hi_sq) ? 0.0 : std::exp(-lambda * bounds.hi_sq);

    double value = 0.0;
    for (int level = 0; level <= policy.capacity; ++level) {
        const double phi_k = chain.steady(level);
        if (phi_k == 0.0) {
            continue;
        }
        const double u = power_units(policy, interval, level) * policy.unit_energy;
        double mean;
        if (u == 0.0) {
            mean = 2.0 * (ep - eq);  // silent level: J has its baseline value 2
        } else {
            mean = rational_exp_interval_mean(s2w, k.a * u, s2w, k.b * u, lambda,
                                              bounds.lo_sq, bounds.hi_sq) +
                   rational_exp_interval_mean(s2w, k.c * u, s2w, k.d * u, lambda,
                                              bounds.lo_sq, bounds.hi_sq);
        }
        value += phi_k * mean;
    }
    return value;
}

double quadrature_conditional_j(int interval, const BatteryChain& chain,
                                const PowerPolicy& policy, const Quantizer& quantizer,
                                const OperatingPoint& op, const SensorModel& model) {
    const IntervalBounds bounds = interval_bounds(interval, quantizer);
    const double lambda = 1.0 / model.mean_sq_gain;
    const double s2w = model.ch_noise_var;

    double value = 0.0;
    for (int level = 0; level <= policy.capacity; ++level) {
        const double phi_k = chain.steady(level);
        if (phi_k == 0.0) {
            continue;
        }
        const double u = power_units(policy, interval, level) * policy.unit_energy;
        auto integrand = [&](double x) {
            return j_n(u * x, op, s2w) * lambda * std::exp(-lambda * x);
        };
        value += phi_k * integrate(integrand, bounds.lo_sq, bounds.hi_sq, 1e-9, 200).value;
    }
    return value;
}

double conditional_alpha(int interval, const BatteryChain& chain, const PowerPolicy& policy,
                         const Quantizer& quantizer, const OperatingPoint& op,
                         const Priors& priors) {
    if (interval < 1 || interval > quantizer.intervals()) {
        throw ConfigError("interval index out of range");
    }
    const double pi_i = quantizer.probs[interval - 1];
    double mean_units = 0.0;
    for (int level = 0; level <= policy.capacity; ++level) {
        mean_units += chain.steady(level) * power_units(policy, interval, level);
    }
    return transmit_prob(op, priors) * pi_i * mean_units;
}

double total_j(const BatteryChain& chain, const PowerPolicy& policy, const Quantizer& quantizer,
               const OperatingPoint& op, const SensorModel& model) {
    double sum = 0.0;
    for (int i = 1; i <= quantizer.intervals(); ++i) {
        sum += conditional_j(i, chain, policy, quantizer, op, model);
    }
    return sum;
}

double total_alpha(const BatteryChain& chain, const PowerPolicy& policy,
                   const Quantizer& quantizer, const OperatingPoint& op, const Priors& priors) {
    double sum = 0.0;
    for (int i = 1; i <= quantizer.intervals(); ++i) {
        sum += conditional_alpha(i, chain, policy, quantizer, op, priors);
    }
    return sum;
}

}  // namespace ehdet
