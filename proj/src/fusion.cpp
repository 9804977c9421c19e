#include "ehdet/fusion.hpp"

#include <cmath>

#include "ehdet/special.hpp"

namespace ehdet {

double llr_fc(std::span<const double> y, std::span<const double> gains,
              std::span<const double> alphas, std::span<const OperatingPoint> ops,
              std::span<const double> ch_noise_vars) {
    const std::size_t n = y.size();
    if (gains.size() != n || alphas.size() != n || ops.size() != n || ch_noise_vars.size() != n) {
        throw ConfigError("llr_fc: input vectors must have equal length");
    }
    double delta = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double ga = gains[i] * alphas[i];
        if (ga == 0.0) {
            continue;
        }
        const double e = std::exp(-(2.0 * y[i] * ga - ga * ga) / (2.0 * ch_noise_vars[i]));
        delta += std::log((ops[i].pd + (1.0 - ops[i].pd) * e) /
                          (ops[i].pf + (1.0 - ops[i].pf) * e));
    }
    return delta;
}

int decide(double delta, double tau) {
    return delta >= tau ? 1 : 0;
}

ZCoeffs z_coeffs(const MomentPair& pair) {
    ZCoeffs z;
    z.a = 1.0 / pair.var0 - 1.0 / pair.var1;
    z.b = 2.0 * pair.mean1 / pair.var1 - 2.0 * pair.mean0 / pair.var0;
    z.c = pair.mean0 * pair.mean0 / pair.var0 - pair.mean1 * pair.mean1 / pair.var1;
    return z;
}

namespace {

double quad_mean(const ZCoeffs& z, double m, double v) {
    return z.a * (m * m + v) + z.b * m + z.c;
}

double quad_var(const ZCoeffs& z, double m, double v) {
    return 2.0 * z.a * z.a * v * v + 4.0 * z.a * z.a * m * m * v + z.b * z.b * v +
           4.0 * z.a * z.b * m * v;
}

}  // namespace

ZMoments z_moments(const MomentPair& pair) {
    const ZCoeffs z = z_coeffs(pair);
    ZMoments m;
    m.mean0 = quad_mean(z, pair.mean0, pair.var0);
    m.var0 = quad_var(z, pair.mean0, pair.var0);
    m.mean1 = quad_mean(z, pair.mean1, pair.var1);
    m.var1 = quad_var(z, pair.mean1, pair.var1);
    return m;
}

double z_variance_printed(const MomentPair& pair, int hypothesis) {
    const ZCoeffs z = z_coeffs(pair);
    const double m = hypothesis ? pair.mean1 : pair.mean0;
    const double v = hypothesis ? pair.var1 : pair.var0;
    return 2.0 * z.a * z.a * (2.0 * m * m + v * v) + z.b * v * (z.b + 4.0 * z.a * m);
}

FusionStats build_fusion_stats(std::span<const double> gains, std::span<const double> alphas,
                               std::span<const OperatingPoint> ops,
                               std::span<const double> ch_noise_vars, const Priors& priors) {
    const std::size_t n = gains.size();
    if (alphas.size() != n || ops.size() != n || ch_noise_vars.size() != n) {
        throw ConfigError("build_fusion_stats: input vectors must have equal length");
    }
    FusionStats st;
    st.pairs.reserve(n);
    st.nu.reserve(n);
    st.z_coeffs.reserve(n);
    st.z_moments.reserve(n);

    double var0 = 0.0, var1 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double ga = gains[i] * alphas[i];
        const double dp = ops[i].pd - ops[i].pf;
        const MomentPair pair =
            moment_match(gains[i], alphas[i] * alphas[i], ops[i], ch_noise_vars[i], 1.0);

        st.xi += ga * ga * dp / (2.0 * ch_noise_vars[i]);
        const double nu = ga * dp / ch_noise_vars[i];
        st.nu.push_back(nu);
        st.mu_delta0 += nu * pair.mean0;
        st.mu_delta1 += nu * pair.mean1;
        var0 += nu * nu * pair.var0;
        var1 += nu * nu * pair.var1;

        st.r_const += 0.5 * std::log(pair.var0 / pair.var1);
        st.z_coeffs.push_back(z_coeffs(pair));
        st.z_moments.push_back(z_moments(pair));
        st.pairs.push_back(pair);
    }
    st.mu_delta0 -= st.xi;
    st.mu_delta1 -= st.xi;
    st.sigma_delta0 = std::sqrt(var0);
    st.sigma_delta1 = std::sqrt(var1);
    st.tau_prime = 2.0 * (priors.tau - st.r_const);
    return st;
}

namespace {

PeResult q_mix(double tau, double mu0, double sd0, double mu1, double sd1,
               const Priors& priors) {
    PeResult r;
    if (sd0 == 0.0 || sd1 == 0.0) {
        r.degenerate = true;
        r.pe = priors.pi0 * (tau < mu0 ? 1.0 : 0.0) + priors.pi1 * (tau >= mu1 ? 1.0 : 0.0);
        return r;
    }
    r.pe = priors.pi0 * q_function((tau - mu0) / sd0) +
           priors.pi1 * (1.0 - q_function((tau - mu1) / sd1));
    return r;
}

}  // namespace

PeResult pe_low_snr(const FusionStats& st, const Priors& priors) {
    return q_mix(priors.tau, st.mu_delta0, st.sigma_delta0, st.mu_delta1, st.sigma_delta1,
                 priors);
}

PeResult pe_low_snr(std::span<const double> gains, std::span<const double> alphas,
                    std::span<const OperatingPoint> ops, std::span<const double> ch_noise_vars,
                    const Priors& priors) {
    return pe_low_snr(build_fusion_stats(gains, alphas, ops, ch_noise_vars, priors), priors);
}

PeResult pe_clt(std::span<const MomentPair> pairs, const Priors& priors) {
    double r_const = 0.0;
    double mu0 = 0.0, mu1 = 0.0, var0 = 0.0, var1 = 0.0;
    for (const MomentPair& pair : pairs) {
        r_const += 0.5 * std::log(pair.var0 / pair.var1);
        const ZMoments zm = z_moments(pair);
        mu0 += zm.mean0;
        mu1 += zm.mean1;
        var0 += zm.var0;
        var1 += zm.var1;
    }
    const double tau_prime = 2.0 * (priors.tau - r_const);
    return q_mix(tau_prime, mu0, std::sqrt(var0), mu1, std::sqrt(var1), priors);
}

PeResult pe_clt(const FusionStats& st, const Priors& priors) {
    return pe_clt(std::span<const MomentPair>(st.pairs), priors);
}

double z_density(double z, const MomentPair& pair, int hypothesis) {
    const double dv = pair.var1 - pair.var0;
    if (dv == 0.0) {
        throw NumericalError("z_density: requires var1 != var0");
    }
    const double dm = pair.mean0 - pair.mean1;
    const double disc = dm * dm + z * dv;
    if (disc <= 0.0) {
        return 0.0;
    }
    const double g = 2.0 / std::sqrt(pair.var0 * pair.var1) * std::sqrt(disc);
    const double base = pair.mean0 * pair.var1 - pair.mean1 * pair.var0;
    const double yp = (base + 0.5 * pair.var0 * pair.var1 * g) / dv;
    const double ym = (base - 0.5 * pair.var0 * pair.var1 * g) / dv;
    const double m = hypothesis ? pair.mean1 : pair.mean0;
    const double v = hypothesis ? pair.var1 : pair.var0;
    return (normal_pdf(yp, m, v) + normal_pdf(ym, m, v)) / g;
}

}  // namespace ehdet
