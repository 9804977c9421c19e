#ifndef EHDET_FUSION_HPP
#define EHDET_FUSION_HPP

#include <span>
#include <vector>

#include "ehdet/divergence.hpp"
#include "ehdet/types.hpp"

namespace ehdet {

struct ZCoeffs {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
};

struct ZMoments {
    double mean0 = 0.0;
    double var0 = 0.0;
    double mean1 = 0.0;
    double var1 = 0.0;
};

struct PeResult {
    double pe = 0.0;
    bool degenerate = false;  // fusion statistic had zero variance
};

// Everything the closed-form error approximations need, per realization of
// (gains, candidate amplitudes).
struct FusionStats {
    std::vector<MomentPair> pairs;
    std::vector<double> nu;            // per-sensor weight of the linearized statistic
    double xi = 0.0;                   // its constant offset
    double mu_delta0 = 0.0, mu_delta1 = 0.0;
    double sigma_delta0 = 0.0, sigma_delta1 = 0.0;
    double r_const = 0.0;              // log sqrt(det L0 / det L1)
    double tau_prime = 0.0;            // 2 (tau - r_const)
    std::vector<ZCoeffs> z_coeffs;
    std::vector<ZMoments> z_moments;
};

// Exact fusion statistic: sum of per-sensor mixture log-ratios. alphas are
// the candidate transmit amplitudes; a zero amplitude contributes nothing.
double llr_fc(std::span<const double> y, std::span<const double> gains,
              std::span<const double> alphas, std::span<const OperatingPoint> ops,
              std::span<const double> ch_noise_vars);

// Global decision: 1 iff delta >= tau.
int decide(double delta, double tau);

ZCoeffs z_coeffs(const MomentPair& pair);

// Mean and variance of the per-sensor quadratic statistic under each
// hypothesis (variance uses the full quadratic-form expression).
ZMoments z_moments(const MomentPair& pair);

// Variance as printed in the source derivation, kept for comparison only;
// it drops a variance factor on one term and fails the sampling check.
double z_variance_printed(const MomentPair& pair, int hypothesis);

FusionStats build_fusion_stats(std::span<const double> gains, std::span<const double> alphas,
                               std::span<const OperatingPoint> ops,
                               std::span<const double> ch_noise_vars, const Priors& priors);

// Error probability of the linearized (vanishing channel SNR) statistic.
PeResult pe_low_snr(std::span<const double> gains, std::span<const double> alphas,
                    std::span<const OperatingPoint> ops, std::span<const double> ch_noise_vars,
                    const Priors& priors);
PeResult pe_low_snr(const FusionStats& stats, const Priors& priors);

// Error probability of the Gaussian (large-N) approximation.
PeResult pe_clt(std::span<const MomentPair> pairs, const Priors& priors);
PeResult pe_clt(const FusionStats& stats, const Priors& priors);

// Density of the per-sensor quadratic statistic given hypothesis h; valid for
// var1 != var0. Out-of-support arguments return 0.
double z_density(double z, const MomentPair& pair, int hypothesis);

}  // namespace ehdet

#endif
