#ifndef EHDET_CHANNEL_HPP
#define EHDET_CHANNEL_HPP

#include <vector>

#include "ehdet/rng.hpp"
#include "ehdet/types.hpp"

namespace ehdet {

// Interval probabilities of a Rayleigh gain quantizer. thresholds runs from
// 0 to +inf inclusive; the result has one entry per interval and sums to 1.
std::vector<double> interval_probs(const std::vector<double>& thresholds, double mean_sq_gain);

// Inverse map: full threshold vector (starting at 0, ending at +inf) whose
// interval probabilities equal probs. Interior zero-probability intervals
// are rejected.
std::vector<double> thresholds_from_probs(const std::vector<double>& probs, double mean_sq_gain);

// Quantizer from a full threshold vector.
Quantizer make_quantizer(const std::vector<double>& thresholds, double mean_sq_gain);

// Quantizer from finite interior thresholds (0 and +inf added here).
Quantizer make_quantizer_from_finite(const std::vector<double>& finite_thresholds,
                                     double mean_sq_gain);

// One Rayleigh gain draw: g = sqrt(E), E exponential with mean mean_sq_gain.
double sample_gain(double mean_sq_gain, RngStream& stream);

// 1-based index of the interval [mu_{l-1}, mu_l) containing g; a gain exactly
// on a threshold belongs to the upper interval.
int quantize_gain(double g, const std::vector<double>& thresholds);

}  // namespace ehdet

#endif
