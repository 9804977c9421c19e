#include "ehdet/channel.hpp"

#include <cmath>
#include <limits>

namespace ehdet {

namespace {

void check_thresholds(const std::vector<double>& thresholds) {
    if (thresholds.size() < 2 || thresholds.front() != 0.0 ||
        !std::isinf(thresholds.back())) {
        throw ConfigError("quantizer thresholds must run from 0 to +inf");
    }
    for (std::size_t i = 1; i < thresholds.size(); ++i) {
        if (!(thresholds[i] > thresholds[i - 1])) {
            throw ConfigError("quantizer thresholds not strictly increasing");
        }
    }
}

double tail_mass(double mu, double mean_sq_gain) {
    if (std::isinf(mu)) {
        return 0.0;
    }
    return std::exp(-mu * mu / mean_sq_gain);
}

}  // namespace

std::vector<double> interval_probs(const std::vector<double>& thresholds, double mean_sq_gain) {
    check_thresholds(thresholds);
    std::vector<double> probs(thresholds.size() - 1);
    for (std::size_t l = 0; l + 1 < thresholds.size(); ++l) {
        probs[l] = tail_mass(thresholds[l], mean_sq_gain) - tail_mass(thresholds[l + 1], mean_sq_gain);
    }
    return probs;
}

std::vector<double> thresholds_from_probs(const std::vector<double>& probs, double mean_sq_gain) {
    if (probs.empty()) {
        throw ConfigError("empty interval probability vector");
    }
    double sum = 0.0;
    for (double p : probs) {
        if (!(p > 0.0)) {
            throw ConfigError("interval probabilities must be strictly positive");
        }
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw ConfigError("interval probabilities must sum to 1");
    }
    std::vector<double> thresholds(probs.size() + 1);
    thresholds.front() = 0.0;
    thresholds.back() = std::numeric_limits<double>::infinity();
    double cum = 0.0;
    for (std::size_t l = 0; l + 1 < probs.size(); ++l) {
        cum += probs[l];
        const double tail = 1.0 - cum;
        if (!(tail > 0.0)) {
            throw ConfigError("cumulative interval probability reaches 1 before the last interval");
        }
        thresholds[l + 1] = std::sqrt(-mean_sq_gain * std::log(tail));
    }
    return thresholds;
}

Quantizer make_quantizer(const std::vector<double>& thresholds, double mean_sq_gain) {
    Quantizer q;
    q.thresholds = thresholds;
    q.probs = interval_probs(thresholds, mean_sq_gain);
    return q;
}

Quantizer make_quantizer_from_finite(const std::vector<double>& finite_thresholds,
                                     double mean_sq_gain) {
    std::vector<double> full;
    full.reserve(finite_thresholds.size() + 2);
    full.push_back(0.0);
    for (double t : finite_thresholds) {
        full.push_back(t);
    }
    full.push_back(std::numeric_limits<double>::infinity());
    return make_quantizer(full, mean_sq_gain);
}

double sample_gain(double mean_sq_gain, RngStream& stream) {
    return std::sqrt(stream.next_exponential(mean_sq_gain));
}

int quantize_gain(double g, const std::vector<double>& thresholds) {
    int l = 1;
    while (l + 1 < static_cast<int>(thresholds.size()) && g >= thresholds[l]) {
        ++l;
    }
    return l;
}

}  // namespace ehdet
