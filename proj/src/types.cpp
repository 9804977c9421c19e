#include "ehdet/types.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ehdet {

Priors Priors::from_pi0(double pi0) {
    Priors p;
    p.pi0 = pi0;
    p.pi1 = 1.0 - pi0;
    p.tau = std::log(pi0 / p.pi1);
    return p;
}

const std::vector<std::string>& sweepable_params() {
    static const std::vector<std::string> names = {
        "rho", "c1", "K", "gamma_g", "snr_s", "snr", "P0",
    };
    return names;
}

namespace {

void check_sensor(const SensorModel& s, std::size_t idx, std::vector<std::string>& out) {
    std::ostringstream tag;
    tag << "sensor " << idx << ": ";
    const bool has_amp = s.signal_amplitude.has_value();
    const bool has_dep = s.deployment.has_value();
    if (has_amp == has_dep) {
        out.push_back(tag.str() + "exactly one of signal_amplitude/deployment required");
    }
    if (has_amp && !(*s.signal_amplitude > 0.0)) {
        out.push_back(tag.str() + "signal_amplitude must be positive");
    }
    if (has_dep) {
        const Deployment& d = *s.deployment;
        if (!(d.source_power > 0.0)) {
            out.push_back(tag.str() + "source_power must be positive");
        }
        if (!(d.inner_radius > 0.0)) {
            out.push_back(tag.str() + "inner_radius must be positive");
        }
        if (!(d.outer_radius > d.inner_radius)) {
            out.push_back(tag.str() + "outer_radius must exceed inner_radius");
        }
    }
    if (!(s.obs_noise_var > 0.0)) {
        out.push_back(tag.str() + "obs_noise_var must be positive");
    }
    if (!(s.ch_noise_var > 0.0)) {
        out.push_back(tag.str() + "ch_noise_var must be positive");
    }
    if (!(s.mean_sq_gain > 0.0)) {
        out.push_back(tag.str() + "mean_sq_gain must be positive");
    }
}

}  // namespace

std::vector<std::string> validate(const ExperimentConfig& config) {
    std::vector<std::string> out;

    if (config.sensors.empty()) {
        out.push_back("sensor list must be non-empty");
    }
    for (std::size_t i = 0; i < config.sensors.size(); ++i) {
        check_sensor(config.sensors[i], i, out);
    }

    const PowerPolicy& pol = config.policy;
    if (pol.capacity < 1) {
        out.push_back("capacity must be at least 1");
    }
    if (pol.coeffs.empty()) {
        out.push_back("at least one power coefficient required");
    }
    for (std::size_t l = 0; l < pol.coeffs.size(); ++l) {
        if (pol.coeffs[l] < 0.0 || pol.coeffs[l] > 1.0) {
            out.push_back("coeffs must lie in [0,1]");
            break;
        }
    }
    for (std::size_t l = 1; l < pol.coeffs.size(); ++l) {
        if (!(pol.coeffs[l] > pol.coeffs[l - 1])) {
            out.push_back("coeffs not strictly increasing");
            break;
        }
    }
    if (!(pol.unit_energy > 0.0)) {
        out.push_back("unit_energy must be positive");
    }

    if (!(config.harvest.rate > 0.0)) {
        out.push_back("harvest rate must be positive");
    }

    const Priors& pr = config.priors;
    if (!(pr.pi0 > 0.0 && pr.pi0 < 1.0)) {
        out.push_back("pi0 must lie strictly between 0 and 1");
    } else {
        if (std::abs(pr.pi0 + pr.pi1 - 1.0) > 1e-12) {
            out.push_back("pi0 + pi1 must equal 1");
        }
        if (std::abs(pr.tau - std::log(pr.pi0 / (1.0 - pr.pi0))) > 1e-9) {
            out.push_back("tau inconsistent with pi0");
        }
    }

    if (config.trials < 1) {
        out.push_back("trials must be at least 1");
    }

    for (const SweepSpec& sw : config.sweep) {
        const auto& names = sweepable_params();
        if (std::find(names.begin(), names.end(), sw.param) == names.end()) {
            out.push_back("unknown sweep parameter: " + sw.param);
        }
        if (sw.grid.empty()) {
            out.push_back("sweep grid for " + sw.param + " is empty");
        }
    }

    if (config.design) {
        if (config.design->size() != config.sensors.size()) {
            out.push_back("design must list one entry per sensor");
        }
        for (std::size_t i = 0; i < config.design->size(); ++i) {
            const SensorDesign& d = (*config.design)[i];
            if (d.thresholds.size() + 1 != pol.coeffs.size()) {
                std::ostringstream msg;
                msg << "design sensor " << i << ": needs " << pol.coeffs.size() - 1
                    << " finite thresholds to match " << pol.coeffs.size() << " intervals";
                out.push_back(msg.str());
            }
            double prev = 0.0;
            for (double t : d.thresholds) {
                if (!(t > prev) || std::isinf(t)) {
                    out.push_back("design thresholds must be finite and strictly increasing");
                    break;
                }
                prev = t;
            }
        }
    }
    return out;
}

}  // namespace ehdet
