#include "ehdet/simulator.hpp"

#include <cmath>
#include <ostream>

#include "ehdet/battery.hpp"
#include "ehdet/channel.hpp"
#include "ehdet/divergence.hpp"
#include "ehdet/fusion.hpp"
#include "ehdet/local_detection.hpp"
#include "ehdet/rng.hpp"

namespace ehdet {

namespace {

// Enough slots to forget the cold start: scaled by capacity and by how rare
// zero-arrival slots are (descents need them), capped so huge configs stay fast.
long burn_in_slots(int capacity, double rate) {
    const double q0 = std::exp(-rate);
    const double factor = std::max(1.0, std::ceil(1.0 / std::max(q0, 0.01)));
    return std::min<long>(100000, 10L * capacity * static_cast<long>(factor));
}

int sample_index(const std::vector<double>& cdf, double u) {
    int idx = 0;
    while (idx + 1 < static_cast<int>(cdf.size()) && u >= cdf[idx]) {
        ++idx;
    }
    return idx;
}

std::vector<double> cumulative(const std::vector<double>& probs) {
    std::vector<double> cdf(probs.size());
    double cum = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        cum += probs[i];
        cdf[i] = cum;
    }
    return cdf;
}

// Per-sensor precomputed state shared by both simulators.
struct SensorSim {
    SensorModel model;
    OperatingPoint op;
    Quantizer quantizer;
    std::vector<double> arrival_cdf;
    std::vector<double> steady_cdf;
    std::vector<double> expected_amp;  // per interval, steady-state mean amplitude
};

SensorSim make_sensor_sim(const ExperimentConfig& config, const SensorDesignPoint& design,
                          const SensorModel& model, bool need_steady) {
    SensorSim sim;
    sim.model = model;
    sim.op = OperatingPoint{design.theta, design.pf, design.pd};
    sim.quantizer = Quantizer{design.thresholds, design.interval_probs};
    // A hand-edited design could carry probs that disagree with its
    // thresholds; the analytic chain and the sampled gains must agree.
    const auto derived = interval_probs(design.thresholds, model.mean_sq_gain);
    for (std::size_t l = 0; l < derived.size(); ++l) {
        if (std::abs(derived[l] - design.interval_probs[l]) > 1e-6) {
            throw ConfigError("design interval_probs inconsistent with its thresholds");
        }
    }
    sim.arrival_cdf =
        cumulative(truncated_arrival_pmf(config.harvest.rate, config.policy.capacity).probs);
    if (need_steady) {
        const BatteryChain chain =
            build_chain(config.policy, config.harvest, sim.quantizer, sim.op, config.priors);
        std::vector<double> steady(chain.steady.data(), chain.steady.data() + chain.steady.size());
        sim.steady_cdf = cumulative(steady);
        sim.expected_amp.assign(sim.quantizer.intervals(), 0.0);
        for (int l = 1; l <= sim.quantizer.intervals(); ++l) {
            double mean = 0.0;
            for (int k = 0; k <= config.policy.capacity; ++k) {
                mean += steady[k] *
                        std::sqrt(power_units(config.policy, l, k) * config.policy.unit_energy);
            }
            sim.expected_amp[l - 1] = mean;
        }
    }
    return sim;
}

// One sensor-slot: draws everything the sensor does in a slot and returns the
// fields run_trials needs. The battery level must be supplied by the caller.
struct SlotDraw {
    int arrival = 0;
    int interval = 0;
    int units = 0;          // actually consumed
    int candidate_units = 0;
    double gain = 0.0;
    double y = 0.0;
    bool transmitted = false;
};

SlotDraw sensor_slot(const ExperimentConfig& config, const SensorSim& sim, int level,
                     int hypothesis, std::uint64_t seed, long trial, int sensor) {
    SlotDraw d;
    RngStream arrival_stream(seed, trial, sensor, Draw::arrival);
    d.arrival = sample_index(sim.arrival_cdf, arrival_stream.next_uniform());

    RngStream gain_stream(seed, trial, sensor, Draw::gain);
    d.gain = sample_gain(sim.model.mean_sq_gain, gain_stream);
    d.interval = quantize_gain(d.gain, sim.quantizer.thresholds);

    double amp;
    if (sim.model.is_deployment()) {
        RngStream deploy_stream(seed, trial, sensor, Draw::deploy);
        const Deployment& dep = *sim.model.deployment;
        const double r = dep.inner_radius +
                         (dep.outer_radius - dep.inner_radius) * deploy_stream.next_uniform();
        amp = dep.source_power / (r * r);
    } else {
        amp = *sim.model.signal_amplitude;
    }

    RngStream obs_stream(seed, trial, sensor, Draw::observation);
    const double x = (hypothesis ? amp : 0.0) +
                     std::sqrt(sim.model.obs_noise_var) * obs_stream.next_normal();
    const double llr_value = (amp * x - amp * amp / 2.0) / sim.model.obs_noise_var;
    d.transmitted = llr_value >= sim.op.theta;

    d.candidate_units = power_units(config.policy, d.interval, level);
    d.units = d.transmitted ? d.candidate_units : 0;

    RngStream noise_stream(seed, trial, sensor, Draw::noise);
    const double alpha = std::sqrt(d.units * config.policy.unit_energy);
    d.y = d.gain * alpha + std::sqrt(sim.model.ch_noise_var) * noise_stream.next_normal();
    return d;
}

}  // namespace

std::vector<double> simulate_battery(const ExperimentConfig& config, long slots,
                                     std::uint64_t seed, int sensor_index) {
    if (slots < 1) {
        throw ConfigError("simulate_battery: slot count must be positive");
    }
    const DesignPoint design = design_from_config(config);
    const SensorSim sim = make_sensor_sim(config, design.sensors[sensor_index],
                                          config.sensors[sensor_index], false);
    const long burn = burn_in_slots(config.policy.capacity, config.harvest.rate);

    std::vector<double> counts(config.policy.capacity + 1, 0.0);
    int level = 0;
    for (long t = 0; t < burn + slots; ++t) {
        RngStream hyp_stream(seed, t, 0, Draw::hypothesis);
        const int h = hyp_stream.next_uniform() < config.priors.pi1 ? 1 : 0;
        const SlotDraw d = sensor_slot(config, sim, level, h, seed, t, sensor_index);
        if (t >= burn) {
            counts[level] += 1.0;
        }
        level = battery_step(level, d.arrival, d.units, config.policy.capacity);
    }
    for (double& c : counts) {
        c /= static_cast<double>(slots);
    }
    return counts;
}

TrialStats run_trials_detailed(const ExperimentConfig& config, const DesignPoint& design,
                               long trials, std::uint64_t seed, std::ostream* trace) {
    if (trials < 1) {
        throw ConfigError("run_trials: trial count must be positive");
    }
    if (design.sensors.size() != config.sensors.size()) {
        throw ConfigError("design must list one entry per sensor");
    }
    const int n_sensors = static_cast<int>(config.sensors.size());
    const bool evolve = config.mc.battery_init == BatteryInitMode::evolve;
    const bool genie = config.mc.fc_amplitude == FcAmplitudeMode::genie;

    std::vector<SensorSim> sims;
    std::vector<OperatingPoint> ops;
    std::vector<double> ch_vars;
    for (int i = 0; i < n_sensors; ++i) {
        sims.push_back(make_sensor_sim(config, design.sensors[i], config.sensors[i], true));
        ops.push_back(sims.back().op);
        ch_vars.push_back(config.sensors[i].ch_noise_var);
    }

    TrialStats stats;
    stats.sensors.resize(n_sensors);
    for (int i = 0; i < n_sensors; ++i) {
        stats.sensors[i].interval_counts.assign(sims[i].quantizer.intervals(), 0);
    }

    if (trace) {
        *trace << "trial,hypothesis,decision,delta";
        for (int i = 0; i < n_sensors; ++i) {
            *trace << ",s" << i << "_battery,s" << i << "_arrival,s" << i << "_interval,s" << i
                   << "_units";
        }
        *trace << "\n";
    }

    const long burn = evolve ? burn_in_slots(config.policy.capacity, config.harvest.rate) : 0;
    std::vector<int> levels(n_sensors, 0);
    std::vector<double> y(n_sensors), gains(n_sensors), fc_alpha(n_sensors);
    std::vector<SlotDraw> draws(n_sensors);

    long errors = 0;
    for (long t = 0; t < burn + trials; ++t) {
        RngStream hyp_stream(seed, t, 0, Draw::hypothesis);
        const int h = hyp_stream.next_uniform() < config.priors.pi1 ? 1 : 0;
        const bool counted = t >= burn;

        for (int i = 0; i < n_sensors; ++i) {
            if (!evolve) {
                RngStream init_stream(seed, t, i, Draw::battery_init);
                levels[i] = sample_index(sims[i].steady_cdf, init_stream.next_uniform());
            }
            const SlotDraw d = sensor_slot(config, sims[i], levels[i], h, seed, t, i);
            draws[i] = d;
            y[i] = d.y;
            gains[i] = d.gain;
            fc_alpha[i] = genie
                              ? std::sqrt(d.candidate_units * config.policy.unit_energy)
                              : sims[i].expected_amp[d.interval - 1];
            if (counted) {
                SensorTally& tally = stats.sensors[i];
                if (d.transmitted) {
                    (h ? tally.tx_given_h1 : tally.tx_given_h0) += 1;
                }
                tally.interval_counts[d.interval - 1] += 1;
                tally.battery_level_sum += levels[i];
            }
        }

        const double delta = llr_fc(y, gains, fc_alpha, ops, ch_vars);
        const int decision = decide(delta, config.priors.tau);

        if (counted) {
            (h ? stats.trials_h1 : stats.trials_h0) += 1;
            if (decision != h) {
                ++errors;
            }
            const FusionStats fs = build_fusion_stats(gains, fc_alpha, ops, ch_vars, config.priors);
            stats.mean_pe_low_snr += pe_low_snr(fs, config.priors).pe;
            stats.mean_pe_clt += pe_clt(fs, config.priors).pe;
            if (trace) {
                *trace << (t - burn) << ',' << h << ',' << decision << ',' << delta;
                for (int i = 0; i < n_sensors; ++i) {
                    *trace << ',' << levels[i] << ',' << draws[i].arrival << ','
                           << draws[i].interval << ',' << draws[i].units;
                }
                *trace << "\n";
            }
        }

        if (evolve) {
            for (int i = 0; i < n_sensors; ++i) {
                levels[i] =
                    battery_step(levels[i], draws[i].arrival, draws[i].units, config.policy.capacity);
            }
        }
    }

    stats.mean_pe_low_snr /= static_cast<double>(trials);
    stats.mean_pe_clt /= static_cast<double>(trials);
    stats.estimate.pe = static_cast<double>(errors) / static_cast<double>(trials);
    stats.estimate.trials = trials;
    stats.estimate.ci95 =
        1.96 * std::sqrt(stats.estimate.pe * (1.0 - stats.estimate.pe) / trials);
    stats.estimate.seed = seed;
    return stats;
}

PeEstimate run_trials(const ExperimentConfig& config, const DesignPoint& design, long trials,
                      std::uint64_t seed) {
    return run_trials_detailed(config, design, trials, seed).estimate;
}

}  // namespace ehdet
