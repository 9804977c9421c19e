#ifndef EHDET_SIMULATOR_HPP
#define EHDET_SIMULATOR_HPP

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "ehdet/optimizer.hpp"
#include "ehdet/types.hpp"

namespace ehdet {

struct PeEstimate {
    double pe = 0.0;
    long trials = 0;
    double ci95 = 0.0;  // 1.96 sqrt(pe(1-pe)/trials)
    std::uint64_t seed = 0;
};

// Aggregates accumulated across trials, used by tests and the CLI.
struct SensorTally {
    long tx_given_h0 = 0;
    long tx_given_h1 = 0;
    std::vector<long> interval_counts;
    double battery_level_sum = 0.0;
};

struct TrialStats {
    PeEstimate estimate;
    double mean_pe_low_snr = 0.0;   // closed-form approximations averaged over
    double mean_pe_clt = 0.0;       // the per-trial (gain, amplitude) draws
    long trials_h0 = 0;
    long trials_h1 = 0;
    std::vector<SensorTally> sensors;
};

// Long-run battery state frequencies of one sensor from a cold-start
// trajectory with burn-in; independent oracle for the analytic steady state.
std::vector<double> simulate_battery(const ExperimentConfig& config, long slots,
                                     std::uint64_t seed, int sensor_index = 0);

PeEstimate run_trials(const ExperimentConfig& config, const DesignPoint& design, long trials,
                      std::uint64_t seed);

// Full-detail variant; `trace` (optional) receives one CSV row per trial:
// trial,hypothesis,decision,delta,s<k>_battery,s<k>_arrival,s<k>_interval,s<k>_units
TrialStats run_trials_detailed(const ExperimentConfig& config, const DesignPoint& design,
                               long trials, std::uint64_t seed, std::ostream* trace = nullptr);

}  // namespace ehdet

#endif
