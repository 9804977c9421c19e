#ifndef EHDET_TYPES_HPP
#define EHDET_TYPES_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ehdet {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Annulus deployment: source at the center, sensor distance uniform in
// (inner_radius, outer_radius), received intensity s = source_power / r^2.
struct Deployment {
    double source_power = 0.0;
    double inner_radius = 0.0;
    double outer_radius = 0.0;
};

// One sensor's observation and channel statistics. Exactly one of
// signal_amplitude / deployment is set.
struct SensorModel {
    std::optional<double> signal_amplitude;  // known signal level at the sensor
    std::optional<Deployment> deployment;    // random placement alternative
    double obs_noise_var = 1.0;              // observation noise variance
    double ch_noise_var = 1.0;               // sensor-to-FC channel noise variance
    double mean_sq_gain = 1.0;               // E[g^2] of the Rayleigh channel

    bool is_deployment() const { return deployment.has_value(); }
};

// Transmit energy map: a sensor at battery level b spending interval-l
// coefficient c_l consumes floor(c_l * b) cells, each worth unit_energy Joules.
struct PowerPolicy {
    int capacity = 1;                 // battery size K in cells
    std::vector<double> coeffs;       // c_1 < c_2 < ... in [0,1], one per gain interval
    double unit_energy = 1.0;         // Joules per cell
};

struct HarvestModel {
    double rate = 1.0;  // mean arriving energy cells per slot (Poisson)
};

struct Priors {
    double pi0 = 0.5;
    double pi1 = 0.5;
    double tau = 0.0;  // log(pi0/pi1), kept consistent with pi0

    static Priors from_pi0(double pi0);
};

// Local threshold together with the (P_f, P_d) it induces.
struct OperatingPoint {
    double theta = 0.0;
    double pf = 0.0;
    double pd = 0.0;
};

// Channel-gain quantizer. thresholds[0] == 0 and thresholds.back() == +inf;
// probs[i] is the probability of interval i+1 = [thresholds[i], thresholds[i+1]).
struct Quantizer {
    std::vector<double> thresholds;
    std::vector<double> probs;

    int intervals() const { return static_cast<int>(probs.size()); }
};

enum class BatteryInitMode { steady, evolve };
enum class FcAmplitudeMode { genie, expected };

struct McOptions {
    BatteryInitMode battery_init = BatteryInitMode::steady;
    FcAmplitudeMode fc_amplitude = FcAmplitudeMode::genie;
};

struct SweepSpec {
    std::string param;
    std::vector<double> grid;
};

// Per-sensor design variables: local threshold plus the finite quantizer
// thresholds (0 and +inf are implicit).
struct SensorDesign {
    double theta = 0.0;
    std::vector<double> thresholds;
};

struct ExperimentConfig {
    std::vector<SensorModel> sensors;
    PowerPolicy policy;
    HarvestModel harvest;
    Priors priors;
    long trials = 10000;
    std::uint64_t seed = 0;
    std::vector<SweepSpec> sweep;
    std::optional<std::vector<SensorDesign>> design;
    McOptions mc;
};

// Invariant check over a full config. Violations are data, not exceptions;
// an empty result means the config is valid.
std::vector<std::string> validate(const ExperimentConfig& config);

// Sweepable parameter names accepted by validate() and the CLI.
const std::vector<std::string>& sweepable_params();

}  // namespace ehdet

#endif
