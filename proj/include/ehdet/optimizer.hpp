#ifndef EHDET_OPTIMIZER_HPP
#define EHDET_OPTIMIZER_HPP

#include <string>
#include <vector>

#include "ehdet/types.hpp"

namespace ehdet {

// One sensor's design in both parameterizations: the search variables
// (pd, interval_probs) and the physical (theta, thresholds) they map to.
struct SensorDesignPoint {
    double pd = 0.0;
    double pf = 0.0;
    double theta = 0.0;
    std::vector<double> interval_probs;  // one per interval, sums to 1
    std::vector<double> thresholds;      // full vector, 0 ... +inf
};

struct DesignPoint {
    std::vector<SensorDesignPoint> sensors;
};

enum class SolveStatus { converged, grid_exhausted, infeasible };

std::string to_string(SolveStatus status);

struct SolveReport {
    DesignPoint design;
    double objective = 0.0;                 // summed over sensors
    std::vector<double> constraint_values;  // per sensor: power (P1) or divergence (P2)
    long evaluations = 0;
    SolveStatus status = SolveStatus::converged;
};

struct SearchOptions {
    int grid_points = 64;              // per-axis coarse grid
    double refine_resolution = 1e-4;   // coordinate-descent stopping step
    long eval_cap = 500000;            // per-sensor evaluation budget
};

// Record of one candidate evaluation, for the optional trace dump.
struct EvalRecord {
    int sensor = 0;
    double pd = 0.0;
    std::vector<double> interval_probs;
    double divergence = 0.0;
    double power = 0.0;
};

// Maximize the mean total divergence subject to a per-sensor mean transmit
// energy budget. Sensors decouple and are solved independently.
SolveReport solve_p1(const ExperimentConfig& config, double alpha0,
                     const SearchOptions& opts = {}, std::vector<EvalRecord>* trace = nullptr);

// Minimize the mean total transmit energy subject to a per-sensor divergence
// floor. Values of j0 at or below the silent baseline (2) are trivially
// satisfied; unreachable floors yield SolveStatus::infeasible with the best
// achieved divergence reported.
SolveReport solve_p2(const ExperimentConfig& config, double j0,
                     const SearchOptions& opts = {}, std::vector<EvalRecord>* trace = nullptr);

// Physical design (theta, finite thresholds) -> full design point.
DesignPoint design_from_config(const ExperimentConfig& config);
DesignPoint design_from_sensor_designs(const ExperimentConfig& config,
                                       const std::vector<SensorDesign>& designs);

// Per-sensor divergence/power/mean-battery of a design, recomputed from its
// physical parameters.
struct DesignMetrics {
    std::vector<double> divergence;
    std::vector<double> power;
    std::vector<double> mean_battery;
};

DesignMetrics evaluate_design(const ExperimentConfig& config, const DesignPoint& design);

// Design file round trip (JSON).
std::string serialize_design(const DesignPoint& design);
DesignPoint parse_design(const std::string& text);
DesignPoint load_design(const std::string& path);
void save_design(const DesignPoint& design, const std::string& path);

}  // namespace ehdet

#endif
