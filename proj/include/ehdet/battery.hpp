#ifndef EHDET_BATTERY_HPP
#define EHDET_BATTERY_HPP

#include <Eigen/Dense>

#include "ehdet/types.hpp"

namespace ehdet {

struct ChainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Poisson(rate) arrivals clipped at the battery capacity: probs[e] for
// e < capacity is the plain pmf, probs[capacity] absorbs the tail.
struct ArrivalPmf {
    std::vector<double> probs;
};

ArrivalPmf truncated_arrival_pmf(double rate, int capacity);

// Cells consumed for one transmission: floor(c_l * level). interval is 1-based.
int power_units(const PowerPolicy& policy, int interval, int level);

// Battery recursion: min{ max(level + arrival - consumed, 0), capacity }.
int battery_step(int level, int arrival, int consumed, int capacity);

// Probability of transmitting in a slot: Pi0 * P_f + Pi1 * P_d.
double transmit_prob(const OperatingPoint& op, const Priors& priors);

// Row-stochastic battery transition matrix, rows indexed by from-state.
Eigen::MatrixXd transition_matrix(const PowerPolicy& policy, const HarvestModel& harvest,
                                  const Quantizer& quantizer, const OperatingPoint& op,
                                  const Priors& priors);

// Stationary distribution of a row-stochastic matrix, solved as the left
// eigenproblem via a least-squares solve with a normalization row; power
// iteration as fallback. Rejects reducible or periodic chains.
Eigen::VectorXd steady_state(const Eigen::MatrixXd& transition);

double mean_battery(const Eigen::VectorXd& steady);

struct BatteryChain {
    Eigen::MatrixXd transition;
    Eigen::VectorXd steady;
    double mean_energy = 0.0;
};

BatteryChain build_chain(const PowerPolicy& policy, const HarvestModel& harvest,
                         const Quantizer& quantizer, const OperatingPoint& op,
                         const Priors& priors);

}  // namespace ehdet

#endif
