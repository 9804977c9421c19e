#include "ehdet/battery.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

namespace ehdet {

ArrivalPmf truncated_arrival_pmf(double rate, int capacity) {
    if (!(rate > 0.0)) {
        throw ConfigError("harvest rate must be positive");
    }
    if (capacity < 1) {
        throw ConfigError("battery capacity must be at least 1");
    }
    ArrivalPmf pmf;
    pmf.probs.resize(static_cast<std::size_t>(capacity) + 1);
    double p = std::exp(-rate);  // Poisson pmf at 0
    double cum = 0.0;
    for (int e = 0; e < capacity; ++e) {
        pmf.probs[e] = p;
        cum += p;
        p *= rate / (e + 1);
    }
    pmf.probs[capacity] = std::max(1.0 - cum, 0.0);  // tail mass; guard rounding
    return pmf;
}

int power_units(const PowerPolicy& policy, int interval, int level) {
    if (interval < 1 || interval > static_cast<int>(policy.coeffs.size())) {
        throw ConfigError("power_units: interval index out of range");
    }
    if (level < 0 || level > policy.capacity) {
        throw ConfigError("power_units: battery level out of range");
    }
    return static_cast<int>(std::floor(policy.coeffs[interval - 1] * level));
}

int battery_step(int level, int arrival, int consumed, int capacity) {
    if (consumed > level) {
        throw ChainError("battery_step: consumption exceeds stored energy");
    }
    return std::min(std::max(level + arrival - consumed, 0), capacity);
}

double transmit_prob(const OperatingPoint& op, const Priors& priors) {
    return priors.pi0 * op.pf + priors.pi1 * op.pd;
}

Eigen::MatrixXd transition_matrix(const PowerPolicy& policy, const HarvestModel& harvest,
                                  const Quantizer& quantizer, const OperatingPoint& op,
                                  const Priors& priors) {
    if (static_cast<int>(policy.coeffs.size()) != quantizer.intervals()) {
        throw ConfigError("policy coefficient count must match quantizer interval count");
    }
    const int cap = policy.capacity;
    const ArrivalPmf arrival = truncated_arrival_pmf(harvest.rate, cap);
    const double p_tx = transmit_prob(op, priors);
    const double p_silent = 1.0 - p_tx;

    Eigen::MatrixXd psi = Eigen::MatrixXd::Zero(cap + 1, cap + 1);
    for (int i = 0; i <= cap; ++i) {
        for (int e = 0; e <= cap; ++e) {
            const double qe = arrival.probs[e];
            for (int l = 1; l <= quantizer.intervals(); ++l) {
                const int j = battery_step(i, e, power_units(policy, l, i), cap);
                psi(i, j) += p_tx * quantizer.probs[l - 1] * qe;
            }
            psi(i, battery_step(i, e, 0, cap)) += p_silent * qe;
        }
    }
    return psi;
}

namespace {

// Reachability over the support graph; edges i->j where psi(i,j) > 0.
std::vector<bool> reachable_from(const Eigen::MatrixXd& psi, int start, bool transpose) {
    const int n = static_cast<int>(psi.rows());
    std::vector<bool> seen(n, false);
    std::vector<int> stack{start};
    seen[start] = true;
    while (!stack.empty()) {
        const int u = stack.back();
        stack.pop_back();
        for (int v = 0; v < n; ++v) {
            const double w = transpose ? psi(v, u) : psi(u, v);
            if (w > 0.0 && !seen[v]) {
                seen[v] = true;
                stack.push_back(v);
            }
        }
    }
    return seen;
}

void check_irreducible_aperiodic(const Eigen::MatrixXd& psi) {
    const int n = static_cast<int>(psi.rows());
    const auto fwd = reachable_from(psi, 0, false);
    const auto bwd = reachable_from(psi, 0, true);
    std::vector<int> outside;
    for (int v = 0; v < n; ++v) {
        if (!fwd[v] || !bwd[v]) {
            outside.push_back(v);
        }
    }
    if (!outside.empty()) {
        std::ostringstream msg;
        msg << "chain is reducible: states {";
        for (std::size_t k = 0; k < outside.size(); ++k) {
            msg << (k ? "," : "") << outside[k];
        }
        msg << "} do not communicate with state 0";
        throw ChainError(msg.str());
    }
    // Period = gcd over edges (u,v) of level[u] + 1 - level[v] (BFS levels).
    std::vector<int> level(n, -1);
    std::vector<int> queue{0};
    level[0] = 0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const int u = queue[head];
        for (int v = 0; v < n; ++v) {
            if (psi(u, v) > 0.0 && level[v] < 0) {
                level[v] = level[u] + 1;
                queue.push_back(v);
            }
        }
    }
    int period = 0;
    for (int u = 0; u < n; ++u) {
        for (int v = 0; v < n; ++v) {
            if (psi(u, v) > 0.0) {
                period = std::gcd(period, std::abs(level[u] + 1 - level[v]));
            }
        }
    }
    if (period != 1) {
        std::ostringstream msg;
        msg << "chain is periodic with period " << period;
        throw ChainError(msg.str());
    }
}

double stationarity_residual(const Eigen::MatrixXd& psi, const Eigen::VectorXd& phi) {
    return (psi.transpose() * phi - phi).cwiseAbs().maxCoeff();
}

}  // namespace

Eigen::VectorXd steady_state(const Eigen::MatrixXd& transition) {
    const int n = static_cast<int>(transition.rows());
    if (transition.cols() != n || n < 1) {
        throw ChainError("transition matrix must be square and non-empty");
    }
    for (int i = 0; i < n; ++i) {
        double row = 0.0;
        for (int j = 0; j < n; ++j) {
            if (transition(i, j) < -1e-15 || transition(i, j) > 1.0 + 1e-12) {
                throw ChainError("transition entries must lie in [0,1]");
            }
            row += transition(i, j);
        }
        if (std::abs(row - 1.0) > 1e-12) {
            std::ostringstream msg;
            msg << "row " << i << " of transition matrix sums to " << row;
            throw ChainError(msg.str());
        }
    }
    check_irreducible_aperiodic(transition);

    // Stack (Psi^T - I) with the normalization row and least-squares solve.
    Eigen::MatrixXd a(n + 1, n);
    a.topRows(n) = transition.transpose() - Eigen::MatrixXd::Identity(n, n);
    a.bottomRows(1).setOnes();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n + 1);
    b(n) = 1.0;
    Eigen::VectorXd phi = a.colPivHouseholderQr().solve(b);

    if (stationarity_residual(transition, phi) > 1e-10 || phi.minCoeff() < -1e-12) {
        // Fallback: power iteration on the left eigenproblem.
        phi = Eigen::VectorXd::Constant(n, 1.0 / n);
        for (int it = 0; it < 200000; ++it) {
            Eigen::VectorXd next = transition.transpose() * phi;
            next /= next.sum();
            const double delta = (next - phi).cwiseAbs().maxCoeff();
            phi = next;
            if (delta < 1e-16) {
                break;
            }
        }
    }
    phi = phi.cwiseMax(0.0);
    phi /= phi.sum();
    const double residual = stationarity_residual(transition, phi);
    if (residual > 1e-10) {
        std::ostringstream msg;
        msg << "steady-state solve failed: stationarity residual " << residual;
        throw ChainError(msg.str());
    }
    return phi;
}

double mean_battery(const Eigen::VectorXd& steady) {
    double mean = 0.0;
    for (int k = 0; k < steady.size(); ++k) {
        mean += k * steady(k);
    }
    return mean;
}

BatteryChain build_chain(const PowerPolicy& policy, const HarvestModel& harvest,
                         const Quantizer& quantizer, const OperatingPoint& op,
                         const Priors& priors) {
    BatteryChain chain;
    chain.transition = transition_matrix(policy, harvest, quantizer, op, priors);
    chain.steady = steady_state(chain.transition);
    chain.mean_energy = mean_battery(chain.steady);
    return chain;
}

}  // namespace ehdet
