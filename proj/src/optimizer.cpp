#include "ehdet/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "ehdet/battery.hpp"
#include "ehdet/channel.hpp"
#include "ehdet/divergence.hpp"
#include "ehdet/local_detection.hpp"

namespace ehdet {

std::string to_string(SolveStatus status) {
    switch (status) {
        case SolveStatus::converged: return "converged";
        case SolveStatus::grid_exhausted: return "grid-exhausted";
        case SolveStatus::infeasible: return "infeasible";
    }
    return "unknown";
}

namespace {

constexpr double kCoordLo = 1e-6;
constexpr double kCoordHi = 1.0 - 1e-6;

struct CandidateValue {
    double divergence = 0.0;
    double power = 0.0;
    SensorDesignPoint point;
};

struct VectorKeyHash {
    std::size_t operator()(const std::vector<double>& v) const {
        std::size_t h = v.size();
        for (double x : v) {
            std::uint64_t bits;
            static_assert(sizeof(bits) == sizeof(x));
            std::memcpy(&bits, &x, sizeof(bits));
            h ^= bits + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
        }
        return h;
    }
};

// Per-sensor candidate evaluator with memoization on the exact coordinate
// vector (a rounded key could alias two candidates and break the
// recompute-from-design identity the reports promise).
class SensorEvaluator {
public:
    SensorEvaluator(const ExperimentConfig& config, int sensor_index)
        : config_(config), model_(config.sensors[sensor_index]) {}

    int dims() const { return 1 + static_cast<int>(config_.policy.coeffs.size()) - 1; }

    bool valid(const std::vector<double>& x) const {
        double sum = 0.0;
        for (double v : x) {
            if (!(v > 0.0 && v < 1.0)) {
                return false;
            }
        }
        for (std::size_t i = 1; i < x.size(); ++i) {
            sum += x[i];
        }
        return sum < 1.0 - kCoordLo;
    }

    const CandidateValue& evaluate(const std::vector<double>& x, long& evaluations) {
        auto it = cache_.find(x);
        if (it != cache_.end()) {
            return it->second;
        }
        ++evaluations;
        CandidateValue val;
        val.point = materialize(x);
        const OperatingPoint op{val.point.theta, val.point.pf, val.point.pd};
        const Quantizer quant{val.point.thresholds, val.point.interval_probs};
        const BatteryChain chain =
            build_chain(config_.policy, config_.harvest, quant, op, config_.priors);
        val.divergence = total_j(chain, config_.policy, quant, op, model_);
        val.power = total_alpha(chain, config_.policy, quant, op, config_.priors);
        return cache_.emplace(x, std::move(val)).first->second;
    }

    SensorDesignPoint materialize(const std::vector<double>& x) const {
        SensorDesignPoint p;
        p.pd = x[0];
        p.theta = threshold_for_pd(p.pd, model_);
        const OperatingPoint op = operating_point(p.theta, model_);
        p.pf = op.pf;
        p.interval_probs.assign(x.begin() + 1, x.end());
        double sum = 0.0;
        for (double v : p.interval_probs) {
            sum += v;
        }
        p.interval_probs.push_back(1.0 - sum);
        p.thresholds = thresholds_from_probs(p.interval_probs, model_.mean_sq_gain);
        return p;
    }

private:
    const ExperimentConfig& config_;
    const SensorModel& model_;
    std::unordered_map<std::vector<double>, CandidateValue, VectorKeyHash> cache_;
};

// Lexicographic preference used for exact ties in the objective.
bool tie_prefers(const std::vector<double>& cand, const std::vector<double>& best) {
    return cand < best;
}

struct SensorSolve {
    std::vector<double> x;
    CandidateValue value;
    long evaluations = 0;
    SolveStatus status = SolveStatus::converged;
};

// Shared grid + coordinate-descent search. `feasible` gates candidates;
// `better` orders two feasible objective values (strict improvement);
// `closer` orders infeasible candidates by distance to feasibility so an
// infeasible report can name the best achieved constraint value.
SensorSolve search_sensor(SensorEvaluator& eval, const SearchOptions& opts,
                          const std::function<bool(const CandidateValue&)>& feasible,
                          const std::function<bool(double, double)>& better,
                          const std::function<double(const CandidateValue&)>& objective,
                          const std::function<bool(const CandidateValue&, const CandidateValue&)>&
                              closer,
                          int sensor_index, std::vector<EvalRecord>* trace) {
    SensorSolve out;
    const int dims = eval.dims();
    std::vector<double> x(dims);
    bool have_best = false;
    bool have_any = false;
    std::vector<double> best_x, any_x;
    double best_obj = 0.0;
    CandidateValue any_val;

    auto consider = [&](const std::vector<double>& cand) {
        if (!eval.valid(cand)) {
            return false;
        }
        const CandidateValue& v = eval.evaluate(cand, out.evaluations);
        if (trace) {
            trace->push_back({sensor_index, cand[0],
                              std::vector<double>(cand.begin() + 1, cand.end()), v.divergence,
                              v.power});
        }
        if (!have_any || closer(v, any_val)) {
            have_any = true;
            any_val = v;
            any_x = cand;
        }
        if (!feasible(v)) {
            return false;
        }
        const double obj = objective(v);
        if (!have_best || better(obj, best_obj) ||
            (obj == best_obj && tie_prefers(cand, best_x))) {
            have_best = true;
            best_obj = obj;
            best_x = cand;
            return true;
        }
        return false;
    };

    // Coarse grid, lexicographic order over grid indices.
    std::vector<int> idx(dims, 0);
    const int g = opts.grid_points;
    while (true) {
        for (int d = 0; d < dims; ++d) {
            x[d] = (idx[d] + 0.5) / g;
        }
        consider(x);
        int d = dims - 1;
        while (d >= 0 && ++idx[d] == g) {
            idx[d] = 0;
            --d;
        }
        if (d < 0) {
            break;
        }
    }

    if (!have_best) {
        out.status = SolveStatus::infeasible;
        if (have_any) {
            out.x = any_x;
            out.value = eval.evaluate(any_x, out.evaluations);
        }
        return out;
    }

    // Coordinate descent with interval halving down to the target resolution.
    double step = 1.0 / g;
    while (step >= opts.refine_resolution && out.evaluations < opts.eval_cap) {
        bool improved = false;
        for (int d = 0; d < dims; ++d) {
            for (double dir : {+1.0, -1.0}) {
                std::vector<double> cand = best_x;
                cand[d] = std::clamp(cand[d] + dir * step, kCoordLo, kCoordHi);
                if (cand[d] == best_x[d]) {
                    continue;
                }
                improved |= consider(cand);
            }
        }
        if (!improved) {
            step *= 0.5;
        }
    }
    if (step >= opts.refine_resolution) {
        out.status = SolveStatus::grid_exhausted;
    }
    out.x = best_x;
    out.value = eval.evaluate(best_x, out.evaluations);
    return out;
}

SolveReport solve_common(const ExperimentConfig& config, bool maximize_j, double bound,
                         const SearchOptions& opts, std::vector<EvalRecord>* trace) {
    SolveReport report;
    report.objective = 0.0;
    for (std::size_t n = 0; n < config.sensors.size(); ++n) {
        SensorEvaluator eval(config, static_cast<int>(n));
        std::function<bool(const CandidateValue&)> feasible;
        std::function<bool(double, double)> better;
        std::function<double(const CandidateValue&)> objective;
        std::function<bool(const CandidateValue&, const CandidateValue&)> closer;
        if (maximize_j) {
            feasible = [&](const CandidateValue& v) { return v.power <= bound + 1e-12; };
            better = [](double a, double b) { return a > b; };
            objective = [](const CandidateValue& v) { return v.divergence; };
            closer = [](const CandidateValue& a, const CandidateValue& b) {
                return a.power < b.power;
            };
        } else {
            feasible = [&](const CandidateValue& v) { return v.divergence >= bound - 1e-12; };
            better = [](double a, double b) { return a < b; };
            objective = [](const CandidateValue& v) { return v.power; };
            closer = [](const CandidateValue& a, const CandidateValue& b) {
                return a.divergence > b.divergence;
            };
        }
        SensorSolve s = search_sensor(eval, opts, feasible, better, objective, closer,
                                      static_cast<int>(n), trace);
        report.evaluations += s.evaluations;
        if (s.status == SolveStatus::infeasible) {
            report.status = SolveStatus::infeasible;
        } else if (s.status == SolveStatus::grid_exhausted &&
                   report.status == SolveStatus::converged) {
            report.status = SolveStatus::grid_exhausted;
        }
        report.design.sensors.push_back(s.value.point);
        if (maximize_j) {
            report.objective += s.value.divergence;
            report.constraint_values.push_back(s.value.power);
        } else {
            report.objective += s.value.power;
            report.constraint_values.push_back(s.value.divergence);
        }
    }
    return report;
}

}  // namespace

SolveReport solve_p1(const ExperimentConfig& config, double alpha0, const SearchOptions& opts,
                     std::vector<EvalRecord>* trace) {
    if (!(alpha0 > 0.0)) {
        throw ConfigError("solve_p1: power budget must be positive");
    }
    return solve_common(config, true, alpha0, opts, trace);
}

SolveReport solve_p2(const ExperimentConfig& config, double j0, const SearchOptions& opts,
                     std::vector<EvalRecord>* trace) {
    return solve_common(config, false, j0, opts, trace);
}

DesignPoint design_from_sensor_designs(const ExperimentConfig& config,
                                       const std::vector<SensorDesign>& designs) {
    if (designs.size() != config.sensors.size()) {
        throw ConfigError("design must list one entry per sensor");
    }
    DesignPoint dp;
    for (std::size_t n = 0; n < designs.size(); ++n) {
        const SensorModel& model = config.sensors[n];
        SensorDesignPoint p;
        p.theta = designs[n].theta;
        const OperatingPoint op = operating_point(p.theta, model);
        p.pf = op.pf;
        p.pd = op.pd;
        const Quantizer quant =
            make_quantizer_from_finite(designs[n].thresholds, model.mean_sq_gain);
        p.thresholds = quant.thresholds;
        p.interval_probs = quant.probs;
        dp.sensors.push_back(std::move(p));
    }
    return dp;
}

DesignPoint design_from_config(const ExperimentConfig& config) {
    if (!config.design) {
        throw ConfigError("config has no design section");
    }
    return design_from_sensor_designs(config, *config.design);
}

DesignMetrics evaluate_design(const ExperimentConfig& config, const DesignPoint& design) {
    if (design.sensors.size() != config.sensors.size()) {
        throw ConfigError("design must list one entry per sensor");
    }
    DesignMetrics m;
    for (std::size_t n = 0; n < design.sensors.size(); ++n) {
        const SensorDesignPoint& p = design.sensors[n];
        const OperatingPoint op{p.theta, p.pf, p.pd};
        const Quantizer quant{p.thresholds, p.interval_probs};
        const BatteryChain chain =
            build_chain(config.policy, config.harvest, quant, op, config.priors);
        m.divergence.push_back(total_j(chain, config.policy, quant, op, config.sensors[n]));
        m.power.push_back(total_alpha(chain, config.policy, quant, op, config.priors));
        m.mean_battery.push_back(chain.mean_energy);
    }
    return m;
}

using json = nlohmann::ordered_json;

std::string serialize_design(const DesignPoint& design) {
    json list = json::array();
    for (const SensorDesignPoint& p : design.sensors) {
        std::vector<double> finite(p.thresholds.begin() + 1, p.thresholds.end() - 1);
        list.push_back({{"pd", p.pd},
                        {"pf", p.pf},
                        {"theta", p.theta},
                        {"interval_probs", p.interval_probs},
                        {"thresholds", finite}});
    }
    json doc = {{"per_sensor", list}};
    return doc.dump(2) + "\n";
}

DesignPoint parse_design(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("design is not valid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("per_sensor") || !doc["per_sensor"].is_array()) {
        throw ConfigError("design: 'per_sensor' array required");
    }
    DesignPoint dp;
    for (const auto& item : doc["per_sensor"]) {
        for (const auto& [key, _] : item.items()) {
            if (key != "pd" && key != "pf" && key != "theta" && key != "interval_probs" &&
                key != "thresholds") {
                throw ConfigError("design: unknown key '" + key + "'");
            }
        }
        SensorDesignPoint p;
        p.pd = item.at("pd").get<double>();
        p.pf = item.at("pf").get<double>();
        p.theta = item.at("theta").get<double>();
        p.interval_probs = item.at("interval_probs").get<std::vector<double>>();
        const auto finite = item.at("thresholds").get<std::vector<double>>();
        p.thresholds.push_back(0.0);
        for (double t : finite) {
            p.thresholds.push_back(t);
        }
        p.thresholds.push_back(std::numeric_limits<double>::infinity());
        dp.sensors.push_back(std::move(p));
    }
    return dp;
}

DesignPoint load_design(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("design not found: " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_design(buf.str());
}

void save_design(const DesignPoint& design, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw ConfigError("cannot write design: " + path);
    }
    out << serialize_design(design);
}

}  // namespace ehdet
