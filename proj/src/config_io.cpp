#include "ehdet/config_io.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace ehdet {

using json = nlohmann::ordered_json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw ConfigError(where + ": " + what);
}

void check_keys(const json& obj, const std::string& where, const std::set<std::string>& known) {
    for (const auto& [key, _] : obj.items()) {
        if (!known.count(key)) {
            fail(where, "unknown key '" + key + "'");
        }
    }
}

double get_number(const json& obj, const std::string& where, const std::string& key) {
    if (!obj.contains(key)) {
        fail(where, "missing key '" + key + "'");
    }
    if (!obj[key].is_number()) {
        fail(where, "key '" + key + "' must be a number");
    }
    return obj[key].get<double>();
}

double get_number_or(const json& obj, const std::string& where, const std::string& key,
                     double fallback) {
    if (!obj.contains(key)) {
        return fallback;
    }
    if (!obj[key].is_number()) {
        fail(where, "key '" + key + "' must be a number");
    }
    return obj[key].get<double>();
}

std::vector<double> get_array(const json& obj, const std::string& where, const std::string& key) {
    if (!obj.contains(key) || !obj[key].is_array()) {
        fail(where, "key '" + key + "' must be an array of numbers");
    }
    std::vector<double> out;
    for (const auto& v : obj[key]) {
        if (!v.is_number()) {
            fail(where, "key '" + key + "' must contain only numbers");
        }
        out.push_back(v.get<double>());
    }
    return out;
}

SensorModel parse_sensor(const json& obj, const std::string& where) {
    check_keys(obj, where,
               {"signal_amplitude", "deployment", "obs_noise_var", "ch_noise_var", "mean_sq_gain"});
    SensorModel s;
    if (obj.contains("signal_amplitude")) {
        s.signal_amplitude = get_number(obj, where, "signal_amplitude");
    }
    if (obj.contains("deployment")) {
        const json& d = obj["deployment"];
        if (!d.is_object()) {
            fail(where, "'deployment' must be an object");
        }
        check_keys(d, where + ".deployment", {"source_power", "inner_radius", "outer_radius"});
        Deployment dep;
        dep.source_power = get_number(d, where + ".deployment", "source_power");
        dep.inner_radius = get_number(d, where + ".deployment", "inner_radius");
        dep.outer_radius = get_number(d, where + ".deployment", "outer_radius");
        s.deployment = dep;
    }
    if (s.signal_amplitude.has_value() == s.deployment.has_value()) {
        fail(where, "exactly one of signal_amplitude/deployment required");
    }
    s.obs_noise_var = get_number(obj, where, "obs_noise_var");
    s.ch_noise_var = get_number(obj, where, "ch_noise_var");
    s.mean_sq_gain = get_number(obj, where, "mean_sq_gain");
    return s;
}

SensorDesign parse_sensor_design(const json& obj, const std::string& where) {
    check_keys(obj, where, {"theta", "thresholds"});
    SensorDesign d;
    d.theta = get_number(obj, where, "theta");
    d.thresholds = get_array(obj, where, "thresholds");
    return d;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) {
        throw ConfigError("config root must be an object");
    }
    check_keys(doc, "config",
               {"sensors", "policy", "harvest", "priors", "trials", "seed", "sweep", "design",
                "mc"});

    ExperimentConfig cfg;

    if (!doc.contains("sensors") || !doc["sensors"].is_array() || doc["sensors"].empty()) {
        throw ConfigError("config: 'sensors' must be a non-empty array");
    }
    for (std::size_t i = 0; i < doc["sensors"].size(); ++i) {
        std::ostringstream where;
        where << "sensors[" << i << "]";
        cfg.sensors.push_back(parse_sensor(doc["sensors"][i], where.str()));
    }

    if (!doc.contains("policy") || !doc["policy"].is_object()) {
        throw ConfigError("config: 'policy' must be an object");
    }
    const json& pol = doc["policy"];
    check_keys(pol, "policy", {"capacity", "coeffs", "unit_energy"});
    cfg.policy.capacity = static_cast<int>(get_number(pol, "policy", "capacity"));
    cfg.policy.coeffs = get_array(pol, "policy", "coeffs");
    cfg.policy.unit_energy = get_number_or(pol, "policy", "unit_energy", 1.0);

    if (!doc.contains("harvest") || !doc["harvest"].is_object()) {
        throw ConfigError("config: 'harvest' must be an object");
    }
    check_keys(doc["harvest"], "harvest", {"rate"});
    cfg.harvest.rate = get_number(doc["harvest"], "harvest", "rate");

    if (!doc.contains("priors") || !doc["priors"].is_object()) {
        throw ConfigError("config: 'priors' must be an object");
    }
    const json& pr = doc["priors"];
    check_keys(pr, "priors", {"pi0", "tau"});
    const double pi0 = get_number(pr, "priors", "pi0");
    if (!(pi0 > 0.0 && pi0 < 1.0)) {
        throw ConfigError("priors: pi0 must lie strictly between 0 and 1");
    }
    cfg.priors = Priors::from_pi0(pi0);
    if (pr.contains("tau")) {
        const double tau = get_number(pr, "priors", "tau");
        if (std::abs(tau - cfg.priors.tau) > 1e-9 * std::max(1.0, std::abs(cfg.priors.tau))) {
            throw ConfigError("priors: tau inconsistent with pi0");
        }
        cfg.priors.tau = tau;
    }

    if (doc.contains("trials")) {
        cfg.trials = static_cast<long>(get_number(doc, "config", "trials"));
    }
    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_integer() && !doc["seed"].is_number_unsigned()) {
            throw ConfigError("config: 'seed' must be an integer");
        }
        cfg.seed = doc["seed"].get<std::uint64_t>();
    }

    if (doc.contains("sweep")) {
        if (!doc["sweep"].is_array()) {
            throw ConfigError("config: 'sweep' must be an array");
        }
        for (const auto& item : doc["sweep"]) {
            if (!item.is_object()) {
                throw ConfigError("sweep entries must be objects");
            }
            check_keys(item, "sweep", {"param", "grid"});
            SweepSpec sw;
            if (!item.contains("param") || !item["param"].is_string()) {
                throw ConfigError("sweep: 'param' must be a string");
            }
            sw.param = item["param"].get<std::string>();
            sw.grid = get_array(item, "sweep", "grid");
            cfg.sweep.push_back(std::move(sw));
        }
    }

    if (doc.contains("design")) {
        const json& des = doc["design"];
        if (!des.is_object()) {
            throw ConfigError("config: 'design' must be an object");
        }
        check_keys(des, "design", {"shared", "per_sensor"});
        std::vector<SensorDesign> entries;
        if (des.contains("shared")) {
            const SensorDesign shared = parse_sensor_design(des["shared"], "design.shared");
            entries.assign(cfg.sensors.size(), shared);
        } else if (des.contains("per_sensor")) {
            if (!des["per_sensor"].is_array()) {
                throw ConfigError("design: 'per_sensor' must be an array");
            }
            for (std::size_t i = 0; i < des["per_sensor"].size(); ++i) {
                std::ostringstream where;
                where << "design.per_sensor[" << i << "]";
                entries.push_back(parse_sensor_design(des["per_sensor"][i], where.str()));
            }
        } else {
            throw ConfigError("design: one of 'shared'/'per_sensor' required");
        }
        cfg.design = std::move(entries);
    }

    if (doc.contains("mc")) {
        const json& mc = doc["mc"];
        if (!mc.is_object()) {
            throw ConfigError("config: 'mc' must be an object");
        }
        check_keys(mc, "mc", {"battery_init", "fc_amplitude"});
        if (mc.contains("battery_init")) {
            const std::string mode = mc["battery_init"].get<std::string>();
            if (mode == "steady") {
                cfg.mc.battery_init = BatteryInitMode::steady;
            } else if (mode == "evolve") {
                cfg.mc.battery_init = BatteryInitMode::evolve;
            } else {
                throw ConfigError("mc.battery_init must be 'steady' or 'evolve'");
            }
        }
        if (mc.contains("fc_amplitude")) {
            const std::string mode = mc["fc_amplitude"].get<std::string>();
            if (mode == "genie") {
                cfg.mc.fc_amplitude = FcAmplitudeMode::genie;
            } else if (mode == "expected") {
                cfg.mc.fc_amplitude = FcAmplitudeMode::expected;
            } else {
                throw ConfigError("mc.fc_amplitude must be 'genie' or 'expected'");
            }
        }
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("config not found: " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

namespace {

json sensor_to_json(const SensorModel& s) {
    json obj = json::object();
    if (s.signal_amplitude) {
        obj["signal_amplitude"] = *s.signal_amplitude;
    }
    if (s.deployment) {
        obj["deployment"] = {{"source_power", s.deployment->source_power},
                             {"inner_radius", s.deployment->inner_radius},
                             {"outer_radius", s.deployment->outer_radius}};
    }
    obj["obs_noise_var"] = s.obs_noise_var;
    obj["ch_noise_var"] = s.ch_noise_var;
    obj["mean_sq_gain"] = s.mean_sq_gain;
    return obj;
}

json config_to_json(const ExperimentConfig& cfg) {
    json doc = json::object();
    doc["sensors"] = json::array();
    for (const SensorModel& s : cfg.sensors) {
        doc["sensors"].push_back(sensor_to_json(s));
    }
    doc["policy"] = {{"capacity", cfg.policy.capacity},
                     {"coeffs", cfg.policy.coeffs},
                     {"unit_energy", cfg.policy.unit_energy}};
    doc["harvest"] = {{"rate", cfg.harvest.rate}};
    doc["priors"] = {{"pi0", cfg.priors.pi0}, {"tau", cfg.priors.tau}};
    doc["trials"] = cfg.trials;
    doc["seed"] = cfg.seed;
    if (!cfg.sweep.empty()) {
        doc["sweep"] = json::array();
        for (const SweepSpec& sw : cfg.sweep) {
            doc["sweep"].push_back({{"param", sw.param}, {"grid", sw.grid}});
        }
    }
    if (cfg.design) {
        json list = json::array();
        for (const SensorDesign& d : *cfg.design) {
            list.push_back({{"theta", d.theta}, {"thresholds", d.thresholds}});
        }
        doc["design"] = {{"per_sensor", list}};
    }
    doc["mc"] = {{"battery_init",
                  cfg.mc.battery_init == BatteryInitMode::steady ? "steady" : "evolve"},
                 {"fc_amplitude",
                  cfg.mc.fc_amplitude == FcAmplitudeMode::genie ? "genie" : "expected"}};
    return doc;
}

}  // namespace

std::string serialize_config(const ExperimentConfig& config) {
    return config_to_json(config).dump(2) + "\n";
}

void save_config(const ExperimentConfig& config, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw ConfigError("cannot write config: " + path);
    }
    out << serialize_config(config);
}

std::string config_snapshot(const ExperimentConfig& config) {
    return config_to_json(config).dump();
}

}  // namespace ehdet
