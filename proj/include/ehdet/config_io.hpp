#ifndef EHDET_CONFIG_IO_HPP
#define EHDET_CONFIG_IO_HPP

#include <string>

#include "ehdet/types.hpp"

namespace ehdet {

// Parse a JSON config document. Structural problems (bad JSON, unknown keys,
// wrong types, inconsistent pi0/tau pair) throw ConfigError; semantic
// invariants are left to validate().
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// Canonical serialization: fixed key order, two-space indent, shortest
// round-tripping number format. serialize(parse(serialize(c))) is
// byte-identical to serialize(c).
std::string serialize_config(const ExperimentConfig& config);
void save_config(const ExperimentConfig& config, const std::string& path);

// Canonical single-line form for CSV header comments.
std::string config_snapshot(const ExperimentConfig& config);

}  // namespace ehdet

#endif
