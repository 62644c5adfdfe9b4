#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "ddcert/certificate.hpp"
#include "ddcert/dynamics.hpp"
#include "ddcert/loss.hpp"
#include "ddcert/synthesis.hpp"
#include "ddcert/validation.hpp"

namespace ddcert {

using json = nlohmann::json;

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Added to the training seed when no validation seed is given.
inline constexpr std::uint64_t kValidationSeedOffset = 0x5bd1e995ULL;

/// Environment variable naming the default output root.
inline constexpr const char* kOutputRootEnv = "DDCERT_OUT";

/// Complete serializable input of a run.
struct ExperimentConfig {
    std::string name = "custom";
    std::string system = "spiral2d";          ///< built-in name, or "expressions"
    std::vector<std::string> expressions;     ///< used when system == "expressions"
    PropertySpec property;
    NetworkSpec network;
    HyperParams synth;
    std::uint64_t seed = 1;                   ///< training draws and parameter init
    std::optional<std::uint64_t> validation_seed;
    std::size_t n = 1000;
    double beta = 1e-5;
    std::size_t validation_m = 1000;
    std::string output_dir;                   ///< empty: $DDCERT_OUT or ./runs

    System make_system() const;
    std::uint64_t effective_validation_seed() const {
        return validation_seed.value_or(seed + kValidationSeedOffset);
    }
    std::string effective_output_dir() const;
    void validate() const;
};

json region_to_json(const Region& r);
Region region_from_json(const json& j);

json config_to_json(const ExperimentConfig& c);
ExperimentConfig config_from_json(const json& j);

std::vector<std::string> preset_names();
json preset_json(const std::string& name);

/// Sets the dotted `key` in `j` to `value`, parsed as JSON when possible and
/// kept as a string otherwise.
void apply_override(json& j, const std::string& assignment);

/// preset (optional) <- config file (optional) <- overrides.
ExperimentConfig load_config(const std::optional<std::string>& preset, const std::optional<std::string>& file,
                             const std::vector<std::string>& overrides);

struct RunReport {
    ExperimentConfig config;
    Algorithm2Result synthesis;
    double epsilon = 1.0;               ///< compression bound at R_N
    std::size_t direct_count = 0;       ///< training samples violating the property
    double epsilon_direct = 1.0;
    ValidationReport validation;
    double wall_time_s = 0.0;
    std::vector<std::string> warnings;

    bool certified() const { return synthesis.certified(); }
};

/// Samples, synthesizes, bounds and validates.
RunReport run_experiment(const ExperimentConfig& cfg);

/// Loss trace decimated to at most `max_points` entries (first and last kept).
std::vector<double> decimate(const std::vector<double>& trace, std::size_t max_points);

json report_to_json(const RunReport& r);
json validation_to_json(const ValidationReport& v);

}  // namespace ddcert
