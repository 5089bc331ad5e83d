#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "parallel_spectra/lattice.hpp"
#include "parallel_spectra/types.hpp"

namespace paraspec {

// CLI configuration. External site indices are 1-based; the parser converts
// to the library's 0-based convention.

struct SweepSpec {
    std::string param; ///< gamma | kappa | V | delta
    double from = 0.0;
    double to = 0.0;
    int steps = 1;
};

struct PacketSpec {
    std::optional<double> center; ///< defaults to N_total / 3
    double momentum = M_PI / 2.0;
    double alpha = 0.2;
};

struct ScenarioConfig {
    double dt = 0.5;
    double t_max = 200.0;
    std::vector<double> dump_times = {0.0, 50.0, 100.0, 150.0, 200.0};
    PacketSpec packet;
    std::optional<SweepSpec> sweep;
    double audit_tolerance = 1e-8;
    double truncation_threshold = 1e-6;
};

struct RunConfig {
    ModelSpec model;
    CouplingParams params;
    double hopping = 1.0; ///< J (params block)
    Tolerances tol;
    ScenarioConfig scenario;
    nlohmann::json echo; ///< effective document, for run metadata
};

nlohmann::json load_config_file(const std::filesystem::path& path);

/// Applies one `--set key.path=value` override onto the raw document.
void apply_override(nlohmann::json& config, const std::string& assignment);

/// Validates the document (unknown keys rejected, all values finite) and
/// builds the run configuration. Throws ConfigError.
RunConfig parse_config(const nlohmann::json& document);

/// Total site count of the built lattice (endpoints included).
int total_sites(const ModelSpec& model);

} // namespace paraspec
