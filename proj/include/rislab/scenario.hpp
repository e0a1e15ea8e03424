#ifndef RISLAB_SCENARIO_HPP
#define RISLAB_SCENARIO_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "rislab/link_analysis.hpp"
#include "rislab/result_table.hpp"
#include "rislab/scattering.hpp"
#include "rislab/types.hpp"

namespace rislab {

enum class Workflow { Coupling, Scatter, Bandwidth, Overhead, Routing, Estimate };

std::string_view workflow_name(Workflow w);
std::optional<Workflow> parse_workflow(std::string_view name);

struct CouplingScenario {
    std::vector<int> n_side;
    std::vector<double> spacing;
    bool quadrature = false;
    int theta_nodes = 64;
    int phi_nodes = 128;
};

struct ScatterScenario {
    int n_side = 4;
    double spacing = 0.5;
    LoadConfig load = LoadConfig::zero();
    Direction incident;
    double amplitude = 1.0;
    std::vector<Direction> observe;
    std::vector<ScatterModel> models;
    double n0 = 1.0;
    double noise_figure = 1.0;
    double interference = 1.0;
};

struct BandwidthScenario {
    std::vector<double> d_tx, d_rx, theta_incident, theta_reflected, side_length;
};

struct OverheadScenario {
    OverheadParams params;
    std::vector<double> access_gain;
};

struct RoutingScenario {
    struct Route {
        int incident_beam = -1;  // redirective
        int outgoing_beam = -1;
        Direction incident;      // reflective
        Direction outgoing;
    };
    int n_side = 4;
    double spacing = 0.5;
    bool redirective = true;
    std::vector<Route> routes;
    std::vector<ScatterModel> models;
};

struct EstimateScenario {
    std::vector<int> ports;
    int sparsity = 1;
    std::vector<double> snr_db;
    int trials = 100;
};

using ScenarioSpec = std::variant<CouplingScenario, ScatterScenario, BandwidthScenario,
                                  OverheadScenario, RoutingScenario, EstimateScenario>;

struct ScenarioConfig {
    Workflow workflow = Workflow::Coupling;
    ScenarioSpec spec;
    std::uint64_t seed = 0;
    std::filesystem::path out_dir = ".";
    std::string stem;
    OutputFormat format = OutputFormat::Csv;
    nlohmann::json document;  ///< effective config, seed override applied
};

/// Parses and fully validates a JSON scenario. Unknown keys, missing keys and
/// wrong types throw ConfigurationError naming the key path and source line.
/// When `expected` is given the document's "workflow" may be omitted but must
/// otherwise agree.
ScenarioConfig parse_config(const std::string& text, const std::string& source = "<config>",
                            std::optional<Workflow> expected = std::nullopt);
ScenarioConfig load_config(const std::filesystem::path& path,
                           std::optional<Workflow> expected = std::nullopt);

/// Replaces the seed and refreshes the effective document.
void override_seed(ScenarioConfig& cfg, std::uint64_t seed);

/// FNV-1a over the canonical dump of the effective config.
std::string config_hash(const ScenarioConfig& cfg);

/// Runs the workflow. Sweep points go to `jobs` workers; rows come back in
/// sweep order. Metadata carries version, seed and config hash; the
/// timestamp is left empty for the caller.
ResultTable run_scenario(const ScenarioConfig& cfg, int jobs = 1);

}  // namespace rislab

#endif  // RISLAB_SCENARIO_HPP
