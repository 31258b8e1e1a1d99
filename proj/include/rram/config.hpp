#pragma once

// Run configuration: one JSON document describing the model preset,
// distribution overrides, integrator, study sizes, stimuli and circuits.
// Command-line flags are applied on top of the document before parsing.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "rram/analysis.hpp"
#include "rram/device.hpp"
#include "rram/gates.hpp"
#include "rram/netlist.hpp"
#include "rram/params.hpp"
#include "rram/waveform.hpp"

namespace rram {

struct DeviceRunConfig {
    /// "hrs", "lrs", or a numeric w in metres.
    nlohmann::json initial = "hrs";
    int polarity = +1;
    double duration = 0.0;  // netlist runs; 0 = longest waveform
};

struct RunConfig {
    std::string preset = "believer-default";
    ParamDistributions dists = default_distributions();
    IntegratorConfig integrator{};
    std::optional<std::size_t> trials;
    int jobs = 1;
    std::uint64_t seed = 0;
    std::string out = "out";
    std::string label;
    double horizon = 200.0;
    bool variation = true;
    bool leakage = true;
    double dt = 0.0;
    std::optional<double> i_limit;

    nlohmann::json gate = nlohmann::json::object();  // per-family overrides
    std::vector<int> inputs{0, 1, 2, 3};             // stable-time input cases
    ProtocolOptions protocol{};
    LeakageOptions leakage_protocol{};
    SweepOptions sweep{};
    ThresholdOptions thresholds{};
    std::optional<nlohmann::json> waveform;
    std::optional<nlohmann::json> netlist;
    DeviceRunConfig device{};
};

/// Parses a configuration document. Unknown keys are rejected with ConfigError.
[[nodiscard]] RunConfig parse_config(const nlohmann::json& doc);
/// Reads and parses a file; throws ConfigError on I/O or syntax errors.
[[nodiscard]] nlohmann::json read_config_file(const std::filesystem::path& path);

/// Resolved configuration, suitable for echoing into a manifest.
[[nodiscard]] nlohmann::json to_json(const RunConfig& cfg);

[[nodiscard]] nlohmann::json to_json(const DistributionSpec& d);
[[nodiscard]] nlohmann::json to_json(const DeviceParams& p);

[[nodiscard]] Waveform waveform_from_json(const nlohmann::json& j);
[[nodiscard]] nlohmann::json to_json(const Waveform& wf);

/// `{"nodes": [...], "elements": [{"type": "resistor|memristor|vsource", ...}]}`.
[[nodiscard]] Netlist netlist_from_json(const nlohmann::json& j);

/// Family defaults with the overrides of `cfg.gate` applied.
[[nodiscard]] GateSpec gate_spec(const RunConfig& cfg, GateFamily family);
[[nodiscard]] nlohmann::json to_json(const GateSpec& spec);

}  // namespace rram
