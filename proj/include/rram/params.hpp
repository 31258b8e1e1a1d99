#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

#include "rram/device.hpp"

namespace rram {

enum class DistKind { fixed, gaussian, uniform };

[[nodiscard]] DistKind parse_dist_kind(std::string_view name);
[[nodiscard]] std::string_view to_string(DistKind k);

/// One parameter's distribution. For `uniform` the support is
/// mean +/- half_width_sigmas * sigma (see ParamDistributions).
struct DistributionSpec {
    DistKind kind = DistKind::fixed;
    double mean = 0.0;
    double sigma = 0.0;
};

/// Identifiers of the parameters that may vary. Values double as RNG stream ids.
enum class VariedParam : std::uint8_t { r_off = 0, r_on, v_off, v_on, k_off, k_on };
inline constexpr std::size_t kVariedCount = 6;
inline constexpr std::array<std::string_view, kVariedCount> kVariedNames = {"r_off", "r_on", "v_off",
                                                                            "v_on",  "k_off", "k_on"};

struct ParamDistributions {
    std::array<DistributionSpec, kVariedCount> varied{};
    /// Values for every non-varied parameter; the varied fields are overwritten by sampling.
    DeviceParams fixed{};
    /// Half-width of uniform supports, in units of sigma.
    double uniform_half_width_sigmas = 3.0;
    /// Gaussian draws outside mean +/- this many sigma are redrawn.
    double gaussian_truncation_sigmas = 4.0;
    int max_attempts = 100;

    [[nodiscard]] DistributionSpec& operator[](VariedParam v) { return varied[static_cast<std::size_t>(v)]; }
    [[nodiscard]] const DistributionSpec& operator[](VariedParam v) const {
        return varied[static_cast<std::size_t>(v)];
    }

    /// All parameters pinned to their means.
    [[nodiscard]] ParamDistributions nominal() const;
    /// Nominal parameter set (distribution means plus fixed values).
    [[nodiscard]] DeviceParams mean_params() const;
};

/// Fitted statistics for the measured device family.
[[nodiscard]] ParamDistributions default_distributions();
/// Same as the default except R_on uses the statistics of the first resistance study
/// (4.64 kOhm, sigma 427.9 Ohm).
[[nodiscard]] ParamDistributions sec2b_distributions();
/// Looks up `believer-default` or `believer-sec2b`; throws ConfigError otherwise.
[[nodiscard]] ParamDistributions preset(std::string_view name);

enum class SamplingMode { per_cycle, per_device, both };

[[nodiscard]] SamplingMode parse_sampling_mode(std::string_view name);
[[nodiscard]] std::string_view to_string(SamplingMode m);

struct SamplingPolicy {
    SamplingMode mode = SamplingMode::both;
    std::uint64_t base_seed = 0;
};

/// Draws a parameter set for (trial, device).
///
/// per_cycle: the draw depends on the trial only (one physical device cycled
/// repeatedly); per_device: on the device only (fixed device instances);
/// both: on the pair. Identical inputs always yield identical parameters.
[[nodiscard]] DeviceParams sample(const ParamDistributions& dists, const SamplingPolicy& policy,
                                  std::uint64_t trial, std::uint64_t device);

/// Throws ConfigError if a distribution cannot produce a valid draw.
void validate(const ParamDistributions& dists);

}  // namespace rram
