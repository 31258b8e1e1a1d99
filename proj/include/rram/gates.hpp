#pragma once

// Stateful two-input logic gates built from memristors, and Monte Carlo
// studies of their correctness and of output retention under leakage.
//
// Logic mapping: HRS is '0', LRS is '1'. Inputs are written as two-bit
// codes 0..3 for "00", "01", "10", "11", the first character being in1.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rram/analysis.hpp"
#include "rram/device.hpp"
#include "rram/netlist.hpp"
#include "rram/params.hpp"

namespace rram {

enum class GateFamily { imply, magic_nor, felix_or, tmsl_nor };

/// Accepts IMPLY, MAGIC, MAGIC_NOR, FELIX, FELIX_OR, TMSL, TMSL_NOR (case-insensitive).
[[nodiscard]] GateFamily parse_gate_family(std::string_view name);
/// IMPLY, MAGIC_NOR, FELIX_OR or TMSL_NOR.
[[nodiscard]] std::string_view to_string(GateFamily f);

/// Binary string of an input code, e.g. 2 -> "10".
[[nodiscard]] std::string input_label(int input);

struct GateSpec {
    GateFamily family = GateFamily::imply;
    double t_op = 50e-6;   // s, operation time
    double v_set = 0.6;    // V (IMPLY, TMSL)
    double v_cond = 0.4;   // V (IMPLY, TMSL)
    double v0 = 0.0;       // V (MAGIC, FELIX)
    double r_g = 40e3;     // Ohm (IMPLY, TMSL)
    /// Memristor orientations. IMPLY uses {P, Q}; the others {in1, in2, out}.
    std::array<int, 3> polarity{+1, +1, +1};

    /// Published design point of a family.
    [[nodiscard]] static GateSpec defaults(GateFamily f);

    [[nodiscard]] std::size_t device_count() const { return family == GateFamily::imply ? 2 : 3; }
    /// Device holding the result (Q for IMPLY, out otherwise).
    [[nodiscard]] std::size_t output_device() const { return family == GateFamily::imply ? 1 : 2; }
    /// Expected output bit for an input code.
    [[nodiscard]] int expected(int input) const;
    /// Initial logic value of every device for an input code.
    [[nodiscard]] std::vector<int> initial_bits(int input) const;
};

/// Throws ConfigError when the spec violates its family's design rules
/// (for IMPLY: v_set > v_off, v_set > v_cond, r_on < r_g < r_off, all at `nominal`).
void validate(const GateSpec& spec, const DeviceParams& nominal);

/// Circuit of the gate with every source at its operating value.
[[nodiscard]] Netlist build_netlist(const GateSpec& spec);

/// 1 when s >= 0.5 (LRS side), else 0.
[[nodiscard]] constexpr int logic_value(double s) { return s >= 0.5 ? 1 : 0; }

struct GateRunOptions {
    bool variation = true;
    bool leakage = true;
    /// Network step; 0 selects the default (min(100 ns, T / 50)).
    double dt = 0.0;
    IntegratorConfig integrator{};
};

struct GateTrialResult {
    std::uint64_t trial = 0;
    int input = 0;
    std::vector<DeviceParams> params;
    std::vector<DeviceState> final_states;
    std::vector<double> final_normalized;
    double output_state = 0.0;  // normalised output state at t = T
    int output_bit = 0;
    int expected_bit = 0;
    bool correct = false;
    /// Time after T at which leakage flipped the output (stable-time study only).
    std::optional<double> flip_time;
};

/// Parameter sets of one trial. Variation off gives the distribution means;
/// leakage off zeroes theta_off and theta_on.
[[nodiscard]] std::vector<DeviceParams> gate_params(const GateSpec& spec, const ParamDistributions& dists,
                                                    const SamplingPolicy& policy, std::uint64_t trial,
                                                    const GateRunOptions& opt);

/// One operation: initialise, drive the gate for T, read the verdict at T.
[[nodiscard]] GateTrialResult run_gate(const GateSpec& spec, int input, const ParamDistributions& dists,
                                       const SamplingPolicy& policy, std::uint64_t trial,
                                       const GateRunOptions& opt = {});

struct CorrectnessResult {
    GateSpec spec;
    std::size_t n_trials = 0;
    std::array<double, 4> p_correct{};  // per input code
    double overall = 0.0;               // unweighted mean of the four cases
    std::vector<GateTrialResult> trials;  // input-major, then trial index
};

/// Unweighted mean of the four per-input probabilities.
[[nodiscard]] double overall_probability(const std::array<double, 4>& p);

[[nodiscard]] CorrectnessResult correctness_study(const GateSpec& spec, std::size_t n_trials,
                                                  const ParamDistributions& dists, const SamplingPolicy& policy,
                                                  const GateRunOptions& opt = {}, int jobs = 1);

struct StableTimeOptions {
    double horizon = 200.0;        // s after T
    double first_step = 1e-9;      // s
    double growth = 1.02;          // ratio between successive steps
    double max_step = 10e-3;       // s
    std::size_t histogram_bins = 20;
};

struct StableTimeStats {
    int input = 0;
    std::size_t n_trials = 0;
    std::size_t n_correct = 0;     // initially correct outputs, the study population
    std::size_t n_flipped = 0;
    double horizon = 0.0;
    /// Times by which at least 90 % / 99 % of the population is still correct.
    /// Equal to the horizon when fewer outputs flipped (see *_reached).
    double t_90 = 0.0;
    double t_99 = 0.0;
    bool t_90_reached = false;
    bool t_99_reached = false;
    /// Mean and median over the outputs that flipped; empty when none did.
    std::optional<double> t_avg;
    std::optional<double> t_med;
    std::optional<Histogram> histogram;  // flip times
    /// Fraction of the population flipped by each flip time (sorted).
    std::vector<std::pair<double, double>> cdf;
};

/// Leakage-only evolution of a device with every source at 0 V. Returns the
/// first time the logic value differs from the value at t = 0, or nothing
/// when it holds until the horizon.
[[nodiscard]] std::optional<double> hold_flip_time(const DeviceState& s, const DeviceParams& p,
                                                   const StableTimeOptions& opt,
                                                   const IntegratorConfig& cfg = {});

struct StableTimeResult {
    GateSpec spec;
    StableTimeStats stats;
    std::vector<GateTrialResult> trials;
};

/// Derives t_90, t_99, averages and the CDF from flip times of the
/// initially correct population.
[[nodiscard]] StableTimeStats stable_time_stats(int input, std::size_t n_trials, std::size_t n_correct,
                                                std::vector<double> flip_times, const StableTimeOptions& opt);

[[nodiscard]] StableTimeResult stable_time_study(const GateSpec& spec, int input, std::size_t n_trials,
                                                 const ParamDistributions& dists, const SamplingPolicy& policy,
                                                 const StableTimeOptions& st = {}, const GateRunOptions& opt = {},
                                                 int jobs = 1);

}  // namespace rram
