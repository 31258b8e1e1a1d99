#pragma once

// Simulated versions of the device characterisation experiments: resistance
// variation over cycles, the SET staircase, leakage after SET, and
// threshold extraction from a sine sweep.

#include <cstdint>
#include <optional>
#include <vector>

#include "rram/analysis.hpp"
#include "rram/params.hpp"
#include "rram/transient.hpp"
#include "rram/waveform.hpp"

namespace rram {

struct ReplayOptions {
    ParamDistributions dists = default_distributions();
    std::uint64_t seed = 0;
    SamplingMode mode = SamplingMode::per_cycle;
    bool variation = true;
    bool leakage = true;
    ProtocolOptions protocol{};
    IntegratorConfig integrator{};
    /// Network step while a pulse is applied; 0 selects the default.
    double dt = 0.0;
    int jobs = 1;
};

/// Parameters of run `index` (device 0 of that cycle).
[[nodiscard]] DeviceParams replay_params(const ReplayOptions& opt, std::uint64_t index);

/// Read windows of a waveform: the second half of every pulse with the
/// read amplitude and width, as [start, end) pairs in time order.
[[nodiscard]] std::vector<std::pair<double, double>> read_windows(const Waveform& wf, const ProtocolOptions& p);

/// Mean of v / i over the trace samples of one device inside [start, end).
[[nodiscard]] double read_resistance(const TransientTrace& trace, std::size_t device, double start, double end);

struct RonRoffResult {
    std::vector<double> ron;   // read back after each SET pulse
    std::vector<double> roff;  // read back after each RESET pulse
    std::vector<double> ron_programmed;   // sampled r_on of each cycle
    std::vector<double> roff_programmed;  // sampled r_off of each cycle
    GaussianFit ron_fit;
    GaussianFit roff_fit;
};

/// One protocol run per cycle, each with its own parameter draw and
/// starting from full HRS. Needs n_cycles >= 2.
[[nodiscard]] RonRoffResult replay_ron_roff(std::size_t n_cycles, const ReplayOptions& opt = {});

struct DynamicsResult {
    std::vector<std::vector<double>> staircase;  // [run][reading], one reading per SET pulse
    std::vector<double> mean_staircase;
    std::vector<double> set_change;              // reading 3 minus reading 1, per run
    std::vector<double> reset_t;                 // time since the RESET pulse started
    std::vector<double> reset_r;                 // resistance during RESET, averaged over runs
};

/// Eight-pulse SET staircase per run, starting from full HRS.
[[nodiscard]] DynamicsResult replay_dynamics(std::size_t n_runs, const ReplayOptions& opt = {});

struct LeakagePhase {
    std::vector<double> t;              // probe times since the end of the preceding pulse
    std::vector<double> r;              // probe readings
    std::vector<double> closed_form;    // hold-band drift prediction at the same reads
    double drift = 0.0;                 // last minus first reading
    double max_relative_change = 0.0;   // largest |r_k / r_0 - 1|
    std::optional<ExpFit> fit;          // absent when the readings are flat
};

struct LeakageResult {
    LeakageOptions protocol;
    DeviceParams params;
    LeakagePhase after_reset;
    std::vector<LeakagePhase> after_set;  // one per SET pulse
    double average_deviation = 0.0;       // simulated vs closed form, over every post-SET probe
    double max_deviation = 0.0;
    TransientTrace trace;
};

/// RESET, probes, then one or more (SET, probes) phases. `run` selects the
/// parameter draw.
[[nodiscard]] LeakageResult replay_leakage(const LeakageOptions& protocol, const ReplayOptions& opt = {},
                                           std::uint64_t run = 0);

struct ThresholdReplayResult {
    ThresholdResult thresholds;
    DeviceParams params;
    TransientTrace trace;
};

/// Sine sweep over a device starting in HRS, then threshold extraction on
/// the recorded (v, i) samples. `i_limit` clamps the reported current.
[[nodiscard]] ThresholdReplayResult replay_thresholds(const SweepOptions& sweep, const ThresholdOptions& detect,
                                                      const ReplayOptions& opt = {},
                                                      std::optional<double> i_limit = std::nullopt,
                                                      std::uint64_t run = 0);

}  // namespace rram
