#pragma once

// Threshold-type ReRAM device with leakage-driven state drift.
//
// The device has a bounded internal state w in [w_on, w_off] (w_on = LRS,
// w_off = HRS) and a leakage capacity theta (m/s). Above the positive
// threshold the device SETs (w moves toward w_on), below the negative
// threshold it RESETs (w moves toward w_off), and inside the threshold band
// w drifts at rate theta. Every SET/RESET charges theta proportionally to the
// realised state change; theta drains with time constant tau_l.
//
// Sign convention: k_off and k_on are read as rate magnitudes. A positive
// theta drives w toward w_off, so charge accumulated by a SET pulls the device
// back toward HRS once the stimulus is removed.

#include <optional>
#include <string_view>

namespace rram {

struct DeviceParams {
    double r_off = 545.54e3;    // Ohm, HRS resistance
    double r_on = 4.92e3;       // Ohm, LRS resistance
    double v_off = 0.3702;      // V, positive (SET) threshold
    double v_on = -0.3738;      // V, negative (RESET) threshold
    double k_off = 780e-6;      // m/s, SET rate magnitude
    double k_on = -4.67e-6;     // m/s, RESET rate (stored negative)
    double alpha_off = 3.0;
    double alpha_on = 3.0;
    double a_off = 1.3e-9;      // m
    double a_on = 1.8e-9;       // m
    double w_c = 0.98e-9;       // m
    double w_off = 3e-9;        // m, HRS bound
    double w_on = 0.0;          // m, LRS bound
    double theta_off = 0.0173;  // 1/s
    double theta_on = 0.0;      // 1/s, <= 0
    double tau_l = 10.3;        // s

    [[nodiscard]] double range() const { return w_off - w_on; }
};

/// Throws ConfigError naming the first violated invariant.
void validate(const DeviceParams& p);

struct DeviceState {
    double w = 3e-9;
    double theta = 0.0;
    int polarity = +1;  // +1: positive terminal voltage SETs the device

    /// Fully RESET device with an empty leakage capacity.
    static DeviceState hrs(const DeviceParams& p, int polarity = +1) { return {p.w_off, 0.0, polarity}; }
    /// Fully SET device with an empty leakage capacity.
    static DeviceState lrs(const DeviceParams& p, int polarity = +1) { return {p.w_on, 0.0, polarity}; }
};

enum class Scheme { euler, rk4 };

[[nodiscard]] Scheme parse_scheme(std::string_view name);
[[nodiscard]] std::string_view to_string(Scheme s);

struct IntegratorConfig {
    /// Per-substep cap on |dw| as a fraction of (w_off - w_on).
    double max_dw_fraction = 1.0 / 200.0;
    /// Per-substep cap on the step length as a fraction of tau_l. Keeps the
    /// explicit decay of theta accurate over several time constants.
    double max_dt_tau_fraction = 1e-3;
    Scheme scheme = Scheme::euler;
    /// Hard limit against runaway substepping.
    long max_substeps = 50'000'000;
};

struct StepReport {
    double dt_used = 0.0;
    long substeps = 0;
    double w_before = 0.0;
    double w_after = 0.0;
    bool clamped = false;
};

// Window functions. Both are defined for every real w and lie in (0, 1).
[[nodiscard]] double window_off(double w, const DeviceParams& p);
[[nodiscard]] double window_on(double w, const DeviceParams& p);

enum class Branch { set, hold, reset };

/// Branch selected by the polarity-corrected voltage. Thresholds belong to
/// the hold band.
[[nodiscard]] Branch branch_of(double v_eff, const DeviceParams& p);

/// Magnitude of the SET-branch rate k_off (v/v_off - 1)^a f_off(w); zero
/// outside the SET branch.
[[nodiscard]] double set_rate(double v_eff, double w, const DeviceParams& p);
/// Magnitude of the RESET-branch rate |k_on| (v/v_on - 1)^a f_on(w); zero
/// outside the RESET branch.
[[nodiscard]] double reset_rate(double v_eff, double w, const DeviceParams& p);

/// dw/dt for terminal voltage v.
[[nodiscard]] double state_derivative(double v, const DeviceState& s, const DeviceParams& p);
/// dtheta/dt for terminal voltage v.
[[nodiscard]] double leakage_derivative(double v, const DeviceState& s, const DeviceParams& p);

/// Linear state-to-resistance map. Throws ContractViolation outside [w_on, w_off].
[[nodiscard]] double resistance(double w, const DeviceParams& p);

/// Ohmic current v / R(w), optionally limited to |i| <= i_limit.
[[nodiscard]] double current(double v, double w, const DeviceParams& p,
                             std::optional<double> i_limit = std::nullopt);

/// Normalised state: 1 at LRS, 0 at HRS.
[[nodiscard]] double normalized_state(double w, const DeviceParams& p);

struct StepResult {
    DeviceState state;
    StepReport report;
};

/// Advances the device by dt under constant terminal voltage v.
///
/// Substeps are chosen so |dw| per substep stays below
/// cfg.max_dw_fraction * range and the substep length stays below
/// cfg.max_dt_tau_fraction * tau_l. w is clamped to [w_on, w_off] after each
/// substep; leakage charging only counts the state change that was actually
/// realised, so a device pinned at a bound does not keep charging theta.
[[nodiscard]] StepResult step(const DeviceState& s, double v, double dt, const DeviceParams& p,
                              const IntegratorConfig& cfg = {});

}  // namespace rram
