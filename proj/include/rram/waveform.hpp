#pragma once

#include <optional>
#include <string_view>
#include <vector>

namespace rram {

enum class SegmentKind { pulse, ramp, sine, hold };

[[nodiscard]] SegmentKind parse_segment_kind(std::string_view name);
[[nodiscard]] std::string_view to_string(SegmentKind k);

struct Segment {
    SegmentKind kind = SegmentKind::hold;
    double amplitude = 0.0;  // V; for sine the (final) envelope amplitude
    double duration = 0.0;   // s
    double frequency = 0.0;  // Hz, sine only
    /// ramp: starting level (default 0 V). sine: starting envelope; the
    /// envelope then grows linearly to `amplitude` over the segment.
    std::optional<double> start_amplitude;

    static Segment pulse(double amplitude, double duration) { return {SegmentKind::pulse, amplitude, duration, 0.0, std::nullopt}; }
    static Segment hold(double duration) { return {SegmentKind::hold, 0.0, duration, 0.0, std::nullopt}; }
    static Segment ramp(double from, double to, double duration) {
        return {SegmentKind::ramp, to, duration, 0.0, from};
    }
    static Segment sine(double amplitude, double frequency, double duration,
                        std::optional<double> start_amplitude = std::nullopt) {
        return {SegmentKind::sine, amplitude, duration, frequency, start_amplitude};
    }

    /// True when the segment is 0 V throughout.
    [[nodiscard]] bool idle() const;
};

/// Piecewise voltage stimulus. Immutable after construction.
class Waveform {
public:
    /// Throws ConfigError when a duration is not positive or sample_dt is not
    /// in (0, shortest segment / 4]. `edge_time` > 0 gives pulses linear
    /// rise/fall edges of that length (inside the pulse duration).
    Waveform(std::vector<Segment> segments, double sample_dt, double edge_time = 0.0);

    /// Voltage at time t in [0, total_duration()]. Segments are closed on the
    /// left; t == total_duration() evaluates the last segment's end point.
    [[nodiscard]] double voltage_at(double t) const;
    /// Voltage inside segment `index` at local time `t_local`.
    [[nodiscard]] double segment_voltage(std::size_t index, double t_local) const;

    [[nodiscard]] double total_duration() const { return total_; }
    [[nodiscard]] double sample_dt() const { return sample_dt_; }
    [[nodiscard]] double edge_time() const { return edge_time_; }
    [[nodiscard]] const std::vector<Segment>& segments() const { return segments_; }
    /// Start time of every segment.
    [[nodiscard]] const std::vector<double>& starts() const { return starts_; }
    [[nodiscard]] double shortest_segment() const;
    /// Shortest non-idle segment, or the shortest segment if all are idle.
    [[nodiscard]] double shortest_pulse() const;

private:
    std::vector<Segment> segments_;
    std::vector<double> starts_;
    double sample_dt_;
    double edge_time_;
    double total_;
};

struct ProtocolOptions {
    double gap = 100e-6;            // 0 V dwell between programming and read pulses
    double read_amplitude = 0.05;
    double read_width = 200e-6;
    double sample_dt = 0.0;         // 0 = shortest segment / 4
};

/// SET 500 mV x 1 ms, read, RESET -1 V x 1 ms, read.
[[nodiscard]] Waveform ron_roff_protocol(const ProtocolOptions& opt = {});

/// Eight (SET 500 mV x 100 us, read) pairs followed by RESET -1 V x 2 ms.
[[nodiscard]] Waveform dynamics_protocol(const ProtocolOptions& opt = {});

struct LeakageOptions {
    ProtocolOptions protocol{};
    int n_probe = 100;
    double interval = 1.0;
    double reset_amplitude = -1.0;
    double reset_width = 1e-3;
    double set_amplitude = 1.0;
    double set_width = 1e-3;
    /// Number of SET pulses. 1 is the single experiment; more gives the
    /// series experiment with n_probe reads after each pulse.
    int set_pulses = 1;
};

/// RESET, n_probe reads spaced by `interval`, then for each SET pulse the
/// pulse followed by n_probe reads spaced by `interval`.
[[nodiscard]] Waveform leakage_protocol(const LeakageOptions& opt = {});
/// Same as leakage_protocol with the given read count and spacing.
[[nodiscard]] Waveform leakage_protocol(int n_probe, double interval);

struct SweepOptions {
    double frequency = 100.0;
    double start_amplitude = 0.2;
    double amplitude = 1.0;
    int cycles = 10;
    double sample_dt = 40e-6;
};

/// Sinusoid with a linearly growing envelope, used for threshold extraction.
[[nodiscard]] Waveform forming_sweep(const SweepOptions& opt = {});

}  // namespace rram
