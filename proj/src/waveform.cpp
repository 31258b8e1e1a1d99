#include "rram/waveform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "rram/errors.hpp"

namespace rram {

SegmentKind parse_segment_kind(std::string_view name) {
    if (name == "pulse") return SegmentKind::pulse;
    if (name == "ramp") return SegmentKind::ramp;
    if (name == "sine") return SegmentKind::sine;
    if (name == "hold") return SegmentKind::hold;
    throw ConfigError("unknown segment kind '" + std::string(name) + "'");
}

std::string_view to_string(SegmentKind k) {
    switch (k) {
    case SegmentKind::pulse: return "pulse";
    case SegmentKind::ramp: return "ramp";
    case SegmentKind::sine: return "sine";
    case SegmentKind::hold: return "hold";
    }
    return "hold";
}

bool Segment::idle() const {
    switch (kind) {
    case SegmentKind::hold: return true;
    case SegmentKind::pulse: return amplitude == 0.0;
    case SegmentKind::ramp: return amplitude == 0.0 && start_amplitude.value_or(0.0) == 0.0;
    case SegmentKind::sine: return amplitude == 0.0 && start_amplitude.value_or(amplitude) == 0.0;
    }
    return false;
}

Waveform::Waveform(std::vector<Segment> segments, double sample_dt, double edge_time)
    : segments_(std::move(segments)), sample_dt_(sample_dt), edge_time_(edge_time), total_(0.0) {
    if (segments_.empty()) throw ConfigError("waveform needs at least one segment");
    starts_.reserve(segments_.size());
    for (const Segment& s : segments_) {
        if (!(s.duration > 0.0) || !std::isfinite(s.duration)) {
            throw ConfigError("waveform segment durations must be > 0");
        }
        if (!std::isfinite(s.amplitude) || !std::isfinite(s.start_amplitude.value_or(0.0))) {
            throw ConfigError("waveform amplitudes must be finite");
        }
        if (s.kind == SegmentKind::sine && !(s.frequency > 0.0)) {
            throw ConfigError("sine segments need a positive frequency");
        }
        starts_.push_back(total_);
        total_ += s.duration;
    }
    if (!(sample_dt_ > 0.0) || sample_dt_ > shortest_segment() / 4.0) {
        std::ostringstream os;
        os << "sample_dt " << sample_dt_ << " must be in (0, " << shortest_segment() / 4.0 << "]";
        throw ConfigError(os.str());
    }
    if (!(edge_time_ >= 0.0)) throw ConfigError("edge_time must be >= 0");
    for (const Segment& s : segments_) {
        if (s.kind == SegmentKind::pulse && 2.0 * edge_time_ > s.duration) {
            throw ConfigError("edge_time longer than half a pulse");
        }
    }
}

double Waveform::shortest_segment() const {
    double m = std::numeric_limits<double>::infinity();
    for (const Segment& s : segments_) m = std::min(m, s.duration);
    return m;
}

double Waveform::shortest_pulse() const {
    double m = std::numeric_limits<double>::infinity();
    for (const Segment& s : segments_) {
        if (!s.idle()) m = std::min(m, s.duration);
    }
    return std::isfinite(m) ? m : shortest_segment();
}

double Waveform::segment_voltage(std::size_t index, double t_local) const {
    const Segment& s = segments_.at(index);
    const double frac = std::clamp(t_local / s.duration, 0.0, 1.0);
    switch (s.kind) {
    case SegmentKind::hold: return 0.0;
    case SegmentKind::pulse: {
        if (edge_time_ <= 0.0) return s.amplitude;
        const double rise = std::min({1.0, t_local / edge_time_, (s.duration - t_local) / edge_time_});
        return s.amplitude * std::max(rise, 0.0);
    }
    case SegmentKind::ramp: {
        const double a0 = s.start_amplitude.value_or(0.0);
        return a0 + (s.amplitude - a0) * frac;
    }
    case SegmentKind::sine: {
        const double a0 = s.start_amplitude.value_or(s.amplitude);
        const double env = a0 + (s.amplitude - a0) * frac;
        return env * std::sin(2.0 * std::numbers::pi * s.frequency * t_local);
    }
    }
    return 0.0;
}

double Waveform::voltage_at(double t) const {
    if (!(t >= 0.0 && t <= total_)) {
        std::ostringstream os;
        os << "time " << t << " outside waveform [0, " << total_ << "]";
        throw ContractViolation(os.str());
    }
    auto it = std::upper_bound(starts_.begin(), starts_.end(), t);
    const std::size_t idx = static_cast<std::size_t>(std::distance(starts_.begin(), it)) - 1;
    return segment_voltage(idx, t - starts_[idx]);
}

namespace {

double resolve_sample_dt(const std::vector<Segment>& segs, double requested) {
    if (requested > 0.0) return requested;
    double m = std::numeric_limits<double>::infinity();
    for (const Segment& s : segs) m = std::min(m, s.duration);
    return m / 4.0;
}

void add_read(std::vector<Segment>& segs, const ProtocolOptions& opt) {
    if (opt.gap > 0.0) segs.push_back(Segment::hold(opt.gap));
    segs.push_back(Segment::pulse(opt.read_amplitude, opt.read_width));
}

}  // namespace

Waveform ron_roff_protocol(const ProtocolOptions& opt) {
    std::vector<Segment> segs;
    segs.push_back(Segment::pulse(0.5, 1e-3));
    add_read(segs, opt);
    if (opt.gap > 0.0) segs.push_back(Segment::hold(opt.gap));
    segs.push_back(Segment::pulse(-1.0, 1e-3));
    add_read(segs, opt);
    const double dt = resolve_sample_dt(segs, opt.sample_dt);
    return Waveform(std::move(segs), dt);
}

Waveform dynamics_protocol(const ProtocolOptions& opt) {
    std::vector<Segment> segs;
    for (int k = 0; k < 8; ++k) {
        if (k > 0 && opt.gap > 0.0) segs.push_back(Segment::hold(opt.gap));
        segs.push_back(Segment::pulse(0.5, 100e-6));
        add_read(segs, opt);
    }
    if (opt.gap > 0.0) segs.push_back(Segment::hold(opt.gap));
    segs.push_back(Segment::pulse(-1.0, 2e-3));
    const double dt = resolve_sample_dt(segs, opt.sample_dt);
    return Waveform(std::move(segs), dt);
}

Waveform leakage_protocol(const LeakageOptions& opt) {
    if (opt.n_probe < 1) throw ConfigError("leakage protocol needs at least one probe");
    if (opt.set_pulses < 1) throw ConfigError("leakage protocol needs at least one SET pulse");
    const double width = opt.protocol.read_width;
    if (!(opt.interval > width)) throw ConfigError("probe interval must exceed the read width");
    std::vector<Segment> segs;
    auto probes = [&] {
        for (int k = 0; k < opt.n_probe; ++k) {
            segs.push_back(Segment::hold(opt.interval - width));
            segs.push_back(Segment::pulse(opt.protocol.read_amplitude, width));
        }
    };
    segs.push_back(Segment::pulse(opt.reset_amplitude, opt.reset_width));
    probes();
    for (int p = 0; p < opt.set_pulses; ++p) {
        segs.push_back(Segment::pulse(opt.set_amplitude, opt.set_width));
        probes();
    }
    const double dt = resolve_sample_dt(segs, opt.protocol.sample_dt);
    return Waveform(std::move(segs), dt);
}

Waveform leakage_protocol(int n_probe, double interval) {
    LeakageOptions opt;
    opt.n_probe = n_probe;
    opt.interval = interval;
    return leakage_protocol(opt);
}

Waveform forming_sweep(const SweepOptions& opt) {
    if (opt.cycles < 1) throw ConfigError("sweep needs at least one cycle");
    const double duration = opt.cycles / opt.frequency;
    return Waveform({Segment::sine(opt.amplitude, opt.frequency, duration, opt.start_amplitude)}, opt.sample_dt);
}

}  // namespace rram
