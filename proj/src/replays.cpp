#include "rram/replays.hpp"

#include <algorithm>
#include <cmath>

#include "rram/errors.hpp"
#include "rram/parallel.hpp"

namespace rram {

namespace {

TransientOptions pulse_options(const ReplayOptions& opt) {
    TransientOptions to;
    to.dt = opt.dt;
    to.record_dt = opt.protocol.read_width / 40.0;
    to.integrator = opt.integrator;
    return to;
}

// Index of the sample recorded exactly at time t (segment boundaries always are).
std::size_t sample_at(const TransientTrace& trace, double t) {
    auto it = std::lower_bound(trace.t.begin(), trace.t.end(), t - 1e-12 * std::max(1.0, t));
    if (it == trace.t.end()) throw ContractViolation("no trace sample at the requested time");
    return static_cast<std::size_t>(it - trace.t.begin());
}

double closed_form_read(const TransientTrace& trace, double start, double end, double t_end,
                        const DeviceState& s, const DeviceParams& p) {
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t k = 0; k < trace.size(); ++k) {
        if (trace.t[k] < start || trace.t[k] >= end) continue;
        const double dt = trace.t[k] - t_end;
        const double w = std::clamp(s.w + s.theta * p.tau_l * (1.0 - std::exp(-dt / p.tau_l)), p.w_on, p.w_off);
        sum += resistance(w, p);
        ++n;
    }
    if (n == 0) throw ContractViolation("read window contains no samples");
    return sum / static_cast<double>(n);
}

LeakagePhase make_phase(const TransientTrace& trace, const std::vector<std::pair<double, double>>& windows,
                        std::size_t first, std::size_t count, double t_end, const DeviceParams& p) {
    LeakagePhase ph;
    const std::size_t at = sample_at(trace, t_end);
    const DeviceSample& ds = trace.devices[at][0];
    const DeviceState s{ds.w, ds.theta, +1};
    for (std::size_t k = first; k < first + count; ++k) {
        const auto [a, b] = windows[k];
        ph.t.push_back(0.5 * (a + b) - t_end);
        ph.r.push_back(read_resistance(trace, 0, a, b));
        ph.closed_form.push_back(closed_form_read(trace, a, b, t_end, s, p));
    }
    ph.drift = ph.r.back() - ph.r.front();
    for (double r : ph.r) ph.max_relative_change = std::max(ph.max_relative_change, std::abs(r / ph.r.front() - 1.0));
    if (ph.r.size() >= 3 && ph.max_relative_change > 1e-6) ph.fit = fit_exponential(ph.t, ph.r);
    return ph;
}

}  // namespace

DeviceParams replay_params(const ReplayOptions& opt, std::uint64_t index) {
    DeviceParams p = opt.variation ? sample(opt.dists, SamplingPolicy{opt.mode, opt.seed}, index, 0)
                                   : opt.dists.mean_params();
    if (!opt.leakage) {
        p.theta_off = 0.0;
        p.theta_on = 0.0;
    }
    return p;
}

std::vector<std::pair<double, double>> read_windows(const Waveform& wf, const ProtocolOptions& p) {
    std::vector<std::pair<double, double>> out;
    const auto& segs = wf.segments();
    for (std::size_t k = 0; k < segs.size(); ++k) {
        const Segment& s = segs[k];
        if (s.kind != SegmentKind::pulse || s.amplitude != p.read_amplitude || s.duration != p.read_width) continue;
        const double start = wf.starts()[k];
        out.emplace_back(start + 0.5 * s.duration, start + s.duration);
    }
    return out;
}

double read_resistance(const TransientTrace& trace, std::size_t device, double start, double end) {
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t k = 0; k < trace.size(); ++k) {
        if (trace.t[k] < start || trace.t[k] >= end) continue;
        const DeviceSample& s = trace.devices[k].at(device);
        if (s.i == 0.0) continue;
        sum += s.v / s.i;
        ++n;
    }
    if (n == 0) throw ContractViolation("read window contains no usable samples");
    return sum / static_cast<double>(n);
}

RonRoffResult replay_ron_roff(std::size_t n_cycles, const ReplayOptions& opt) {
    if (n_cycles < 2) throw ConfigError("the resistance replay needs at least two cycles");
    const Waveform wf = ron_roff_protocol(opt.protocol);
    const auto windows = read_windows(wf, opt.protocol);
    if (windows.size() != 2) throw ContractViolation("resistance protocol must contain two reads");
    const TransientOptions to = pulse_options(opt);

    RonRoffResult res;
    res.ron.resize(n_cycles);
    res.roff.resize(n_cycles);
    res.ron_programmed.resize(n_cycles);
    res.roff_programmed.resize(n_cycles);
    parallel_for(n_cycles, opt.jobs, [&](std::size_t c) {
        const DeviceParams p = replay_params(opt, c);
        const TransientResult tr = run_device(wf, DeviceState::hrs(p), p, to);
        res.ron[c] = read_resistance(tr.trace, 0, windows[0].first, windows[0].second);
        res.roff[c] = read_resistance(tr.trace, 0, windows[1].first, windows[1].second);
        res.ron_programmed[c] = p.r_on;
        res.roff_programmed[c] = p.r_off;
    });
    res.ron_fit = fit_gaussian(res.ron);
    res.roff_fit = fit_gaussian(res.roff);
    return res;
}

DynamicsResult replay_dynamics(std::size_t n_runs, const ReplayOptions& opt) {
    if (n_runs < 1) throw ConfigError("the dynamics replay needs at least one run");
    const Waveform wf = dynamics_protocol(opt.protocol);
    const auto windows = read_windows(wf, opt.protocol);
    const double reset_start = wf.starts().back();
    const TransientOptions to = pulse_options(opt);

    DynamicsResult res;
    res.staircase.resize(n_runs);
    std::vector<std::vector<double>> reset_r(n_runs);
    std::vector<double> reset_t;
    parallel_for(n_runs, opt.jobs, [&](std::size_t run) {
        const DeviceParams p = replay_params(opt, run);
        const TransientResult tr = run_device(wf, DeviceState::hrs(p), p, to);
        for (const auto& [a, b] : windows) res.staircase[run].push_back(read_resistance(tr.trace, 0, a, b));
        std::vector<double> ts;
        for (std::size_t k = 0; k < tr.trace.size(); ++k) {
            if (tr.trace.t[k] < reset_start) continue;
            ts.push_back(tr.trace.t[k] - reset_start);
            reset_r[run].push_back(tr.trace.devices[k][0].r);
        }
        if (run == 0) reset_t = std::move(ts);
    });
    const std::size_t n_reads = windows.size();
    res.mean_staircase.assign(n_reads, 0.0);
    for (const auto& row : res.staircase) {
        for (std::size_t k = 0; k < n_reads; ++k) res.mean_staircase[k] += row[k] / static_cast<double>(n_runs);
        if (n_reads >= 3) res.set_change.push_back(row[2] - row[0]);
    }
    res.reset_t = std::move(reset_t);
    res.reset_r.assign(res.reset_t.size(), 0.0);
    for (const auto& row : reset_r) {
        if (row.size() != res.reset_t.size()) throw ContractViolation("RESET traces differ in length");
        for (std::size_t k = 0; k < row.size(); ++k) res.reset_r[k] += row[k] / static_cast<double>(n_runs);
    }
    return res;
}

LeakageResult replay_leakage(const LeakageOptions& protocol, const ReplayOptions& opt, std::uint64_t run) {
    LeakageOptions lp = protocol;
    lp.protocol = opt.protocol;
    lp.protocol.sample_dt = protocol.protocol.sample_dt;
    const Waveform wf = leakage_protocol(lp);
    const auto windows = read_windows(wf, lp.protocol);
    const std::size_t n = static_cast<std::size_t>(lp.n_probe);
    if (windows.size() != n * static_cast<std::size_t>(lp.set_pulses + 1)) {
        throw ContractViolation("leakage protocol read count mismatch");
    }

    TransientOptions to = pulse_options(opt);
    to.hold_dt = std::min(1e-3, lp.interval);
    to.hold_record_dt = std::min(0.05, lp.interval / 4.0);

    LeakageResult res;
    res.protocol = lp;
    res.params = replay_params(opt, run);
    TransientResult tr = run_device(wf, DeviceState::hrs(res.params), res.params, to);

    const auto& starts = wf.starts();
    const auto& segs = wf.segments();
    // Segment layout: pulse, n x (hold, read), then per SET pulse the same.
    const std::size_t phase_len = 1 + 2 * n;
    res.after_reset = make_phase(tr.trace, windows, 0, n, starts[0] + segs[0].duration, res.params);
    std::vector<double> sim, model;
    for (int k = 0; k < lp.set_pulses; ++k) {
        const std::size_t seg = phase_len * static_cast<std::size_t>(k + 1);
        const double t_end = starts[seg] + segs[seg].duration;
        LeakagePhase ph = make_phase(tr.trace, windows, n * static_cast<std::size_t>(k + 1), n, t_end, res.params);
        sim.insert(sim.end(), ph.r.begin(), ph.r.end());
        model.insert(model.end(), ph.closed_form.begin(), ph.closed_form.end());
        res.after_set.push_back(std::move(ph));
    }
    res.average_deviation = average_deviation(sim, model);
    res.max_deviation = max_deviation(sim, model);
    res.trace = std::move(tr.trace);
    return res;
}

ThresholdReplayResult replay_thresholds(const SweepOptions& sweep, const ThresholdOptions& detect,
                                        const ReplayOptions& opt, std::optional<double> i_limit,
                                        std::uint64_t run) {
    const Waveform wf = forming_sweep(sweep);
    TransientOptions to;
    to.dt = opt.dt;
    to.record_dt = sweep.sample_dt;
    to.i_limit = i_limit;
    to.integrator = opt.integrator;

    ThresholdReplayResult res;
    res.params = replay_params(opt, run);
    TransientResult tr = run_device(wf, DeviceState::hrs(res.params), res.params, to);
    std::vector<double> v, i;
    v.reserve(tr.trace.size());
    i.reserve(tr.trace.size());
    for (const auto& row : tr.trace.devices) {
        v.push_back(row[0].v);
        i.push_back(row[0].i);
    }
    res.thresholds = extract_thresholds(v, i, sweep.sample_dt, detect);
    res.trace = std::move(tr.trace);
    return res;
}

}  // namespace rram
