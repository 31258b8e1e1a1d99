#include "rram/gates.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include "rram/errors.hpp"
#include "rram/parallel.hpp"
#include "rram/transient.hpp"

namespace rram {

namespace {

int bit(int input, int which) { return (input >> (1 - which)) & 1; }

void check_input(int input) {
    if (input < 0 || input > 3) throw ContractViolation("gate input code must be in 0..3");
}

}  // namespace

GateFamily parse_gate_family(std::string_view name) {
    std::string up(name);
    for (char& c : up) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (up == "IMPLY") return GateFamily::imply;
    if (up == "MAGIC" || up == "MAGIC_NOR") return GateFamily::magic_nor;
    if (up == "FELIX" || up == "FELIX_OR") return GateFamily::felix_or;
    if (up == "TMSL" || up == "TMSL_NOR") return GateFamily::tmsl_nor;
    throw ConfigError("unknown gate family '" + std::string(name) + "' (expected IMPLY|MAGIC|FELIX|TMSL)");
}

std::string_view to_string(GateFamily f) {
    switch (f) {
    case GateFamily::imply: return "IMPLY";
    case GateFamily::magic_nor: return "MAGIC_NOR";
    case GateFamily::felix_or: return "FELIX_OR";
    case GateFamily::tmsl_nor: return "TMSL_NOR";
    }
    return "IMPLY";
}

std::string input_label(int input) {
    check_input(input);
    return std::string{static_cast<char>('0' + bit(input, 0)), static_cast<char>('0' + bit(input, 1))};
}

GateSpec GateSpec::defaults(GateFamily f) {
    GateSpec s;
    s.family = f;
    switch (f) {
    case GateFamily::imply:
        s.t_op = 50e-6;
        s.v_set = 0.6;
        s.v_cond = 0.4;
        s.r_g = 40e3;
        s.polarity = {+1, +1, +1};
        break;
    case GateFamily::magic_nor:
        s.t_op = 10e-3;
        s.v0 = 1.0;
        s.v_set = s.v_cond = 0.0;
        s.polarity = {-1, -1, -1};
        break;
    case GateFamily::felix_or:
        s.t_op = 10e-3;
        s.v0 = 1.0;
        s.v_set = s.v_cond = 0.0;
        s.polarity = {+1, +1, +1};
        break;
    case GateFamily::tmsl_nor:
        s.t_op = 100e-6;
        s.v_set = 1.0;
        s.v_cond = 0.5;
        s.r_g = 40e3;
        s.polarity = {+1, +1, +1};
        break;
    }
    return s;
}

int GateSpec::expected(int input) const {
    check_input(input);
    const int a = bit(input, 0);
    const int b = bit(input, 1);
    switch (family) {
    case GateFamily::imply: return (!a || b) ? 1 : 0;
    case GateFamily::magic_nor:
    case GateFamily::tmsl_nor: return (a || b) ? 0 : 1;
    case GateFamily::felix_or: return (a || b) ? 1 : 0;
    }
    return 0;
}

std::vector<int> GateSpec::initial_bits(int input) const {
    check_input(input);
    const int a = bit(input, 0);
    const int b = bit(input, 1);
    switch (family) {
    case GateFamily::imply: return {a, b};
    case GateFamily::magic_nor: return {a, b, 1};
    case GateFamily::felix_or:
    case GateFamily::tmsl_nor: return {a, b, 0};
    }
    return {};
}

void validate(const GateSpec& spec, const DeviceParams& nominal) {
    auto fail = [&](const std::string& msg) {
        throw ConfigError(std::string(to_string(spec.family)) + " design: " + msg);
    };
    if (!(spec.t_op > 0.0) || !std::isfinite(spec.t_op)) fail("operation time must be > 0");
    for (std::size_t k = 0; k < spec.device_count(); ++k) {
        if (spec.polarity[k] != 1 && spec.polarity[k] != -1) fail("polarities must be +1 or -1");
    }
    switch (spec.family) {
    case GateFamily::imply:
        if (!(spec.v_set > nominal.v_off)) fail("V_set must exceed v_off");
        if (!(spec.v_set > spec.v_cond)) fail("V_set must exceed V_cond");
        if (!(spec.r_g > nominal.r_on && spec.r_g < nominal.r_off)) fail("R_G must lie between r_on and r_off");
        break;
    case GateFamily::tmsl_nor:
        if (!(spec.v_set > spec.v_cond)) fail("V_set must exceed V_cond");
        if (!(spec.r_g > 0.0)) fail("R_G must be > 0");
        break;
    case GateFamily::magic_nor:
    case GateFamily::felix_or:
        if (!(spec.v0 > 0.0) || !std::isfinite(spec.v0)) fail("V0 must be > 0");
        break;
    }
}

Netlist build_netlist(const GateSpec& spec) {
    Netlist net;
    const auto& pol = spec.polarity;
    switch (spec.family) {
    case GateFamily::imply: {
        const NodeId vc = net.add_node("vcond");
        const NodeId vs = net.add_node("vset");
        const NodeId n = net.add_node("n");
        net.add_vsource("VCOND", vc, kGround, spec.v_cond);
        net.add_vsource("VSET", vs, kGround, spec.v_set);
        net.add_memristor("P", vc, n, 0, pol[0]);
        net.add_memristor("Q", vs, n, 1, pol[1]);
        net.add_resistor("RG", n, kGround, spec.r_g);
        break;
    }
    case GateFamily::magic_nor: {
        const NodeId v0 = net.add_node("v0");
        const NodeId c = net.add_node("c");
        net.add_vsource("V0", v0, kGround, spec.v0);
        net.add_memristor("in1", v0, c, 0, pol[0]);
        net.add_memristor("in2", v0, c, 1, pol[1]);
        net.add_memristor("out", c, kGround, 2, pol[2]);
        break;
    }
    case GateFamily::felix_or: {
        const NodeId v0 = net.add_node("v0");
        const NodeId c = net.add_node("c");
        net.add_vsource("V0", v0, kGround, spec.v0);
        net.add_memristor("in1", c, kGround, 0, pol[0]);
        net.add_memristor("in2", c, kGround, 1, pol[1]);
        net.add_memristor("out", v0, c, 2, pol[2]);
        break;
    }
    case GateFamily::tmsl_nor: {
        const NodeId vs = net.add_node("vset");
        const NodeId vc = net.add_node("vcond");
        const NodeId t = net.add_node("t");
        net.add_vsource("VSET", vs, kGround, spec.v_set);
        net.add_vsource("VCOND", vc, kGround, spec.v_cond);
        net.add_resistor("RG", vs, t, spec.r_g);
        net.add_memristor("in1", t, vc, 0, pol[0]);
        net.add_memristor("in2", t, vc, 1, pol[1]);
        net.add_memristor("out", t, kGround, 2, pol[2]);
        break;
    }
    }
    return net;
}

std::vector<DeviceParams> gate_params(const GateSpec& spec, const ParamDistributions& dists,
                                      const SamplingPolicy& policy, std::uint64_t trial, const GateRunOptions& opt) {
    std::vector<DeviceParams> params;
    params.reserve(spec.device_count());
    for (std::size_t d = 0; d < spec.device_count(); ++d) {
        DeviceParams p = opt.variation ? sample(dists, policy, trial, d) : dists.mean_params();
        if (!opt.leakage) {
            p.theta_off = 0.0;
            p.theta_on = 0.0;
        }
        params.push_back(p);
    }
    return params;
}

GateTrialResult run_gate(const GateSpec& spec, int input, const ParamDistributions& dists,
                         const SamplingPolicy& policy, std::uint64_t trial, const GateRunOptions& opt) {
    check_input(input);
    const Netlist net = build_netlist(spec);
    GateTrialResult r;
    r.trial = trial;
    r.input = input;
    r.params = gate_params(spec, dists, policy, trial, opt);

    std::vector<DeviceState> states;
    const std::vector<int> bits = spec.initial_bits(input);
    for (std::size_t d = 0; d < bits.size(); ++d) {
        states.push_back(bits[d] ? DeviceState::lrs(r.params[d]) : DeviceState::hrs(r.params[d]));
    }
    TransientOptions to;
    to.dt = opt.dt > 0.0 ? opt.dt : std::min(100e-9, spec.t_op / 50.0);
    to.record = false;
    to.integrator = opt.integrator;
    TransientResult tr = run_transient(net, std::move(states), r.params, spec.t_op, to);

    r.final_states = std::move(tr.final_states);
    for (std::size_t d = 0; d < r.final_states.size(); ++d) {
        r.final_normalized.push_back(normalized_state(r.final_states[d].w, r.params[d]));
    }
    r.output_state = r.final_normalized[spec.output_device()];
    r.output_bit = logic_value(r.output_state);
    r.expected_bit = spec.expected(input);
    r.correct = r.output_bit == r.expected_bit;
    return r;
}

double overall_probability(const std::array<double, 4>& p) { return 0.25 * (p[0] + p[1] + p[2] + p[3]); }

CorrectnessResult correctness_study(const GateSpec& spec, std::size_t n_trials, const ParamDistributions& dists,
                                    const SamplingPolicy& policy, const GateRunOptions& opt, int jobs) {
    if (n_trials < 1) throw ConfigError("a correctness study needs at least one trial");
    validate(spec, dists.mean_params());
    validate(dists);
    CorrectnessResult res;
    res.spec = spec;
    res.n_trials = n_trials;
    res.trials.resize(4 * n_trials);
    parallel_for(4 * n_trials, jobs, [&](std::size_t idx) {
        const int input = static_cast<int>(idx / n_trials);
        res.trials[idx] = run_gate(spec, input, dists, policy, idx % n_trials, opt);
    });
    for (int input = 0; input < 4; ++input) {
        std::size_t ok = 0;
        for (std::size_t k = 0; k < n_trials; ++k) ok += res.trials[input * n_trials + k].correct ? 1 : 0;
        res.p_correct[input] = static_cast<double>(ok) / static_cast<double>(n_trials);
    }
    res.overall = overall_probability(res.p_correct);
    return res;
}

std::optional<double> hold_flip_time(const DeviceState& s0, const DeviceParams& p, const StableTimeOptions& opt,
                                     const IntegratorConfig& cfg) {
    if (!(opt.horizon > 0.0) || !(opt.first_step > 0.0) || !(opt.growth >= 1.0) || !(opt.max_step > 0.0)) {
        throw ConfigError("stable-time grid needs horizon, first_step, max_step > 0 and growth >= 1");
    }
    const double w_mid = p.w_off - 0.5 * p.range();
    const int bit0 = logic_value(normalized_state(s0.w, p));
    DeviceState s = s0;
    double t = 0.0;
    double h = opt.first_step;
    while (t < opt.horizon) {
        // With no stimulus w moves monotonically by at most theta * tau_l in total.
        const double reach = s.w + s.theta * p.tau_l;
        const double margin = 1e-3 * std::abs(s.theta * p.tau_l) + 1e-9 * p.range();
        if ((bit0 == 1 && reach < w_mid - margin) || (bit0 == 0 && reach > w_mid + margin)) return std::nullopt;

        const double step_len = std::min(h, opt.horizon - t);
        const double s_prev = normalized_state(s.w, p);
        s = step(s, 0.0, step_len, p, cfg).state;
        const double s_new = normalized_state(s.w, p);
        if (logic_value(s_new) != bit0) {
            const double frac = s_new != s_prev ? (0.5 - s_prev) / (s_new - s_prev) : 1.0;
            return t + step_len * std::clamp(frac, 0.0, 1.0);
        }
        t += step_len;
        h = std::min(h * opt.growth, opt.max_step);
    }
    return std::nullopt;
}

StableTimeStats stable_time_stats(int input, std::size_t n_trials, std::size_t n_correct,
                                  std::vector<double> flip_times, const StableTimeOptions& opt) {
    StableTimeStats st;
    st.input = input;
    st.n_trials = n_trials;
    st.n_correct = n_correct;
    st.n_flipped = flip_times.size();
    st.horizon = opt.horizon;
    std::sort(flip_times.begin(), flip_times.end());

    auto quantile_time = [&](double keep, bool& reached) {
        const auto m = static_cast<std::size_t>(std::floor((1.0 - keep) * static_cast<double>(n_correct) + 1e-9)) + 1;
        reached = n_correct > 0 && flip_times.size() >= m;
        return reached ? flip_times[m - 1] : opt.horizon;
    };
    st.t_90 = quantile_time(0.90, st.t_90_reached);
    st.t_99 = quantile_time(0.99, st.t_99_reached);

    if (!flip_times.empty()) {
        double sum = 0.0;
        for (double x : flip_times) sum += x;
        st.t_avg = sum / static_cast<double>(flip_times.size());
        const std::size_t n = flip_times.size();
        st.t_med = n % 2 ? flip_times[n / 2] : 0.5 * (flip_times[n / 2 - 1] + flip_times[n / 2]);
        st.histogram = histogram(flip_times, opt.histogram_bins);
        for (std::size_t k = 0; k < n; ++k) {
            st.cdf.emplace_back(flip_times[k], static_cast<double>(k + 1) / static_cast<double>(n_correct));
        }
    }
    return st;
}

StableTimeResult stable_time_study(const GateSpec& spec, int input, std::size_t n_trials,
                                   const ParamDistributions& dists, const SamplingPolicy& policy,
                                   const StableTimeOptions& st, const GateRunOptions& opt, int jobs) {
    check_input(input);
    if (n_trials < 1) throw ConfigError("a stable-time study needs at least one trial");
    validate(spec, dists.mean_params());
    validate(dists);
    StableTimeResult res;
    res.spec = spec;
    res.trials.resize(n_trials);
    const std::size_t out = spec.output_device();
    parallel_for(n_trials, jobs, [&](std::size_t k) {
        GateTrialResult r = run_gate(spec, input, dists, policy, k, opt);
        if (r.correct) r.flip_time = hold_flip_time(r.final_states[out], r.params[out], st, opt.integrator);
        res.trials[k] = std::move(r);
    });
    std::size_t n_correct = 0;
    std::vector<double> flips;
    for (const auto& r : res.trials) {
        if (!r.correct) continue;
        ++n_correct;
        if (r.flip_time) flips.push_back(*r.flip_time);
    }
    res.stats = stable_time_stats(input, n_trials, n_correct, std::move(flips), st);
    return res;
}

}  // namespace rram
