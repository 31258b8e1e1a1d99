#include "rram/config.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "rram/errors.hpp"

namespace rram {

using nlohmann::json;

namespace {

void allow_keys(const json& obj, std::string_view where, std::initializer_list<std::string_view> keys) {
    if (!obj.is_object()) throw ConfigError(std::string(where) + " must be an object");
    for (const auto& [k, v] : obj.items()) {
        if (std::find(keys.begin(), keys.end(), k) == keys.end()) {
            throw ConfigError("unknown key '" + k + "' in " + std::string(where));
        }
    }
}

double num(const json& j, std::string_view what) {
    if (!j.is_number()) throw ConfigError(std::string(what) + " must be a number");
    return j.get<double>();
}

template <class T>
T integer(const json& j, std::string_view what) {
    if (!j.is_number_integer()) throw ConfigError(std::string(what) + " must be an integer");
    if (j.is_number_unsigned()) return static_cast<T>(j.get<std::uint64_t>());
    const auto v = j.get<std::int64_t>();
    if (std::is_unsigned_v<T> && v < 0) throw ConfigError(std::string(what) + " must be >= 0");
    return static_cast<T>(v);
}

bool boolean(const json& j, std::string_view what) {
    if (!j.is_boolean()) throw ConfigError(std::string(what) + " must be true or false");
    return j.get<bool>();
}

std::string str(const json& j, std::string_view what) {
    if (!j.is_string()) throw ConfigError(std::string(what) + " must be a string");
    return j.get<std::string>();
}

void read_num(const json& obj, const char* key, double& dst) {
    if (obj.contains(key)) dst = num(obj.at(key), key);
}

double* param_field(DeviceParams& p, std::string_view name) {
    if (name == "r_off") return &p.r_off;
    if (name == "r_on") return &p.r_on;
    if (name == "v_off") return &p.v_off;
    if (name == "v_on") return &p.v_on;
    if (name == "k_off") return &p.k_off;
    if (name == "k_on") return &p.k_on;
    if (name == "alpha_off") return &p.alpha_off;
    if (name == "alpha_on") return &p.alpha_on;
    if (name == "a_off") return &p.a_off;
    if (name == "a_on") return &p.a_on;
    if (name == "w_c") return &p.w_c;
    if (name == "w_off") return &p.w_off;
    if (name == "w_on") return &p.w_on;
    if (name == "theta_off") return &p.theta_off;
    if (name == "theta_on") return &p.theta_on;
    if (name == "tau_l") return &p.tau_l;
    return nullptr;
}

std::optional<VariedParam> varied_param(std::string_view name) {
    for (std::size_t i = 0; i < kVariedCount; ++i) {
        if (kVariedNames[i] == name) return static_cast<VariedParam>(i);
    }
    return std::nullopt;
}

Segment segment_from_json(const json& j) {
    allow_keys(j, "waveform segment", {"kind", "amplitude", "duration", "frequency", "start_amplitude", "from", "to"});
    if (!j.contains("kind") || !j.contains("duration")) throw ConfigError("waveform segments need kind and duration");
    Segment s;
    s.kind = parse_segment_kind(str(j.at("kind"), "segment kind"));
    s.duration = num(j.at("duration"), "segment duration");
    if (j.contains("amplitude")) s.amplitude = num(j.at("amplitude"), "segment amplitude");
    if (j.contains("to")) s.amplitude = num(j.at("to"), "segment to");
    if (j.contains("frequency")) s.frequency = num(j.at("frequency"), "segment frequency");
    if (j.contains("start_amplitude")) s.start_amplitude = num(j.at("start_amplitude"), "segment start_amplitude");
    if (j.contains("from")) s.start_amplitude = num(j.at("from"), "segment from");
    return s;
}

std::string protocol_kind(const json& j) {
    return j.contains("protocol") ? str(j.at("protocol"), "waveform protocol") : std::string();
}

}  // namespace

json read_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
    try {
        return json::parse(in, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw ConfigError("config file '" + path.string() + "' is not valid JSON: " + e.what());
    }
}

Waveform waveform_from_json(const json& j) {
    allow_keys(j, "waveform", {"protocol", "segments", "sample_dt", "edge_time", "n_probe", "interval"});
    const std::string proto = protocol_kind(j);
    if (!proto.empty()) {
        ProtocolOptions po;
        if (j.contains("sample_dt")) po.sample_dt = num(j.at("sample_dt"), "sample_dt");
        if (proto == "ron-roff") return ron_roff_protocol(po);
        if (proto == "dynamics") return dynamics_protocol(po);
        if (proto == "leakage") {
            LeakageOptions lo;
            lo.protocol = po;
            if (j.contains("n_probe")) lo.n_probe = integer<int>(j.at("n_probe"), "n_probe");
            if (j.contains("interval")) lo.interval = num(j.at("interval"), "interval");
            return leakage_protocol(lo);
        }
        if (proto == "sweep") return forming_sweep();
        throw ConfigError("unknown waveform protocol '" + proto + "'");
    }
    if (!j.contains("segments") || !j.at("segments").is_array()) throw ConfigError("waveform needs a segments array");
    std::vector<Segment> segs;
    for (const auto& s : j.at("segments")) segs.push_back(segment_from_json(s));
    double sample_dt = 0.0;
    if (j.contains("sample_dt")) sample_dt = num(j.at("sample_dt"), "sample_dt");
    if (!(sample_dt > 0.0) && !segs.empty()) {
        double m = segs.front().duration;
        for (const auto& s : segs) m = std::min(m, s.duration);
        sample_dt = m / 4.0;
    }
    const double edge = j.contains("edge_time") ? num(j.at("edge_time"), "edge_time") : 0.0;
    return Waveform(std::move(segs), sample_dt, edge);
}

json to_json(const Waveform& wf) {
    json segs = json::array();
    for (const Segment& s : wf.segments()) {
        json js{{"kind", std::string(to_string(s.kind))}, {"amplitude", s.amplitude}, {"duration", s.duration}};
        if (s.kind == SegmentKind::sine) js["frequency"] = s.frequency;
        if (s.start_amplitude) js["start_amplitude"] = *s.start_amplitude;
        segs.push_back(std::move(js));
    }
    return json{{"segments", std::move(segs)}, {"sample_dt", wf.sample_dt()}, {"edge_time", wf.edge_time()}};
}

Netlist netlist_from_json(const json& j) {
    allow_keys(j, "netlist", {"nodes", "elements"});
    Netlist net;
    if (j.contains("nodes")) {
        if (!j.at("nodes").is_array()) throw ConfigError("netlist nodes must be an array of names");
        for (const auto& n : j.at("nodes")) {
            const std::string name = str(n, "node name");
            if (name != "gnd" && name != "0") net.add_node(name);
        }
    }
    if (!j.contains("elements") || !j.at("elements").is_array()) throw ConfigError("netlist needs an elements array");
    for (const auto& e : j.at("elements")) {
        allow_keys(e, "netlist element",
                   {"type", "name", "n+", "n-", "ohms", "device", "polarity", "volts", "waveform"});
        if (!e.contains("type") || !e.contains("name") || !e.contains("n+") || !e.contains("n-")) {
            throw ConfigError("netlist elements need type, name, n+ and n-");
        }
        const std::string type = str(e.at("type"), "element type");
        const std::string name = str(e.at("name"), "element name");
        const NodeId a = net.node_or_add(str(e.at("n+"), "n+"));
        const NodeId b = net.node_or_add(str(e.at("n-"), "n-"));
        if (type == "resistor") {
            if (!e.contains("ohms")) throw ConfigError("resistor '" + name + "' needs ohms");
            net.add_resistor(name, a, b, num(e.at("ohms"), "ohms"));
        } else if (type == "memristor") {
            if (!e.contains("device")) throw ConfigError("memristor '" + name + "' needs a device index");
            const int pol = e.contains("polarity") ? integer<int>(e.at("polarity"), "polarity") : 1;
            net.add_memristor(name, a, b, integer<std::size_t>(e.at("device"), "device"), pol);
        } else if (type == "vsource") {
            if (e.contains("waveform")) net.add_vsource(name, a, b, waveform_from_json(e.at("waveform")));
            else net.add_vsource(name, a, b, e.contains("volts") ? num(e.at("volts"), "volts") : 0.0);
        } else {
            throw ConfigError("unknown element type '" + type + "'");
        }
    }
    net.validate();
    return net;
}

RunConfig parse_config(const json& doc) {
    allow_keys(doc, "config",
               {"preset", "uniform_multiplier", "gaussian_truncation", "max_attempts", "distributions", "fixed",
                "integrator", "trials", "jobs", "seed", "out", "label", "horizon", "variation", "leakage", "dt",
                "i_limit", "gate", "inputs", "protocol", "leakage_protocol", "sweep", "thresholds", "waveform",
                "netlist", "device"});
    RunConfig cfg;
    if (doc.contains("preset")) cfg.preset = str(doc.at("preset"), "preset");
    cfg.dists = preset(cfg.preset);
    read_num(doc, "uniform_multiplier", cfg.dists.uniform_half_width_sigmas);
    read_num(doc, "gaussian_truncation", cfg.dists.gaussian_truncation_sigmas);
    if (doc.contains("max_attempts")) cfg.dists.max_attempts = integer<int>(doc.at("max_attempts"), "max_attempts");

    if (doc.contains("fixed")) {
        const json& f = doc.at("fixed");
        if (!f.is_object()) throw ConfigError("fixed must be an object");
        for (const auto& [k, v] : f.items()) {
            double* field = param_field(cfg.dists.fixed, k);
            if (!field) throw ConfigError("unknown parameter '" + k + "' in fixed");
            *field = num(v, k);
            if (auto vp = varied_param(k)) cfg.dists[*vp] = {DistKind::fixed, *field, 0.0};
        }
    }
    if (doc.contains("distributions")) {
        const json& d = doc.at("distributions");
        if (!d.is_object()) throw ConfigError("distributions must be an object");
        for (const auto& [k, v] : d.items()) {
            const auto vp = varied_param(k);
            if (!vp) throw ConfigError("parameter '" + k + "' cannot be varied");
            allow_keys(v, "distribution of " + k, {"kind", "mean", "sigma"});
            DistributionSpec& spec = cfg.dists[*vp];
            if (v.contains("kind")) spec.kind = parse_dist_kind(str(v.at("kind"), "kind"));
            read_num(v, "mean", spec.mean);
            read_num(v, "sigma", spec.sigma);
        }
    }
    cfg.dists.fixed = cfg.dists.mean_params();
    validate(cfg.dists);

    if (doc.contains("integrator")) {
        const json& in = doc.at("integrator");
        allow_keys(in, "integrator", {"max_dw_fraction", "scheme", "max_dt_tau_fraction"});
        read_num(in, "max_dw_fraction", cfg.integrator.max_dw_fraction);
        read_num(in, "max_dt_tau_fraction", cfg.integrator.max_dt_tau_fraction);
        if (in.contains("scheme")) cfg.integrator.scheme = parse_scheme(str(in.at("scheme"), "scheme"));
        if (!(cfg.integrator.max_dw_fraction > 0.0) || !(cfg.integrator.max_dt_tau_fraction > 0.0)) {
            throw ConfigError("integrator fractions must be > 0");
        }
    }
    if (doc.contains("trials") && !doc.at("trials").is_null()) {
        cfg.trials = integer<std::size_t>(doc.at("trials"), "trials");
        if (*cfg.trials < 1) throw ConfigError("trials must be >= 1");
    }
    if (doc.contains("jobs")) cfg.jobs = std::max(1, integer<int>(doc.at("jobs"), "jobs"));
    if (doc.contains("seed")) cfg.seed = integer<std::uint64_t>(doc.at("seed"), "seed");
    if (doc.contains("out")) cfg.out = str(doc.at("out"), "out");
    if (doc.contains("label")) cfg.label = str(doc.at("label"), "label");
    read_num(doc, "horizon", cfg.horizon);
    if (!(cfg.horizon > 0.0)) throw ConfigError("horizon must be > 0");
    if (doc.contains("variation")) cfg.variation = boolean(doc.at("variation"), "variation");
    if (doc.contains("leakage")) cfg.leakage = boolean(doc.at("leakage"), "leakage");
    read_num(doc, "dt", cfg.dt);
    if (cfg.dt < 0.0) throw ConfigError("dt must be >= 0");
    if (doc.contains("i_limit") && !doc.at("i_limit").is_null()) cfg.i_limit = num(doc.at("i_limit"), "i_limit");

    if (doc.contains("gate")) {
        allow_keys(doc.at("gate"), "gate", {"t_op", "v_set", "v_cond", "v0", "r_g", "polarity"});
        cfg.gate = doc.at("gate");
    }
    if (doc.contains("inputs")) {
        cfg.inputs.clear();
        for (const auto& in : doc.at("inputs")) {
            const std::string s = in.is_string() ? in.get<std::string>() : std::string();
            if (s.size() != 2 || (s[0] != '0' && s[0] != '1') || (s[1] != '0' && s[1] != '1')) {
                throw ConfigError("inputs must be strings among \"00\", \"01\", \"10\", \"11\"");
            }
            cfg.inputs.push_back((s[0] - '0') * 2 + (s[1] - '0'));
        }
    }
    if (doc.contains("protocol")) {
        const json& p = doc.at("protocol");
        allow_keys(p, "protocol", {"gap", "read_amplitude", "read_width", "sample_dt"});
        read_num(p, "gap", cfg.protocol.gap);
        read_num(p, "read_amplitude", cfg.protocol.read_amplitude);
        read_num(p, "read_width", cfg.protocol.read_width);
        read_num(p, "sample_dt", cfg.protocol.sample_dt);
    }
    if (doc.contains("leakage_protocol")) {
        const json& p = doc.at("leakage_protocol");
        allow_keys(p, "leakage_protocol",
                   {"n_probe", "interval", "reset_amplitude", "reset_width", "set_amplitude", "set_width",
                    "set_pulses"});
        LeakageOptions& lo = cfg.leakage_protocol;
        if (p.contains("n_probe")) lo.n_probe = integer<int>(p.at("n_probe"), "n_probe");
        if (p.contains("set_pulses")) lo.set_pulses = integer<int>(p.at("set_pulses"), "set_pulses");
        read_num(p, "interval", lo.interval);
        read_num(p, "reset_amplitude", lo.reset_amplitude);
        read_num(p, "reset_width", lo.reset_width);
        read_num(p, "set_amplitude", lo.set_amplitude);
        read_num(p, "set_width", lo.set_width);
    }
    if (doc.contains("sweep")) {
        const json& p = doc.at("sweep");
        allow_keys(p, "sweep", {"frequency", "start_amplitude", "amplitude", "cycles", "sample_dt"});
        read_num(p, "frequency", cfg.sweep.frequency);
        read_num(p, "start_amplitude", cfg.sweep.start_amplitude);
        read_num(p, "amplitude", cfg.sweep.amplitude);
        read_num(p, "sample_dt", cfg.sweep.sample_dt);
        if (p.contains("cycles")) cfg.sweep.cycles = integer<int>(p.at("cycles"), "cycles");
    }
    if (doc.contains("thresholds")) {
        const json& p = doc.at("thresholds");
        allow_keys(p, "thresholds", {"delta_i", "smoothing", "raw_difference"});
        read_num(p, "delta_i", cfg.thresholds.delta_i);
        if (p.contains("smoothing")) cfg.thresholds.smoothing = integer<int>(p.at("smoothing"), "smoothing");
        if (p.contains("raw_difference")) {
            cfg.thresholds.raw_difference = boolean(p.at("raw_difference"), "raw_difference");
        }
    }
    if (doc.contains("waveform") && !doc.at("waveform").is_null()) {
        (void)waveform_from_json(doc.at("waveform"));
        cfg.waveform = doc.at("waveform");
    }
    if (doc.contains("netlist") && !doc.at("netlist").is_null()) {
        (void)netlist_from_json(doc.at("netlist"));
        cfg.netlist = doc.at("netlist");
    }
    if (doc.contains("device")) {
        const json& d = doc.at("device");
        allow_keys(d, "device", {"initial", "polarity", "duration"});
        if (d.contains("initial")) {
            const json& init = d.at("initial");
            if (!(init.is_number() || (init.is_string() && (init == "hrs" || init == "lrs")))) {
                throw ConfigError("device.initial must be \"hrs\", \"lrs\" or a state in metres");
            }
            cfg.device.initial = init;
        }
        if (d.contains("polarity")) cfg.device.polarity = integer<int>(d.at("polarity"), "polarity");
        read_num(d, "duration", cfg.device.duration);
    }
    return cfg;
}

json to_json(const DistributionSpec& d) {
    return json{{"kind", std::string(to_string(d.kind))}, {"mean", d.mean}, {"sigma", d.sigma}};
}

json to_json(const DeviceParams& p) {
    return json{{"r_off", p.r_off},         {"r_on", p.r_on},       {"v_off", p.v_off},
                {"v_on", p.v_on},           {"k_off", p.k_off},     {"k_on", p.k_on},
                {"alpha_off", p.alpha_off}, {"alpha_on", p.alpha_on}, {"a_off", p.a_off},
                {"a_on", p.a_on},           {"w_c", p.w_c},         {"w_off", p.w_off},
                {"w_on", p.w_on},           {"theta_off", p.theta_off}, {"theta_on", p.theta_on},
                {"tau_l", p.tau_l}};
}

GateSpec gate_spec(const RunConfig& cfg, GateFamily family) {
    GateSpec s = GateSpec::defaults(family);
    const json& g = cfg.gate;
    read_num(g, "t_op", s.t_op);
    read_num(g, "v_set", s.v_set);
    read_num(g, "v_cond", s.v_cond);
    read_num(g, "v0", s.v0);
    read_num(g, "r_g", s.r_g);
    if (g.contains("polarity")) {
        const json& pol = g.at("polarity");
        if (!pol.is_array() || pol.size() != s.device_count()) {
            throw ConfigError("gate polarity needs one entry per memristor");
        }
        for (std::size_t k = 0; k < pol.size(); ++k) s.polarity[k] = integer<int>(pol[k], "polarity");
    }
    validate(s, cfg.dists.mean_params());
    return s;
}

json to_json(const GateSpec& spec) {
    json pol = json::array();
    for (std::size_t k = 0; k < spec.device_count(); ++k) pol.push_back(spec.polarity[k]);
    json j{{"family", std::string(to_string(spec.family))}, {"t_op", spec.t_op}, {"polarity", pol}};
    switch (spec.family) {
    case GateFamily::imply:
    case GateFamily::tmsl_nor:
        j["v_set"] = spec.v_set;
        j["v_cond"] = spec.v_cond;
        j["r_g"] = spec.r_g;
        break;
    case GateFamily::magic_nor:
    case GateFamily::felix_or: j["v0"] = spec.v0; break;
    }
    return j;
}

json to_json(const RunConfig& cfg) {
    json dists = json::object();
    for (std::size_t i = 0; i < kVariedCount; ++i) dists[std::string(kVariedNames[i])] = to_json(cfg.dists.varied[i]);
    json fixed = to_json(cfg.dists.fixed);
    for (std::string_view name : kVariedNames) fixed.erase(std::string(name));
    json inputs = json::array();
    for (int in : cfg.inputs) inputs.push_back(input_label(in));
    json j{
        {"preset", cfg.preset},
        {"uniform_multiplier", cfg.dists.uniform_half_width_sigmas},
        {"gaussian_truncation", cfg.dists.gaussian_truncation_sigmas},
        {"max_attempts", cfg.dists.max_attempts},
        {"distributions", dists},
        {"fixed", fixed},
        {"integrator",
         {{"max_dw_fraction", cfg.integrator.max_dw_fraction},
          {"max_dt_tau_fraction", cfg.integrator.max_dt_tau_fraction},
          {"scheme", std::string(to_string(cfg.integrator.scheme))}}},
        {"jobs", cfg.jobs},
        {"seed", cfg.seed},
        {"out", cfg.out},
        {"label", cfg.label},
        {"horizon", cfg.horizon},
        {"variation", cfg.variation},
        {"leakage", cfg.leakage},
        {"dt", cfg.dt},
        {"gate", cfg.gate},
        {"inputs", inputs},
        {"protocol",
         {{"gap", cfg.protocol.gap},
          {"read_amplitude", cfg.protocol.read_amplitude},
          {"read_width", cfg.protocol.read_width},
          {"sample_dt", cfg.protocol.sample_dt}}},
        {"leakage_protocol",
         {{"n_probe", cfg.leakage_protocol.n_probe},
          {"interval", cfg.leakage_protocol.interval},
          {"reset_amplitude", cfg.leakage_protocol.reset_amplitude},
          {"reset_width", cfg.leakage_protocol.reset_width},
          {"set_amplitude", cfg.leakage_protocol.set_amplitude},
          {"set_width", cfg.leakage_protocol.set_width},
          {"set_pulses", cfg.leakage_protocol.set_pulses}}},
        {"sweep",
         {{"frequency", cfg.sweep.frequency},
          {"start_amplitude", cfg.sweep.start_amplitude},
          {"amplitude", cfg.sweep.amplitude},
          {"cycles", cfg.sweep.cycles},
          {"sample_dt", cfg.sweep.sample_dt}}},
        {"thresholds",
         {{"delta_i", cfg.thresholds.delta_i},
          {"smoothing", cfg.thresholds.smoothing},
          {"raw_difference", cfg.thresholds.raw_difference}}},
        {"device",
         {{"initial", cfg.device.initial}, {"polarity", cfg.device.polarity}, {"duration", cfg.device.duration}}},
    };
    j["trials"] = cfg.trials ? json(*cfg.trials) : json(nullptr);
    j["i_limit"] = cfg.i_limit ? json(*cfg.i_limit) : json(nullptr);
    j["waveform"] = cfg.waveform ? *cfg.waveform : json(nullptr);
    j["netlist"] = cfg.netlist ? *cfg.netlist : json(nullptr);
    return j;
}

}  // namespace rram
