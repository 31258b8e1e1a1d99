#include "rram/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include "rram/config.hpp"
#include "rram/errors.hpp"
#include "rram/gates.hpp"
#include "rram/replays.hpp"
#include "rram/transient.hpp"

namespace rram {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::size_t kHistogramBins = 20;

struct RunDir {
    fs::path path;

    std::ofstream open(const std::string& name) const {
        std::ofstream os(path / name);
        if (!os) throw ConfigError("cannot write '" + (path / name).string() + "'");
        os << std::setprecision(12);
        return os;
    }

    void write_json(const std::string& name, const json& j) const { open(name) << j.dump(2) << '\n'; }

    void write_histogram(const std::string& name, std::span<const double> samples) const {
        if (samples.empty()) return;
        auto os = open(name);
        write_histogram_csv(os, histogram(samples, kHistogramBins));
    }
};

std::string utc_stamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y%m%dT%H%M%SZ");
    return os.str();
}

RunDir make_run_dir(const RunConfig& cfg, const std::string& command) {
    const fs::path base = fs::path(cfg.out) / command;
    fs::path dir;
    if (!cfg.label.empty()) {
        dir = base / cfg.label;
    } else {
        const std::string stamp = utc_stamp();
        dir = base / stamp;
        for (int k = 1; fs::exists(dir); ++k) dir = base / (stamp + "-" + std::to_string(k));
    }
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory '" + dir.string() + "': " + ec.message());
    return {dir};
}

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json fit_json(const GaussianFit& f) { return json{{"mean", f.mean}, {"sigma", f.sigma}}; }

json exp_fit_json(const std::optional<ExpFit>& f) {
    if (!f) return nullptr;
    return json{{"offset", f->offset}, {"amplitude", f->amplitude}, {"tau", f->tau}, {"rms", f->rms}};
}

json state_json(const DeviceState& s, const DeviceParams& p) {
    const double norm = normalized_state(s.w, p);
    return json{{"w", s.w},
                {"theta", s.theta},
                {"r", resistance(s.w, p)},
                {"normalized", norm},
                {"logic", logic_value(norm)}};
}

ReplayOptions replay_options(const RunConfig& cfg) {
    ReplayOptions o;
    o.dists = cfg.dists;
    o.seed = cfg.seed;
    o.variation = cfg.variation;
    o.leakage = cfg.leakage;
    o.protocol = cfg.protocol;
    o.integrator = cfg.integrator;
    o.dt = cfg.dt;
    o.jobs = cfg.jobs;
    return o;
}

GateRunOptions gate_options(const RunConfig& cfg) {
    GateRunOptions o;
    o.variation = cfg.variation;
    o.leakage = cfg.leakage;
    o.dt = cfg.dt;
    o.integrator = cfg.integrator;
    return o;
}

json base_summary(const std::string& command, const RunConfig& cfg) {
    return json{{"command", command}, {"seed", cfg.seed}, {"preset", cfg.preset}};
}

// ---------------------------------------------------------------- device

json cmd_device(const RunConfig& cfg, const RunDir& dir) {
    Netlist net;
    double duration = cfg.device.duration;
    if (cfg.netlist) {
        net = netlist_from_json(*cfg.netlist);
        if (!(duration > 0.0)) {
            for (std::size_t k : net.vsources()) {
                const auto& wf = net.elements()[k].waveform;
                if (wf) duration = std::max(duration, wf->total_duration());
            }
        }
        if (!(duration > 0.0)) throw ConfigError("netlist runs need device.duration or a waveform source");
    } else {
        const Waveform wf = cfg.waveform ? waveform_from_json(*cfg.waveform) : ron_roff_protocol(cfg.protocol);
        const NodeId p = net.add_node("p");
        net.add_vsource("src", p, kGround, wf);
        net.add_memristor("m0", p, kGround, 0, cfg.device.polarity);
        duration = cfg.device.duration > 0.0 ? cfg.device.duration : wf.total_duration();
    }

    const SamplingPolicy policy{SamplingMode::per_device, cfg.seed};
    std::vector<DeviceParams> params;
    std::vector<DeviceState> states;
    for (std::size_t d = 0; d < net.device_count(); ++d) {
        DeviceParams p = cfg.variation ? sample(cfg.dists, policy, 0, d) : cfg.dists.mean_params();
        if (!cfg.leakage) p.theta_off = p.theta_on = 0.0;
        DeviceState s;
        const json& init = cfg.device.initial;
        if (init.is_number()) s = {init.get<double>(), 0.0, +1};
        else if (init == "lrs") s = DeviceState::lrs(p);
        else s = DeviceState::hrs(p);
        params.push_back(p);
        states.push_back(s);
    }

    TransientOptions topt;
    topt.dt = cfg.dt;
    topt.i_limit = cfg.i_limit;
    topt.integrator = cfg.integrator;
    topt.check_kcl = true;
    const TransientResult res = run_transient(net, states, params, duration, topt);

    {
        auto os = dir.open("trace.csv");
        write_trace_csv(os, res.trace);
    }

    json summary = base_summary("device", cfg);
    summary["duration"] = duration;
    summary["steps"] = res.steps;
    summary["samples"] = res.trace.size();
    summary["max_kcl_ratio"] = res.trace.max_kcl_ratio;
    summary["clamped"] = res.clamped;
    json devices = json::array();
    for (std::size_t d = 0; d < res.final_states.size(); ++d) {
        devices.push_back(json{{"initial", state_json(states[d], params[d])},
                               {"final", state_json(res.final_states[d], params[d])},
                               {"params", to_json(params[d])}});
    }
    summary["devices"] = devices;
    return summary;
}

// ------------------------------------------------------------ experiments

json cmd_ron_roff(const RunConfig& cfg, const RunDir& dir) {
    const std::size_t n = cfg.trials.value_or(100);
    const RonRoffResult r = replay_ron_roff(n, replay_options(cfg));
    {
        auto os = dir.open("samples.csv");
        os << "cycle,ron,roff,ron_programmed,roff_programmed\n";
        for (std::size_t k = 0; k < r.ron.size(); ++k) {
            os << k << ',' << r.ron[k] << ',' << r.roff[k] << ',' << r.ron_programmed[k] << ','
               << r.roff_programmed[k] << '\n';
        }
    }
    dir.write_histogram("hist_ron.csv", r.ron);
    dir.write_histogram("hist_roff.csv", r.roff);

    json summary = base_summary("experiment ron-roff", cfg);
    summary["cycles"] = n;
    summary["ron"] = fit_json(r.ron_fit);
    summary["roff"] = fit_json(r.roff_fit);
    summary["ron_programmed"] = fit_json(fit_gaussian(r.ron_programmed));
    summary["roff_programmed"] = fit_json(fit_gaussian(r.roff_programmed));
    return summary;
}

json cmd_dynamics(const RunConfig& cfg, const RunDir& dir) {
    const std::size_t n = cfg.trials.value_or(100);
    const DynamicsResult r = replay_dynamics(n, replay_options(cfg));
    {
        auto os = dir.open("staircase.csv");
        os << "run,pulse,r\n";
        for (std::size_t run = 0; run < r.staircase.size(); ++run) {
            for (std::size_t k = 0; k < r.staircase[run].size(); ++k) {
                os << run << ',' << k + 1 << ',' << r.staircase[run][k] << '\n';
            }
        }
    }
    {
        auto os = dir.open("mean_staircase.csv");
        os << "pulse,r\n";
        for (std::size_t k = 0; k < r.mean_staircase.size(); ++k) os << k + 1 << ',' << r.mean_staircase[k] << '\n';
    }
    {
        auto os = dir.open("reset.csv");
        os << "t,r\n";
        for (std::size_t k = 0; k < r.reset_t.size(); ++k) os << r.reset_t[k] << ',' << r.reset_r[k] << '\n';
    }
    dir.write_histogram("hist_set_change.csv", r.set_change);

    json summary = base_summary("experiment dynamics", cfg);
    summary["runs"] = n;
    summary["mean_staircase"] = r.mean_staircase;
    summary["set_change"] = fit_json(fit_gaussian(r.set_change));
    summary["reset_final_r"] = r.reset_r.empty() ? json(nullptr) : json(r.reset_r.back());
    return summary;
}

json phase_json(const LeakagePhase& ph) {
    return json{{"probes", ph.r.size()},
                {"first", ph.r.empty() ? json(nullptr) : json(ph.r.front())},
                {"last", ph.r.empty() ? json(nullptr) : json(ph.r.back())},
                {"drift", ph.drift},
                {"max_relative_change", ph.max_relative_change},
                {"fit", exp_fit_json(ph.fit)}};
}

json cmd_leakage(const RunConfig& cfg, const RunDir& dir) {
    const LeakageResult r = replay_leakage(cfg.leakage_protocol, replay_options(cfg));
    {
        auto os = dir.open("probes.csv");
        os << "phase,probe,t,r,closed_form\n";
        auto dump = [&os](const std::string& name, const LeakagePhase& ph) {
            for (std::size_t k = 0; k < ph.r.size(); ++k) {
                os << name << ',' << k << ',' << ph.t[k] << ',' << ph.r[k] << ',';
                if (k < ph.closed_form.size()) os << ph.closed_form[k];
                os << '\n';
            }
        };
        dump("after_reset", r.after_reset);
        for (std::size_t p = 0; p < r.after_set.size(); ++p) dump("after_set_" + std::to_string(p + 1), r.after_set[p]);
    }
    {
        auto os = dir.open("trace.csv");
        write_trace_csv(os, r.trace);
    }

    json summary = base_summary("experiment leakage", cfg);
    summary["params"] = to_json(r.params);
    summary["after_reset"] = phase_json(r.after_reset);
    json sets = json::array();
    for (const LeakagePhase& ph : r.after_set) sets.push_back(phase_json(ph));
    summary["after_set"] = sets;
    summary["average_deviation"] = r.average_deviation;
    summary["max_deviation"] = r.max_deviation;
    const auto& first = r.after_set.front().fit;
    summary["fitted_tau"] = first ? json(first->tau) : json(nullptr);
    return summary;
}

json cmd_thresholds(const RunConfig& cfg, const RunDir& dir) {
    const ThresholdReplayResult r = replay_thresholds(cfg.sweep, cfg.thresholds, replay_options(cfg), cfg.i_limit);
    {
        auto os = dir.open("sweep.csv");
        os << "t,v,i\n";
        for (std::size_t k = 0; k < r.trace.size(); ++k) {
            const DeviceSample& s = r.trace.devices[k][0];
            os << r.trace.t[k] << ',' << s.v << ',' << s.i << '\n';
        }
    }
    auto threshold = [](const std::optional<double>& v, double expected) {
        json j{{"detected", v.has_value()}, {"value", opt_json(v)}, {"model", expected}};
        if (!v) j["status"] = "not detected";
        return j;
    };
    json summary = base_summary("experiment thresholds", cfg);
    summary["delta_i"] = cfg.thresholds.delta_i;
    summary["v_plus"] = threshold(r.thresholds.v_plus, r.params.v_off);
    summary["v_minus"] = threshold(r.thresholds.v_minus, r.params.v_on);
    return summary;
}

// ------------------------------------------------------------------ gates

void write_trials(std::ostream& os, const std::vector<GateTrialResult>& trials, bool header) {
    if (header) os << "trial,input,verdict,final_state,flip_time\n";
    for (const GateTrialResult& t : trials) {
        os << t.trial << ',' << input_label(t.input) << ',' << (t.correct ? "correct" : "wrong") << ','
           << t.output_state << ',';
        if (t.flip_time) os << *t.flip_time;
        os << '\n';
    }
}

json cmd_correctness(const RunConfig& cfg, const RunDir& dir, GateFamily family) {
    const GateSpec spec = gate_spec(cfg, family);
    const std::size_t n = cfg.trials.value_or(1000);
    const CorrectnessResult r = correctness_study(spec, n, cfg.dists, SamplingPolicy{SamplingMode::both, cfg.seed},
                                                  gate_options(cfg), cfg.jobs);
    {
        auto os = dir.open("trials.csv");
        write_trials(os, r.trials, true);
    }
    for (int in = 0; in < 4; ++in) {
        std::vector<double> states;
        for (const GateTrialResult& t : r.trials) {
            if (t.input == in) states.push_back(t.output_state);
        }
        dir.write_histogram("hist_final_state_" + input_label(in) + ".csv", states);
    }
    json summary = base_summary("gate correctness", cfg);
    summary["gate"] = to_json(spec);
    summary["trials"] = n;
    json table = json::object();
    for (int in = 0; in < 4; ++in) table[input_label(in)] = r.p_correct[in];
    summary["p_correct"] = table;
    summary["overall"] = r.overall;
    return summary;
}

json cmd_stable_time(const RunConfig& cfg, const RunDir& dir, GateFamily family) {
    const GateSpec spec = gate_spec(cfg, family);
    const std::size_t n = cfg.trials.value_or(1000);
    StableTimeOptions st;
    st.horizon = cfg.horizon;
    st.histogram_bins = kHistogramBins;

    auto trials_os = dir.open("trials.csv");
    write_trials(trials_os, {}, true);
    json cases = json::object();
    std::size_t total_flips = 0;
    for (int in : cfg.inputs) {
        const StableTimeResult r =
            stable_time_study(spec, in, n, cfg.dists, SamplingPolicy{SamplingMode::both, cfg.seed}, st,
                              gate_options(cfg), cfg.jobs);
        write_trials(trials_os, r.trials, false);
        const StableTimeStats& s = r.stats;
        total_flips += s.n_flipped;
        const std::string label = input_label(in);
        if (s.histogram) {
            auto os = dir.open("hist_flip_time_" + label + ".csv");
            write_histogram_csv(os, *s.histogram);
        }
        {
            auto os = dir.open("cdf_" + label + ".csv");
            os << "t,fraction_flipped\n";
            for (const auto& [t, f] : s.cdf) os << t << ',' << f << '\n';
        }
        cases[label] = json{{"trials", s.n_trials},     {"correct", s.n_correct},
                            {"flipped", s.n_flipped},   {"horizon", s.horizon},
                            {"t_90", s.t_90},           {"t_90_reached", s.t_90_reached},
                            {"t_99", s.t_99},           {"t_99_reached", s.t_99_reached},
                            {"t_avg", opt_json(s.t_avg)}, {"t_med", opt_json(s.t_med)}};
    }
    json summary = base_summary("gate stable-time", cfg);
    summary["gate"] = to_json(spec);
    summary["trials"] = n;
    summary["horizon"] = cfg.horizon;
    summary["inputs"] = cases;
    summary["total_flips"] = total_flips;
    summary["immune"] = total_flips == 0;
    return summary;
}

void emit_error(std::ostream& err, std::string_view kind, std::string_view message) {
    err << json{{"error", {{"kind", kind}, {"message", message}}}}.dump() << '\n';
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Stochastic RRAM device, circuit and logic-gate simulator", "rramsim"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> trials;
    std::optional<int> jobs;
    std::optional<std::string> out_dir;
    std::optional<std::string> preset_name;
    std::optional<double> horizon;
    std::optional<std::string> label;

    app.option_defaults()->always_capture_default(false);
    app.add_option("--config", config_path, "JSON configuration file")->check(CLI::ExistingFile);
    app.add_option("--seed", seed, "Root seed for every random draw");
    app.add_option("--trials", trials, "Trials per input case, cycles or runs");
    app.add_option("--jobs", jobs, "Worker threads");
    app.add_option("--out", out_dir, "Output root directory");
    app.add_option("--preset", preset_name, "Parameter preset (believer-default, believer-sec2b)");
    app.add_option("--horizon", horizon, "Stable-time observation horizon in seconds");
    app.add_option("--label", label, "Run directory name instead of a timestamp");

    auto* device = app.add_subcommand("device", "Single-device or netlist transient");
    device->fallthrough();

    std::string experiment;
    auto* exp = app.add_subcommand("experiment", "Replay of a device characterisation experiment");
    exp->fallthrough();
    exp->add_option("name", experiment, "ron-roff | dynamics | leakage | thresholds")
        ->required()
        ->check(CLI::IsMember({"ron-roff", "dynamics", "leakage", "thresholds"}));

    std::string family_name;
    std::string study;
    auto* gate = app.add_subcommand("gate", "Logic-gate Monte-Carlo study");
    gate->fallthrough();
    gate->add_option("family", family_name, "IMPLY | MAGIC | FELIX | TMSL")->required();
    gate->add_option("study", study, "correctness | stable-time")
        ->required()
        ->check(CLI::IsMember({"correctness", "stable-time"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        emit_error(err, "usage", e.what());
        return 2;
    }

    try {
        json doc = config_path.empty() ? json::object() : read_config_file(config_path);
        if (!doc.is_object()) throw ConfigError("configuration must be a JSON object");
        if (seed) doc["seed"] = *seed;
        if (trials) doc["trials"] = *trials;
        if (jobs) doc["jobs"] = *jobs;
        if (out_dir) doc["out"] = *out_dir;
        if (preset_name) doc["preset"] = *preset_name;
        if (horizon) doc["horizon"] = *horizon;
        if (label) doc["label"] = *label;
        const RunConfig cfg = parse_config(doc);

        std::string command;
        std::function<json(const RunDir&)> run;
        if (device->parsed()) {
            command = "device";
            run = [&](const RunDir& d) { return cmd_device(cfg, d); };
        } else if (exp->parsed()) {
            command = "experiment-" + experiment;
            if (experiment == "ron-roff") run = [&](const RunDir& d) { return cmd_ron_roff(cfg, d); };
            else if (experiment == "dynamics") run = [&](const RunDir& d) { return cmd_dynamics(cfg, d); };
            else if (experiment == "leakage") run = [&](const RunDir& d) { return cmd_leakage(cfg, d); };
            else run = [&](const RunDir& d) { return cmd_thresholds(cfg, d); };
        } else {
            const GateFamily family = parse_gate_family(family_name);
            (void)gate_spec(cfg, family);
            command = "gate-" + std::string(to_string(family)) + "-" + study;
            if (study == "correctness") run = [&, family](const RunDir& d) { return cmd_correctness(cfg, d, family); };
            else run = [&, family](const RunDir& d) { return cmd_stable_time(cfg, d, family); };
        }

        const RunDir dir = make_run_dir(cfg, command);
        json args = json::array();
        for (int k = 1; k < argc; ++k) args.push_back(argv[k]);
        dir.write_json("manifest.json", json{{"command", command}, {"arguments", args}, {"config", to_json(cfg)}});
        const json summary = run(dir);
        dir.write_json("summary.json", summary);
        out << dir.path.string() << '\n';
        return 0;
    } catch (const Error& e) {
        emit_error(err, e.kind(), e.what());
        return 2;
    } catch (const nlohmann::json::exception& e) {
        emit_error(err, "config", e.what());
        return 2;
    } catch (const std::exception& e) {
        emit_error(err, "internal", e.what());
        return 1;
    }
}

}  // namespace rram
