#include <catch_amalgamated.hpp>

#include "rram/config.hpp"
#include "rram/errors.hpp"

using namespace rram;
using nlohmann::json;

TEST_CASE("empty document gives the defaults") {
    const RunConfig cfg = parse_config(json::object());
    CHECK(cfg.preset == "believer-default");
    CHECK(cfg.dists[VariedParam::r_off].mean == 545.54e3);
    CHECK(cfg.seed == 0);
    CHECK_FALSE(cfg.trials.has_value());
    CHECK(cfg.horizon == 200.0);
    CHECK(cfg.inputs == std::vector<int>{0, 1, 2, 3});
}

TEST_CASE("overrides are applied") {
    const json doc = json::parse(R"({
        "preset": "believer-sec2b",
        "uniform_multiplier": 2.5,
        "distributions": {"k_off": {"kind": "gaussian", "sigma": 100e-6}},
        "fixed": {"tau_l": 5.0, "v_off": 0.4},
        "integrator": {"max_dw_fraction": 0.001, "scheme": "rk4"},
        "trials": 12, "jobs": 2, "seed": 9, "horizon": 10,
        "gate": {"t_op": 20e-6},
        "inputs": ["01", "11"],
        "leakage_protocol": {"n_probe": 7, "set_pulses": 2},
        "thresholds": {"delta_i": 5, "raw_difference": true}
    })");
    const RunConfig cfg = parse_config(doc);
    CHECK(cfg.dists[VariedParam::r_on].mean == 4.64e3);
    CHECK(cfg.dists.uniform_half_width_sigmas == 2.5);
    CHECK(cfg.dists[VariedParam::k_off].kind == DistKind::gaussian);
    CHECK(cfg.dists[VariedParam::k_off].mean == 780e-6);
    CHECK(cfg.dists[VariedParam::k_off].sigma == 100e-6);
    CHECK(cfg.dists.fixed.tau_l == 5.0);
    CHECK(cfg.dists[VariedParam::v_off].kind == DistKind::fixed);
    CHECK(cfg.dists[VariedParam::v_off].mean == 0.4);
    CHECK(cfg.integrator.scheme == Scheme::rk4);
    CHECK(cfg.integrator.max_dw_fraction == 0.001);
    CHECK(*cfg.trials == 12);
    CHECK(cfg.seed == 9);
    CHECK(cfg.inputs == std::vector<int>{1, 3});
    CHECK(cfg.leakage_protocol.n_probe == 7);
    CHECK(cfg.leakage_protocol.set_pulses == 2);
    CHECK(cfg.thresholds.raw_difference);
    CHECK(gate_spec(cfg, GateFamily::imply).t_op == 20e-6);
}

TEST_CASE("invalid documents are rejected") {
    auto bad = [](const char* text) { return parse_config(json::parse(text)); };
    CHECK_THROWS_AS(bad(R"({"colour": 1})"), ConfigError);
    CHECK_THROWS_AS(bad(R"({"preset": "other"})"), ConfigError);
    CHECK_THROWS_AS(bad(R"({"seed": "x"})"), ConfigError);
    CHECK_THROWS_AS(bad(R"({"seed": -1})"), ConfigError);
    CHECK_THROWS_AS(bad(R"({"trials": 0})"), ConfigError);
    CHECK_THROWS_AS(bad(R"({"distributions": {"tau_l": {"mean": 1}}})"), ConfigError);
    CHECK_THROWS_AS(bad(R"({"distributions": {"r_on": {"sigma": -5}}})"), ConfigError);
    CHECK_THROWS_AS(bad(R"({"fixed": {"nope": 1}})"), ConfigError);
    CHECK_THROWS_AS(bad(R"({"integrator": {"scheme": "midpoint"}})"), ConfigError);
    CHECK_THROWS_AS(bad(R"({"inputs": ["2"]})"), ConfigError);
    CHECK_THROWS_AS(bad(R"({"horizon": 0})"), ConfigError);
    CHECK_THROWS_AS(read_config_file("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("gate overrides are validated against the family") {
    const RunConfig cfg = parse_config(json::parse(R"({"gate": {"v_set": 0.2}})"));
    CHECK_THROWS_AS(gate_spec(cfg, GateFamily::imply), ConfigError);
    const RunConfig pol = parse_config(json::parse(R"({"gate": {"polarity": [1, -1, 1]}})"));
    CHECK_THROWS_AS(gate_spec(pol, GateFamily::imply), ConfigError);
    CHECK(gate_spec(pol, GateFamily::magic_nor).polarity[1] == -1);
}

TEST_CASE("waveform block round-trips") {
    const json j = json::parse(R"({
        "sample_dt": 1e-6,
        "segments": [
            {"kind": "pulse", "amplitude": 0.5, "duration": 1e-4},
            {"kind": "hold", "duration": 5e-5},
            {"kind": "ramp", "from": 0.1, "to": -0.4, "duration": 1e-4},
            {"kind": "sine", "amplitude": 1.0, "frequency": 1e4, "duration": 2e-4, "start_amplitude": 0.2}
        ]
    })");
    const Waveform wf = waveform_from_json(j);
    const Waveform back = waveform_from_json(to_json(wf));
    CHECK(back.segments().size() == 4);
    for (double t = 0.0; t < wf.total_duration(); t += 7e-6) CHECK(back.voltage_at(t) == wf.voltage_at(t));
    CHECK(to_json(back) == to_json(wf));

    CHECK(waveform_from_json(json::parse(R"({"protocol": "dynamics"})")).segments().size() ==
          dynamics_protocol().segments().size());
    CHECK_THROWS_AS(waveform_from_json(json::parse(R"({"segments": [{"kind": "pulse"}]})")), ConfigError);
    CHECK_THROWS_AS(waveform_from_json(json::parse(R"({"protocol": "magic"})")), ConfigError);
}

TEST_CASE("netlist block") {
    const json j = json::parse(R"({
        "elements": [
            {"type": "vsource", "name": "vin", "n+": "a", "n-": "gnd", "volts": 0.6},
            {"type": "memristor", "name": "m0", "n+": "a", "n-": "b", "device": 0},
            {"type": "resistor", "name": "rl", "n+": "b", "n-": "0", "ohms": 1e4}
        ]
    })");
    const Netlist net = netlist_from_json(j);
    CHECK(net.node_count() == 3);
    CHECK(net.device_count() == 1);
    CHECK(net.vsources().size() == 1);
    CHECK_THROWS_AS(netlist_from_json(json::parse(R"({"elements": [
        {"type": "resistor", "name": "r", "n+": "a", "n-": "b", "ohms": 1}]})")),
                    TopologyError);
    CHECK_THROWS_AS(netlist_from_json(json::parse(R"({"elements": [
        {"type": "diode", "name": "d", "n+": "a", "n-": "gnd"}]})")),
                    ConfigError);
}

TEST_CASE("resolved configuration parses back to itself") {
    const json doc = json::parse(R"({
        "preset": "believer-sec2b", "seed": 5, "trials": 30, "label": "x",
        "fixed": {"tau_l": 7.0},
        "distributions": {"v_on": {"kind": "gaussian"}},
        "waveform": {"segments": [{"kind": "pulse", "amplitude": 0.5, "duration": 1e-4}]}
    })");
    const json resolved = to_json(parse_config(doc));
    CHECK(to_json(parse_config(resolved)) == resolved);
}
