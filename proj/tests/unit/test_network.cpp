#include <catch_amalgamated.hpp>

#include <cmath>
#include <numeric>
#include <random>

#include "rram/errors.hpp"
#include "rram/gates.hpp"
#include "rram/netlist.hpp"
#include "rram/transient.hpp"
#include "netlist_oracle.hpp"

using namespace rram;
using namespace rram::testing;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

std::vector<DeviceParams> nominal(std::size_t n) { return std::vector<DeviceParams>(n); }

}  // namespace

TEST_CASE("solve_dc agrees with a dense MNA oracle on random netlists") {
    std::mt19937_64 rng(20240611);
    for (int trial = 0; trial < 100; ++trial) {
        const RandomCase c = random_case(rng);
        const DcSolution sol = solve_dc(c.net, c.device_r, c.source_v);
        const Oracle o = mna_oracle(c.net, c.device_r, c.source_v);
        const double vscale = std::max(1.0, o.v.cwiseAbs().maxCoeff());
        for (std::size_t k = 0; k < sol.node_voltages.size(); ++k) {
            CHECK_THAT(sol.node_voltages[k], WithinAbs(o.v(static_cast<Eigen::Index>(k)), 1e-10 * vscale));
        }
        const KclReport kcl = kcl_residual(c.net, c.device_r, sol);
        const double jscale = std::max(kcl.max_branch_current, kcl.current_scale);
        for (std::size_t k = 0; k < sol.source_currents.size(); ++k) {
            CHECK_THAT(sol.source_currents[k], WithinAbs(o.j(static_cast<Eigen::Index>(k)), 1e-10 * jscale));
        }
        CHECK(kcl.ratio() < 1e-9);
    }
}

TEST_CASE("IMPLY node voltage divider") {
    const GateSpec spec = GateSpec::defaults(GateFamily::imply);
    const Netlist net = build_netlist(spec);
    const double rp = 5e3;
    const double rq = 300e3;
    std::vector<double> sv;
    for (std::size_t k : net.vsources()) sv.push_back(net.elements()[k].constant);
    const DcSolution sol = solve_dc(net, std::vector<double>{rp, rq}, sv);
    const double gp = 1.0 / rp;
    const double gq = 1.0 / rq;
    const double gg = 1.0 / spec.r_g;
    const double expected = (spec.v_cond * gp + spec.v_set * gq) / (gp + gq + gg);
    CHECK_THAT(sol.node_voltages[net.node("n")], WithinRel(expected, 1e-12));
}

TEST_CASE("MAGIC common node voltage") {
    GateSpec spec = GateSpec::defaults(GateFamily::magic_nor);
    const Netlist net = build_netlist(spec);
    const double r = 20e3;
    const double r_out = 7e3;
    std::vector<double> sv;
    for (std::size_t k : net.vsources()) sv.push_back(net.elements()[k].constant);
    const DcSolution sol = solve_dc(net, std::vector<double>{r, r, r_out}, sv);
    const double expected = spec.v0 * (2.0 / r) / (2.0 / r + 1.0 / r_out);
    CHECK_THAT(sol.node_voltages[net.node("c")], WithinRel(expected, 1e-12));
}

TEST_CASE("all sources at 0 V give zero node voltages") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        RandomCase c = random_case(rng);
        std::fill(c.source_v.begin(), c.source_v.end(), 0.0);
        const DcSolution sol = solve_dc(c.net, c.device_r, c.source_v);
        for (double v : sol.node_voltages) CHECK(v == 0.0);
    }
}

TEST_CASE("topology errors") {
    SECTION("floating node") {
        Netlist net;
        const NodeId a = net.add_node("a");
        const NodeId b = net.add_node("b");
        net.add_resistor("r1", a, kGround, 1e3);
        net.add_resistor("r2", b, b == a ? kGround : b, 1e3);
        CHECK_THROWS_AS(net.validate(), TopologyError);
    }
    SECTION("loop of sources") {
        Netlist net;
        const NodeId a = net.add_node("a");
        net.add_vsource("v1", a, kGround, 1.0);
        net.add_vsource("v2", a, kGround, 0.5);
        CHECK_THROWS_AS(DcSolver(net), TopologyError);
    }
    SECTION("device referenced twice") {
        Netlist net;
        const NodeId a = net.add_node("a");
        net.add_memristor("m0", a, kGround, 0);
        net.add_memristor("m1", a, kGround, 0);
        CHECK_THROWS_AS(net.validate(), TopologyError);
    }
    SECTION("unknown node name") {
        Netlist net;
        CHECK_THROWS_AS(net.node("x"), TopologyError);
    }
}

TEST_CASE("single memristor across a source reproduces the device step") {
    const DeviceParams p;
    const double dt = 1e-6;
    const Waveform wf({Segment::pulse(0.8, 100e-6)}, 5e-6);
    TransientOptions opt;
    opt.dt = dt;
    const TransientResult r = run_device(wf, DeviceState::hrs(p), p, opt);

    DeviceState s = DeviceState::hrs(p);
    for (int k = 0; k < 100; ++k) s = step(s, 0.8, dt, p).state;
    CHECK_THAT(r.final_states[0].w, WithinRel(s.w, 1e-9));
    CHECK_THAT(r.final_states[0].theta, WithinRel(s.theta, 1e-9));
    CHECK(r.trace.device_names.size() == 1);
    // Reported current is v / R at every sample.
    for (std::size_t k = 0; k < r.trace.size(); ++k) {
        const DeviceSample& d = r.trace.devices[k][0];
        CHECK_THAT(d.i, WithinRel(d.v / d.r, 1e-12));
    }
}

TEST_CASE("zero-duration run") {
    const GateSpec spec = GateSpec::defaults(GateFamily::imply);
    const Netlist net = build_netlist(spec);
    const DeviceParams p;
    const std::vector<DeviceState> init{DeviceState::lrs(p), DeviceState::hrs(p)};
    const TransientResult r = run_transient(net, init, nominal(2), 0.0);
    CHECK(r.trace.empty());
    CHECK(r.final_states[0].w == init[0].w);
    CHECK(r.final_states[1].w == init[1].w);
}

TEST_CASE("IMPLY '11' leaves Q nearly untouched") {
    const GateSpec spec = GateSpec::defaults(GateFamily::imply);
    const Netlist net = build_netlist(spec);
    const DeviceParams p;
    const std::vector<DeviceState> init{DeviceState::lrs(p), DeviceState::lrs(p)};
    TransientOptions opt;
    opt.check_kcl = true;
    const TransientResult r = run_transient(net, init, nominal(2), spec.t_op, opt);
    CHECK(std::abs(r.final_states[1].w - init[1].w) < 0.01 * p.range());
    for (const auto& sample : r.trace.devices) CHECK(sample[1].v < p.v_off);
}

TEST_CASE("KCL holds on every transient sample of every gate") {
    const DeviceParams p;
    for (GateFamily f : {GateFamily::imply, GateFamily::magic_nor, GateFamily::felix_or, GateFamily::tmsl_nor}) {
        const GateSpec spec = GateSpec::defaults(f);
        const Netlist net = build_netlist(spec);
        for (int in = 0; in < 4; ++in) {
            std::vector<DeviceState> init;
            for (int bit : spec.initial_bits(in)) init.push_back(bit ? DeviceState::lrs(p) : DeviceState::hrs(p));
            TransientOptions opt;
            opt.check_kcl = true;
            const TransientResult r = run_transient(net, init, nominal(spec.device_count()), spec.t_op, opt);
            CHECK(r.trace.max_kcl_ratio <= 1e-9);
            CHECK(r.trace.size() > 2);
        }
    }
}

TEST_CASE("transient records segment boundaries and writes CSV") {
    const DeviceParams p;
    const Waveform wf({Segment::pulse(0.6, 20e-6), Segment::hold(30e-6), Segment::pulse(0.05, 20e-6)}, 5e-6);
    const TransientResult r = run_device(wf, DeviceState::hrs(p), p);
    auto has = [&](double t) {
        return std::any_of(r.trace.t.begin(), r.trace.t.end(), [t](double x) { return std::abs(x - t) < 1e-15; });
    };
    CHECK(has(0.0));
    CHECK(has(20e-6));
    CHECK(has(50e-6));
    CHECK(has(70e-6));
    std::ostringstream os;
    write_trace_csv(os, r.trace);
    const std::string csv = os.str();
    CHECK(csv.rfind("t,node:p,dev:m0:v,dev:m0:i,dev:m0:w,dev:m0:theta,dev:m0:R\n", 0) == 0);
    CHECK(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')) == r.trace.size() + 1);
}

TEST_CASE("compliance clamps reported current only") {
    const DeviceParams p;
    const Waveform wf({Segment::pulse(1.0, 1e-3)}, 1e-5);
    TransientOptions limited;
    limited.i_limit = 100e-6;
    const TransientResult a = run_device(wf, DeviceState::hrs(p), p, limited);
    const TransientResult b = run_device(wf, DeviceState::hrs(p), p);
    CHECK(a.final_states[0].w == b.final_states[0].w);
    for (const auto& s : a.trace.devices) CHECK(std::abs(s[0].i) <= 100e-6 * (1 + 1e-12));
}
