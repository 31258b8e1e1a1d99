#include <catch_amalgamated.hpp>

#include <cmath>

#include "rram/errors.hpp"
#include "rram/waveform.hpp"

using namespace rram;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("hold segment is 0 V everywhere") {
    const Waveform wf({Segment::hold(1e-3)}, 1e-5);
    for (double t : {0.0, 1e-4, 5e-4, 1e-3}) CHECK(wf.voltage_at(t) == 0.0);
}

TEST_CASE("pulse interior") {
    const Waveform wf({Segment::pulse(0.5, 1e-3)}, 1e-5);
    CHECK(wf.voltage_at(0.5e-3) == 0.5);
    CHECK(wf.total_duration() == 1e-3);
}

TEST_CASE("pulse edges ramp linearly") {
    const Waveform wf({Segment::pulse(1.0, 1e-3)}, 1e-5, 1e-4);
    CHECK_THAT(wf.voltage_at(0.5e-4), WithinAbs(0.5, 1e-12));
    CHECK(wf.voltage_at(0.5e-3) == 1.0);
    CHECK_THAT(wf.voltage_at(1e-3 - 0.25e-4), WithinAbs(0.25, 1e-9));
}

TEST_CASE("segments are concatenated") {
    const Waveform wf({Segment::pulse(0.5, 1e-3), Segment::hold(1e-3), Segment::pulse(-1.0, 2e-3)}, 1e-5);
    CHECK(wf.voltage_at(0.2e-3) == 0.5);
    CHECK(wf.voltage_at(1.5e-3) == 0.0);
    CHECK(wf.voltage_at(3e-3) == -1.0);
    CHECK(wf.starts().size() == 3);
    CHECK_THAT(wf.total_duration(), WithinRel(4e-3, 1e-12));
    CHECK(wf.shortest_segment() == 1e-3);
}

TEST_CASE("ramp interpolates between endpoints") {
    const Waveform wf({Segment::ramp(0.2, 1.0, 1e-3)}, 1e-5);
    CHECK_THAT(wf.voltage_at(0.0), WithinAbs(0.2, 1e-12));
    CHECK_THAT(wf.voltage_at(0.5e-3), WithinAbs(0.6, 1e-12));
    CHECK_THAT(wf.voltage_at(1e-3), WithinAbs(1.0, 1e-12));
}

TEST_CASE("forming sine crosses zero every 5 ms at 100 Hz") {
    const Waveform wf = forming_sweep();
    const double half = 5e-3;
    for (int k = 1; k < 20; ++k) CHECK_THAT(wf.voltage_at(k * half), WithinAbs(0.0, 1e-12));
    CHECK(wf.voltage_at(2.5e-3) > 0.0);
    CHECK(wf.voltage_at(7.5e-3) < 0.0);
    CHECK_THAT(wf.total_duration(), WithinRel(0.1, 1e-12));
    // Envelope grows from the start amplitude to the final one.
    CHECK_THAT(wf.voltage_at(2.5e-3), WithinRel(0.2 + 0.8 * 0.025, 1e-9));
    CHECK_THAT(std::abs(wf.voltage_at(0.1 - 2.5e-3)), WithinRel(0.2 + 0.8 * 0.975, 1e-9));
}

TEST_CASE("voltage_at outside the waveform is a contract violation") {
    const Waveform wf({Segment::pulse(0.5, 1e-3)}, 1e-5);
    CHECK_THROWS_AS(wf.voltage_at(-1e-9), ContractViolation);
    CHECK_THROWS_AS(wf.voltage_at(2e-3), ContractViolation);
}

TEST_CASE("construction errors") {
    CHECK_THROWS_AS(Waveform({}, 1e-5), ConfigError);
    CHECK_THROWS_AS(Waveform({Segment::pulse(0.5, 0.0)}, 1e-5), ConfigError);
    CHECK_THROWS_AS(Waveform({Segment::pulse(0.5, -1e-3)}, 1e-5), ConfigError);
    // Sampling coarser than a quarter of the shortest segment.
    CHECK_THROWS_AS(Waveform({Segment::pulse(0.5, 1e-3)}, 0.5e-3), ConfigError);
    CHECK_THROWS_AS(Waveform({Segment::sine(1.0, 0.0, 1e-3)}, 1e-5), ConfigError);
    CHECK_THROWS_AS(parse_segment_kind("triangle"), ConfigError);
}

TEST_CASE("protocol shapes") {
    const ProtocolOptions opt;
    SECTION("ron-roff: SET, read, RESET, read") {
        const Waveform wf = ron_roff_protocol(opt);
        CHECK(wf.voltage_at(0.5e-3) == 0.5);
        int reads = 0;
        int resets = 0;
        for (const Segment& s : wf.segments()) {
            if (s.kind == SegmentKind::pulse && s.amplitude == opt.read_amplitude) ++reads;
            if (s.kind == SegmentKind::pulse && s.amplitude == -1.0) ++resets;
        }
        CHECK(reads == 2);
        CHECK(resets == 1);
    }
    SECTION("dynamics: eight SET pulses each followed by a read") {
        const Waveform wf = dynamics_protocol(opt);
        int sets = 0;
        for (const Segment& s : wf.segments()) sets += (s.kind == SegmentKind::pulse && s.amplitude == 0.5);
        CHECK(sets == 8);
        CHECK(wf.segments().back().amplitude == -1.0);
        CHECK(wf.segments().back().duration == 2e-3);
    }
    SECTION("leakage: probes after RESET and after each SET") {
        LeakageOptions lo;
        lo.n_probe = 5;
        lo.set_pulses = 2;
        const Waveform wf = leakage_protocol(lo);
        int reads = 0;
        for (const Segment& s : wf.segments()) reads += (s.kind == SegmentKind::pulse && s.amplitude == opt.read_amplitude);
        CHECK(reads == 15);
        CHECK_THROWS_AS(leakage_protocol(0, 1.0), ConfigError);
    }
}

TEST_CASE("idle segments") {
    CHECK(Segment::hold(1.0).idle());
    CHECK(Segment::pulse(0.0, 1.0).idle());
    CHECK_FALSE(Segment::pulse(0.1, 1.0).idle());
    CHECK_FALSE(Segment::sine(1.0, 100.0, 1.0).idle());
}
