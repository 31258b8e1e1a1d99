#include <catch_amalgamated.hpp>

#include <cmath>

#include "rram/errors.hpp"
#include "rram/replays.hpp"

using namespace rram;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

ReplayOptions seeded(std::uint64_t seed) {
    ReplayOptions o;
    o.seed = seed;
    return o;
}

}  // namespace

TEST_CASE("ron-roff with variation off reads the nominal values") {
    ReplayOptions o;
    o.variation = false;
    const RonRoffResult r = replay_ron_roff(5, o);
    for (std::size_t k = 0; k < 5; ++k) {
        CHECK(r.roff_programmed[k] == 545.54e3);
        CHECK(r.ron_programmed[k] == 4.92e3);
        CHECK(r.ron[k] == r.ron[0]);
        CHECK_THAT(r.roff[k], WithinRel(545.54e3, 1e-3));
    }
    CHECK_THROWS_AS(replay_ron_roff(1, o), ConfigError);
}

TEST_CASE("ron-roff HRS read-back statistics") {
    const RonRoffResult r = replay_ron_roff(100, seeded(1));
    CHECK(std::abs(r.roff_fit.mean - 545.54e3) <= 3.0 * 77.095e3 / 10.0);
    for (std::size_t k = 0; k < r.roff.size(); ++k) CHECK_THAT(r.roff[k], WithinRel(r.roff_programmed[k], 5e-3));
}

TEST_CASE("ron-roff LRS read-back reaches the programmed r_on", "[!shouldfail]") {
    const RonRoffResult r = replay_ron_roff(100, seeded(1));
    CHECK(std::abs(r.ron_fit.mean - 4.92e3) <= 3.0 * 858.8 / 10.0);
    for (std::size_t k = 0; k < r.ron.size(); ++k) CHECK_THAT(r.ron[k], WithinRel(r.ron_programmed[k], 5e-3));
}

TEST_CASE("SET staircase decreases with variation and leakage off") {
    ReplayOptions o;
    o.variation = false;
    o.leakage = false;
    const DynamicsResult r = replay_dynamics(2, o);
    REQUIRE(r.staircase.size() == 2);
    REQUIRE(r.staircase[0].size() == 8);
    for (std::size_t k = 1; k < 8; ++k) CHECK(r.staircase[0][k] < r.staircase[0][k - 1]);
    CHECK(r.staircase[0] == r.staircase[1]);
    // The RESET pulse drives the device back up.
    CHECK(r.reset_r.back() > r.staircase[0].back());
    for (std::size_t k = 1; k < r.reset_t.size(); ++k) CHECK(r.reset_t[k] > r.reset_t[k - 1]);
}

TEST_CASE("SET-change statistic stays within +-67% of its mean", "[!shouldfail]") {
    const DynamicsResult r = replay_dynamics(100, seeded(1));
    const GaussianFit f = fit_gaussian(r.set_change);
    for (double x : r.set_change) CHECK(std::abs(x - f.mean) <= 0.67 * std::abs(f.mean));
}

TEST_CASE("500 mV for 1 ms saturates the state", "[!shouldfail]") {
    const DeviceParams p;
    const Waveform wf({Segment::pulse(0.5, 1e-3)}, 1e-5);
    TransientOptions opt;
    opt.record = false;
    const TransientResult r = run_device(wf, DeviceState::hrs(p), p, opt);
    CHECK_THAT(resistance(r.final_states[0].w, p), WithinRel(p.r_on, 0.02));
}

TEST_CASE("leakage replay") {
    const LeakageResult r = replay_leakage(LeakageOptions{}, seeded(1));
    REQUIRE(r.after_set.size() == 1);
    const LeakagePhase& set = r.after_set.front();

    SECTION("flat after RESET") { CHECK(r.after_reset.max_relative_change <= 1e-3); }
    SECTION("resistance rises after SET") {
        CHECK(set.drift > 0.0);
        for (std::size_t k = 1; k < set.r.size(); ++k) CHECK(set.r[k] >= set.r[k - 1]);
    }
    SECTION("drift fades out with the leakage time constant") {
        REQUIRE(set.fit.has_value());
        CHECK_THAT(set.fit->tau, WithinRel(10.3, 0.05));
        // Beyond 5 tau = 51.5 s less than 1 % of the total drift remains.
        std::size_t k5 = 0;
        while (k5 < set.t.size() && set.t[k5] < 51.5) ++k5;
        REQUIRE(k5 < set.t.size());
        CHECK(std::abs(set.r.back() - set.r[k5]) < 0.01 * std::abs(set.drift));
    }
    SECTION("closed-form agreement") {
        CHECK(r.average_deviation <= 0.011);
        CHECK(r.max_deviation <= 0.134);
    }
}

TEST_CASE("series SET pulses drift less each time") {
    LeakageOptions lo;
    lo.set_pulses = 3;
    lo.n_probe = 60;
    const LeakageResult r = replay_leakage(lo, seeded(1));
    REQUIRE(r.after_set.size() == 3);
    CHECK(std::abs(r.after_set[1].drift) < std::abs(r.after_set[0].drift));
    CHECK(std::abs(r.after_set[2].drift) < std::abs(r.after_set[1].drift));
}

TEST_CASE("read windows and read resistance") {
    const ProtocolOptions p;
    const Waveform wf = ron_roff_protocol(p);
    const auto windows = read_windows(wf, p);
    REQUIRE(windows.size() == 2);
    CHECK_THAT(windows[0].second - windows[0].first, WithinRel(p.read_width / 2.0, 1e-9));
    CHECK(windows[1].first > windows[0].second);
}

TEST_CASE("forming sweep thresholds within 10% of the model values", "[!shouldfail]") {
    ReplayOptions o;
    o.variation = false;
    const ThresholdReplayResult r = replay_thresholds(SweepOptions{}, ThresholdOptions{}, o, 100e-6);
    REQUIRE(r.thresholds.v_plus.has_value());
    REQUIRE(r.thresholds.v_minus.has_value());
    CHECK_THAT(*r.thresholds.v_plus, WithinRel(0.3702, 0.1));
    CHECK_THAT(*r.thresholds.v_minus, WithinRel(-0.3738, 0.1));
}

TEST_CASE("forming sweep SET is visible in the raw difference") {
    ReplayOptions o;
    o.variation = false;
    ThresholdOptions t;
    t.raw_difference = true;
    const ThresholdReplayResult r = replay_thresholds(SweepOptions{}, t, o, 100e-6);
    REQUIRE(r.thresholds.v_plus.has_value());
    CHECK(*r.thresholds.v_plus > 0.3702);
    for (const auto& s : r.trace.devices) CHECK(std::abs(s[0].i) <= 100e-6 * (1 + 1e-12));
}
