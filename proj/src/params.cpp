#include "rram/params.hpp"

#include <cmath>
#include <limits>

#include "rram/errors.hpp"
#include "rram/rng.hpp"

namespace rram {

namespace {

double& field(DeviceParams& p, VariedParam v) {
    switch (v) {
    case VariedParam::r_off: return p.r_off;
    case VariedParam::r_on: return p.r_on;
    case VariedParam::v_off: return p.v_off;
    case VariedParam::v_on: return p.v_on;
    case VariedParam::k_off: return p.k_off;
    case VariedParam::k_on: return p.k_on;
    }
    return p.r_off;
}

// Open sign constraint per parameter: +1 requires > 0, -1 requires < 0.
int required_sign(VariedParam v) {
    switch (v) {
    case VariedParam::v_on:
    case VariedParam::k_on: return -1;
    default: return +1;
    }
}

bool sign_ok(VariedParam v, double x) {
    return required_sign(v) > 0 ? x > 0.0 : x < 0.0;
}

// Support of a single draw before sign filtering.
std::pair<double, double> support(const DistributionSpec& d, const ParamDistributions& all) {
    switch (d.kind) {
    case DistKind::fixed: return {d.mean, d.mean};
    case DistKind::gaussian: {
        const double h = all.gaussian_truncation_sigmas * d.sigma;
        return {d.mean - h, d.mean + h};
    }
    case DistKind::uniform: {
        const double h = all.uniform_half_width_sigmas * d.sigma;
        return {d.mean - h, d.mean + h};
    }
    }
    return {d.mean, d.mean};
}

double draw_once(const DistributionSpec& d, const ParamDistributions& all, CounterRng& rng) {
    switch (d.kind) {
    case DistKind::fixed: return d.mean;
    case DistKind::gaussian: {
        const double limit = all.gaussian_truncation_sigmas * d.sigma;
        for (int i = 0; i < all.max_attempts; ++i) {
            const double x = d.mean + d.sigma * rng.normal();
            if (std::abs(x - d.mean) <= limit) return x;
        }
        throw ConfigError("gaussian truncation rejected every draw");
    }
    case DistKind::uniform: {
        const double h = all.uniform_half_width_sigmas * d.sigma;
        return d.mean - h + 2.0 * h * rng.uniform();
    }
    }
    return d.mean;
}

double draw(VariedParam v, const ParamDistributions& all, CounterRng& rng) {
    const DistributionSpec& d = all[v];
    for (int i = 0; i < all.max_attempts; ++i) {
        const double x = draw_once(d, all, rng);
        if (sign_ok(v, x)) return x;
        if (d.kind == DistKind::fixed) break;
    }
    throw ConfigError("no admissible draw for " + std::string(kVariedNames[static_cast<std::size_t>(v)]));
}

}  // namespace

DistKind parse_dist_kind(std::string_view name) {
    if (name == "fixed") return DistKind::fixed;
    if (name == "gaussian") return DistKind::gaussian;
    if (name == "uniform") return DistKind::uniform;
    throw ConfigError("unknown distribution kind '" + std::string(name) + "'");
}

std::string_view to_string(DistKind k) {
    switch (k) {
    case DistKind::fixed: return "fixed";
    case DistKind::gaussian: return "gaussian";
    case DistKind::uniform: return "uniform";
    }
    return "fixed";
}

SamplingMode parse_sampling_mode(std::string_view name) {
    if (name == "per_cycle") return SamplingMode::per_cycle;
    if (name == "per_device") return SamplingMode::per_device;
    if (name == "both") return SamplingMode::both;
    throw ConfigError("unknown sampling mode '" + std::string(name) + "'");
}

std::string_view to_string(SamplingMode m) {
    switch (m) {
    case SamplingMode::per_cycle: return "per_cycle";
    case SamplingMode::per_device: return "per_device";
    case SamplingMode::both: return "both";
    }
    return "both";
}

ParamDistributions ParamDistributions::nominal() const {
    ParamDistributions out = *this;
    for (auto& d : out.varied) d.kind = DistKind::fixed;
    return out;
}

DeviceParams ParamDistributions::mean_params() const {
    DeviceParams p = fixed;
    for (std::size_t i = 0; i < kVariedCount; ++i) {
        field(p, static_cast<VariedParam>(i)) = varied[i].mean;
    }
    return p;
}

ParamDistributions default_distributions() {
    ParamDistributions d;
    d[VariedParam::r_off] = {DistKind::gaussian, 545.54e3, 77.095e3};
    d[VariedParam::r_on] = {DistKind::gaussian, 4.92e3, 858.8};
    d[VariedParam::v_off] = {DistKind::uniform, 0.3702, 0.0377};
    d[VariedParam::v_on] = {DistKind::uniform, -0.3738, 0.0411};
    d[VariedParam::k_off] = {DistKind::uniform, 780e-6, 174.2e-6};
    d[VariedParam::k_on] = {DistKind::uniform, -4.67e-6, 0.747e-6};
    d.fixed = DeviceParams{};
    d.fixed.alpha_off = 3.0;
    d.fixed.alpha_on = 3.0;
    d.fixed.a_off = 1.3e-9;
    d.fixed.a_on = 1.8e-9;
    d.fixed.w_c = 980e-12;
    d.fixed.w_off = 3e-9;
    d.fixed.w_on = 0.0;
    d.fixed.theta_off = 0.0173;
    d.fixed.theta_on = 0.0;
    d.fixed.tau_l = 10.3;
    d.fixed = d.mean_params();
    return d;
}

ParamDistributions sec2b_distributions() {
    ParamDistributions d = default_distributions();
    d[VariedParam::r_on] = {DistKind::gaussian, 4.64e3, 427.9};
    d.fixed = d.mean_params();
    return d;
}

ParamDistributions preset(std::string_view name) {
    if (name == "believer-default") return default_distributions();
    if (name == "believer-sec2b") return sec2b_distributions();
    throw ConfigError("unknown preset '" + std::string(name) + "' (expected believer-default|believer-sec2b)");
}

void validate(const ParamDistributions& dists) {
    if (!(dists.uniform_half_width_sigmas > 0.0)) throw ConfigError("uniform half-width must be > 0");
    if (!(dists.gaussian_truncation_sigmas > 0.0)) throw ConfigError("gaussian truncation must be > 0");
    if (dists.max_attempts < 1) throw ConfigError("max_attempts must be >= 1");
    for (std::size_t i = 0; i < kVariedCount; ++i) {
        const auto v = static_cast<VariedParam>(i);
        const DistributionSpec& d = dists.varied[i];
        const std::string name(kVariedNames[i]);
        if (!std::isfinite(d.mean) || !std::isfinite(d.sigma)) throw ConfigError(name + ": non-finite distribution");
        if (d.sigma < 0.0) throw ConfigError(name + ": sigma must be >= 0");
        const auto [lo, hi] = support(d, dists);
        const bool reachable = required_sign(v) > 0 ? hi > 0.0 : lo < 0.0;
        if (!reachable) throw ConfigError(name + ": truncation region is empty");
    }
    const auto [off_lo, off_hi] = support(dists[VariedParam::r_off], dists);
    const auto [on_lo, on_hi] = support(dists[VariedParam::r_on], dists);
    (void)off_lo;
    (void)on_hi;
    if (!(off_hi > on_lo)) throw ConfigError("r_off can never exceed r_on");
    DeviceParams probe = dists.mean_params();
    validate(probe);
}

DeviceParams sample(const ParamDistributions& dists, const SamplingPolicy& policy, std::uint64_t trial,
                    std::uint64_t device) {
    constexpr std::uint64_t kAny = std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t t = policy.mode == SamplingMode::per_device ? kAny : trial;
    const std::uint64_t d = policy.mode == SamplingMode::per_cycle ? kAny : device;

    DeviceParams p = dists.fixed;
    for (std::size_t i = 0; i < kVariedCount; ++i) {
        const auto v = static_cast<VariedParam>(i);
        if (v == VariedParam::r_off || v == VariedParam::r_on) continue;
        CounterRng rng = CounterRng::keyed(policy.base_seed, t, d, i);
        field(p, v) = draw(v, dists, rng);
    }

    CounterRng r_off_rng = CounterRng::keyed(policy.base_seed, t, d, static_cast<std::uint64_t>(VariedParam::r_off));
    CounterRng r_on_rng = CounterRng::keyed(policy.base_seed, t, d, static_cast<std::uint64_t>(VariedParam::r_on));
    for (int i = 0;; ++i) {
        if (i >= dists.max_attempts) throw ConfigError("no admissible draw with r_off > r_on");
        p.r_off = draw(VariedParam::r_off, dists, r_off_rng);
        p.r_on = draw(VariedParam::r_on, dists, r_on_rng);
        if (p.r_off > p.r_on) break;
    }
    return p;
}

}  // namespace rram
