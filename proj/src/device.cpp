#include "rram/device.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rram/errors.hpp"

namespace rram {

namespace {

[[noreturn, gnu::cold, gnu::noinline]] void throw_non_finite(const char* what) {
    throw NumericInputError(std::string("non-finite ") + what);
}

[[noreturn, gnu::cold, gnu::noinline]] void throw_out_of_bounds(double w, const DeviceParams& p) {
    std::ostringstream os;
    os << "state w=" << w << " outside [" << p.w_on << ", " << p.w_off << "]";
    throw ContractViolation(os.str());
}

inline void require_finite(double x, const char* what) {
    if (!std::isfinite(x)) [[unlikely]] throw_non_finite(what);
}

inline void require_in_bounds(double w, const DeviceParams& p) {
    if (!(w >= p.w_on && w <= p.w_off)) [[unlikely]] throw_out_of_bounds(w, p);
}

double power(double x, double alpha) {
    return alpha == 3.0 ? x * x * x : std::pow(x, alpha);
}

struct Rates {
    double dw;      // dw/dt
    double decay;   // -theta / tau_l
    double source;  // leakage charging term
};

Rates rates(double v_eff, double w, double theta, const DeviceParams& p) {
    switch (branch_of(v_eff, p)) {
    case Branch::set: {
        const double m = set_rate(v_eff, w, p);
        return {-m, -theta / p.tau_l, p.theta_off * m};
    }
    case Branch::reset: {
        const double m = reset_rate(v_eff, w, p);
        return {+m, -theta / p.tau_l, p.theta_on * m};
    }
    case Branch::hold:
        break;
    }
    return {theta, -theta / p.tau_l, 0.0};
}

// True when the motion would push w further past a bound it already sits on.
bool pinned(double w, double dw, const DeviceParams& p) {
    return (w <= p.w_on && dw < 0.0) || (w >= p.w_off && dw > 0.0);
}

}  // namespace

void validate(const DeviceParams& p) {
    auto fail = [](const char* msg) { throw ConfigError(std::string("invalid device parameters: ") + msg); };
    const double all[] = {p.r_off, p.r_on, p.v_off, p.v_on, p.k_off, p.k_on, p.alpha_off, p.alpha_on,
                          p.a_off, p.a_on, p.w_c, p.w_off, p.w_on, p.theta_off, p.theta_on, p.tau_l};
    for (double x : all) {
        if (!std::isfinite(x)) fail("non-finite value");
    }
    if (!(p.r_on > 0.0)) fail("r_on must be > 0");
    if (!(p.r_off > p.r_on)) fail("r_off must exceed r_on");
    if (!(p.v_off > 0.0)) fail("v_off must be > 0");
    if (!(p.v_on < 0.0)) fail("v_on must be < 0");
    if (!(p.k_off > 0.0)) fail("k_off must be > 0");
    if (!(p.k_on < 0.0)) fail("k_on must be < 0");
    if (!(p.alpha_off > 0.0 && p.alpha_on > 0.0)) fail("exponents must be > 0");
    if (!(p.w_on >= 0.0)) fail("w_on must be >= 0");
    if (!(p.w_off > p.w_on)) fail("w_off must exceed w_on");
    if (!(p.w_c > 0.0)) fail("w_c must be > 0");
    if (!(p.tau_l > 0.0)) fail("tau_l must be > 0");
    if (!(p.theta_off >= 0.0)) fail("theta_off must be >= 0");
    if (!(p.theta_on <= 0.0)) fail("theta_on must be <= 0");
}

Scheme parse_scheme(std::string_view name) {
    if (name == "euler") return Scheme::euler;
    if (name == "rk4") return Scheme::rk4;
    throw ConfigError("unknown integrator scheme '" + std::string(name) + "' (expected euler|rk4)");
}

std::string_view to_string(Scheme s) {
    return s == Scheme::rk4 ? "rk4" : "euler";
}

double window_off(double w, const DeviceParams& p) {
    return std::exp(-std::exp((w - p.a_off) / p.w_c));
}

double window_on(double w, const DeviceParams& p) {
    return std::exp(-std::exp((-w - p.a_on) / p.w_c));
}

Branch branch_of(double v_eff, const DeviceParams& p) {
    if (v_eff > p.v_off) return Branch::set;
    if (v_eff < p.v_on) return Branch::reset;
    return Branch::hold;
}

double set_rate(double v_eff, double w, const DeviceParams& p) {
    if (!(v_eff > p.v_off)) return 0.0;
    return p.k_off * power(v_eff / p.v_off - 1.0, p.alpha_off) * window_off(w, p);
}

double reset_rate(double v_eff, double w, const DeviceParams& p) {
    if (!(v_eff < p.v_on)) return 0.0;
    return std::abs(p.k_on) * power(v_eff / p.v_on - 1.0, p.alpha_on) * window_on(w, p);
}

double state_derivative(double v, const DeviceState& s, const DeviceParams& p) {
    require_finite(v, "voltage");
    return rates(s.polarity * v, s.w, s.theta, p).dw;
}

double leakage_derivative(double v, const DeviceState& s, const DeviceParams& p) {
    require_finite(v, "voltage");
    const Rates r = rates(s.polarity * v, s.w, s.theta, p);
    return r.decay + r.source;
}

double resistance(double w, const DeviceParams& p) {
    require_in_bounds(w, p);
    return p.r_on + (p.r_off - p.r_on) * (w - p.w_on) / (p.w_off - p.w_on);
}

double current(double v, double w, const DeviceParams& p, std::optional<double> i_limit) {
    const double i = v / resistance(w, p);
    if (i_limit && std::abs(i) > *i_limit) {
        return std::copysign(*i_limit, i);
    }
    return i;
}

double normalized_state(double w, const DeviceParams& p) {
    return (p.w_off - w) / (p.w_off - p.w_on);
}

StepResult step(const DeviceState& s, double v, double dt, const DeviceParams& p, const IntegratorConfig& cfg) {
    require_finite(v, "voltage");
    require_finite(dt, "time step");
    require_finite(s.theta, "leakage capacity");
    if (!(dt > 0.0)) throw NumericInputError("time step must be > 0");
    require_in_bounds(s.w, p);

    const double v_eff = s.polarity * v;
    const double max_dw = cfg.max_dw_fraction * p.range();
    const double max_h = cfg.max_dt_tau_fraction * p.tau_l;

    DeviceState out = s;
    StepReport rep;
    rep.dt_used = dt;
    rep.w_before = s.w;

    double remaining = dt;
    while (remaining > 0.0) {
        if (rep.substeps >= cfg.max_substeps) {
            throw NumericInputError("substep limit exceeded");
        }
        const Rates k1 = rates(v_eff, out.w, out.theta, p);
        double h = std::min(remaining, max_h);
        if (!pinned(out.w, k1.dw, p) && k1.dw != 0.0) {
            h = std::min(h, max_dw / std::abs(k1.dw));
        }
        // Land exactly on the end of the interval instead of leaving a sliver.
        if (remaining - h < 1e-12 * dt) h = remaining;

        double dw_raw = 0.0;
        double dtheta_decay = 0.0;
        double dtheta_source = 0.0;
        if (cfg.scheme == Scheme::euler) {
            dw_raw = h * k1.dw;
            dtheta_decay = h * k1.decay;
            dtheta_source = h * k1.source;
        } else {
            auto eval = [&](double w, double th) { return rates(v_eff, w, th, p); };
            const Rates k2 = eval(out.w + 0.5 * h * k1.dw, out.theta + 0.5 * h * (k1.decay + k1.source));
            const Rates k3 = eval(out.w + 0.5 * h * k2.dw, out.theta + 0.5 * h * (k2.decay + k2.source));
            const Rates k4 = eval(out.w + h * k3.dw, out.theta + h * (k3.decay + k3.source));
            dw_raw = h / 6.0 * (k1.dw + 2.0 * k2.dw + 2.0 * k3.dw + k4.dw);
            const double dtheta = h / 6.0 * ((k1.decay + k1.source) + 2.0 * (k2.decay + k2.source) +
                                             2.0 * (k3.decay + k3.source) + (k4.decay + k4.source));
            // Split off the source-free decay so clamping can scale the source alone.
            const double x = h / p.tau_l;
            dtheta_decay = out.theta * (-x + x * x / 2.0 - x * x * x / 6.0 + x * x * x * x / 24.0);
            dtheta_source = dtheta - dtheta_decay;
        }

        const double w_raw = out.w + dw_raw;
        const double w_new = std::clamp(w_raw, p.w_on, p.w_off);
        double realised = 1.0;
        if (w_new != w_raw) {
            rep.clamped = true;
            realised = dw_raw != 0.0 ? std::abs(w_new - out.w) / std::abs(dw_raw) : 0.0;
        }
        out.w = w_new;
        out.theta += dtheta_decay + realised * dtheta_source;

        remaining -= h;
        ++rep.substeps;
    }
    rep.w_after = out.w;
    return {out, rep};
}

}  // namespace rram
