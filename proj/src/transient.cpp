#include "rram/transient.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include "rram/errors.hpp"

namespace rram {

namespace {

double branch_conductance(const Element& e, std::span<const double> device_r) {
    if (e.kind == ElementKind::resistor) return 1.0 / e.ohms;
    const double r = device_r[e.device];
    if (!(r > 0.0) || !std::isfinite(r)) throw NumericInputError("device resistance must be finite and > 0");
    return 1.0 / r;
}

}  // namespace

DcSolver::DcSolver(const Netlist& net) : net_(&net) {
    net.validate();
    device_count_ = net.device_count();
    const auto& elems = net.elements();
    const auto& sources = net.vsources();
    std::vector<bool> known(net.node_count(), false);
    std::vector<bool> used(sources.size(), false);
    known[kGround] = true;

    bool progress = true;
    while (progress) {
        progress = false;
        for (std::size_t k = 0; k < sources.size(); ++k) {
            if (used[k]) continue;
            const Element& e = elems[sources[k]];
            if (known[e.n_minus] && !known[e.n_plus]) {
                forced_.push_back({k, e.n_plus, e.n_minus, +1.0});
                known[e.n_plus] = true;
            } else if (known[e.n_plus] && !known[e.n_minus]) {
                forced_.push_back({k, e.n_minus, e.n_plus, -1.0});
                known[e.n_minus] = true;
            } else {
                continue;
            }
            used[k] = true;
            progress = true;
        }
    }
    unknown_index_.assign(net.node_count(), -1);
    for (NodeId n = 0; n < net.node_count(); ++n) {
        if (!known[n]) unknown_index_[n] = static_cast<long>(n_unknown_++);
    }
    for (std::size_t k = 0; k < sources.size(); ++k) {
        if (!used[k]) floating_sources_.push_back(k);
    }
    const std::size_t n = n_unknown_ + floating_sources_.size();
    a_.resize(n);
    b_.assign(n, 0.0);
}

void DcSolver::solve(std::span<const double> device_r, std::span<const double> source_v, DcSolution& out,
                     bool with_currents) {
    const Netlist& net = *net_;
    const auto& elems = net.elements();
    const auto& sources = net.vsources();
    if (source_v.size() != sources.size()) throw ContractViolation("one value per voltage source is required");
    if (device_r.size() < device_count_) throw ContractViolation("one resistance per device is required");

    out.node_voltages.assign(net.node_count(), 0.0);
    out.source_currents.assign(sources.size(), 0.0);
    auto& v = out.node_voltages;
    for (const Forced& f : forced_) v[f.node] = v[f.from] + f.sign * source_v[f.source];

    const std::size_t n = a_.size();
    if (n > 0) {
        a_.fill(0.0);
        std::fill(b_.begin(), b_.end(), 0.0);
        for (const Element& e : elems) {
            if (e.kind == ElementKind::vsource) continue;
            const double g = branch_conductance(e, device_r);
            const long ra = unknown_index_[e.n_plus];
            const long rb = unknown_index_[e.n_minus];
            if (ra >= 0) {
                a_(ra, ra) += g;
                if (rb >= 0) a_(ra, rb) -= g;
                else b_[ra] += g * v[e.n_minus];
            }
            if (rb >= 0) {
                a_(rb, rb) += g;
                if (ra >= 0) a_(rb, ra) -= g;
                else b_[rb] += g * v[e.n_plus];
            }
        }
        for (std::size_t j = 0; j < floating_sources_.size(); ++j) {
            const std::size_t m = n_unknown_ + j;
            const Element& e = elems[sources[floating_sources_[j]]];
            const long rp = unknown_index_[e.n_plus];
            const long rm = unknown_index_[e.n_minus];
            a_(rp, m) -= 1.0;
            a_(rm, m) += 1.0;
            a_(m, rp) = 1.0;
            a_(m, rm) = -1.0;
            b_[m] = source_v[floating_sources_[j]];
        }
        solve_in_place(a_, b_);
        for (NodeId node = 0; node < net.node_count(); ++node) {
            if (unknown_index_[node] >= 0) v[node] = b_[static_cast<std::size_t>(unknown_index_[node])];
        }
        for (std::size_t j = 0; j < floating_sources_.size(); ++j) {
            out.source_currents[floating_sources_[j]] = b_[n_unknown_ + j];
        }
    }

    if (!with_currents) return;
    // Currents of the eliminated sources follow from the balance at the node
    // each one fixes, resolved outward-in so every other source at that node
    // is already known.
    for (auto it = forced_.rbegin(); it != forced_.rend(); ++it) {
        const NodeId m = it->node;
        double leaving = 0.0;
        for (std::size_t k = 0; k < elems.size(); ++k) {
            const Element& e = elems[k];
            if (e.n_plus != m && e.n_minus != m) continue;
            if (e.kind == ElementKind::vsource) {
                const std::size_t s = static_cast<std::size_t>(
                    std::find(sources.begin(), sources.end(), k) - sources.begin());
                if (s == it->source) continue;
                leaving += (e.n_plus == m ? -1.0 : 1.0) * out.source_currents[s];
            } else {
                const double g = branch_conductance(e, device_r);
                const NodeId other = e.n_plus == m ? e.n_minus : e.n_plus;
                leaving += g * (v[m] - v[other]);
            }
        }
        const Element& f = elems[sources[it->source]];
        out.source_currents[it->source] = f.n_plus == m ? leaving : -leaving;
    }
}

DcSolution solve_dc(const Netlist& net, std::span<const double> device_r, std::span<const double> source_v) {
    DcSolver solver(net);
    DcSolution out;
    solver.solve(device_r, source_v, out);
    return out;
}

KclReport kcl_residual(const Netlist& net, std::span<const double> device_r, const DcSolution& sol) {
    const auto& elems = net.elements();
    const auto& sources = net.vsources();
    std::vector<double> leaving(net.node_count(), 0.0);
    KclReport rep;
    double max_g = 0.0;
    std::size_t s = 0;
    for (std::size_t k = 0; k < elems.size(); ++k) {
        const Element& e = elems[k];
        double i = 0.0;  // flowing n_plus -> n_minus through the element
        if (e.kind == ElementKind::vsource) {
            while (sources[s] != k) ++s;
            i = -sol.source_currents[s];
        } else {
            const double g = branch_conductance(e, device_r);
            const double va = sol.node_voltages[e.n_plus];
            const double vb = sol.node_voltages[e.n_minus];
            i = g * (va - vb);
            max_g = std::max(max_g, g);
        }
        leaving[e.n_plus] += i;
        leaving[e.n_minus] -= i;
        rep.max_branch_current = std::max(rep.max_branch_current, std::abs(i));
    }
    double max_v = 0.0;
    for (NodeId n = 1; n < net.node_count(); ++n) {
        rep.max_residual = std::max(rep.max_residual, std::abs(leaving[n]));
        max_v = std::max(max_v, std::abs(sol.node_voltages[n]));
    }
    rep.current_scale = max_g * max_v;
    return rep;
}

double default_dt(const Netlist& net) {
    double dt = 100e-9;
    for (std::size_t idx : net.vsources()) {
        const Element& e = net.elements()[idx];
        if (e.waveform) dt = std::min(dt, e.waveform->shortest_pulse() / 50.0);
    }
    return dt;
}

TransientResult run_transient(const Netlist& net, std::vector<DeviceState> devices,
                              const std::vector<DeviceParams>& params, double duration,
                              const TransientOptions& opt) {
    if (!std::isfinite(duration) || duration < 0.0) throw NumericInputError("duration must be finite and >= 0");
    DcSolver solver(net);
    const auto& elems = net.elements();
    const auto& sources = net.vsources();
    const auto& mems = net.memristors();
    if (devices.size() < net.device_count() || params.size() < net.device_count()) {
        throw ContractViolation("one state and one parameter set per device is required");
    }
    for (std::size_t idx : mems) {
        const Element& e = elems[idx];
        validate(params[e.device]);
        devices[e.device].polarity = e.polarity;
    }

    const double dt = opt.dt > 0.0 ? opt.dt : default_dt(net);
    const double hold_dt = opt.hold_dt > 0.0 ? opt.hold_dt : dt;
    double record_dt = opt.record_dt;
    if (!(record_dt > 0.0)) {
        record_dt = std::numeric_limits<double>::infinity();
        for (std::size_t idx : sources) {
            if (elems[idx].waveform) record_dt = std::min(record_dt, elems[idx].waveform->sample_dt());
        }
        if (!std::isfinite(record_dt)) record_dt = dt;
    }
    const double hold_record_dt = opt.hold_record_dt > 0.0 ? opt.hold_record_dt : record_dt;
    if (!std::isfinite(dt) || !std::isfinite(hold_dt)) throw NumericInputError("time steps must be finite");

    std::vector<double> breaks{0.0, duration};
    for (std::size_t idx : sources) {
        const Element& e = elems[idx];
        if (!e.waveform) continue;
        if (e.waveform->total_duration() < duration * (1.0 - 1e-12)) {
            throw ConfigError("waveform of source '" + e.name + "' is shorter than the simulated duration");
        }
        for (double s : e.waveform->starts()) {
            if (s > 0.0 && s < duration) breaks.push_back(s);
        }
    }
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end(),
                             [&](double x, double y) { return std::abs(x - y) <= 1e-15 * std::max(1.0, duration); }),
                 breaks.end());

    TransientResult res;
    TransientTrace& tr = res.trace;
    for (NodeId n = 1; n < net.node_count(); ++n) tr.node_names.push_back(net.node_name(n));
    for (std::size_t idx : mems) tr.device_names.push_back(elems[idx].name);

    if (duration == 0.0) {
        res.final_states = std::move(devices);
        return res;
    }

    std::vector<double> device_r(devices.size(), 1.0);
    std::vector<double> source_v(sources.size(), 0.0);
    std::vector<double> dev_v(mems.size(), 0.0);
    DcSolution sol;

    auto refresh_resistances = [&] {
        for (std::size_t idx : mems) {
            const std::size_t d = elems[idx].device;
            device_r[d] = resistance(devices[d].w, params[d]);
        }
    };
    auto solve_at = [&](double t, bool with_currents) {
        for (std::size_t k = 0; k < sources.size(); ++k) source_v[k] = elems[sources[k]].source_value(t);
        refresh_resistances();
        solver.solve(device_r, source_v, sol, with_currents);
    };
    auto record = [&](double t) {
        solve_at(t, true);
        if (opt.check_kcl) {
            const double ratio = kcl_residual(net, device_r, sol).ratio();
            tr.max_kcl_ratio = std::max(tr.max_kcl_ratio, ratio);
            if (ratio > opt.kcl_tolerance) {
                std::ostringstream os;
                os << "current balance violated at t=" << t << " (relative residual " << ratio << ")";
                throw ContractViolation(os.str());
            }
        }
        tr.t.push_back(t);
        tr.node_v.emplace_back(sol.node_voltages.begin() + 1, sol.node_voltages.end());
        std::vector<DeviceSample> row;
        row.reserve(mems.size());
        for (std::size_t idx : mems) {
            const Element& e = elems[idx];
            const std::size_t d = e.device;
            const double v = sol.node_voltages[e.n_plus] - sol.node_voltages[e.n_minus];
            row.push_back({v, current(v, devices[d].w, params[d], opt.i_limit), devices[d].w, devices[d].theta,
                           device_r[d]});
        }
        tr.devices.push_back(std::move(row));
    };

    auto interval_idle = [&](double a, double b) {
        const double mid = 0.5 * (a + b);
        for (std::size_t idx : sources) {
            const Element& e = elems[idx];
            if (!e.waveform) {
                if (e.constant != 0.0) return false;
                continue;
            }
            const auto& starts = e.waveform->starts();
            auto it = std::upper_bound(starts.begin(), starts.end(), mid);
            const std::size_t seg = static_cast<std::size_t>(it - starts.begin()) - 1;
            if (!e.waveform->segments()[seg].idle()) return false;
        }
        return true;
    };

    if (opt.record) record(0.0);
    double next_record = 0.0;
    for (std::size_t iv = 0; iv + 1 < breaks.size(); ++iv) {
        const double a = breaks[iv];
        const double b = breaks[iv + 1];
        const bool idle = interval_idle(a, b);
        const double h0 = idle ? hold_dt : dt;
        const double rec = idle ? hold_record_dt : record_dt;
        next_record = std::min(next_record, a + rec);
        const long n = std::max(1L, static_cast<long>(std::ceil((b - a) / h0 - 1e-9)));
        const double h = (b - a) / static_cast<double>(n);
        for (long k = 0; k < n; ++k) {
            const double t0 = a + static_cast<double>(k) * h;
            const double t1 = k + 1 == n ? b : a + static_cast<double>(k + 1) * h;
            if (idle) {
                std::fill(dev_v.begin(), dev_v.end(), 0.0);
            } else {
                solve_at(0.5 * (t0 + t1), false);
                for (std::size_t m = 0; m < mems.size(); ++m) {
                    const Element& e = elems[mems[m]];
                    dev_v[m] = sol.node_voltages[e.n_plus] - sol.node_voltages[e.n_minus];
                }
            }
            for (std::size_t m = 0; m < mems.size(); ++m) {
                const std::size_t d = elems[mems[m]].device;
                StepResult sr = step(devices[d], dev_v[m], t1 - t0, params[d], opt.integrator);
                devices[d] = sr.state;
                res.clamped = res.clamped || sr.report.clamped;
            }
            ++res.steps;
            if (opt.record && (t1 >= next_record - 1e-9 * h || k + 1 == n)) {
                record(t1);
                next_record = t1 + rec;
            }
        }
    }
    res.final_states = std::move(devices);
    return res;
}

TransientResult run_device(const Waveform& wf, const DeviceState& initial, const DeviceParams& params,
                           const TransientOptions& opt) {
    Netlist net;
    const NodeId p = net.add_node("p");
    net.add_vsource("src", p, kGround, wf);
    net.add_memristor("m0", p, kGround, 0, initial.polarity);
    return run_transient(net, {initial}, {params}, wf.total_duration(), opt);
}

void write_trace_csv(std::ostream& os, const TransientTrace& trace) {
    os << "t";
    for (const auto& n : trace.node_names) os << ",node:" << n;
    for (const auto& d : trace.device_names) {
        os << ",dev:" << d << ":v,dev:" << d << ":i,dev:" << d << ":w,dev:" << d << ":theta,dev:" << d << ":R";
    }
    os << '\n';
    const auto old_prec = os.precision(12);
    for (std::size_t k = 0; k < trace.size(); ++k) {
        os << trace.t[k];
        for (double v : trace.node_v[k]) os << ',' << v;
        for (const DeviceSample& s : trace.devices[k]) {
            os << ',' << s.v << ',' << s.i << ',' << s.w << ',' << s.theta << ',' << s.r;
        }
        os << '\n';
    }
    os.precision(old_prec);
}

}  // namespace rram
