#pragma once

#include <algorithm>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rram/device.hpp"
#include "rram/linear_solver.hpp"
#include "rram/netlist.hpp"

namespace rram {

struct DcSolution {
    /// One entry per node; ground is entry 0 and always 0 V.
    std::vector<double> node_voltages;
    /// One entry per voltage source (netlist order): current leaving the
    /// source's + terminal into the rest of the circuit.
    std::vector<double> source_currents;
};

/// Nodal solver bound to one netlist. Nodes whose voltage is fixed by a
/// chain of sources to ground are eliminated; the remaining nodes and any
/// floating sources form a modified nodal system.
class DcSolver {
public:
    /// Validates the netlist; throws TopologyError.
    explicit DcSolver(const Netlist& net);

    /// `device_r[d]` is the resistance of device d, `source_v[k]` the value
    /// of the k-th voltage source. Source currents are only filled in when
    /// `with_currents` is set. Throws TopologyError when the system is singular.
    void solve(std::span<const double> device_r, std::span<const double> source_v, DcSolution& out,
               bool with_currents = true);

    [[nodiscard]] const Netlist& netlist() const { return *net_; }

private:
    struct Forced {
        std::size_t source;  // index into vsources
        NodeId node;         // node whose voltage the source fixes
        NodeId from;         // already known terminal
        double sign;         // v(node) = v(from) + sign * value
    };

    const Netlist* net_;
    std::vector<Forced> forced_;                 // in propagation order
    std::vector<long> unknown_index_;            // node -> row, or -1 when known
    std::vector<std::size_t> floating_sources_;  // indices into vsources
    std::size_t n_unknown_ = 0;
    std::size_t device_count_ = 0;
    DenseMatrix a_;
    std::vector<double> b_;
};

/// One-shot convenience wrapper around DcSolver.
[[nodiscard]] DcSolution solve_dc(const Netlist& net, std::span<const double> device_r,
                                  std::span<const double> source_v);

struct KclReport {
    double max_residual = 0.0;        // A, largest node current imbalance
    double max_branch_current = 0.0;  // A
    /// Largest conductance times largest node voltage: bounds the terms that
    /// cancel at a node, and hence their round-off.
    double current_scale = 0.0;
    /// Residual relative to the largest branch current, or to current_scale
    /// when that is larger (a circuit at rest is judged on round-off).
    [[nodiscard]] double ratio() const {
        const double d = std::max(max_branch_current, current_scale);
        return d > 0.0 ? max_residual / d : max_residual;
    }
};

/// Current balance at every non-ground node for a given solution.
[[nodiscard]] KclReport kcl_residual(const Netlist& net, std::span<const double> device_r, const DcSolution& sol);

struct TransientOptions {
    /// Step while any source is non-zero. 0 selects min(100 ns, shortest pulse / 50).
    double dt = 0.0;
    /// Step while every source is 0 V. 0 selects dt.
    double hold_dt = 0.0;
    /// Spacing of recorded samples. 0 selects the smallest waveform sample_dt
    /// (dt when no source carries a waveform).
    double record_dt = 0.0;
    /// Sample spacing while every source is 0 V. 0 selects record_dt.
    double hold_record_dt = 0.0;
    bool record = true;
    /// Checks the current balance at every recorded sample and throws
    /// ContractViolation when it exceeds kcl_tolerance.
    bool check_kcl = false;
    double kcl_tolerance = 1e-9;
    /// Compliance limit applied to reported device currents only.
    std::optional<double> i_limit;
    IntegratorConfig integrator{};
};

struct DeviceSample {
    double v = 0.0;
    double i = 0.0;
    double w = 0.0;
    double theta = 0.0;
    double r = 0.0;
};

struct TransientTrace {
    std::vector<std::string> node_names;    // non-ground nodes
    std::vector<std::string> device_names;  // memristor element names, netlist order
    std::vector<double> t;
    std::vector<std::vector<double>> node_v;          // [sample][node]
    std::vector<std::vector<DeviceSample>> devices;   // [sample][memristor]
    double max_kcl_ratio = 0.0;

    [[nodiscard]] std::size_t size() const { return t.size(); }
    [[nodiscard]] bool empty() const { return t.empty(); }
};

struct TransientResult {
    TransientTrace trace;
    std::vector<DeviceState> final_states;
    long steps = 0;
    bool clamped = false;
};

/// Step size used when TransientOptions::dt is 0.
[[nodiscard]] double default_dt(const Netlist& net);

/// Simulates the network for `duration` seconds.
///
/// Each step evaluates every source at the step midpoint, solves the
/// network with the resistances frozen at the start of the step, then
/// advances every device with its own terminal voltage. Steps never straddle
/// a waveform segment boundary, and a sample is always recorded at every
/// segment boundary. Device polarities are taken from the netlist. A zero
/// duration returns an empty trace and the initial states.
[[nodiscard]] TransientResult run_transient(const Netlist& net, std::vector<DeviceState> devices,
                                            const std::vector<DeviceParams>& params, double duration,
                                            const TransientOptions& opt = {});

/// A single memristor driven directly by `wf`.
[[nodiscard]] TransientResult run_device(const Waveform& wf, const DeviceState& initial, const DeviceParams& params,
                                         const TransientOptions& opt = {});

/// Writes `t,node:<name>...,dev:<id>:v,dev:<id>:i,dev:<id>:w,dev:<id>:theta,dev:<id>:R`.
void write_trace_csv(std::ostream& os, const TransientTrace& trace);

}  // namespace rram
