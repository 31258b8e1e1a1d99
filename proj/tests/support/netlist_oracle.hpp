#pragma once

// Independent dense MNA solve and random circuit generator shared by the
// network unit tests and the acceptance run.

#include <Eigen/Dense>

#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "rram/netlist.hpp"

namespace rram::testing {

struct Oracle {
    Eigen::VectorXd v;  // node voltages, ground included
    Eigen::VectorXd j;  // source currents leaving the + terminal
};

// Plain modified nodal analysis over every non-ground node and every source.
inline Oracle mna_oracle(const Netlist& net, const std::vector<double>& device_r, const std::vector<double>& source_v) {
    const auto n = static_cast<Eigen::Index>(net.node_count() - 1);
    const auto m = static_cast<Eigen::Index>(net.vsources().size());
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n + m, n + m);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n + m);
    auto row = [](NodeId id) { return static_cast<Eigen::Index>(id) - 1; };
    auto stamp = [&](NodeId p, NodeId q, double g) {
        if (p != kGround) a(row(p), row(p)) += g;
        if (q != kGround) a(row(q), row(q)) += g;
        if (p != kGround && q != kGround) {
            a(row(p), row(q)) -= g;
            a(row(q), row(p)) -= g;
        }
    };
    Eigen::Index k = 0;
    for (const Element& e : net.elements()) {
        switch (e.kind) {
        case ElementKind::resistor: stamp(e.n_plus, e.n_minus, 1.0 / e.ohms); break;
        case ElementKind::memristor: stamp(e.n_plus, e.n_minus, 1.0 / device_r[e.device]); break;
        case ElementKind::vsource: {
            const Eigen::Index c = n + k;
            if (e.n_plus != kGround) {
                a(row(e.n_plus), c) -= 1.0;
                a(c, row(e.n_plus)) += 1.0;
            }
            if (e.n_minus != kGround) {
                a(row(e.n_minus), c) += 1.0;
                a(c, row(e.n_minus)) -= 1.0;
            }
            b(c) = source_v[static_cast<std::size_t>(k)];
            ++k;
            break;
        }
        }
    }
    const Eigen::VectorXd x = a.fullPivLu().solve(b);
    Oracle o;
    o.v = Eigen::VectorXd::Zero(n + 1);
    o.v.tail(n) = x.head(n);
    o.j = x.tail(m);
    return o;
}

struct RandomCase {
    Netlist net;
    std::vector<double> device_r;
    std::vector<double> source_v;
};

// Random connected circuit with a spanning tree of mixed elements, extra
// passive branches, and sources that never form loops among themselves.
inline RandomCase random_case(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> nodes_dist(1, 6);
    std::uniform_real_distribution<double> log_r(2.0, 6.0);
    std::uniform_real_distribution<double> volts(-1.5, 1.5);
    std::uniform_real_distribution<double> coin(0.0, 1.0);

    RandomCase c;
    const int n = nodes_dist(rng);
    for (int k = 1; k <= n; ++k) c.net.add_node("n" + std::to_string(k));

    std::vector<std::size_t> parent(static_cast<std::size_t>(n) + 1);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };

    std::size_t devices = 0;
    std::size_t sources = 0;
    auto add_passive = [&](NodeId a, NodeId b) {
        if (coin(rng) < 0.5) {
            c.net.add_resistor("r" + std::to_string(c.net.elements().size()), a, b, std::pow(10.0, log_r(rng)));
        } else {
            c.net.add_memristor("m" + std::to_string(devices), a, b, devices, coin(rng) < 0.5 ? 1 : -1);
            c.device_r.push_back(std::pow(10.0, log_r(rng)));
            ++devices;
        }
    };
    for (int k = 1; k <= n; ++k) {
        const auto other = static_cast<NodeId>(std::uniform_int_distribution<int>(0, k - 1)(rng));
        const auto self = static_cast<NodeId>(k);
        if (coin(rng) < 0.4 && find(self) != find(other)) {
            c.net.add_vsource("v" + std::to_string(sources++), self, other, volts(rng));
            parent[find(self)] = find(other);
        } else {
            add_passive(self, other);
        }
    }
    const int extra = std::uniform_int_distribution<int>(0, n + 1)(rng);
    for (int e = 0; e < extra; ++e) {
        const auto a = static_cast<NodeId>(std::uniform_int_distribution<int>(0, n)(rng));
        const auto b = static_cast<NodeId>(std::uniform_int_distribution<int>(0, n)(rng));
        if (a == b) continue;
        if (coin(rng) < 0.2 && find(a) != find(b)) {
            c.net.add_vsource("v" + std::to_string(sources++), a, b, volts(rng));
            parent[find(a)] = find(b);
        } else {
            add_passive(a, b);
        }
    }
    for (std::size_t k : c.net.vsources()) c.source_v.push_back(c.net.elements()[k].constant);
    return c;
}

}  // namespace rram::testing
