#include "rram/netlist.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rram/errors.hpp"

namespace rram {

namespace {

class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }
    /// Returns false when a and b were already joined.
    bool unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent_[std::max(a, b)] = std::min(a, b);
        return true;
    }

private:
    std::vector<std::size_t> parent_;
};

}  // namespace

std::string_view to_string(ElementKind k) {
    switch (k) {
    case ElementKind::resistor: return "resistor";
    case ElementKind::memristor: return "memristor";
    case ElementKind::vsource: return "vsource";
    }
    return "resistor";
}

Netlist::Netlist() { nodes_.emplace_back("gnd"); }

NodeId Netlist::add_node(std::string name) {
    if (name.empty()) throw TopologyError("node names must not be empty");
    if (name == "0" || std::find(nodes_.begin(), nodes_.end(), name) != nodes_.end()) {
        throw TopologyError("duplicate node '" + name + "'");
    }
    nodes_.push_back(std::move(name));
    return nodes_.size() - 1;
}

NodeId Netlist::node(std::string_view name) const {
    if (name == "0") return kGround;
    auto it = std::find(nodes_.begin(), nodes_.end(), name);
    if (it == nodes_.end()) throw TopologyError("unknown node '" + std::string(name) + "'");
    return static_cast<NodeId>(it - nodes_.begin());
}

NodeId Netlist::node_or_add(std::string_view name) {
    if (name == "0") return kGround;
    auto it = std::find(nodes_.begin(), nodes_.end(), name);
    if (it != nodes_.end()) return static_cast<NodeId>(it - nodes_.begin());
    return add_node(std::string(name));
}

std::size_t Netlist::add(Element e) {
    if (e.n_plus >= nodes_.size() || e.n_minus >= nodes_.size()) {
        throw TopologyError("element '" + e.name + "' references an undeclared node");
    }
    for (const Element& other : elements_) {
        if (other.name == e.name) throw TopologyError("duplicate element '" + e.name + "'");
    }
    elements_.push_back(std::move(e));
    return elements_.size() - 1;
}

std::size_t Netlist::add_resistor(std::string name, NodeId a, NodeId b, double ohms) {
    if (!(ohms > 0.0) || !std::isfinite(ohms)) throw ConfigError("resistor '" + name + "' needs 0 < R < inf");
    Element e;
    e.name = std::move(name);
    e.kind = ElementKind::resistor;
    e.n_plus = a;
    e.n_minus = b;
    e.ohms = ohms;
    return add(std::move(e));
}

std::size_t Netlist::add_memristor(std::string name, NodeId a, NodeId b, std::size_t device, int polarity) {
    if (polarity != 1 && polarity != -1) throw ConfigError("memristor '" + name + "' polarity must be +1 or -1");
    Element e;
    e.name = std::move(name);
    e.kind = ElementKind::memristor;
    e.n_plus = a;
    e.n_minus = b;
    e.device = device;
    e.polarity = polarity;
    const std::size_t idx = add(std::move(e));
    memristors_.push_back(idx);
    return idx;
}

std::size_t Netlist::add_vsource(std::string name, NodeId a, NodeId b, double volts) {
    if (!std::isfinite(volts)) throw ConfigError("source '" + name + "' voltage must be finite");
    Element e;
    e.name = std::move(name);
    e.kind = ElementKind::vsource;
    e.n_plus = a;
    e.n_minus = b;
    e.constant = volts;
    const std::size_t idx = add(std::move(e));
    vsources_.push_back(idx);
    return idx;
}

std::size_t Netlist::add_vsource(std::string name, NodeId a, NodeId b, Waveform waveform) {
    const std::size_t idx = add_vsource(std::move(name), a, b, 0.0);
    elements_[idx].waveform = std::make_shared<const Waveform>(std::move(waveform));
    return idx;
}

std::size_t Netlist::device_count() const {
    std::size_t n = 0;
    for (std::size_t idx : memristors_) n = std::max(n, elements_[idx].device + 1);
    return n;
}

void Netlist::validate() const {
    DisjointSets all(nodes_.size());
    DisjointSets sources(nodes_.size());
    std::vector<int> device_uses(device_count(), 0);
    for (const Element& e : elements_) {
        if (e.n_plus == e.n_minus) {
            throw TopologyError("element '" + e.name + "' has both terminals on node '" + nodes_[e.n_plus] + "'");
        }
        all.unite(e.n_plus, e.n_minus);
        if (e.kind == ElementKind::vsource && !sources.unite(e.n_plus, e.n_minus)) {
            throw TopologyError("voltage source '" + e.name + "' closes a loop of voltage sources");
        }
        if (e.kind == ElementKind::memristor) ++device_uses[e.device];
    }
    for (NodeId n = 1; n < nodes_.size(); ++n) {
        if (all.find(n) != all.find(kGround)) {
            throw TopologyError("node '" + nodes_[n] + "' is not connected to ground");
        }
    }
    for (std::size_t d = 0; d < device_uses.size(); ++d) {
        if (device_uses[d] != 1) {
            throw TopologyError("device " + std::to_string(d) + " must be used by exactly one memristor");
        }
    }
}

}  // namespace rram
