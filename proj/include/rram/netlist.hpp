#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "rram/waveform.hpp"

namespace rram {

using NodeId = std::size_t;

/// Ground is always node 0 and answers to the names "gnd" and "0".
inline constexpr NodeId kGround = 0;

enum class ElementKind { resistor, memristor, vsource };

[[nodiscard]] std::string_view to_string(ElementKind k);

struct Element {
    std::string name;
    ElementKind kind = ElementKind::resistor;
    NodeId n_plus = kGround;
    NodeId n_minus = kGround;
    double ohms = 0.0;                          // resistor
    std::size_t device = 0;                     // memristor: index into the device list
    int polarity = +1;                          // memristor: orientation of v(n+) - v(n-)
    double constant = 0.0;                      // vsource without waveform
    std::shared_ptr<const Waveform> waveform;   // vsource, optional

    /// Source voltage v(n+) - v(n-) at time t.
    [[nodiscard]] double source_value(double t) const {
        return waveform ? waveform->voltage_at(t) : constant;
    }
};

/// Small resistive network of resistors, memristors and ideal voltage sources.
class Netlist {
public:
    Netlist();

    NodeId add_node(std::string name);
    /// Node id by name; throws TopologyError for unknown names.
    [[nodiscard]] NodeId node(std::string_view name) const;
    /// Node id by name, creating the node when it does not exist yet.
    NodeId node_or_add(std::string_view name);
    [[nodiscard]] const std::string& node_name(NodeId id) const { return nodes_.at(id); }
    [[nodiscard]] std::size_t node_count() const { return nodes_.size(); }

    std::size_t add_resistor(std::string name, NodeId a, NodeId b, double ohms);
    std::size_t add_memristor(std::string name, NodeId a, NodeId b, std::size_t device, int polarity = +1);
    std::size_t add_vsource(std::string name, NodeId a, NodeId b, double volts);
    std::size_t add_vsource(std::string name, NodeId a, NodeId b, Waveform waveform);

    [[nodiscard]] const std::vector<Element>& elements() const { return elements_; }
    /// Indices into elements() of the memristors, in insertion order.
    [[nodiscard]] const std::vector<std::size_t>& memristors() const { return memristors_; }
    /// Indices into elements() of the voltage sources, in insertion order.
    [[nodiscard]] const std::vector<std::size_t>& vsources() const { return vsources_; }
    /// One more than the largest device index referenced.
    [[nodiscard]] std::size_t device_count() const;

    /// Throws TopologyError unless every node is connected to ground, no
    /// loop consists of voltage sources only, no element is shorted onto a
    /// single node, and each device is referenced by exactly one memristor.
    void validate() const;

private:
    std::size_t add(Element e);

    std::vector<std::string> nodes_;
    std::vector<Element> elements_;
    std::vector<std::size_t> memristors_;
    std::vector<std::size_t> vsources_;
};

}  // namespace rram
