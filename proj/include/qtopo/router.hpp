// SPDX-License-Identifier: MIT
// Copyright (c) 2026 qtopo contributors

/**
 * @file router.hpp
 * @brief SWAP-insertion router used as the depth oracle for a topology.
 *
 * Logical qubit k starts on physical qubit k. The router walks the
 * dependency order, executes every gate whose operands are adjacent and,
 * when the front layer is blocked, inserts the SWAP minimising a distance
 * cost over the front layer plus a look-ahead window. Ties are broken by a
 * seeded PRNG, so depth is a deterministic function of (circuit, topology,
 * options, seed).
 */

#pragma once

#include "qtopo/circuit.hpp"
#include "qtopo/topology.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qtopo {

/// Thrown when a required interaction spans two disconnected components.
class UnroutableError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Logical to physical assignment; injective, with physical slots that may
/// hold no logical qubit.
class QubitMap {
public:
    static constexpr std::int32_t empty = -1;

    QubitMap() = default;
    QubitMap(std::size_t logical, std::size_t physical);

    /// Logical k on physical k. @throws std::invalid_argument if logical > physical.
    static QubitMap sequential(std::size_t logical, std::size_t physical);

    std::size_t logical_size() const { return l2p_.size(); }
    std::size_t physical_size() const { return p2l_.size(); }

    std::size_t physical(std::size_t logical) const { return static_cast<std::size_t>(l2p_.at(logical)); }
    /// Logical qubit on a physical slot, or `empty`.
    std::int32_t logical(std::size_t physical) const { return p2l_.at(physical); }

    /// Exchanges whatever sits on physical qubits a and b.
    void swap_physical(std::size_t a, std::size_t b);

    friend bool operator==(const QubitMap&, const QubitMap&) = default;

private:
    std::vector<std::int32_t> l2p_;
    std::vector<std::int32_t> p2l_;
};

QubitMap initial_layout(const Circuit& c, const TopologyGraph& g);

struct RouterOptions {
    /// Count an inserted SWAP as one gate/layer instead of three CX.
    bool swap_as_one = false;
    double extended_weight = 0.5;
    std::size_t extended_size = 20;
    double decay_delta = 0.001;
    std::size_t decay_reset = 5;
    /// Independent tie-break streams; the result with the fewest swaps wins,
    /// then the shallowest, then the earliest. Trial 0 uses the given seed.
    std::size_t trials = 1;
};

struct RoutedCircuit {
    /// Gates on physical qubits, in execution order.
    std::vector<GateOp> gates;
    /// inserted[i] marks gates[i] as a router SWAP rather than a source gate.
    std::vector<std::uint8_t> inserted;
    std::size_t num_physical = 0;
    std::size_t depth = 0;
    std::size_t total_gates = 0;
    std::size_t swap_count = 0;
    bool swap_as_one = false;
    std::uint64_t seed = 0;
    QubitMap initial_map;
    QubitMap final_map;
    TopologyGraph topology;

    friend bool operator==(const RoutedCircuit&, const RoutedCircuit&) = default;
};

/// Cost of a candidate mapping: sum of front-layer distances plus
/// extended_weight times the mean extended-window distance, scaled by the
/// larger decay of the swap endpoints (1 when no swap is given).
double heuristic_cost(std::span<const GateOp> front, std::span<const GateOp> extended, const QubitMap& map,
                      const DistanceMatrix& dist, double extended_weight, std::span<const double> decay,
                      std::optional<std::pair<std::size_t, std::size_t>> swap = std::nullopt);

/// True iff every interacting logical pair starts in one connected component.
bool is_routable(const Circuit& c, const TopologyGraph& g);

/// @throws UnroutableError, std::invalid_argument (too few physical qubits).
RoutedCircuit route(const Circuit& c, const TopologyGraph& g, const RouterOptions& opts = {},
                    std::uint64_t seed = 0);

/// ASAP depth of a physical gate list; inserted SWAPs weigh 3 unless swap_as_one.
std::size_t routed_depth(std::span<const GateOp> gates, std::span<const std::uint8_t> inserted,
                         std::size_t num_physical, bool swap_as_one);

/// Replays rc against c: every two-qubit gate sits on a topology edge, the
/// source gates appear in a dependency-respecting order on the right logical
/// qubits, and the SWAP sequence reproduces rc.final_map.
bool verify_routing(const Circuit& c, const RoutedCircuit& rc);

/// Physical circuit as a Circuit (inserted SWAPs decomposed to three CX
/// unless swap_as_one), for QASM export.
Circuit to_physical_circuit(const RoutedCircuit& rc);

/// Depth/gate averages over several router seeds.
struct RouteSummary {
    double depth = 0.0;
    double total_gates = 0.0;
    double swap_count = 0.0;
};

RouteSummary route_mean(const Circuit& c, const TopologyGraph& g, const RouterOptions& opts,
                        std::span<const std::uint64_t> seeds);

}  // namespace qtopo
