// SPDX-License-Identifier: MIT
// Copyright (c) 2026 qtopo contributors

/**
 * @file circuit.hpp
 * @brief Logical circuit IR: gate alphabet, circuit container and the
 * dependency DAG used for depth computation.
 *
 * Depth convention: every gate except BARRIER and MEASURE occupies one
 * layer. Barriers and measurements are kept in the gate list (so they
 * survive a parse/emit round trip) but are invisible to depth, the DAG and
 * routing cost.
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qtopo {

using Qubit = std::uint32_t;

enum class GateKind : std::uint8_t { H, X, S, T, RZ, CX, SWAP, MEASURE, BARRIER };

std::string_view gate_name(GateKind kind);

constexpr bool is_two_qubit(GateKind kind) {
    return kind == GateKind::CX || kind == GateKind::SWAP;
}

/// Gates that occupy a layer in depth and DAG computations.
constexpr bool is_counted(GateKind kind) {
    return kind != GateKind::BARRIER && kind != GateKind::MEASURE;
}

struct GateOp {
    GateKind kind = GateKind::H;
    Qubit q0 = 0;
    Qubit q1 = 0;  // only meaningful for two-qubit kinds
    /// RZ: angle in radians. MEASURE: classical bit index.
    std::vector<double> params;

    std::size_t arity() const { return is_two_qubit(kind) ? 2 : 1; }
    bool acts_on(Qubit q) const { return q0 == q || (arity() == 2 && q1 == q); }

    static GateOp single(GateKind kind, Qubit q, std::vector<double> params = {});
    static GateOp pair(GateKind kind, Qubit a, Qubit b);

    friend bool operator==(const GateOp&, const GateOp&) = default;
};

class Circuit {
public:
    Circuit() = default;
    explicit Circuit(std::size_t num_qubits, std::string name = {});

    std::size_t num_qubits() const { return num_qubits_; }
    std::size_t num_clbits() const { return num_clbits_; }
    void set_num_clbits(std::size_t n) { num_clbits_ = n; }
    const std::string& name() const { return name_; }
    void set_name(std::string name) { name_ = std::move(name); }

    const std::vector<GateOp>& gates() const { return gates_; }
    std::size_t size() const { return gates_.size(); }
    bool empty() const { return gates_.empty(); }

    /// Appends after checking qubit range and distinct operands.
    /// @throws std::invalid_argument on a violated invariant.
    void append(GateOp op);

    std::size_t counted_gates() const;
    std::size_t two_qubit_gates() const;

    /// Equality ignores the name label.
    friend bool operator==(const Circuit& a, const Circuit& b) {
        return a.num_qubits_ == b.num_qubits_ && a.num_clbits_ == b.num_clbits_ &&
               a.gates_ == b.gates_;
    }

private:
    std::size_t num_qubits_ = 0;
    std::size_t num_clbits_ = 0;
    std::string name_;
    std::vector<GateOp> gates_;
};

/// Dependency DAG over the counted gates of a circuit.
struct CircuitDag {
    /// Index into Circuit::gates() for each node.
    std::vector<std::size_t> gate_index;
    /// Immediate dependency edges (u, v) by node id, u earlier than v.
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    /// Predecessors of each node (at most two).
    std::vector<std::vector<std::size_t>> preds;
    /// ASAP layer, sources at 0.
    std::vector<std::size_t> layer;

    std::size_t size() const { return gate_index.size(); }
};

CircuitDag build_dag(const Circuit& c);

/// Longest dependency chain, counting each counted gate as one layer.
std::size_t logical_depth(const Circuit& c);

/// Random circuit with round(num_qubits * gate_factor) gates: half CX on a
/// uniformly drawn distinct pair, half single-qubit H/X/T on a uniform qubit.
Circuit generate_random_circuit(std::size_t num_qubits, double gate_factor, std::uint64_t seed);

/// Fraction of qubit-timeslots carrying no gate: 1 - gates / (qubits * depth).
/// @throws std::domain_error for zero qubits/depth or gates outside [1, qubits*depth].
double idle_ratio(std::size_t gates, std::size_t qubits, std::size_t depth);

/// Classical fidelity (sum_i sqrt(P_i Q_i))^2 between two outcome distributions.
/// @throws std::invalid_argument on length mismatch, negative entries or
/// sums that differ from 1 by more than 1e-9.
double distribution_fidelity(std::span<const double> p, std::span<const double> q);

/// Reads one probability per line; blank lines and '#' comments are skipped.
std::vector<double> parse_probability_csv(std::string_view text);

}  // namespace qtopo
