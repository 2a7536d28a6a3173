// SPDX-License-Identifier: MIT
// Copyright (c) 2026 qtopo contributors

#include "qtopo/circuit.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <random>
#include <sstream>

namespace qtopo {

std::string_view gate_name(GateKind kind) {
    switch (kind) {
        case GateKind::H: return "h";
        case GateKind::X: return "x";
        case GateKind::S: return "s";
        case GateKind::T: return "t";
        case GateKind::RZ: return "rz";
        case GateKind::CX: return "cx";
        case GateKind::SWAP: return "swap";
        case GateKind::MEASURE: return "measure";
        case GateKind::BARRIER: return "barrier";
    }
    return "?";
}

GateOp GateOp::single(GateKind kind, Qubit q, std::vector<double> params) {
    if (is_two_qubit(kind)) {
        throw std::invalid_argument("gate " + std::string(gate_name(kind)) + " takes two qubits");
    }
    return GateOp{kind, q, 0, std::move(params)};
}

GateOp GateOp::pair(GateKind kind, Qubit a, Qubit b) {
    if (!is_two_qubit(kind)) {
        throw std::invalid_argument("gate " + std::string(gate_name(kind)) + " takes one qubit");
    }
    if (a == b) {
        throw std::invalid_argument("two-qubit gate on identical qubits");
    }
    return GateOp{kind, a, b, {}};
}

Circuit::Circuit(std::size_t num_qubits, std::string name)
    : num_qubits_(num_qubits), name_(std::move(name)) {}

void Circuit::append(GateOp op) {
    if (op.q0 >= num_qubits_ || (op.arity() == 2 && op.q1 >= num_qubits_)) {
        throw std::invalid_argument("qubit index out of range");
    }
    if (op.arity() == 2 && op.q0 == op.q1) {
        throw std::invalid_argument("two-qubit gate on identical qubits");
    }
    if (op.arity() == 1) {
        op.q1 = 0;
    }
    gates_.push_back(std::move(op));
}

std::size_t Circuit::counted_gates() const {
    return static_cast<std::size_t>(
        std::count_if(gates_.begin(), gates_.end(), [](const GateOp& g) { return is_counted(g.kind); }));
}

std::size_t Circuit::two_qubit_gates() const {
    return static_cast<std::size_t>(
        std::count_if(gates_.begin(), gates_.end(), [](const GateOp& g) { return is_two_qubit(g.kind); }));
}

CircuitDag build_dag(const Circuit& c) {
    CircuitDag dag;
    constexpr std::size_t none = static_cast<std::size_t>(-1);
    std::vector<std::size_t> last(c.num_qubits(), none);

    const auto& gates = c.gates();
    for (std::size_t i = 0; i < gates.size(); ++i) {
        const GateOp& g = gates[i];
        if (!is_counted(g.kind)) continue;
        const std::size_t node = dag.gate_index.size();
        dag.gate_index.push_back(i);
        dag.preds.emplace_back();
        std::size_t layer = 0;
        const Qubit qs[2] = {g.q0, g.q1};
        for (std::size_t k = 0; k < g.arity(); ++k) {
            const std::size_t p = last[qs[k]];
            if (p == none) continue;
            auto& pr = dag.preds[node];
            if (std::find(pr.begin(), pr.end(), p) == pr.end()) {
                pr.push_back(p);
                dag.edges.emplace_back(p, node);
            }
            layer = std::max(layer, dag.layer[p] + 1);
        }
        dag.layer.push_back(layer);
        for (std::size_t k = 0; k < g.arity(); ++k) last[qs[k]] = node;
    }
    return dag;
}

std::size_t logical_depth(const Circuit& c) {
    const CircuitDag dag = build_dag(c);
    if (dag.size() == 0) return 0;
    return *std::max_element(dag.layer.begin(), dag.layer.end()) + 1;
}

Circuit generate_random_circuit(std::size_t num_qubits, double gate_factor, std::uint64_t seed) {
    if (num_qubits < 2) throw std::invalid_argument("random circuit needs at least 2 qubits");
    if (!(gate_factor > 0.0)) throw std::invalid_argument("gate factor must be positive");

    const auto count = static_cast<std::size_t>(std::llround(static_cast<double>(num_qubits) * gate_factor));
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<Qubit> pick(0, static_cast<Qubit>(num_qubits - 1));
    std::uniform_int_distribution<Qubit> pick_other(0, static_cast<Qubit>(num_qubits - 2));
    std::uniform_int_distribution<int> kind_pick(0, 2);
    std::bernoulli_distribution two_qubit(0.5);

    std::ostringstream name;
    name << "random_q" << num_qubits << "_f" << gate_factor << "_s" << seed;
    Circuit c(num_qubits, name.str());
    static constexpr GateKind single_kinds[] = {GateKind::H, GateKind::X, GateKind::T};
    for (std::size_t i = 0; i < count; ++i) {
        if (two_qubit(rng)) {
            const Qubit a = pick(rng);
            Qubit b = pick_other(rng);
            if (b >= a) ++b;
            c.append(GateOp::pair(GateKind::CX, a, b));
        } else {
            c.append(GateOp::single(single_kinds[kind_pick(rng)], pick(rng)));
        }
    }
    return c;
}

double idle_ratio(std::size_t gates, std::size_t qubits, std::size_t depth) {
    if (qubits == 0 || depth == 0) {
        throw std::domain_error("idle ratio undefined for zero qubits or zero depth");
    }
    const double slots = static_cast<double>(qubits) * static_cast<double>(depth);
    if (gates == 0 || static_cast<double>(gates) > slots) {
        throw std::domain_error("idle ratio needs 1 <= gates <= qubits * depth");
    }
    return 1.0 - static_cast<double>(gates) / slots;
}

namespace {

void check_distribution(std::span<const double> p, const char* label) {
    double sum = 0.0;
    for (double v : p) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw std::invalid_argument(std::string(label) + ": negative or non-finite probability");
        }
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw std::invalid_argument(std::string(label) + ": probabilities do not sum to 1");
    }
}

}  // namespace

double distribution_fidelity(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) throw std::invalid_argument("distribution length mismatch");
    check_distribution(p, "P");
    check_distribution(q, "Q");
    double overlap = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) overlap += std::sqrt(p[i] * q[i]);
    return std::min(1.0, overlap * overlap);
}

std::vector<double> parse_probability_csv(std::string_view text) {
    std::vector<double> out;
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        const auto first = line.find_first_not_of(" \t\r,");
        if (first == std::string_view::npos) continue;
        const auto last = line.find_last_not_of(" \t\r,");
        line = line.substr(first, last - first + 1);
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), v);
        if (ec != std::errc{} || ptr != line.data() + line.size()) {
            throw std::invalid_argument("probability file line " + std::to_string(line_no) +
                                        ": not a number");
        }
        out.push_back(v);
    }
    return out;
}

}  // namespace qtopo
