// SPDX-License-Identifier: MIT
// Copyright (c) 2026 qtopo contributors

#include "qtopo/router.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <random>

namespace qtopo {

QubitMap::QubitMap(std::size_t logical, std::size_t physical)
    : l2p_(logical, empty), p2l_(physical, empty) {}

QubitMap QubitMap::sequential(std::size_t logical, std::size_t physical) {
    if (logical > physical) {
        throw std::invalid_argument("circuit needs " + std::to_string(logical) + " qubits but topology has " +
                                    std::to_string(physical));
    }
    QubitMap m(logical, physical);
    for (std::size_t k = 0; k < logical; ++k) {
        m.l2p_[k] = static_cast<std::int32_t>(k);
        m.p2l_[k] = static_cast<std::int32_t>(k);
    }
    return m;
}

void QubitMap::swap_physical(std::size_t a, std::size_t b) {
    const std::int32_t la = p2l_.at(a);
    const std::int32_t lb = p2l_.at(b);
    p2l_[a] = lb;
    p2l_[b] = la;
    if (la != empty) l2p_[static_cast<std::size_t>(la)] = static_cast<std::int32_t>(b);
    if (lb != empty) l2p_[static_cast<std::size_t>(lb)] = static_cast<std::int32_t>(a);
}

QubitMap initial_layout(const Circuit& c, const TopologyGraph& g) {
    return QubitMap::sequential(c.num_qubits(), g.size());
}

double heuristic_cost(std::span<const GateOp> front, std::span<const GateOp> extended, const QubitMap& map,
                      const DistanceMatrix& dist, double extended_weight, std::span<const double> decay,
                      std::optional<std::pair<std::size_t, std::size_t>> swap) {
    auto distance = [&](const GateOp& g) {
        return static_cast<double>(dist(map.physical(g.q0), map.physical(g.q1)));
    };
    double cost = 0.0;
    for (const GateOp& g : front) cost += distance(g);
    if (!extended.empty()) {
        double ext = 0.0;
        for (const GateOp& g : extended) ext += distance(g);
        cost += extended_weight * ext / static_cast<double>(extended.size());
    }
    if (swap && !decay.empty()) cost *= std::max(decay[swap->first], decay[swap->second]);
    return cost;
}

bool is_routable(const Circuit& c, const TopologyGraph& g) {
    if (c.num_qubits() > g.size()) return false;
    std::vector<std::size_t> comp(g.size(), g.size());
    std::vector<std::vector<std::size_t>> adj(g.size());
    for (const auto& [i, j] : g.edges()) {
        adj[i].push_back(j);
        adj[j].push_back(i);
    }
    for (std::size_t s = 0; s < g.size(); ++s) {
        if (comp[s] != g.size()) continue;
        std::vector<std::size_t> stack{s};
        comp[s] = s;
        while (!stack.empty()) {
            const std::size_t u = stack.back();
            stack.pop_back();
            for (std::size_t v : adj[u]) {
                if (comp[v] == g.size()) {
                    comp[v] = s;
                    stack.push_back(v);
                }
            }
        }
    }
    // Swaps move qubits along edges, so a logical qubit never leaves the
    // component of its initial (sequential) placement.
    return std::all_of(c.gates().begin(), c.gates().end(), [&](const GateOp& op) {
        return !is_two_qubit(op.kind) || comp[op.q0] == comp[op.q1];
    });
}

std::size_t routed_depth(std::span<const GateOp> gates, std::span<const std::uint8_t> inserted,
                         std::size_t num_physical, bool swap_as_one) {
    std::vector<std::size_t> t(num_physical, 0);
    std::size_t depth = 0;
    for (std::size_t i = 0; i < gates.size(); ++i) {
        const GateOp& g = gates[i];
        if (!is_counted(g.kind)) continue;
        const std::size_t weight = (i < inserted.size() && inserted[i] && !swap_as_one) ? 3 : 1;
        std::size_t start = t[g.q0];
        if (g.arity() == 2) start = std::max(start, t[g.q1]);
        const std::size_t end = start + weight;
        t[g.q0] = end;
        if (g.arity() == 2) t[g.q1] = end;
        depth = std::max(depth, end);
    }
    return depth;
}

namespace {

class SwapRouter {
public:
    SwapRouter(const Circuit& c, const TopologyGraph& g, const RouterOptions& opts, std::uint64_t seed)
        : circuit_(c),
          topo_(g),
          opts_(opts),
          rng_(seed),
          dist_(distance_matrix(g)),
          adj_(g.size()),
          map_(initial_layout(c, g)),
          decay_(g.size(), 1.0) {
        for (const auto& [i, j] : g.edges()) {
            adj_[i].push_back(j);
            adj_[j].push_back(i);
        }
        build_dependencies();
        out_.num_physical = g.size();
        out_.swap_as_one = opts.swap_as_one;
        out_.seed = seed;
        out_.initial_map = map_;
        out_.topology = g;
    }

    RoutedCircuit run() {
        for (std::size_t i = 0; i < pending_.size(); ++i) {
            if (pending_[i] == 0) work_.push_back(i);
        }
        drain();
        const std::size_t stall_limit = std::max<std::size_t>(10, 10 * topo_.size());
        std::size_t stalled = 0;
        while (executed_count_ < circuit_.size()) {
            if (stalled >= stall_limit) {
                force_front_gate();
                stalled = 0;
            } else {
                apply_swap(choose_swap());
                ++stalled;
            }
            if (recheck_front()) stalled = 0;
        }
        out_.final_map = map_;
        out_.depth = routed_depth(out_.gates, out_.inserted, out_.num_physical, opts_.swap_as_one);
        std::size_t counted = 0;
        for (std::size_t i = 0; i < out_.gates.size(); ++i) {
            if (!is_counted(out_.gates[i].kind)) continue;
            counted += (out_.inserted[i] && !opts_.swap_as_one) ? 3 : 1;
        }
        out_.total_gates = counted;
        return std::move(out_);
    }

private:
    void build_dependencies() {
        const auto& gates = circuit_.gates();
        constexpr std::size_t none = static_cast<std::size_t>(-1);
        std::vector<std::size_t> last(circuit_.num_qubits(), none);
        pending_.assign(gates.size(), 0);
        succ_.assign(gates.size(), {});
        executed_.assign(gates.size(), 0);
        in_front_.assign(gates.size(), 0);
        for (std::size_t i = 0; i < gates.size(); ++i) {
            const GateOp& g = gates[i];
            const std::size_t qs[2] = {g.q0, g.q1};
            for (std::size_t k = 0; k < g.arity(); ++k) {
                const std::size_t p = last[qs[k]];
                if (p != none && (succ_[p].empty() || succ_[p].back() != i)) {
                    succ_[p].push_back(i);
                    ++pending_[i];
                }
                last[qs[k]] = i;
            }
            if (is_two_qubit(g.kind)) two_qubit_order_.push_back(i);
        }
    }

    bool adjacent(const GateOp& g) const {
        return dist_(map_.physical(g.q0), map_.physical(g.q1)) == 1;
    }

    void emit(const GateOp& logical_op, std::size_t index) {
        GateOp phys = logical_op;
        phys.q0 = static_cast<Qubit>(map_.physical(logical_op.q0));
        if (logical_op.arity() == 2) phys.q1 = static_cast<Qubit>(map_.physical(logical_op.q1));
        out_.gates.push_back(std::move(phys));
        out_.inserted.push_back(0);
        executed_[index] = 1;
        ++executed_count_;
        for (std::size_t s : succ_[index]) {
            if (--pending_[s] == 0) work_.push_back(s);
        }
    }

    /// Executes every ready gate it can; blocked two-qubit gates join the front.
    bool drain() {
        bool progressed = false;
        while (!work_.empty()) {
            const std::size_t i = work_.front();
            work_.pop_front();
            const GateOp& g = circuit_.gates()[i];
            if (is_two_qubit(g.kind) && !adjacent(g)) {
                in_front_[i] = 1;
                front_.push_back(i);
            } else {
                emit(g, i);
                progressed = true;
            }
        }
        return progressed;
    }

    bool recheck_front() {
        std::vector<std::size_t> still;
        for (std::size_t i : front_) {
            if (adjacent(circuit_.gates()[i])) {
                in_front_[i] = 0;
                work_.push_back(i);
            } else {
                still.push_back(i);
            }
        }
        if (still.size() == front_.size()) return false;
        front_ = std::move(still);
        drain();
        return true;
    }

    std::pair<std::size_t, std::size_t> choose_swap() {
        front_ops_.clear();
        for (std::size_t i : front_) front_ops_.push_back(circuit_.gates()[i]);

        ext_ops_.clear();
        while (cursor_ < two_qubit_order_.size() && executed_[two_qubit_order_[cursor_]]) ++cursor_;
        for (std::size_t k = cursor_; k < two_qubit_order_.size() && ext_ops_.size() < opts_.extended_size; ++k) {
            const std::size_t i = two_qubit_order_[k];
            if (executed_[i] || in_front_[i]) continue;
            ext_ops_.push_back(circuit_.gates()[i]);
        }

        std::vector<std::pair<std::size_t, std::size_t>> candidates;
        for (const GateOp& g : front_ops_) {
            for (const std::size_t p : {map_.physical(g.q0), map_.physical(g.q1)}) {
                for (std::size_t q : adj_[p]) candidates.emplace_back(std::min(p, q), std::max(p, q));
            }
        }
        std::sort(candidates.begin(), candidates.end());
        candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

        double best = std::numeric_limits<double>::infinity();
        std::vector<std::pair<std::size_t, std::size_t>> ties;
        for (const auto& sw : candidates) {
            map_.swap_physical(sw.first, sw.second);
            const double cost =
                heuristic_cost(front_ops_, ext_ops_, map_, dist_, opts_.extended_weight, decay_, sw);
            map_.swap_physical(sw.first, sw.second);
            if (cost < best - 1e-10) {
                best = cost;
                ties.assign(1, sw);
            } else if (cost <= best + 1e-10) {
                ties.push_back(sw);
            }
        }
        if (ties.size() == 1) return ties.front();
        std::uniform_int_distribution<std::size_t> pick(0, ties.size() - 1);
        return ties[pick(rng_)];
    }

    void apply_swap(std::pair<std::size_t, std::size_t> sw) {
        out_.gates.push_back(GateOp::pair(GateKind::SWAP, static_cast<Qubit>(sw.first), static_cast<Qubit>(sw.second)));
        out_.inserted.push_back(1);
        ++out_.swap_count;
        map_.swap_physical(sw.first, sw.second);
        decay_[sw.first] += opts_.decay_delta;
        decay_[sw.second] += opts_.decay_delta;
        if (opts_.decay_reset > 0 && ++rounds_ % opts_.decay_reset == 0) {
            std::fill(decay_.begin(), decay_.end(), 1.0);
        }
    }

    /// Walks the closest front gate's first operand along a shortest path.
    void force_front_gate() {
        std::size_t target = front_.front();
        for (std::size_t i : front_) {
            const GateOp& g = circuit_.gates()[i];
            const GateOp& t = circuit_.gates()[target];
            if (dist_(map_.physical(g.q0), map_.physical(g.q1)) < dist_(map_.physical(t.q0), map_.physical(t.q1))) {
                target = i;
            }
        }
        const GateOp& g = circuit_.gates()[target];
        while (!adjacent(g)) {
            const std::size_t from = map_.physical(g.q0);
            const std::size_t to = map_.physical(g.q1);
            std::size_t step = adj_[from].front();
            for (std::size_t q : adj_[from]) {
                if (dist_(q, to) < dist_(step, to)) step = q;
            }
            apply_swap({std::min(from, step), std::max(from, step)});
        }
    }

    const Circuit& circuit_;
    const TopologyGraph& topo_;
    RouterOptions opts_;
    std::mt19937_64 rng_;
    DistanceMatrix dist_;
    std::vector<std::vector<std::size_t>> adj_;
    QubitMap map_;
    std::vector<double> decay_;
    std::size_t rounds_ = 0;

    std::vector<std::size_t> pending_;
    std::vector<std::vector<std::size_t>> succ_;
    std::vector<std::uint8_t> executed_;
    std::vector<std::uint8_t> in_front_;
    std::vector<std::size_t> two_qubit_order_;
    std::size_t cursor_ = 0;
    std::size_t executed_count_ = 0;
    std::deque<std::size_t> work_;
    std::vector<std::size_t> front_;
    std::vector<GateOp> front_ops_;
    std::vector<GateOp> ext_ops_;

    RoutedCircuit out_;
};

}  // namespace

RoutedCircuit route(const Circuit& c, const TopologyGraph& g, const RouterOptions& opts, std::uint64_t seed) {
    if (c.num_qubits() > g.size()) {
        throw std::invalid_argument("circuit needs " + std::to_string(c.num_qubits()) +
                                    " qubits but topology has " + std::to_string(g.size()));
    }
    if (!is_routable(c, g)) {
        throw UnroutableError("interacting qubits lie in disconnected components of the topology");
    }
    if (opts.trials == 0) throw std::invalid_argument("router trials must be at least 1");
    RoutedCircuit best = SwapRouter(c, g, opts, seed).run();
    for (std::uint64_t t = 1; t < opts.trials; ++t) {
        RoutedCircuit rc = SwapRouter(c, g, opts, seed ^ (t * 0x9E3779B97F4A7C15ULL)).run();
        if (std::pair(rc.swap_count, rc.depth) < std::pair(best.swap_count, best.depth)) best = std::move(rc);
    }
    best.seed = seed;
    return best;
}

bool verify_routing(const Circuit& c, const RoutedCircuit& rc) {
    if (rc.gates.size() != rc.inserted.size() || rc.topology.size() != rc.num_physical) return false;
    if (c.num_qubits() > rc.num_physical) return false;
    QubitMap map = QubitMap::sequential(c.num_qubits(), rc.num_physical);
    if (!(map == rc.initial_map)) return false;

    const auto& src = c.gates();
    std::vector<std::vector<std::size_t>> queue(c.num_qubits());
    for (std::size_t i = 0; i < src.size(); ++i) {
        queue[src[i].q0].push_back(i);
        if (src[i].arity() == 2) queue[src[i].q1].push_back(i);
    }
    std::vector<std::size_t> head(c.num_qubits(), 0);
    auto next_on = [&](std::size_t q) -> std::size_t {
        return head[q] < queue[q].size() ? queue[q][head[q]] : static_cast<std::size_t>(-1);
    };

    std::size_t swaps = 0;
    for (std::size_t k = 0; k < rc.gates.size(); ++k) {
        const GateOp& op = rc.gates[k];
        if (op.q0 >= rc.num_physical || (op.arity() == 2 && op.q1 >= rc.num_physical)) return false;
        if (op.arity() == 2 && !rc.topology.has_edge(op.q0, op.q1)) return false;
        if (rc.inserted[k]) {
            if (op.kind != GateKind::SWAP) return false;
            map.swap_physical(op.q0, op.q1);
            ++swaps;
            continue;
        }
        const std::int32_t la = map.logical(op.q0);
        if (la == QubitMap::empty) return false;
        const std::size_t i = next_on(static_cast<std::size_t>(la));
        if (i == static_cast<std::size_t>(-1)) return false;
        const GateOp& want = src[i];
        if (want.kind != op.kind || want.params != op.params || want.q0 != static_cast<Qubit>(la)) return false;
        if (op.arity() == 2) {
            const std::int32_t lb = map.logical(op.q1);
            if (lb == QubitMap::empty || want.q1 != static_cast<Qubit>(lb)) return false;
            if (next_on(static_cast<std::size_t>(lb)) != i) return false;
            ++head[static_cast<std::size_t>(lb)];
        }
        ++head[static_cast<std::size_t>(la)];
    }
    for (std::size_t q = 0; q < head.size(); ++q) {
        if (head[q] != queue[q].size()) return false;
    }
    return map == rc.final_map && swaps == rc.swap_count &&
           rc.depth == routed_depth(rc.gates, rc.inserted, rc.num_physical, rc.swap_as_one);
}

Circuit to_physical_circuit(const RoutedCircuit& rc) {
    Circuit out(rc.num_physical);
    std::size_t clbits = 0;
    for (std::size_t k = 0; k < rc.gates.size(); ++k) {
        const GateOp& op = rc.gates[k];
        if (op.kind == GateKind::MEASURE) {
            clbits = std::max(clbits, static_cast<std::size_t>(op.params.at(0)) + 1);
        }
        if (rc.inserted[k] && !rc.swap_as_one) {
            out.append(GateOp::pair(GateKind::CX, op.q0, op.q1));
            out.append(GateOp::pair(GateKind::CX, op.q1, op.q0));
            out.append(GateOp::pair(GateKind::CX, op.q0, op.q1));
        } else {
            out.append(op);
        }
    }
    out.set_num_clbits(clbits);
    return out;
}

RouteSummary route_mean(const Circuit& c, const TopologyGraph& g, const RouterOptions& opts,
                        std::span<const std::uint64_t> seeds) {
    if (seeds.empty()) throw std::invalid_argument("at least one router seed is required");
    RouteSummary s;
    for (std::uint64_t seed : seeds) {
        const RoutedCircuit rc = route(c, g, opts, seed);
        s.depth += static_cast<double>(rc.depth);
        s.total_gates += static_cast<double>(rc.total_gates);
        s.swap_count += static_cast<double>(rc.swap_count);
    }
    const double n = static_cast<double>(seeds.size());
    s.depth /= n;
    s.total_gates /= n;
    s.swap_count /= n;
    return s;
}

}  // namespace qtopo
