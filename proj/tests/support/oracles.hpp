// SPDX-License-Identifier: MIT
// Copyright (c) 2026 qtopo contributors

// Slow reference computations used only by tests. Nothing here may call
// into the code path it is checking.

#pragma once

#include "qtopo/circuit.hpp"
#include "qtopo/topology.hpp"

#include <algorithm>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <vector>

namespace qtopo::oracle {

/// Longest chain in the "shares a qubit and comes earlier" relation, using
/// the full O(n^2) relation rather than immediate predecessors.
inline std::size_t longest_path_depth(const Circuit& c) {
    std::vector<GateOp> g;
    for (const GateOp& op : c.gates()) {
        if (is_counted(op.kind)) g.push_back(op);
    }
    auto share = [](const GateOp& a, const GateOp& b) {
        return b.acts_on(a.q0) || (a.arity() == 2 && b.acts_on(a.q1));
    };
    std::vector<std::size_t> memo(g.size(), 0);
    std::function<std::size_t(std::size_t)> chain = [&](std::size_t v) -> std::size_t {
        if (memo[v]) return memo[v];
        std::size_t best = 1;
        for (std::size_t u = 0; u < v; ++u) {
            if (share(g[u], g[v])) best = std::max(best, chain(u) + 1);
        }
        return memo[v] = best;
    };
    std::size_t depth = 0;
    for (std::size_t v = 0; v < g.size(); ++v) depth = std::max(depth, chain(v));
    return depth;
}

/// Minimum number of SWAPs to execute all two-qubit gates of c on g from the
/// sequential layout, allowing any dependency-respecting order. 0-1 BFS over
/// (placement, executed-set). Feasible for <= 6 physical qubits, <= 10 gates.
inline std::optional<std::size_t> min_swaps(const Circuit& c, const TopologyGraph& g) {
    std::vector<GateOp> ops;
    for (const GateOp& op : c.gates()) {
        if (is_two_qubit(op.kind)) ops.push_back(op);
    }
    const std::size_t m = ops.size();
    std::vector<std::uint32_t> need(m, 0);  // predecessor mask among two-qubit gates
    for (std::size_t v = 0; v < m; ++v) {
        for (std::size_t u = 0; u < v; ++u) {
            if (ops[v].acts_on(ops[u].q0) || ops[v].acts_on(ops[u].q1)) need[v] |= 1u << u;
        }
    }
    const std::size_t n = g.size();
    std::vector<int> start(n, -1);  // physical -> logical
    for (std::size_t k = 0; k < c.num_qubits(); ++k) start[k] = static_cast<int>(k);

    using State = std::pair<std::vector<int>, std::uint32_t>;
    std::map<State, std::size_t> seen;
    std::deque<std::pair<State, std::size_t>> dq;
    dq.push_back({{start, 0}, 0});
    const std::uint32_t done = m == 32 ? ~0u : (1u << m) - 1;
    auto edges = g.edges();
    while (!dq.empty()) {
        auto [state, cost] = dq.front();
        dq.pop_front();
        auto it = seen.find(state);
        if (it != seen.end() && it->second <= cost) continue;
        seen[state] = cost;
        const auto& [place, mask] = state;
        if (mask == done) return cost;
        std::vector<std::size_t> where(c.num_qubits());
        for (std::size_t p = 0; p < n; ++p) {
            if (place[p] >= 0) where[static_cast<std::size_t>(place[p])] = p;
        }
        for (std::size_t v = 0; v < m; ++v) {
            if ((mask >> v) & 1u) continue;
            if ((need[v] & mask) != need[v]) continue;
            if (g.has_edge(where[ops[v].q0], where[ops[v].q1])) {
                dq.push_front({{place, mask | (1u << v)}, cost});
            }
        }
        for (const auto& [a, b] : edges) {
            std::vector<int> next = place;
            std::swap(next[a], next[b]);
            dq.push_back({{std::move(next), mask}, cost + 1});
        }
    }
    return std::nullopt;
}

/// Edge pairs (no shared vertex) whose open segments share a point, solved
/// parametrically in exact integer arithmetic.
inline std::size_t crossings_brute_force(const std::vector<std::pair<long long, long long>>& xy,
                                         const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
    using P = std::pair<long long, long long>;
    auto sub = [](P p, P q) { return P{p.first - q.first, p.second - q.second}; };
    auto cross = [](P p, P q) { return p.first * q.second - p.second * q.first; };
    auto dot = [](P p, P q) { return p.first * q.first + p.second * q.second; };
    // 0 < num/den < 1 for den != 0.
    auto strictly_inside = [](long long num, long long den) {
        if (den < 0) {
            num = -num;
            den = -den;
        }
        return num > 0 && num < den;
    };
    std::size_t count = 0;
    for (std::size_t e = 0; e < edges.size(); ++e) {
        for (std::size_t f = e + 1; f < edges.size(); ++f) {
            const auto [i, j] = edges[e];
            const auto [k, l] = edges[f];
            if (i == k || i == l || j == k || j == l) continue;
            const P a = xy[i], r = sub(xy[j], xy[i]);
            const P c = xy[k], s = sub(xy[l], xy[k]);
            const long long den = cross(r, s);
            const P ca = sub(c, a);
            if (den != 0) {
                if (strictly_inside(cross(ca, s), den) && strictly_inside(cross(ca, r), den)) ++count;
                continue;
            }
            if (cross(ca, r) != 0) continue;  // parallel, distinct lines
            // Collinear: positions of c and d along r, scaled by |r|^2.
            const long long len = dot(r, r);
            long long t0 = dot(ca, r), t1 = dot(sub(xy[l], a), r);
            if (t0 > t1) std::swap(t0, t1);
            if (std::min(t1, len) - std::max(t0, 0LL) > 0) ++count;
        }
    }
    return count;
}

}  // namespace qtopo::oracle
