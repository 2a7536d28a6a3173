// SPDX-License-Identifier: MIT
// Copyright (c) 2026 qtopo contributors

/**
 * @file topology.hpp
 * @brief Degree-bounded undirected coupling graph over physical qubits.
 *
 * The adjacency matrix is symmetric with a zero diagonal, so only the i<j
 * half is stored, as a bit vector indexed by edge_index(). That same bit
 * vector is the observation handed to the learning agent.
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qtopo {

/// Lexicographic index of the pair (i, j), i < j < n, in [0, n(n-1)/2).
/// @throws std::invalid_argument unless 0 <= i < j < n.
std::size_t edge_index(std::size_t i, std::size_t j, std::size_t n);

/// Inverse of edge_index.
std::pair<std::size_t, std::size_t> edge_pair(std::size_t index, std::size_t n);

constexpr std::size_t pair_count(std::size_t n) { return n < 2 ? 0 : n * (n - 1) / 2; }

enum class AddEdge { Added, Duplicate, DegreeViolation };

class TopologyGraph {
public:
    static constexpr std::size_t default_max_degree = 4;

    TopologyGraph() = default;
    explicit TopologyGraph(std::size_t n, std::size_t max_degree = default_max_degree);

    std::size_t size() const { return n_; }
    std::size_t max_degree() const { return max_degree_; }
    std::size_t degree(std::size_t v) const { return degree_.at(v); }
    std::size_t edge_count() const { return edges_; }

    bool has_edge(std::size_t i, std::size_t j) const;

    /// Adds the undirected edge {i, j}. A duplicate leaves the graph
    /// unchanged; so does an edge that would push either endpoint past
    /// max_degree. @throws std::invalid_argument for i == j or out of range.
    AddEdge add_edge(std::size_t i, std::size_t j);

    /// True iff {i, j} is absent and both endpoints have spare degree.
    bool can_add(std::size_t i, std::size_t j) const;

    std::vector<std::size_t> neighbors(std::size_t v) const;
    std::vector<std::pair<std::size_t, std::size_t>> edges() const;

    /// Bit k set iff the edge with edge_index k is present.
    const std::vector<std::uint8_t>& flatten_state() const { return bits_; }

    /// Rebuilds a graph from its flattened state.
    /// @throws std::invalid_argument on wrong length or degree violation.
    static TopologyGraph from_state(std::span<const std::uint8_t> bits, std::size_t n,
                                    std::size_t max_degree = default_max_degree);

    /// Stable 64-bit FNV-1a hash over (n, edge bits).
    std::uint64_t hash() const;

    friend bool operator==(const TopologyGraph& a, const TopologyGraph& b) {
        return a.n_ == b.n_ && a.bits_ == b.bits_;
    }

private:
    std::size_t n_ = 0;
    std::size_t max_degree_ = default_max_degree;
    std::size_t edges_ = 0;
    std::vector<std::size_t> degree_;
    std::vector<std::uint8_t> bits_;
};

/// 4-neighbour lattice, vertex r*cols + c.
TopologyGraph make_grid(std::size_t rows, std::size_t cols);
TopologyGraph make_line(std::size_t n);
/// Every pair connected; max_degree is raised to n-1.
TopologyGraph make_complete(std::size_t n);

/// All-pairs hop distances. Unreachable pairs hold `unreachable`.
class DistanceMatrix {
public:
    static constexpr std::uint32_t unreachable = std::numeric_limits<std::uint32_t>::max();

    DistanceMatrix() = default;
    explicit DistanceMatrix(std::size_t n) : n_(n), d_(n * n, unreachable) {}

    std::size_t size() const { return n_; }
    std::uint32_t operator()(std::size_t i, std::size_t j) const { return d_[i * n_ + j]; }
    std::uint32_t& at(std::size_t i, std::size_t j) { return d_[i * n_ + j]; }

    friend bool operator==(const DistanceMatrix&, const DistanceMatrix&) = default;

private:
    std::size_t n_ = 0;
    std::vector<std::uint32_t> d_;
};

DistanceMatrix floyd_warshall(const TopologyGraph& g);
DistanceMatrix bfs_distances(const TopologyGraph& g);
/// Default distance routine (BFS from every vertex).
inline DistanceMatrix distance_matrix(const TopologyGraph& g) { return bfs_distances(g); }

/// Edge-list text: first line n, then one "i j" pair per line.
std::string to_edge_list(const TopologyGraph& g);
/// @throws std::invalid_argument on malformed text, self loops or a vertex
/// exceeding max_degree.
TopologyGraph parse_edge_list(std::string_view text, std::size_t max_degree = TopologyGraph::default_max_degree);

/// Flattened state as comma-separated 0/1.
std::string to_bit_csv(const TopologyGraph& g);

}  // namespace qtopo
