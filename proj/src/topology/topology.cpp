// SPDX-License-Identifier: MIT
// Copyright (c) 2026 qtopo contributors

#include "qtopo/topology.hpp"

#include <algorithm>
#include <charconv>
#include <queue>
#include <sstream>
#include <stdexcept>

namespace qtopo {

std::size_t edge_index(std::size_t i, std::size_t j, std::size_t n) {
    if (!(i < j && j < n)) {
        throw std::invalid_argument("edge_index requires 0 <= i < j < n");
    }
    return i * (2 * n - i - 1) / 2 + (j - i - 1);
}

std::pair<std::size_t, std::size_t> edge_pair(std::size_t index, std::size_t n) {
    if (index >= pair_count(n)) throw std::invalid_argument("edge index out of range");
    std::size_t i = 0;
    std::size_t row = n - 1;
    while (index >= row) {
        index -= row;
        ++i;
        --row;
    }
    return {i, i + 1 + index};
}

TopologyGraph::TopologyGraph(std::size_t n, std::size_t max_degree)
    : n_(n), max_degree_(max_degree), degree_(n, 0), bits_(pair_count(n), 0) {}

bool TopologyGraph::has_edge(std::size_t i, std::size_t j) const {
    if (i == j || i >= n_ || j >= n_) return false;
    if (i > j) std::swap(i, j);
    return bits_[edge_index(i, j, n_)] != 0;
}

bool TopologyGraph::can_add(std::size_t i, std::size_t j) const {
    if (i == j || i >= n_ || j >= n_) return false;
    return !has_edge(i, j) && degree_[i] < max_degree_ && degree_[j] < max_degree_;
}

AddEdge TopologyGraph::add_edge(std::size_t i, std::size_t j) {
    if (i == j) throw std::invalid_argument("self loop");
    if (i >= n_ || j >= n_) throw std::invalid_argument("vertex out of range");
    if (i > j) std::swap(i, j);
    auto& bit = bits_[edge_index(i, j, n_)];
    if (bit) return AddEdge::Duplicate;
    if (degree_[i] >= max_degree_ || degree_[j] >= max_degree_) return AddEdge::DegreeViolation;
    bit = 1;
    ++degree_[i];
    ++degree_[j];
    ++edges_;
    return AddEdge::Added;
}

std::vector<std::size_t> TopologyGraph::neighbors(std::size_t v) const {
    std::vector<std::size_t> out;
    for (std::size_t u = 0; u < n_; ++u) {
        if (has_edge(u, v)) out.push_back(u);
    }
    return out;
}

std::vector<std::pair<std::size_t, std::size_t>> TopologyGraph::edges() const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    out.reserve(edges_);
    for (std::size_t k = 0; k < bits_.size(); ++k) {
        if (bits_[k]) out.push_back(edge_pair(k, n_));
    }
    return out;
}

TopologyGraph TopologyGraph::from_state(std::span<const std::uint8_t> bits, std::size_t n,
                                        std::size_t max_degree) {
    if (bits.size() != pair_count(n)) throw std::invalid_argument("state length does not match n(n-1)/2");
    TopologyGraph g(n, max_degree);
    for (std::size_t k = 0; k < bits.size(); ++k) {
        if (!bits[k]) continue;
        const auto [i, j] = edge_pair(k, n);
        if (g.add_edge(i, j) != AddEdge::Added) throw std::invalid_argument("state violates max degree");
    }
    return g;
}

std::uint64_t TopologyGraph::hash() const {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](std::uint64_t byte) {
        h ^= byte;
        h *= 1099511628211ull;
    };
    for (int s = 0; s < 64; s += 8) mix((n_ >> s) & 0xff);
    for (std::uint8_t b : bits_) mix(b);
    return h;
}

TopologyGraph make_grid(std::size_t rows, std::size_t cols) {
    if (rows == 0 || cols == 0) throw std::invalid_argument("grid dimensions must be positive");
    TopologyGraph g(rows * cols);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            const std::size_t v = r * cols + c;
            if (c + 1 < cols) g.add_edge(v, v + 1);
            if (r + 1 < rows) g.add_edge(v, v + cols);
        }
    }
    return g;
}

TopologyGraph make_line(std::size_t n) {
    if (n == 0) throw std::invalid_argument("line needs at least one vertex");
    TopologyGraph g(n);
    for (std::size_t v = 0; v + 1 < n; ++v) g.add_edge(v, v + 1);
    return g;
}

TopologyGraph make_complete(std::size_t n) {
    TopologyGraph g(n, n == 0 ? 0 : n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) g.add_edge(i, j);
    }
    return g;
}

DistanceMatrix floyd_warshall(const TopologyGraph& g) {
    const std::size_t n = g.size();
    DistanceMatrix d(n);
    for (std::size_t i = 0; i < n; ++i) d.at(i, i) = 0;
    for (const auto& [i, j] : g.edges()) {
        d.at(i, j) = 1;
        d.at(j, i) = 1;
    }
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            const std::uint32_t dik = d(i, k);
            if (dik == DistanceMatrix::unreachable) continue;
            for (std::size_t j = 0; j < n; ++j) {
                const std::uint32_t dkj = d(k, j);
                if (dkj == DistanceMatrix::unreachable) continue;
                if (dik + dkj < d(i, j)) d.at(i, j) = dik + dkj;
            }
        }
    }
    return d;
}

DistanceMatrix bfs_distances(const TopologyGraph& g) {
    const std::size_t n = g.size();
    std::vector<std::vector<std::size_t>> adj(n);
    for (const auto& [i, j] : g.edges()) {
        adj[i].push_back(j);
        adj[j].push_back(i);
    }
    DistanceMatrix d(n);
    std::vector<std::size_t> queue;
    queue.reserve(n);
    for (std::size_t s = 0; s < n; ++s) {
        queue.clear();
        queue.push_back(s);
        d.at(s, s) = 0;
        for (std::size_t head = 0; head < queue.size(); ++head) {
            const std::size_t u = queue[head];
            for (std::size_t v : adj[u]) {
                if (d(s, v) != DistanceMatrix::unreachable) continue;
                d.at(s, v) = d(s, u) + 1;
                queue.push_back(v);
            }
        }
    }
    return d;
}

std::string to_edge_list(const TopologyGraph& g) {
    std::ostringstream out;
    out << g.size() << '\n';
    for (const auto& [i, j] : g.edges()) out << i << ' ' << j << '\n';
    return out.str();
}

TopologyGraph parse_edge_list(std::string_view text, std::size_t max_degree) {
    std::vector<std::size_t> numbers;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const char c = text[pos];
        if (c == '#') {
            while (pos < text.size() && text[pos] != '\n') ++pos;
            continue;
        }
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == ',') {
            ++pos;
            continue;
        }
        std::size_t v = 0;
        const auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + text.size(), v);
        if (ec != std::errc{}) throw std::invalid_argument("edge list: expected non-negative integer");
        pos = static_cast<std::size_t>(ptr - text.data());
        numbers.push_back(v);
    }
    if (numbers.empty()) throw std::invalid_argument("edge list: missing vertex count");
    if (numbers.size() % 2 != 1) throw std::invalid_argument("edge list: dangling endpoint");
    TopologyGraph g(numbers[0], max_degree);
    for (std::size_t k = 1; k < numbers.size(); k += 2) {
        const std::size_t i = numbers[k];
        const std::size_t j = numbers[k + 1];
        if (i == j) throw std::invalid_argument("edge list: self loop");
        if (i >= g.size() || j >= g.size()) throw std::invalid_argument("edge list: vertex out of range");
        if (g.add_edge(i, j) == AddEdge::DegreeViolation) {
            throw std::invalid_argument("edge list: vertex degree exceeds " + std::to_string(max_degree));
        }
    }
    return g;
}

std::string to_bit_csv(const TopologyGraph& g) {
    std::string out;
    const auto& bits = g.flatten_state();
    for (std::size_t k = 0; k < bits.size(); ++k) {
        if (k) out += ',';
        out += bits[k] ? '1' : '0';
    }
    out += '\n';
    return out;
}

}  // namespace qtopo
