// SPDX-License-Identifier: MIT
// Copyright (c) 2026 qtopo contributors

/**
 * @file replay.hpp
 * @brief Action-keyed reward cache with bounded reuse.
 *
 * The reward of an action is treated as independent of the graph it is
 * applied to, so a cached value stands in for a router evaluation. Each
 * entry serves at most `threshold` hits and is then evicted, after which
 * the next use of that action is evaluated afresh.
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>

namespace qtopo::rl {

struct ReplayStats {
    std::uint64_t hits = 0;
    std::uint64_t misses = 0;
    std::uint64_t evictions = 0;

    std::uint64_t lookups() const { return hits + misses; }
    friend bool operator==(const ReplayStats&, const ReplayStats&) = default;
};

class ReplayMemory {
public:
    struct Entry {
        double reward = 0.0;
        int remaining = 0;
        friend bool operator==(const Entry&, const Entry&) = default;
    };

    /// threshold 0 disables storage: every lookup misses.
    explicit ReplayMemory(int threshold = 2);

    int threshold() const { return threshold_; }
    bool enabled() const { return threshold_ > 0; }

    /// Cached reward on a hit (consuming one use); nullopt on a miss.
    std::optional<double> lookup(std::size_t action);

    /// Stores (or overwrites) the entry with `threshold` remaining uses.
    /// @throws std::invalid_argument if threshold < 1.
    void insert(std::size_t action, double reward, int threshold);

    /// insert() with the memory's own threshold; no-op when disabled.
    void record(std::size_t action, double reward);

    /// Union with another worker's memory; on conflict the entry with more
    /// remaining uses wins. Statistics are summed.
    void merge(const ReplayMemory& other);

    void clear() { entries_.clear(); }

    const ReplayStats& stats() const { return stats_; }
    std::size_t size() const { return entries_.size(); }
    const std::map<std::size_t, Entry>& entries() const { return entries_; }

private:
    int threshold_;
    std::map<std::size_t, Entry> entries_;
    ReplayStats stats_;
};

}  // namespace qtopo::rl
