// SPDX-License-Identifier: MIT
// Copyright (c) 2026 qtopo contributors

#include "qtopo/replay.hpp"

#include <stdexcept>

namespace qtopo::rl {

ReplayMemory::ReplayMemory(int threshold) : threshold_(threshold) {
    if (threshold < 0) throw std::invalid_argument("replay threshold must be >= 0");
}

std::optional<double> ReplayMemory::lookup(std::size_t action) {
    const auto it = entries_.find(action);
    if (it == entries_.end()) {
        ++stats_.misses;
        return std::nullopt;
    }
    ++stats_.hits;
    const double reward = it->second.reward;
    if (--it->second.remaining <= 0) {
        entries_.erase(it);
        ++stats_.evictions;
    }
    return reward;
}

void ReplayMemory::insert(std::size_t action, double reward, int threshold) {
    if (threshold < 1) throw std::invalid_argument("replay threshold must be a positive integer");
    entries_[action] = Entry{reward, threshold};
}

void ReplayMemory::record(std::size_t action, double reward) {
    if (enabled()) insert(action, reward, threshold_);
}

void ReplayMemory::merge(const ReplayMemory& other) {
    for (const auto& [action, entry] : other.entries_) {
        auto [it, inserted] = entries_.try_emplace(action, entry);
        if (!inserted && entry.remaining > it->second.remaining) it->second = entry;
    }
    stats_.hits += other.stats_.hits;
    stats_.misses += other.stats_.misses;
    stats_.evictions += other.stats_.evictions;
}

}  // namespace qtopo::rl
