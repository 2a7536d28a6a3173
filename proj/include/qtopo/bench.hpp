// SPDX-License-Identifier: MIT
// Copyright (c) 2026 qtopo contributors

/**
 * @file bench.hpp
 * @brief Training driver and baseline-versus-tailored comparison reports.
 */

#pragma once

#include "qtopo/circuit.hpp"
#include "qtopo/env.hpp"
#include "qtopo/ppo.hpp"
#include "qtopo/router.hpp"
#include "qtopo/topology.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace qtopo {

/// Router options and seeds shared by every routing call in a comparison.
struct RoutingSetup {
    RouterOptions router;
    std::vector<std::uint64_t> seeds{0, 1, 2};
};

struct TrainSetup {
    rl::TrainConfig train;
    std::size_t max_degree = TopologyGraph::default_max_degree;
    std::size_t horizon = 0;
    rl::Objective objective = rl::Objective::Depth;
    rl::RewardSign reward_sign = rl::RewardSign::Negated;
    std::size_t max_qubits = 20;
};

struct TrainOutcome {
    TopologyGraph best;
    double start_objective = 0.0;
    double best_objective = 0.0;
    std::vector<rl::IterationMetrics> metrics;
    std::vector<rl::TraceRecord> best_trace;
    std::string checkpoint;
};

/// Runs reward-replay PPO on a fresh environment for `c`.
/// @throws std::invalid_argument if c has more than setup.max_qubits qubits.
TrainOutcome train_topology(const Circuit& c, const TrainSetup& setup, const RoutingSetup& routing,
                            const std::function<void(const rl::IterationMetrics&)>& on_iteration = {});

/// Smallest rows x cols square grid with at least n vertices.
TopologyGraph baseline_grid(std::size_t n);

/// (baseline - tailored) / baseline * 100.
double reduction_pct(double baseline_depth, double tailored_depth);

struct RoutedStats {
    double depth = 0.0;
    double total_gates = 0.0;
    double idle = 0.0;  // 1 - gates / (circuit qubits * depth)
};

struct BenchRow {
    std::string circuit;
    std::size_t qubits = 0;
    std::size_t gates_in = 0;
    std::size_t logical_depth = 0;
    std::string baseline_topology;
    RoutedStats baseline;
    RoutedStats tailored;
    double reduction_pct = 0.0;
    std::string error;  // non-empty if the row failed
};

/// Routes c on both graphs with the same setup.
RoutedStats routed_stats(const Circuit& c, const TopologyGraph& g, const RoutingSetup& routing);
BenchRow compare_topologies(const std::string& name, const Circuit& c, const TopologyGraph& baseline,
                            const std::string& baseline_name, const TopologyGraph& tailored,
                            const RoutingSetup& routing);

/// Re-derives reduction and idle columns; throws std::logic_error on mismatch.
void check_row(const BenchRow& row);

struct BenchSummary {
    std::size_t rows = 0;
    std::size_t failed = 0;
    std::size_t not_worse = 0;  // tailored depth <= baseline depth
    double median_reduction = 0.0;
};

BenchSummary summarize(const std::vector<BenchRow>& rows);

std::string bench_to_csv(const std::vector<BenchRow>& rows);
std::string bench_to_json(const std::vector<BenchRow>& rows);
std::string summary_to_text(const BenchSummary& s);

double median(std::vector<double> xs);

}  // namespace qtopo
