// SPDX-License-Identifier: MIT
// Copyright (c) 2026 qtopo contributors

/**
 * @file env.hpp
 * @brief Topology-construction environment.
 *
 * An episode starts from a path over the circuit's qubits. Each action is
 * an edge index (see edge_index()); a legal action adds that edge, the
 * routed objective is re-measured (or taken from the replay memory) and
 * the reward compares it against the episode's initial and previous
 * values.
 */

#pragma once

#include "qtopo/circuit.hpp"
#include "qtopo/replay.hpp"
#include "qtopo/router.hpp"
#include "qtopo/topology.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace qtopo::rl {

enum class Objective { Depth, Gates };
enum class RewardSign { Verbatim, Negated };

/// Reward for moving from d_prev to d_t given episode start d0.
/// Verbatim evaluates the piecewise formula exactly; Negated returns its
/// negation so that an objective reduction earns a positive reward.
/// @throws std::invalid_argument if d0 or d_prev is not positive.
double reward_fn(double d0, double d_prev, double d_t, RewardSign sign = RewardSign::Negated);

struct StepInfo {
    /// Objective after the step (the last evaluated value on replayed steps).
    double objective = 0.0;
    bool evaluated = false;
    bool replayed = false;
    bool action_legal = false;
};

struct StepOutcome {
    std::vector<double> observation;
    double reward = 0.0;
    bool done = false;
    StepInfo info;
};

/// Interface the PPO trainer drives. Observations are flat real vectors;
/// actions are indices into [0, action_count()).
class Environment {
public:
    virtual ~Environment() = default;

    virtual std::size_t observation_size() const = 0;
    virtual std::size_t action_count() const = 0;

    virtual std::vector<double> reset() = 0;
    virtual std::vector<std::uint8_t> legal_mask() const = 0;
    virtual StepOutcome step(std::size_t action) = 0;

    /// Memory consulted before every evaluation; nullptr disables replay.
    virtual void attach_memory(ReplayMemory*) {}
    /// Number of objective evaluations performed so far.
    virtual std::uint64_t evaluations() const { return 0; }
    /// Best (lowest) objective seen so far, if the environment tracks one.
    virtual std::optional<double> best_objective() const { return std::nullopt; }
};

struct EnvConfig {
    Circuit circuit;
    std::size_t max_degree = TopologyGraph::default_max_degree;
    /// 0 selects 2 * circuit qubits.
    std::size_t horizon = 0;
    std::vector<std::uint64_t> eval_seeds{0, 1, 2};
    Objective objective = Objective::Depth;
    RewardSign reward_sign = RewardSign::Negated;
    double illegal_penalty = -1.0;
    RouterOptions router;
};

struct EnvState {
    TopologyGraph graph;
    std::size_t step_index = 0;
    double d0 = 0.0;
    double d_prev = 0.0;
    std::vector<std::uint8_t> observation;
};

/// Action k is legal iff its edge is absent and both endpoints have spare degree.
std::vector<std::uint8_t> legal_actions(const EnvState& s);

struct TraceRecord {
    std::size_t action = 0;
    bool legal = false;
    double objective = 0.0;
    double reward = 0.0;
    bool replayed = false;
};

/// One JSON object per line: {action, legal, depth, reward, replayed}.
std::string trace_to_jsonl(const std::vector<TraceRecord>& trace);

class TopologyEnv : public Environment {
public:
    /// @throws std::invalid_argument on an invalid config (horizon, seeds, < 2 qubits).
    explicit TopologyEnv(EnvConfig cfg);

    std::size_t observation_size() const override { return pair_count(n_); }
    std::size_t action_count() const override { return pair_count(n_); }

    std::vector<double> reset() override;
    std::vector<std::uint8_t> legal_mask() const override { return legal_actions(state_); }
    StepOutcome step(std::size_t action) override;

    void attach_memory(ReplayMemory* memory) override { memory_ = memory; }
    std::uint64_t evaluations() const override { return evaluations_; }
    std::optional<double> best_objective() const override;

    /// Objective of g averaged over the eval seeds; counts as one evaluation.
    double evaluate(const TopologyGraph& g);

    const EnvConfig& config() const { return cfg_; }
    const EnvState& state() const { return state_; }
    std::size_t horizon() const { return horizon_; }
    bool done() const { return done_; }

    const std::optional<TopologyGraph>& best_graph() const { return best_graph_; }
    const std::vector<TraceRecord>& episode_trace() const { return trace_; }
    /// Trace of the episode in which the current best objective was found.
    const std::vector<TraceRecord>& best_trace() const { return best_trace_; }

private:
    void note_evaluation(double objective, const TopologyGraph& g);

    EnvConfig cfg_;
    std::size_t n_ = 0;
    std::size_t horizon_ = 0;
    EnvState state_;
    bool done_ = true;
    ReplayMemory* memory_ = nullptr;
    std::uint64_t evaluations_ = 0;

    std::optional<double> best_;
    std::optional<TopologyGraph> best_graph_;
    bool best_in_episode_ = false;
    std::vector<TraceRecord> trace_;
    std::vector<TraceRecord> best_trace_;
};

}  // namespace qtopo::rl
