// SPDX-License-Identifier: MIT
// Copyright (c) 2026 qtopo contributors

#include "qtopo/env.hpp"

#include <nlohmann/json.hpp>

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace qtopo::rl {

double reward_fn(double d0, double d_prev, double d_t, RewardSign sign) {
    if (!(d0 > 0.0) || !(d_prev > 0.0)) {
        throw std::invalid_argument("reward baselines must be positive");
    }
    const double from_start = (d_t - d0) / d0;
    const double from_prev = (d_t - d_prev) / d_prev;
    double r = 0.0;
    if (from_start < 0.0) {
        r = ((1.0 + from_start) * (1.0 + from_start) - 1.0) * std::abs(1.0 + from_prev);
    } else {
        r = -((1.0 - from_start) * (1.0 - from_start) - 1.0) * std::abs(1.0 - from_prev);
    }
    return sign == RewardSign::Negated ? -r : r;
}

std::vector<std::uint8_t> legal_actions(const EnvState& s) {
    const std::size_t n = s.graph.size();
    std::vector<std::uint8_t> mask(pair_count(n), 0);
    for (std::size_t k = 0; k < mask.size(); ++k) {
        const auto [i, j] = edge_pair(k, n);
        mask[k] = s.graph.can_add(i, j) ? 1 : 0;
    }
    return mask;
}

std::string trace_to_jsonl(const std::vector<TraceRecord>& trace) {
    std::string out;
    for (const TraceRecord& r : trace) {
        nlohmann::ordered_json j;
        j["action"] = r.action;
        j["legal"] = r.legal;
        j["depth"] = r.objective;
        j["reward"] = r.reward;
        j["replayed"] = r.replayed;
        out += j.dump();
        out += '\n';
    }
    return out;
}

namespace {

std::vector<double> to_real(const std::vector<std::uint8_t>& bits) {
    return std::vector<double>(bits.begin(), bits.end());
}

}  // namespace

TopologyEnv::TopologyEnv(EnvConfig cfg) : cfg_(std::move(cfg)), n_(cfg_.circuit.num_qubits()) {
    if (n_ < 2) throw std::invalid_argument("environment needs a circuit with at least 2 qubits");
    if (cfg_.eval_seeds.empty()) throw std::invalid_argument("eval_seeds must not be empty");
    if (cfg_.max_degree < 2) throw std::invalid_argument("max_degree must be at least 2");
    horizon_ = cfg_.horizon == 0 ? 2 * n_ : cfg_.horizon;

    // The start graph never changes, so its objective is measured once.
    TopologyGraph line(n_, cfg_.max_degree);
    for (std::size_t v = 0; v + 1 < n_; ++v) line.add_edge(v, v + 1);
    state_.graph = line;
    state_.d0 = evaluate(line);
    if (!(state_.d0 > 0.0)) throw std::invalid_argument("circuit has an empty objective on the start graph");
    evaluations_ = 0;
    best_ = state_.d0;
    best_graph_ = line;
}

std::vector<double> TopologyEnv::reset() {
    if (best_in_episode_) best_trace_ = trace_;
    best_in_episode_ = false;
    trace_.clear();

    TopologyGraph line(n_, cfg_.max_degree);
    for (std::size_t v = 0; v + 1 < n_; ++v) line.add_edge(v, v + 1);
    state_.graph = std::move(line);
    state_.step_index = 0;
    state_.d_prev = state_.d0;
    state_.observation = state_.graph.flatten_state();
    done_ = false;
    return to_real(state_.observation);
}

double TopologyEnv::evaluate(const TopologyGraph& g) {
    ++evaluations_;
    // Edges are only ever added to a connected start graph.
    assert(is_routable(cfg_.circuit, g));
    const RouteSummary s = route_mean(cfg_.circuit, g, cfg_.router, cfg_.eval_seeds);
    return cfg_.objective == Objective::Depth ? s.depth : s.total_gates;
}

void TopologyEnv::note_evaluation(double objective, const TopologyGraph& g) {
    if (!best_ || objective < *best_) {
        best_ = objective;
        best_graph_ = g;
        best_in_episode_ = true;
    }
}

std::optional<double> TopologyEnv::best_objective() const { return best_; }

StepOutcome TopologyEnv::step(std::size_t action) {
    if (done_) throw std::logic_error("step() called on a finished episode; call reset()");
    if (action >= action_count()) throw std::out_of_range("action index out of range");

    StepOutcome out;
    const auto [i, j] = edge_pair(action, n_);
    TraceRecord rec;
    rec.action = action;

    if (!state_.graph.can_add(i, j)) {
        out.reward = cfg_.illegal_penalty;
        out.info.objective = state_.d_prev;
    } else {
        state_.graph.add_edge(i, j);
        out.info.action_legal = true;
        std::optional<double> cached;
        if (memory_) cached = memory_->lookup(action);
        if (cached) {
            out.reward = *cached;
            out.info.replayed = true;
            out.info.objective = state_.d_prev;
        } else {
            const double d_t = evaluate(state_.graph);
            out.reward = reward_fn(state_.d0, state_.d_prev, d_t, cfg_.reward_sign);
            out.info.evaluated = true;
            out.info.objective = d_t;
            state_.d_prev = d_t;
            note_evaluation(d_t, state_.graph);
            if (memory_) memory_->record(action, out.reward);
        }
    }

    ++state_.step_index;
    state_.observation = state_.graph.flatten_state();
    const auto mask = legal_actions(state_);
    bool any_legal = false;
    for (auto m : mask) any_legal = any_legal || m;
    done_ = state_.step_index >= horizon_ || !any_legal;
    out.done = done_;
    out.observation = to_real(state_.observation);

    rec.legal = out.info.action_legal;
    rec.objective = out.info.objective;
    rec.reward = out.reward;
    rec.replayed = out.info.replayed;
    trace_.push_back(rec);
    if (done_ && best_in_episode_) {
        best_trace_ = trace_;
        best_in_episode_ = false;
    }
    return out;
}

}  // namespace qtopo::rl
