// SPDX-License-Identifier: MIT
// Copyright (c) 2026 qtopo contributors

#include "qtopo/env.hpp"

#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include <random>
#include <sstream>

using namespace qtopo;
using namespace qtopo::rl;

namespace {

Circuit cx_circuit(std::size_t n, std::initializer_list<std::pair<Qubit, Qubit>> pairs) {
    Circuit c(n);
    for (const auto& [a, b] : pairs) c.append(GateOp::pair(GateKind::CX, a, b));
    return c;
}

EnvConfig config_for(Circuit c) {
    EnvConfig cfg;
    cfg.circuit = std::move(c);
    return cfg;
}

}  // namespace

TEST(reward, printed_formula_examples) {
    EXPECT_EQ(reward_fn(100, 100, 100, RewardSign::Verbatim), 0.0);
    EXPECT_NEAR(reward_fn(100, 100, 80, RewardSign::Verbatim), -0.288, 1e-12);
    EXPECT_NEAR(reward_fn(100, 90, 110, RewardSign::Verbatim), 0.147778, 1e-6);
    EXPECT_NEAR(reward_fn(100, 100, 80, RewardSign::Negated), 0.288, 1e-12);
    EXPECT_THROW(reward_fn(0, 1, 1), std::invalid_argument);
    EXPECT_THROW(reward_fn(1, -1, 1), std::invalid_argument);
}

TEST(reward, fixed_point_and_polarity) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.5, 500.0);
    for (int i = 0; i < 10000; ++i) {
        const double d0 = u(rng), dp = u(rng), dt = u(rng);
        EXPECT_EQ(reward_fn(d0, d0, d0, RewardSign::Verbatim), 0.0);
        EXPECT_EQ(reward_fn(d0, dp, dt, RewardSign::Verbatim), -reward_fn(d0, dp, dt, RewardSign::Negated));
    }
}

TEST(env, reset_observation_and_baseline) {
    TopologyEnv env(config_for(generate_random_circuit(4, 3.0, 1)));
    const auto obs = env.reset();
    EXPECT_EQ(obs, (std::vector<double>{1, 0, 0, 1, 0, 1}));
    EXPECT_GT(env.state().d0, 0.0);
    EXPECT_EQ(env.state().d_prev, env.state().d0);
    EXPECT_EQ(env.horizon(), 8u);

    TopologyEnv again(config_for(generate_random_circuit(4, 3.0, 1)));
    again.reset();
    EXPECT_EQ(again.state().d0, env.state().d0);
}

TEST(env, legal_action_masks) {
    EnvState s;
    s.graph = TopologyGraph(4);
    EXPECT_EQ(legal_actions(s), std::vector<std::uint8_t>(6, 1));
    s.graph = make_complete(4);
    EXPECT_EQ(legal_actions(s), std::vector<std::uint8_t>(6, 0));

    s.graph = TopologyGraph(7);
    for (std::size_t v = 1; v <= 4; ++v) s.graph.add_edge(0, v);
    const auto mask = legal_actions(s);
    EXPECT_EQ(mask[edge_index(0, 5, 7)], 0);
    EXPECT_EQ(mask[edge_index(0, 6, 7)], 0);
    EXPECT_EQ(mask[edge_index(0, 1, 7)], 0);
    EXPECT_EQ(mask[edge_index(5, 6, 7)], 1);
}

TEST(env, shortcut_edge_removes_swaps) {
    TopologyEnv env(config_for(cx_circuit(3, {{0, 2}})));
    env.reset();
    EXPECT_DOUBLE_EQ(env.state().d0, 4.0);
    const StepOutcome out = env.step(edge_index(0, 2, 3));
    EXPECT_TRUE(out.info.action_legal);
    EXPECT_TRUE(out.info.evaluated);
    EXPECT_DOUBLE_EQ(out.info.objective, 1.0);
    EXPECT_LT(out.info.objective, env.state().d0);
    EXPECT_DOUBLE_EQ(out.reward, reward_fn(4.0, 4.0, 1.0, RewardSign::Negated));
    EXPECT_GT(out.reward, 0.0);
    EXPECT_EQ(env.best_objective(), 1.0);
    EXPECT_TRUE(out.done);  // triangle is complete, nothing left to add
}

TEST(env, illegal_action_is_penalized) {
    TopologyEnv env(config_for(generate_random_circuit(5, 2.0, 4)));
    env.reset();
    const auto before = env.state().observation;
    const StepOutcome out = env.step(edge_index(0, 1, 5));  // already on the path
    EXPECT_FALSE(out.info.action_legal);
    EXPECT_EQ(out.reward, -1.0);
    EXPECT_FALSE(out.info.evaluated);
    EXPECT_EQ(env.state().observation, before);
    EXPECT_EQ(env.evaluations(), 0u);
    EXPECT_THROW(env.step(999), std::out_of_range);
}

TEST(env, horizon_ends_episode) {
    EnvConfig cfg = config_for(generate_random_circuit(6, 2.0, 2));
    cfg.horizon = 3;
    TopologyEnv env(cfg);
    env.reset();
    EXPECT_FALSE(env.step(0).done);
    EXPECT_FALSE(env.step(0).done);
    EXPECT_TRUE(env.step(0).done);
    EXPECT_THROW(env.step(1), std::logic_error);
    env.reset();
    EXPECT_FALSE(env.done());
}

TEST(env, config_validation) {
    EXPECT_THROW(TopologyEnv(config_for(Circuit(1))), std::invalid_argument);
    EnvConfig cfg = config_for(generate_random_circuit(3, 2.0, 0));
    cfg.eval_seeds.clear();
    EXPECT_THROW(TopologyEnv{cfg}, std::invalid_argument);
}

TEST(env, degree_invariant_and_observation_round_trip_under_fuzzing) {
    EnvConfig cfg = config_for(generate_random_circuit(8, 1.0, 6));
    cfg.eval_seeds = {0};
    TopologyEnv env(cfg);
    std::mt19937_64 rng(8);
    for (int episode = 0; episode < 10000; ++episode) {
        env.reset();
        bool done = false;
        while (!done) {
            const StepOutcome out = env.step(rng() % env.action_count());
            done = out.done;
            const TopologyGraph& g = env.state().graph;
            for (std::size_t v = 0; v < g.size(); ++v) ASSERT_LE(g.degree(v), cfg.max_degree);
            ASSERT_EQ(env.state().observation, g.flatten_state());
            ASSERT_TRUE(std::isfinite(out.reward));
        }
        if (episode % 500 == 0) {
            const TopologyGraph& g = env.state().graph;
            EXPECT_EQ(TopologyGraph::from_state(g.flatten_state(), g.size()), g);
        }
    }
}

TEST(env, objective_trace_matches_rerouting_prefixes) {
    EnvConfig cfg = config_for(generate_random_circuit(6, 4.0, 12));
    TopologyEnv env(cfg);
    env.reset();
    std::mt19937_64 rng(1);
    TopologyGraph replay = make_line(6);
    bool done = false;
    while (!done) {
        const auto mask = env.legal_mask();
        std::size_t a = rng() % mask.size();
        while (!mask[a]) a = (a + 1) % mask.size();
        const StepOutcome out = env.step(a);
        done = out.done;
        const auto [i, j] = edge_pair(a, 6);
        replay.add_edge(i, j);
        const RouteSummary s = route_mean(cfg.circuit, replay, cfg.router, cfg.eval_seeds);
        EXPECT_DOUBLE_EQ(out.info.objective, s.depth);
    }
    EXPECT_EQ(env.episode_trace().size(), env.state().step_index);
}

TEST(env, gate_objective_swaps_the_scalar_only) {
    EnvConfig cfg = config_for(generate_random_circuit(5, 4.0, 3));
    cfg.objective = Objective::Gates;
    TopologyEnv env(cfg);
    env.reset();
    EXPECT_DOUBLE_EQ(env.state().d0, route_mean(cfg.circuit, make_line(5), cfg.router, cfg.eval_seeds).total_gates);
    const StepOutcome out = env.step(edge_index(0, 4, 5));
    TopologyGraph g = make_line(5);
    g.add_edge(0, 4);
    EXPECT_DOUBLE_EQ(out.info.objective, route_mean(cfg.circuit, g, cfg.router, cfg.eval_seeds).total_gates);
}

TEST(env, replay_memory_substitutes_evaluations) {
    EnvConfig cfg = config_for(generate_random_circuit(5, 4.0, 9));
    TopologyEnv env(cfg);
    ReplayMemory memory(2);
    env.attach_memory(&memory);
    const std::size_t a = edge_index(0, 2, 5);

    env.reset();
    const StepOutcome first = env.step(a);
    EXPECT_TRUE(first.info.evaluated);
    env.reset();
    const StepOutcome second = env.step(a);
    EXPECT_TRUE(second.info.replayed);
    EXPECT_FALSE(second.info.evaluated);
    EXPECT_EQ(second.reward, first.reward);
    EXPECT_TRUE(env.state().graph.has_edge(0, 2));
    env.reset();
    EXPECT_TRUE(env.step(a).info.replayed);
    env.reset();
    EXPECT_TRUE(env.step(a).info.evaluated);
    EXPECT_EQ(env.evaluations(), memory.stats().misses);
}

TEST(env, trace_jsonl) {
    TopologyEnv env(config_for(cx_circuit(3, {{0, 2}})));
    env.reset();
    env.step(edge_index(0, 2, 3));
    const std::string text = trace_to_jsonl(env.episode_trace());
    const auto j = nlohmann::json::parse(text.substr(0, text.find('\n')));
    EXPECT_EQ(j["action"], 1);
    EXPECT_EQ(j["legal"], true);
    EXPECT_EQ(j["depth"], 1.0);
    EXPECT_EQ(j["replayed"], false);
    EXPECT_EQ(env.best_trace().size(), 1u);
}
