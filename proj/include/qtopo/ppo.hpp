// SPDX-License-Identifier: MIT
// Copyright (c) 2026 qtopo contributors

/**
 * @file ppo.hpp
 * @brief Proximal policy optimisation over a masked discrete action space,
 * with reward-replay trajectory collection.
 *
 * Each iteration collects whole episodes with the frozen policy until at
 * least batch_size steps are gathered (the environment consults the replay
 * memory before every evaluation), computes GAE advantages and
 * rewards-to-go, then runs `epochs` passes of shuffled minibatch SGD on
 *
 *   L = -E[min(rho A, clip(rho, 1-eps, 1+eps) A)] + beta KL(pi_old || pi)
 *       + c_v (V - R)^2 - c_e H(pi)
 *
 * where the KL term is exact over the legal actions of each state.
 */

#pragma once

#include "qtopo/env.hpp"
#include "qtopo/nn.hpp"
#include "qtopo/replay.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qtopo::rl {

/// Raised when a loss, gradient or parameter becomes NaN/Inf.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct TrainConfig {
    std::vector<std::size_t> policy_hidden{64, 64};
    std::vector<std::size_t> value_hidden{64, 64};
    double gamma = 0.99;
    double gae_lambda = 0.95;
    std::size_t batch_size = 512;
    std::size_t minibatch_size = 64;
    std::size_t epochs = 4;
    double lr = 0.01;
    double momentum = 0.0;
    double clip_eps = 0.2;
    double kl_coef = 0.2;
    double kl_target = 0.01;
    bool adaptive_kl = true;
    double vf_coef = 0.5;
    double entropy_coef = 0.0;
    int replay_threshold = 2;
    /// Clear the replay memory after every environment step (testing aid).
    bool clear_replay_each_step = false;
    std::size_t iterations = 100;
    std::uint64_t seed = 0;

    /// Table-2 scale: 256x256 networks, batch 4000, minibatch 128, lr 5e-5.
    static TrainConfig paper_scale();

    /// @throws std::invalid_argument for non-positive sizes/rates or clip_eps outside (0,1).
    void validate() const;
    /// Stable hash over every field, stored in checkpoints.
    std::uint64_t hash() const;
};

/// Softmax over the legal entries; illegal entries get exactly 0.
/// @throws std::invalid_argument if no action is legal.
std::vector<double> masked_policy(std::span<const double> logits, std::span<const std::uint8_t> mask);

/// Inverse-CDF draw from a masked distribution for u in [0, 1); never
/// returns an index with zero probability.
std::size_t sample_from(std::span<const double> probs, double u);

struct Step {
    std::vector<double> obs;
    std::size_t action = 0;
    double reward = 0.0;
    bool done = false;
    double logp_old = 0.0;
    double value = 0.0;
    std::vector<std::uint8_t> mask;
    std::vector<double> probs_old;
    std::vector<double> next_obs;
};

using Trajectory = std::vector<Step>;

struct Advantages {
    std::vector<double> advantages;
    std::vector<double> returns;  // discounted reward-to-go within each episode
};

/// GAE(gamma, lambda) and discounted rewards-to-go. Episodes end at steps
/// with done set; a trailing unfinished episode bootstraps from last_value.
Advantages compute_advantages(std::span<const double> rewards, std::span<const double> values,
                              std::span<const std::uint8_t> dones, double last_value, double gamma,
                              double lambda);

/// Shifts and scales to mean 0, standard deviation 1 (no-op scale if std ~ 0).
void normalize(std::vector<double>& xs);

/// One training sample with its advantage and value target.
struct Sample {
    const Step* step = nullptr;
    double advantage = 0.0;
    double target = 0.0;
};

struct LossResult {
    double total = 0.0;
    double policy = 0.0;
    double value = 0.0;
    double kl = 0.0;
    double entropy = 0.0;
    double clip_fraction = 0.0;
    double max_ratio_error = 0.0;  // max |rho - 1|
    std::vector<double> policy_grad;
    std::vector<double> value_grad;
};

struct LossWeights {
    double clip_eps = 0.2;
    double kl_coef = 0.2;
    double vf_coef = 0.5;
    double entropy_coef = 0.0;
};

/// Minibatch-mean loss and its gradients w.r.t. both networks.
/// @throws NumericalError (with the minibatch dumped) on a non-finite loss.
LossResult ppo_loss(std::span<const Sample> batch, const nn::Mlp& policy, const nn::Mlp& value,
                    const LossWeights& w);

struct IterationMetrics {
    std::size_t iteration = 0;
    double mean_reward = 0.0;
    double best_objective = 0.0;
    double total_loss = 0.0;
    double policy_loss = 0.0;
    double value_loss = 0.0;
    double kl = 0.0;
    double kl_coef = 0.0;
    double entropy = 0.0;
    double wall_time = 0.0;
    double sample_time = 0.0;
    std::uint64_t steps = 0;
    std::uint64_t episodes = 0;
    std::uint64_t router_evals = 0;
    std::uint64_t replay_hits = 0;
    std::uint64_t replay_misses = 0;
    std::uint64_t replay_evictions = 0;
};

/// CSV with header; timing columns are omitted when include_timing is false.
std::string metrics_to_csv(const std::vector<IterationMetrics>& rows, bool include_timing = true);

class PpoTrainer {
public:
    /// @throws std::invalid_argument on an invalid config.
    PpoTrainer(Environment& env, TrainConfig cfg);

    /// One collect/update round.
    IterationMetrics iterate();
    /// cfg.iterations rounds; `on_iteration` (if set) sees each row.
    std::vector<IterationMetrics> train(const std::function<void(const IterationMetrics&)>& on_iteration = {});

    /// Greedy action under the current policy.
    std::size_t act_greedy(std::span<const double> obs, std::span<const std::uint8_t> mask) const;

    const nn::Mlp& policy() const { return policy_; }
    const nn::Mlp& value() const { return value_; }
    nn::Mlp& policy() { return policy_; }
    nn::Mlp& value() { return value_; }
    const ReplayMemory& memory() const { return memory_; }
    const TrainConfig& config() const { return cfg_; }
    double kl_coef() const { return kl_coef_; }

    void save_checkpoint(std::ostream& out) const;
    /// @throws std::runtime_error on version, hash or shape mismatch.
    void load_checkpoint(std::istream& in);

private:
    Trajectory collect(double& sample_seconds, std::uint64_t& episodes);
    std::size_t sample_action(std::span<const double> probs);

    Environment& env_;
    TrainConfig cfg_;
    nn::Mlp policy_;
    nn::Mlp value_;
    nn::Sgd policy_opt_;
    nn::Sgd value_opt_;
    ReplayMemory memory_;
    std::mt19937_64 rng_;
    double kl_coef_;
    std::size_t iteration_ = 0;
};

}  // namespace qtopo::rl
