// SPDX-License-Identifier: MIT
// Copyright (c) 2026 qtopo contributors

#include "qtopo/ppo.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

namespace qtopo::rl {

TrainConfig TrainConfig::paper_scale() {
    TrainConfig c;
    c.policy_hidden = {256, 256};
    c.value_hidden = {256, 256};
    c.batch_size = 4000;
    c.minibatch_size = 128;
    c.lr = 5e-5;
    return c;
}

void TrainConfig::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0)) throw std::invalid_argument(std::string(name) + " must be positive");
    };
    positive(gamma, "gamma");
    positive(gae_lambda, "gae_lambda");
    positive(static_cast<double>(batch_size), "batch_size");
    positive(static_cast<double>(minibatch_size), "minibatch_size");
    positive(static_cast<double>(epochs), "epochs");
    positive(lr, "lr");
    positive(kl_target, "kl_target");
    if (!(clip_eps > 0.0 && clip_eps < 1.0)) throw std::invalid_argument("clip_eps must lie in (0, 1)");
    if (gamma > 1.0 || gae_lambda > 1.0) throw std::invalid_argument("gamma and gae_lambda must be <= 1");
    if (kl_coef < 0.0 || vf_coef < 0.0 || entropy_coef < 0.0 || momentum < 0.0) {
        throw std::invalid_argument("coefficients must be non-negative");
    }
    if (replay_threshold < 0) throw std::invalid_argument("replay_threshold must be >= 0");
    for (std::size_t w : policy_hidden) positive(static_cast<double>(w), "policy width");
    for (std::size_t w : value_hidden) positive(static_cast<double>(w), "value width");
}

std::uint64_t TrainConfig::hash() const {
    std::ostringstream s;
    s.precision(17);
    for (auto w : policy_hidden) s << w << ',';
    s << '|';
    for (auto w : value_hidden) s << w << ',';
    s << '|' << gamma << '|' << gae_lambda << '|' << batch_size << '|' << minibatch_size << '|' << epochs
      << '|' << lr << '|' << momentum << '|' << clip_eps << '|' << kl_coef << '|' << kl_target << '|'
      << adaptive_kl << '|' << vf_coef << '|' << entropy_coef << '|' << replay_threshold << '|'
      << clear_replay_each_step << '|' << iterations << '|' << seed;
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s.str()) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::vector<double> masked_policy(std::span<const double> logits, std::span<const std::uint8_t> mask) {
    if (logits.size() != mask.size()) throw std::invalid_argument("logits and mask differ in length");
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < logits.size(); ++k) {
        if (mask[k]) top = std::max(top, logits[k]);
    }
    if (top == -std::numeric_limits<double>::infinity()) throw std::invalid_argument("no legal action");
    std::vector<double> p(logits.size(), 0.0);
    double z = 0.0;
    for (std::size_t k = 0; k < logits.size(); ++k) {
        if (mask[k]) z += p[k] = std::exp(logits[k] - top);
    }
    for (double& x : p) x /= z;
    return p;
}

Advantages compute_advantages(std::span<const double> rewards, std::span<const double> values,
                              std::span<const std::uint8_t> dones, double last_value, double gamma,
                              double lambda) {
    const std::size_t n = rewards.size();
    if (values.size() != n || dones.size() != n) throw std::invalid_argument("trajectory columns differ in length");
    if (n == 0) throw std::invalid_argument("empty trajectory");
    Advantages out;
    out.advantages.assign(n, 0.0);
    out.returns.assign(n, 0.0);
    double gae = 0.0;
    double ret = last_value;
    double next_value = last_value;
    for (std::size_t t = n; t-- > 0;) {
        if (dones[t]) {
            next_value = 0.0;
            gae = 0.0;
            ret = 0.0;
        }
        const double delta = rewards[t] + gamma * next_value - values[t];
        gae = delta + gamma * lambda * gae;
        ret = rewards[t] + gamma * ret;
        out.advantages[t] = gae;
        out.returns[t] = ret;
        next_value = values[t];
    }
    return out;
}

void normalize(std::vector<double>& xs) {
    if (xs.empty()) return;
    const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    const double sd = std::sqrt(var / static_cast<double>(xs.size()));
    for (double& x : xs) x = sd > 1e-8 ? (x - mean) / sd : x - mean;
}

namespace {

std::string dump_batch(std::span<const Sample> batch) {
    std::ostringstream s;
    s.precision(17);
    for (const Sample& smp : batch) {
        s << "action=" << smp.step->action << " logp_old=" << smp.step->logp_old << " adv=" << smp.advantage
          << " target=" << smp.target << " obs=[";
        for (double x : smp.step->obs) s << x << ' ';
        s << "]\n";
    }
    return s.str();
}

}  // namespace

LossResult ppo_loss(std::span<const Sample> batch, const nn::Mlp& policy, const nn::Mlp& value,
                    const LossWeights& w) {
    LossResult res;
    res.policy_grad.assign(policy.params().size(), 0.0);
    res.value_grad.assign(value.params().size(), 0.0);
    if (batch.empty()) return res;
    const double inv = 1.0 / static_cast<double>(batch.size());
    std::size_t clipped = 0;

    nn::Mlp::Tape ptape;
    nn::Mlp::Tape vtape;
    std::vector<double> dlogits;
    for (const Sample& smp : batch) {
        const Step& st = *smp.step;
        const std::vector<double> logits = policy.forward(st.obs, ptape);
        for (double z : logits) {
            if (!std::isfinite(z)) throw NumericalError("non-finite policy logits on minibatch:\n" + dump_batch(batch));
        }
        const std::vector<double> p = masked_policy(logits, st.mask);
        const std::size_t a = st.action;
        const double logp = std::log(p[a]);
        const double ratio = std::exp(logp - st.logp_old);
        res.max_ratio_error = std::max(res.max_ratio_error, std::abs(ratio - 1.0));

        const double adv = smp.advantage;
        const double unclipped = ratio * adv;
        const double clipped_ratio = std::clamp(ratio, 1.0 - w.clip_eps, 1.0 + w.clip_eps);
        const double clipped_obj = clipped_ratio * adv;
        const double surrogate = std::min(unclipped, clipped_obj);
        if (clipped_ratio != ratio) ++clipped;
        // The clipped branch is constant in theta, so only the unclipped one carries gradient.
        const double dlogp = unclipped <= clipped_obj ? -ratio * adv : 0.0;

        double kl = 0.0;
        double entropy = 0.0;
        for (std::size_t k = 0; k < p.size(); ++k) {
            if (!st.mask[k]) continue;
            if (st.probs_old[k] > 0.0) kl += st.probs_old[k] * (std::log(st.probs_old[k]) - std::log(p[k]));
            if (p[k] > 0.0) entropy -= p[k] * std::log(p[k]);
        }

        dlogits.assign(p.size(), 0.0);
        for (std::size_t k = 0; k < p.size(); ++k) {
            if (!st.mask[k]) continue;
            const double onehot = k == a ? 1.0 : 0.0;
            double g = dlogp * (onehot - p[k]) + w.kl_coef * (p[k] - st.probs_old[k]);
            if (w.entropy_coef > 0.0 && p[k] > 0.0) g += w.entropy_coef * p[k] * (std::log(p[k]) + entropy);
            dlogits[k] = g * inv;
        }
        policy.backward(ptape, dlogits, res.policy_grad);

        const double v = value.forward(st.obs, vtape)[0];
        const double err = v - smp.target;
        const double dv = 2.0 * w.vf_coef * err * inv;
        value.backward(vtape, std::span<const double>(&dv, 1), res.value_grad);

        res.policy += -surrogate * inv;
        res.value += err * err * inv;
        res.kl += kl * inv;
        res.entropy += entropy * inv;
    }
    res.clip_fraction = static_cast<double>(clipped) * inv;
    res.total = res.policy + w.kl_coef * res.kl + w.vf_coef * res.value - w.entropy_coef * res.entropy;
    if (!std::isfinite(res.total)) {
        throw NumericalError("non-finite PPO loss on minibatch:\n" + dump_batch(batch));
    }
    return res;
}

std::string metrics_to_csv(const std::vector<IterationMetrics>& rows, bool include_timing) {
    std::string out =
        "iteration,mean_reward,best_depth,total_loss,policy_loss,value_loss,kl,kl_coef,entropy,steps,episodes,"
        "router_evals,replay_hits,replay_misses,replay_evictions,evaluations_saved";
    if (include_timing) out += ",wall_time,sample_time";
    out += '\n';
    char buf[512];
    for (const IterationMetrics& m : rows) {
        std::snprintf(buf, sizeof buf, "%zu,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%llu,%llu,%llu,%llu,%llu,%llu,%llu",
                      m.iteration, m.mean_reward, m.best_objective, m.total_loss, m.policy_loss, m.value_loss, m.kl,
                      m.kl_coef, m.entropy, static_cast<unsigned long long>(m.steps),
                      static_cast<unsigned long long>(m.episodes), static_cast<unsigned long long>(m.router_evals),
                      static_cast<unsigned long long>(m.replay_hits), static_cast<unsigned long long>(m.replay_misses),
                      static_cast<unsigned long long>(m.replay_evictions),
                      static_cast<unsigned long long>(m.replay_hits));
        out += buf;
        if (include_timing) {
            std::snprintf(buf, sizeof buf, ",%.6f,%.6f", m.wall_time, m.sample_time);
            out += buf;
        }
        out += '\n';
    }
    return out;
}

namespace {

std::vector<std::size_t> layer_sizes(std::size_t in, const std::vector<std::size_t>& hidden, std::size_t out) {
    std::vector<std::size_t> s{in};
    s.insert(s.end(), hidden.begin(), hidden.end());
    s.push_back(out);
    return s;
}

const TrainConfig& validated(const TrainConfig& cfg) {
    cfg.validate();
    return cfg;
}

}  // namespace

PpoTrainer::PpoTrainer(Environment& env, TrainConfig cfg)
    : env_(env),
      cfg_(validated(cfg)),
      policy_(layer_sizes(env.observation_size(), cfg_.policy_hidden, env.action_count())),
      value_(layer_sizes(env.observation_size(), cfg_.value_hidden, 1)),
      policy_opt_(cfg_.lr, cfg_.momentum),
      value_opt_(cfg_.lr, cfg_.momentum),
      memory_(cfg_.replay_threshold),
      rng_(cfg_.seed),
      kl_coef_(cfg_.kl_coef) {
    // Near-uniform initial policy: the output layer is scaled down by 0.01.
    policy_.init_orthogonal(cfg_.seed * 2 + 1, std::sqrt(2.0), 0.01);
    value_.init_orthogonal(cfg_.seed * 2 + 2, std::sqrt(2.0), 1.0);
    env_.attach_memory(&memory_);
}

std::size_t sample_from(std::span<const double> probs, double u) {
    double acc = 0.0;
    std::size_t last = 0;
    for (std::size_t k = 0; k < probs.size(); ++k) {
        if (probs[k] <= 0.0) continue;
        acc += probs[k];
        last = k;
        if (u < acc) return k;
    }
    return last;
}

std::size_t PpoTrainer::sample_action(std::span<const double> probs) {
    return sample_from(probs, static_cast<double>(rng_() >> 11) * 0x1.0p-53);
}

std::size_t PpoTrainer::act_greedy(std::span<const double> obs, std::span<const std::uint8_t> mask) const {
    const std::vector<double> p = masked_policy(policy_.forward(obs), mask);
    return static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin());
}

Trajectory PpoTrainer::collect(double& sample_seconds, std::uint64_t& episodes) {
    Trajectory traj;
    traj.reserve(cfg_.batch_size + 64);
    const auto t0 = std::chrono::steady_clock::now();
    while (traj.size() < cfg_.batch_size) {
        std::vector<double> obs = env_.reset();
        ++episodes;
        for (;;) {
            Step st;
            st.mask = env_.legal_mask();
            st.probs_old = masked_policy(policy_.forward(obs), st.mask);
            st.action = sample_action(st.probs_old);
            st.logp_old = std::log(st.probs_old[st.action]);
            st.value = value_.forward(obs)[0];
            StepOutcome out = env_.step(st.action);
            if (cfg_.clear_replay_each_step) memory_.clear();
            st.obs = std::move(obs);
            st.reward = out.reward;
            st.done = out.done;
            st.next_obs = out.observation;
            obs = std::move(out.observation);
            traj.push_back(std::move(st));
            if (traj.back().done) break;
        }
    }
    sample_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return traj;
}

IterationMetrics PpoTrainer::iterate() {
    const auto t0 = std::chrono::steady_clock::now();
    const ReplayStats before = memory_.stats();
    const std::uint64_t evals_before = env_.evaluations();

    IterationMetrics m;
    m.iteration = ++iteration_;
    Trajectory traj = collect(m.sample_time, m.episodes);
    m.steps = traj.size();

    std::vector<double> rewards, values;
    std::vector<std::uint8_t> dones;
    for (const Step& st : traj) {
        rewards.push_back(st.reward);
        values.push_back(st.value);
        dones.push_back(st.done ? 1 : 0);
    }
    m.mean_reward = std::accumulate(rewards.begin(), rewards.end(), 0.0) / static_cast<double>(rewards.size());
    const double last_value = traj.back().done ? 0.0 : value_.forward(traj.back().next_obs)[0];
    Advantages adv = compute_advantages(rewards, values, dones, last_value, cfg_.gamma, cfg_.gae_lambda);
    normalize(adv.advantages);

    std::vector<Sample> samples(traj.size());
    for (std::size_t i = 0; i < traj.size(); ++i) samples[i] = {&traj[i], adv.advantages[i], adv.returns[i]};

    const LossWeights weights{cfg_.clip_eps, kl_coef_, cfg_.vf_coef, cfg_.entropy_coef};
    std::vector<std::size_t> order(samples.size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<Sample> mb;
    std::size_t updates = 0;
    for (std::size_t epoch = 0; epoch < cfg_.epochs; ++epoch) {
        for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng_() % i]);
        for (std::size_t start = 0; start < order.size(); start += cfg_.minibatch_size) {
            mb.clear();
            for (std::size_t k = start; k < std::min(order.size(), start + cfg_.minibatch_size); ++k) {
                mb.push_back(samples[order[k]]);
            }
            const LossResult loss = ppo_loss(mb, policy_, value_, weights);
            policy_opt_.step(policy_.params(), loss.policy_grad);
            value_opt_.step(value_.params(), loss.value_grad);
            if (!policy_.all_finite() || !value_.all_finite()) {
                throw NumericalError("non-finite parameters after update at iteration " +
                                     std::to_string(m.iteration) + ", minibatch:\n" + dump_batch(mb));
            }
            m.total_loss += loss.total;
            m.policy_loss += loss.policy;
            m.value_loss += loss.value;
            m.kl += loss.kl;
            m.entropy += loss.entropy;
            ++updates;
        }
    }
    const double u = static_cast<double>(updates);
    m.total_loss /= u;
    m.policy_loss /= u;
    m.value_loss /= u;
    m.kl /= u;
    m.entropy /= u;
    m.kl_coef = kl_coef_;
    if (cfg_.adaptive_kl) {
        if (m.kl > 1.5 * cfg_.kl_target) {
            kl_coef_ *= 2.0;
        } else if (m.kl < cfg_.kl_target / 1.5) {
            kl_coef_ *= 0.5;
        }
    }

    const ReplayStats& after = memory_.stats();
    m.replay_hits = after.hits - before.hits;
    m.replay_misses = after.misses - before.misses;
    m.replay_evictions = after.evictions - before.evictions;
    m.router_evals = env_.evaluations() - evals_before;
    m.best_objective = env_.best_objective().value_or(std::numeric_limits<double>::quiet_NaN());
    m.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return m;
}

std::vector<IterationMetrics> PpoTrainer::train(const std::function<void(const IterationMetrics&)>& on_iteration) {
    std::vector<IterationMetrics> rows;
    rows.reserve(cfg_.iterations);
    for (std::size_t i = 0; i < cfg_.iterations; ++i) {
        rows.push_back(iterate());
        if (on_iteration) on_iteration(rows.back());
    }
    return rows;
}

namespace {

void write_net(std::ostream& out, const char* tag, const nn::Mlp& net) {
    out << tag;
    for (std::size_t s : net.sizes()) out << ' ' << s;
    out << '\n';
    char buf[40];
    for (double p : net.params()) {
        std::snprintf(buf, sizeof buf, "%.17g\n", p);
        out << buf;
    }
}

void read_net(std::istream& in, const char* tag, nn::Mlp& net) {
    std::string word;
    if (!(in >> word) || word != tag) throw std::runtime_error(std::string("checkpoint: expected ") + tag);
    for (std::size_t want : net.sizes()) {
        std::size_t got = 0;
        if (!(in >> got) || got != want) throw std::runtime_error(std::string("checkpoint: ") + tag + " shape mismatch");
    }
    for (double& p : net.params()) {
        if (!(in >> p)) throw std::runtime_error("checkpoint: truncated parameters");
    }
}

}  // namespace

void PpoTrainer::save_checkpoint(std::ostream& out) const {
    char buf[64];
    out << "qtopo-checkpoint 1\n";
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(cfg_.hash()));
    out << "config_hash " << buf << '\n';
    std::snprintf(buf, sizeof buf, "%.17g", kl_coef_);
    out << "kl_coef " << buf << '\n';
    out << "iteration " << iteration_ << '\n';
    write_net(out, "policy", policy_);
    write_net(out, "value", value_);
}

void PpoTrainer::load_checkpoint(std::istream& in) {
    std::string word;
    int version = 0;
    if (!(in >> word >> version) || word != "qtopo-checkpoint" || version != 1) {
        throw std::runtime_error("checkpoint: unsupported format");
    }
    std::string hash;
    if (!(in >> word >> hash) || word != "config_hash") throw std::runtime_error("checkpoint: missing config hash");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(cfg_.hash()));
    if (hash != buf) throw std::runtime_error("checkpoint: config hash mismatch");
    if (!(in >> word >> kl_coef_) || word != "kl_coef") throw std::runtime_error("checkpoint: missing kl_coef");
    if (!(in >> word >> iteration_) || word != "iteration") throw std::runtime_error("checkpoint: missing iteration");
    read_net(in, "policy", policy_);
    read_net(in, "value", value_);
}

}  // namespace qtopo::rl
