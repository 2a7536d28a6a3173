// SPDX-License-Identifier: MIT
// Copyright (c) 2026 qtopo contributors

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.
//
// usage: acceptance <path to qtopo executable>

#include "cli.hpp"

#include "qtopo/bench.hpp"
#include "qtopo/layout.hpp"
#include "qtopo/ppo.hpp"
#include "qtopo/replay.hpp"

#include "bandit_env.hpp"
#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

namespace fs = std::filesystem;
using namespace qtopo;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

fs::path scratch() {
    static const fs::path root = [] {
        fs::path p = fs::temp_directory_path() / "qtopo_acceptance";
        fs::remove_all(p);
        fs::create_directories(p);
        return p;
    }();
    return root;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

TopologyGraph random_graph(std::size_t n, std::size_t extra, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    TopologyGraph g(n);
    for (std::size_t v = 1; v < n; ++v) {
        std::size_t u = rng() % v;
        while (!g.can_add(u, v)) u = rng() % v;
        g.add_edge(u, v);
    }
    for (std::size_t k = 0; k < extra; ++k) {
        const std::size_t a = rng() % n, b = rng() % n;
        if (a != b && g.can_add(a, b)) g.add_edge(a, b);
    }
    return g;
}

TrainSetup desk_setup(std::size_t iterations, std::uint64_t seed) {
    TrainSetup s;
    s.train.policy_hidden = {64, 64};
    s.train.value_hidden = {64, 64};
    s.train.iterations = iterations;
    s.train.seed = seed;
    return s;
}

// --- 1 ---------------------------------------------------------------------

Verdict relative_depth_reduction() {
    std::size_t not_worse = 0;
    std::vector<double> reductions;
    double slowest = 0.0;
    std::string failures;
    for (std::uint64_t k = 0; k < 10; ++k) {
        const std::size_t n = 6 + k % 5;
        const std::string spec = fmt("random:%zu:10:%llu", n, static_cast<unsigned long long>(100 + k));
        const fs::path out = scratch() / fmt("c1_%llu", static_cast<unsigned long long>(k));
        std::ostringstream sink;
        const auto t0 = Clock::now();
        const int code = cli::run({"qtopo", "--out", out.string(), "train", spec, "--hidden", "64,64", "--iterations",
                                   "50", "--seed", std::to_string(k)},
                                  sink, sink);
        slowest = std::max(slowest, seconds_since(t0));
        if (code != 0) {
            failures += " " + spec;
            continue;
        }
        const Circuit c = cli::load_circuit(spec);
        const TopologyGraph tailored = cli::load_topology("file:" + (out / "best_topology.txt").string());
        const BenchRow row = compare_topologies(spec, c, baseline_grid(n), "grid", tailored, {});
        if (row.tailored.depth <= row.baseline.depth) ++not_worse;
        reductions.push_back(row.reduction_pct);
    }
    const double med = median(reductions);
    Verdict v;
    v.pass = failures.empty() && not_worse >= 6 && med >= 10.0 && slowest <= 900.0;
    v.detail = fmt("%zu/10 circuits not worse than the square grid, median reduction %.1f%%, slowest run %.1fs",
                   not_worse, med, slowest);
    if (!failures.empty()) v.detail += "; training failed for" + failures;
    return v;
}

// --- 2 ---------------------------------------------------------------------

Verdict scaling_trend() {
    const double factors[3] = {10.0, 20.0, 35.0};
    double med[3];
    for (int f = 0; f < 3; ++f) {
        std::vector<double> reductions;
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            const Circuit c = generate_random_circuit(6, factors[f], 200 + seed);
            const TrainOutcome t = train_topology(c, desk_setup(50, seed), {});
            reductions.push_back(compare_topologies("c", c, baseline_grid(6), "grid", t.best, {}).reduction_pct);
        }
        med[f] = median(reductions);
    }
    // Three factors give three ordered pairs: (10,20), (20,35), (10,35).
    const int rising = (med[1] >= med[0]) + (med[2] >= med[1]) + (med[2] >= med[0]);
    return {rising >= 2, fmt("median reduction %.1f%% / %.1f%% / %.1f%% at factors 10 / 20 / 35; %d of 3 "
                             "comparisons non-decreasing",
                             med[0], med[1], med[2], rising)};
}

// --- 3 ---------------------------------------------------------------------

Verdict replay_ablation() {
    bool accounting = true;
    double worst_share = 0.0;
    std::vector<double> gaps;
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        const Circuit c = generate_random_circuit(7, 10.0, 300 + seed);
        std::uint64_t evals[2] = {0, 0};
        double best[2] = {0, 0};
        for (int which = 0; which < 2; ++which) {
            TrainSetup s = desk_setup(50, seed);
            s.train.replay_threshold = which == 0 ? 0 : 2;
            const TrainOutcome t = train_topology(c, s, {});
            for (const auto& m : t.metrics) {
                if (m.iteration > 1) evals[which] += m.router_evals;
            }
            best[which] = t.best_objective;
        }
        const double share = static_cast<double>(evals[1]) / static_cast<double>(evals[0]);
        worst_share = std::max(worst_share, share);
        accounting = accounting && share <= 0.8;
        gaps.push_back(std::abs(best[1] - best[0]) / best[0]);
    }
    const double gap = median(gaps);
    return {accounting && gap <= 0.10,
            fmt("replay needs at most %.1f%% of the router evaluations after iteration 1; median best-depth gap "
                "%.2f%%",
                100 * worst_share, 100 * gap)};
}

// --- 4 ---------------------------------------------------------------------

Verdict router_correctness() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(4);
    std::size_t verified = 0;
    for (int t = 0; t < 1000; ++t) {
        const std::size_t n = 2 + rng() % 9;
        const TopologyGraph g = random_graph(n + rng() % 4, rng() % 8, rng());
        const Circuit c = generate_random_circuit(n, 1.0 + static_cast<double>(rng() % 6), rng());
        if (verify_routing(c, route(c, g, {}, rng()))) ++verified;
    }

    // Every CX sequence up to the given length on each small topology.
    std::size_t cases = 0, within = 0;
    double worst_ratio = 1.0;
    auto judge = [&](const Circuit& c, const TopologyGraph& g, std::uint64_t seed) {
        const auto best = oracle::min_swaps(c, g);
        const std::size_t got = route(c, g, {}, seed).swap_count;
        ++cases;
        if (best && got <= 2 * *best) ++within;
        if (best && *best > 0) worst_ratio = std::max(worst_ratio, static_cast<double>(got) / static_cast<double>(*best));
    };
    const std::vector<std::pair<TopologyGraph, std::size_t>> small{
        {make_line(3), 6}, {make_line(4), 5}, {random_graph(4, 0, 1), 5}, {make_line(5), 4}, {random_graph(5, 2, 2), 4}};
    for (const auto& [g, max_len] : small) {
        const std::size_t n = g.size();
        std::vector<std::pair<Qubit, Qubit>> pairs;
        for (Qubit a = 0; a < n; ++a) {
            for (Qubit b = a + 1; b < n; ++b) pairs.emplace_back(a, b);
        }
        std::vector<std::size_t> digits;
        for (std::size_t len = 1; len <= max_len; ++len) {
            digits.assign(len, 0);
            for (;;) {
                Circuit c(n);
                for (std::size_t d : digits) c.append(GateOp::pair(GateKind::CX, pairs[d].first, pairs[d].second));
                judge(c, g, cases);
                std::size_t pos = 0;
                while (pos < len && ++digits[pos] == pairs.size()) digits[pos++] = 0;
                if (pos == len) break;
            }
        }
    }
    // Six-gate circuits on five qubits, sampled.
    for (int t = 0; t < 3000; ++t) {
        const TopologyGraph g = t % 2 ? make_line(5) : random_graph(5, rng() % 3, rng());
        Circuit c(5);
        for (int k = 0; k < 6; ++k) {
            const Qubit a = rng() % 5;
            Qubit b = rng() % 4;
            if (b >= a) ++b;
            c.append(GateOp::pair(GateKind::CX, a, b));
        }
        judge(c, g, rng());
    }

    std::size_t complete_ok = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const Circuit c = generate_random_circuit(2 + seed % 12, 1.0 + static_cast<double>(seed % 8), seed);
        const RoutedCircuit rc = route(c, make_complete(c.num_qubits()), {}, seed);
        if (rc.swap_count == 0 && rc.depth == logical_depth(c)) ++complete_ok;
    }
    const double elapsed = seconds_since(t0);
    return {verified == 1000 && within == cases && complete_ok == 200 && elapsed <= 120.0,
            fmt("verified %zu/1000 fuzzed routings; %zu/%zu small cases within 2x the optimal swap count (worst "
                "%.2fx); %zu/200 complete-graph routings swap-free at logical depth; %.1fs",
                verified, within, cases, worst_ratio, complete_ok, elapsed)};
}

// --- 5 ---------------------------------------------------------------------

Verdict ppo_numerics() {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> normal(0.0, 1.0);
    auto steps_for = [&](const nn::Mlp& old, std::size_t count) {
        std::vector<rl::Step> steps(count);
        for (rl::Step& st : steps) {
            st.obs.resize(old.input_size());
            for (double& x : st.obs) x = normal(rng);
            st.mask.assign(old.output_size(), 1);
            st.mask[rng() % st.mask.size()] = 0;
            st.probs_old = rl::masked_policy(old.forward(st.obs), st.mask);
            st.action = rl::sample_from(st.probs_old, std::uniform_real_distribution<double>(0, 1)(rng));
            st.logp_old = std::log(st.probs_old[st.action]);
        }
        return steps;
    };

    double worst = 0.0;
    for (int net = 0; net < 20; ++net) {
        const std::size_t in = 1 + rng() % 4, out = 2 + rng() % 4, w = 1 + rng() % 5;
        nn::Mlp policy({in, w, w, out}), value({in, w, w, 1});
        policy.init_orthogonal(rng(), 1.0, 1.0);
        value.init_orthogonal(rng(), 1.0, 1.0);
        nn::Mlp old = policy;
        for (double& x : old.params()) x += 0.3 * normal(rng);
        const auto steps = steps_for(old, 6);
        std::vector<rl::Sample> batch;
        for (const auto& st : steps) batch.push_back({&st, normal(rng), normal(rng)});
        const rl::LossWeights weights{0.2, 0.3, 0.5, 0.0};
        const rl::LossResult res = rl::ppo_loss(batch, policy, value, weights);
        for (nn::Mlp* target : {&policy, &value}) {
            const auto& analytic = target == &policy ? res.policy_grad : res.value_grad;
            for (std::size_t l = 0; l < target->layer_count(); ++l) {
                const auto [b, e] = target->layer_range(l);
                double diff = 0, scale = 0;
                for (std::size_t k = b; k < e; ++k) {
                    const double keep = target->params()[k];
                    target->params()[k] = keep + 1e-5;
                    const double up = rl::ppo_loss(batch, policy, value, weights).total;
                    target->params()[k] = keep - 1e-5;
                    const double down = rl::ppo_loss(batch, policy, value, weights).total;
                    target->params()[k] = keep;
                    const double numeric = (up - down) / 2e-5;
                    diff += (analytic[k] - numeric) * (analytic[k] - numeric);
                    scale += numeric * numeric;
                }
                worst = std::max(worst, std::sqrt(diff) / std::max(std::sqrt(scale), 1e-10));
            }
        }
    }

    nn::Mlp policy({3, 16, 16, 5}), value({3, 16, 16, 1});
    policy.init_orthogonal(1, std::sqrt(2.0), 0.01);
    value.init_orthogonal(2, std::sqrt(2.0), 1.0);
    const auto steps = steps_for(policy, 128);
    std::vector<rl::Sample> batch;
    for (const auto& st : steps) batch.push_back({&st, normal(rng), normal(rng)});
    const rl::LossResult same = rl::ppo_loss(batch, policy, value, {});
    const bool identity = same.max_ratio_error == 0.0 && same.kl == 0.0;

    testing::BanditEnv bandit;
    rl::TrainConfig cfg;
    cfg.policy_hidden = {16};
    cfg.value_hidden = {16};
    cfg.batch_size = 64;
    cfg.minibatch_size = 16;
    cfg.lr = 0.05;
    cfg.seed = 1;
    rl::PpoTrainer trainer(bandit, cfg);
    const auto t0 = Clock::now();
    double reward = 0.0;
    std::size_t iterations = 0;
    while (iterations < 200 && reward < 0.95 * bandit.optimum()) {
        reward = trainer.iterate().mean_reward;
        ++iterations;
    }
    const double elapsed = seconds_since(t0);
    return {worst <= 1e-4 && identity && reward >= 0.95 * bandit.optimum() && elapsed <= 30.0,
            fmt("worst per-layer gradient error %.2e; ratio-1/KL-0 identity %s; bandit mean reward %.3f after %zu "
                "iterations (%.2fs)",
                worst, identity ? "holds" : "broken", reward, iterations, elapsed)};
}

// --- 6 ---------------------------------------------------------------------

Verdict reward_function() {
    using rl::RewardSign;
    const double e1 = rl::reward_fn(100, 100, 80, RewardSign::Verbatim);
    const double e2 = rl::reward_fn(100, 90, 110, RewardSign::Verbatim);
    const double e3 = rl::reward_fn(100, 100, 100, RewardSign::Verbatim);
    bool examples = std::abs(e1 + 0.288) <= 1e-6 && std::abs(e2 - 0.147778) <= 1e-6 && e3 == 0.0;
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(1.0, 400.0);
    std::size_t exact = 0, fixed = 0;
    for (int k = 0; k < 10000; ++k) {
        const double d0 = u(rng), dp = u(rng), dt = u(rng);
        if (rl::reward_fn(d0, dp, dt, RewardSign::Verbatim) == -rl::reward_fn(d0, dp, dt, RewardSign::Negated)) {
            ++exact;
        }
        for (RewardSign s : {RewardSign::Verbatim, RewardSign::Negated}) fixed += rl::reward_fn(d0, d0, d0, s) == 0.0;
    }
    return {examples && exact == 10000 && fixed == 20000,
            fmt("examples %.6f / %.6f / %.1f; fixed point exact in %zu/20000; sign modes negate exactly in %zu/10000",
                e1, e2, e3, fixed, exact)};
}

// --- 7 ---------------------------------------------------------------------

Verdict replay_memory() {
    rl::ReplayMemory m;
    m.insert(3, 0.5, 2);
    const auto h1 = m.lookup(3);
    const bool kept = m.size() == 1;
    const auto h2 = m.lookup(3);
    const bool evicted = m.size() == 0 && m.stats().evictions == 1;
    const auto h3 = m.lookup(3);
    const bool trace = h1 == 0.5 && kept && h2 == 0.5 && evicted && !h3;

    rl::ReplayMemory fuzz;
    std::mt19937_64 rng(7);
    std::uint64_t lookups = 0;
    for (int op = 0; op < 100000; ++op) {
        const std::size_t a = rng() % 32;
        if (rng() % 3 == 0) {
            fuzz.insert(a, static_cast<double>(op), 1 + static_cast<int>(rng() % 4));
        } else {
            fuzz.lookup(a);
            ++lookups;
        }
    }
    const auto& s = fuzz.stats();
    return {trace && s.hits + s.misses == lookups,
            fmt("threshold-2 trace %s; %llu hits + %llu misses over %llu lookups", trace ? "exact" : "wrong",
                static_cast<unsigned long long>(s.hits), static_cast<unsigned long long>(s.misses),
                static_cast<unsigned long long>(lookups))};
}

// --- 8 ---------------------------------------------------------------------

Verdict layout_quality() {
    std::mt19937_64 rng(8);
    std::size_t agree = 0;
    for (int trial = 0; trial < 500; ++trial) {
        TopologyGraph g(8, 7);
        for (std::size_t i = 0; i < 8; ++i) {
            for (std::size_t j = i + 1; j < 8; ++j) {
                if (rng() % 3 == 0) g.add_edge(i, j);
            }
        }
        std::set<std::pair<long long, long long>> used;
        std::vector<std::pair<long long, long long>> xy;
        const long long span = trial % 2 ? 4 : 1000;
        while (xy.size() < 8) {
            const std::pair<long long, long long> q{static_cast<long long>(rng() % span),
                                                     static_cast<long long>(rng() % span)};
            if (used.insert(q).second) xy.push_back(q);
        }
        std::vector<Point> pos;
        for (const auto& [x, y] : xy) pos.push_back({static_cast<double>(x), static_cast<double>(y)});
        agree += count_crossings(pos, g) == oracle::crossings_brute_force(xy, g.edges());
    }

    std::size_t bijective = 0;
    const TopologyGraph big = random_graph(40, 40, 80);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const GridLayout l = layout(big, seed);
        bijective += std::set<GridPoint>(l.coords.begin(), l.coords.end()).size() == 40;
    }

    const std::vector<std::pair<std::string, TopologyGraph>> graphs{{"grid3x3", make_grid(3, 3)},
                                                                    {"line10", make_line(10)},
                                                                    {"random12", random_graph(12, 12, 81)},
                                                                    {"random40", big}};
    std::size_t improved = 0;
    std::string medians;
    for (const auto& [name, g] : graphs) {
        std::vector<double> start, final;
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            start.push_back(static_cast<double>(count_crossings(circular_placement(g.size(), seed), g)));
            final.push_back(static_cast<double>(layout(g, seed).crossing_count));
        }
        improved += median(final) <= median(start);
        medians += fmt(" %s %.0f->%.0f", name.c_str(), median(start), median(final));
    }
    return {agree == 500 && bijective == 20 && improved == graphs.size(),
            fmt("crossing counter agrees with the oracle on %zu/500 layouts; %zu/20 runs bijective; median crossings",
                agree, bijective) +
                medians};
}

// --- 9 ---------------------------------------------------------------------

Verdict formulas() {
    const double idle_a = idle_ratio(108, 5, 92);
    const double idle_b = idle_ratio(1, 2, 1);
    const double idle_c = idle_ratio(12, 3, 4);
    const std::vector<double> p{0.5, 0.5}, q{0.25, 0.75}, one{1, 0}, other{0, 1};
    const double f1 = distribution_fidelity(p, q);
    const double f2 = distribution_fidelity(p, p);
    const double f3 = distribution_fidelity(one, other);
    const bool pass = std::abs(idle_a - 0.765217) <= 1e-6 && std::abs(idle_b - 0.5) <= 1e-6 && idle_c == 0.0 &&
                      std::abs(f1 - 0.933013) <= 1e-6 && std::abs(f2 - 1.0) <= 1e-6 && f3 == 0.0;
    return {pass, fmt("idle (108,5,92) = %.4f%%, (1,2,1) = %.6f, packed = %.1f; fidelity %.6f / %.6f / %.6f",
                      100 * idle_a, idle_b, idle_c, f1, f2, f3)};
}

// --- 10 --------------------------------------------------------------------

Verdict reproducibility(const std::string& exe) {
    const fs::path base = scratch() / "c10";
    fs::create_directories(base);
    std::ofstream(base / "c4.txt") << "4\n0 1\n1 2\n2 3\n0 3\n";
    const std::vector<std::pair<std::string, std::string>> commands{
        {"route", "route random:7:6:1 --topology grid:3x3 --seeds 3"},
        {"train", "train random:6:6:2 --iterations 5 --batch 128"},
        {"layout", "layout file:" + (base / "c4.txt").string() + " --restarts 3 --sparse 2"},
        {"bench", "bench --generate 2 --qubits 5-6 --factor 3 --iterations 3 --batch 64"},
        {"metrics", "metrics random:6:6:2"},
    };
    std::size_t identical = 0, files = 0;
    std::string broken;
    for (const auto& [name, args] : commands) {
        for (const char* run : {"a", "b"}) {
            const fs::path out = base / name / run;
            const std::string line = "\"" + exe + "\" --out \"" + out.string() + "\" " + args + " > /dev/null 2>&1";
            if (std::system(line.c_str()) != 0) broken += " " + name;
        }
        for (const auto& entry : fs::recursive_directory_iterator(base / name / "a")) {
            if (!entry.is_regular_file() || entry.path().filename() == "timing.csv") continue;
            ++files;
            const fs::path twin = base / name / "b" / fs::relative(entry.path(), base / name / "a");
            if (fs::exists(twin) && slurp(entry.path()) == slurp(twin)) {
                ++identical;
            } else {
                broken += " " + name + "/" + entry.path().filename().string();
            }
        }
    }
    return {broken.empty() && files > 0,
            fmt("%zu/%zu report files byte-identical across repeated runs of 5 commands", identical, files) +
                (broken.empty() ? "" : "; differs or failed:" + broken)};
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: acceptance <qtopo executable>\n";
        return 2;
    }
    const std::string exe = fs::absolute(argv[1]).string();
    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
        {"relative depth reduction", relative_depth_reduction},
        {"scaling trend", scaling_trend},
        {"reward-replay ablation", replay_ablation},
        {"router correctness", router_correctness},
        {"PPO numerics", ppo_numerics},
        {"reward function", reward_function},
        {"replay memory", replay_memory},
        {"layout", layout_quality},
        {"formulas", formulas},
        {"reproducibility", [&] { return reproducibility(exe); }},
    };
    int failed = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        Verdict v;
        try {
            v = criteria[k].second();
        } catch (const std::exception& e) {
            v = {false, std::string("threw: ") + e.what()};
        }
        failed += !v.pass;
        std::cout << (v.pass ? "PASS" : "FAIL") << "  criterion " << k + 1 << " (" << criteria[k].first
                  << "): " << v.detail << std::endl;
    }
    fs::remove_all(scratch());
    std::cout << criteria.size() - static_cast<std::size_t>(failed) << "/" << criteria.size() << " criteria passed"
              << std::endl;
    return failed == 0 ? 0 : 1;
}
