// SPDX-License-Identifier: MIT
// Copyright (c) 2026 qtopo contributors

#include "qtopo/bench.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace qtopo {

TrainOutcome train_topology(const Circuit& c, const TrainSetup& setup, const RoutingSetup& routing,
                            const std::function<void(const rl::IterationMetrics&)>& on_iteration) {
    if (c.num_qubits() > setup.max_qubits) {
        throw std::invalid_argument("circuit has " + std::to_string(c.num_qubits()) + " qubits, limit is " +
                                    std::to_string(setup.max_qubits));
    }
    rl::EnvConfig env_cfg;
    env_cfg.circuit = c;
    env_cfg.max_degree = setup.max_degree;
    env_cfg.horizon = setup.horizon;
    env_cfg.eval_seeds = routing.seeds;
    env_cfg.objective = setup.objective;
    env_cfg.reward_sign = setup.reward_sign;
    env_cfg.router = routing.router;

    rl::TopologyEnv env(env_cfg);
    rl::PpoTrainer trainer(env, setup.train);
    TrainOutcome out;
    out.metrics = trainer.train(on_iteration);
    out.start_objective = env.state().d0;
    out.best_objective = *env.best_objective();
    out.best = *env.best_graph();
    out.best_trace = env.best_trace();
    std::ostringstream ck;
    trainer.save_checkpoint(ck);
    out.checkpoint = ck.str();
    return out;
}

TopologyGraph baseline_grid(std::size_t n) {
    std::size_t side = 1;
    while (side * side < n) ++side;
    return make_grid(side, side);
}

double reduction_pct(double baseline_depth, double tailored_depth) {
    if (!(baseline_depth > 0.0)) throw std::invalid_argument("baseline depth must be positive");
    return (baseline_depth - tailored_depth) / baseline_depth * 100.0;
}

namespace {

double idle_of(double gates, std::size_t qubits, double depth) {
    return 1.0 - gates / (static_cast<double>(qubits) * depth);
}

}  // namespace

RoutedStats routed_stats(const Circuit& c, const TopologyGraph& g, const RoutingSetup& routing) {
    const RouteSummary s = route_mean(c, g, routing.router, routing.seeds);
    return {s.depth, s.total_gates, idle_of(s.total_gates, c.num_qubits(), s.depth)};
}

BenchRow compare_topologies(const std::string& name, const Circuit& c, const TopologyGraph& baseline,
                            const std::string& baseline_name, const TopologyGraph& tailored,
                            const RoutingSetup& routing) {
    BenchRow row;
    row.circuit = name;
    row.qubits = c.num_qubits();
    row.gates_in = c.counted_gates();
    row.logical_depth = logical_depth(c);
    row.baseline_topology = baseline_name;
    row.baseline = routed_stats(c, baseline, routing);
    row.tailored = routed_stats(c, tailored, routing);
    row.reduction_pct = reduction_pct(row.baseline.depth, row.tailored.depth);
    check_row(row);
    return row;
}

void check_row(const BenchRow& row) {
    if (!row.error.empty()) return;
    auto near = [](double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b)); };
    if (!near(row.reduction_pct, reduction_pct(row.baseline.depth, row.tailored.depth))) {
        throw std::logic_error("bench row " + row.circuit + ": reduction does not match depths");
    }
    for (const RoutedStats* s : {&row.baseline, &row.tailored}) {
        if (!near(s->idle, idle_of(s->total_gates, row.qubits, s->depth))) {
            throw std::logic_error("bench row " + row.circuit + ": idle does not match gates and depth");
        }
    }
}

double median(std::vector<double> xs) {
    if (xs.empty()) return 0.0;
    std::sort(xs.begin(), xs.end());
    const std::size_t m = xs.size() / 2;
    return xs.size() % 2 ? xs[m] : 0.5 * (xs[m - 1] + xs[m]);
}

BenchSummary summarize(const std::vector<BenchRow>& rows) {
    BenchSummary s;
    std::vector<double> reductions;
    for (const BenchRow& r : rows) {
        ++s.rows;
        if (!r.error.empty()) {
            ++s.failed;
            continue;
        }
        if (r.tailored.depth <= r.baseline.depth) ++s.not_worse;
        reductions.push_back(r.reduction_pct);
    }
    s.median_reduction = median(reductions);
    return s;
}

std::string bench_to_csv(const std::vector<BenchRow>& rows) {
    std::string out =
        "circuit,qubits,gates_in,logical_depth,baseline_topology,baseline_depth,baseline_gates,baseline_idle,"
        "tailored_depth,tailored_gates,tailored_idle,reduction_pct,error\n";
    char buf[256];
    for (const BenchRow& r : rows) {
        out += r.circuit + ',';
        std::snprintf(buf, sizeof buf, "%zu,%zu,%zu,", r.qubits, r.gates_in, r.logical_depth);
        out += buf;
        out += r.baseline_topology + ',';
        std::snprintf(buf, sizeof buf, "%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.4f,", r.baseline.depth, r.baseline.total_gates,
                      r.baseline.idle, r.tailored.depth, r.tailored.total_gates, r.tailored.idle, r.reduction_pct);
        out += buf;
        std::string err = r.error;
        std::replace(err.begin(), err.end(), ',', ';');
        std::replace(err.begin(), err.end(), '\n', ' ');
        out += err + '\n';
    }
    return out;
}

std::string bench_to_json(const std::vector<BenchRow>& rows) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const BenchRow& r : rows) {
        nlohmann::ordered_json j;
        j["circuit"] = r.circuit;
        j["qubits"] = r.qubits;
        j["gates_in"] = r.gates_in;
        j["logical_depth"] = r.logical_depth;
        j["baseline"] = {{"topology", r.baseline_topology},
                         {"depth", r.baseline.depth},
                         {"total_gates", r.baseline.total_gates},
                         {"idle", r.baseline.idle}};
        j["tailored"] = {{"depth", r.tailored.depth}, {"total_gates", r.tailored.total_gates}, {"idle", r.tailored.idle}};
        j["reduction_pct"] = r.reduction_pct;
        if (!r.error.empty()) j["error"] = r.error;
        arr.push_back(std::move(j));
    }
    return arr.dump(2) + '\n';
}

std::string summary_to_text(const BenchSummary& s) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "rows %zu\nfailed %zu\nnot_worse %zu\nmedian_reduction_pct %.4f\n", s.rows, s.failed,
                  s.not_worse, s.median_reduction);
    return buf;
}

}  // namespace qtopo
