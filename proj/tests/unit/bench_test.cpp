// SPDX-License-Identifier: MIT
// Copyright (c) 2026 qtopo contributors

#include "qtopo/bench.hpp"

#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

using namespace qtopo;

namespace {

TrainSetup desk_setup(std::size_t iterations) {
    TrainSetup s;
    s.train.iterations = iterations;
    s.train.batch_size = 128;
    s.train.minibatch_size = 32;
    return s;
}

}  // namespace

TEST(bench, reduction_matches_table_row) {
    EXPECT_NEAR(reduction_pct(92, 63), 31.52, 0.005);
    EXPECT_EQ(reduction_pct(50, 50), 0.0);
    EXPECT_LT(reduction_pct(50, 60), 0.0);
    EXPECT_THROW(reduction_pct(0, 1), std::invalid_argument);
}

TEST(bench, baseline_grid_is_smallest_square) {
    EXPECT_EQ(baseline_grid(1).size(), 1u);
    EXPECT_EQ(baseline_grid(4).size(), 4u);
    EXPECT_EQ(baseline_grid(5).size(), 9u);
    EXPECT_EQ(baseline_grid(10).size(), 16u);
    EXPECT_EQ(baseline_grid(100), make_grid(10, 10));
}

TEST(bench, rows_are_internally_consistent) {
    const Circuit c = generate_random_circuit(6, 4.0, 3);
    TopologyGraph tailored = make_line(6);
    tailored.add_edge(0, 5);
    const BenchRow row = compare_topologies("c", c, baseline_grid(6), "grid:3x3", tailored, {});
    EXPECT_NO_THROW(check_row(row));
    EXPECT_NEAR(row.tailored.idle, 1.0 - row.tailored.total_gates / (6.0 * row.tailored.depth), 1e-12);
    EXPECT_GE(row.tailored.depth, static_cast<double>(row.logical_depth));
    EXPECT_GE(row.baseline.depth, static_cast<double>(row.logical_depth));

    BenchRow broken = row;
    broken.reduction_pct += 1.0;
    EXPECT_THROW(check_row(broken), std::logic_error);
    broken = row;
    broken.baseline.idle = 0.0;
    EXPECT_THROW(check_row(broken), std::logic_error);
}

TEST(bench, summary_counts_and_median) {
    std::vector<BenchRow> rows(4);
    rows[0].baseline.depth = 10;
    rows[0].tailored.depth = 5;
    rows[0].reduction_pct = 50;
    rows[1].baseline.depth = 10;
    rows[1].tailored.depth = 12;
    rows[1].reduction_pct = -20;
    rows[2].baseline.depth = 10;
    rows[2].tailored.depth = 9;
    rows[2].reduction_pct = 10;
    rows[3].error = "boom";
    const BenchSummary s = summarize(rows);
    EXPECT_EQ(s.rows, 4u);
    EXPECT_EQ(s.failed, 1u);
    EXPECT_EQ(s.not_worse, 2u);
    EXPECT_EQ(s.median_reduction, 10.0);
    EXPECT_EQ(median({}), 0.0);
    EXPECT_EQ(median({4, 1}), 2.5);
}

TEST(bench, training_never_ends_above_the_start) {
    const Circuit c = generate_random_circuit(6, 10.0, 8);
    ASSERT_EQ(c.counted_gates(), 60u);
    const TrainOutcome out = train_topology(c, desk_setup(50), {});
    EXPECT_LE(out.best_objective, out.start_objective);
    EXPECT_EQ(out.metrics.size(), 50u);
    EXPECT_DOUBLE_EQ(route_mean(c, out.best, {}, std::vector<std::uint64_t>{0, 1, 2}).depth, out.best_objective);
    for (std::size_t v = 0; v < out.best.size(); ++v) EXPECT_LE(out.best.degree(v), 4u);
    EXPECT_EQ(out.checkpoint.rfind("qtopo-checkpoint 1", 0), 0u);
}

TEST(bench, gate_objective_optimizes_gate_count) {
    const Circuit c = generate_random_circuit(5, 6.0, 2);
    TrainSetup s = desk_setup(5);
    s.objective = rl::Objective::Gates;
    const TrainOutcome out = train_topology(c, s, {});
    EXPECT_DOUBLE_EQ(out.start_objective, route_mean(c, make_line(5), {}, std::vector<std::uint64_t>{0, 1, 2}).total_gates);
    EXPECT_DOUBLE_EQ(route_mean(c, out.best, {}, std::vector<std::uint64_t>{0, 1, 2}).total_gates, out.best_objective);
}

TEST(bench, qubit_limit_is_enforced) {
    TrainSetup s = desk_setup(1);
    s.max_qubits = 4;
    EXPECT_THROW(train_topology(generate_random_circuit(5, 2.0, 0), s, {}), std::invalid_argument);
}

TEST(bench, csv_and_json_mirror_each_other) {
    const Circuit c = generate_random_circuit(5, 4.0, 1);
    std::vector<BenchRow> rows{compare_topologies("a", c, baseline_grid(5), "grid:3x3", make_complete(5), {})};
    BenchRow failed;
    failed.circuit = "b";
    failed.error = "bad, input";
    rows.push_back(failed);
    const std::string csv = bench_to_csv(rows);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
    EXPECT_NE(csv.find("bad; input"), std::string::npos);
    const auto j = nlohmann::json::parse(bench_to_json(rows));
    ASSERT_EQ(j.size(), 2u);
    EXPECT_EQ(j[0]["baseline"]["topology"], "grid:3x3");
    EXPECT_DOUBLE_EQ(j[0]["tailored"]["depth"].get<double>(), rows[0].tailored.depth);
    EXPECT_DOUBLE_EQ(j[0]["reduction_pct"].get<double>(), rows[0].reduction_pct);
    EXPECT_EQ(j[1]["error"], "bad, input");
}
