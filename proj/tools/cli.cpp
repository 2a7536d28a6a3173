// SPDX-License-Identifier: MIT
// Copyright (c) 2026 qtopo contributors

#include "cli.hpp"

#include "qtopo/bench.hpp"
#include "qtopo/layout.hpp"
#include "qtopo/qasm.hpp"
#include "qtopo/router.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#ifndef QTOPO_SOURCE_HASH
#define QTOPO_SOURCE_HASH "unknown"
#endif

namespace fs = std::filesystem;

namespace qtopo::cli {

namespace {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct TrainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct RouteError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text)) throw IoError("cannot write " + path.string());
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::stringstream in(s);
    for (std::string part; std::getline(in, part, sep);) parts.push_back(part);
    return parts;
}

std::size_t to_size(const std::string& s, const std::string& what) {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
        v = std::stoull(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != s.size()) throw std::invalid_argument("bad " + what + ": '" + s + "'");
    return static_cast<std::size_t>(v);
}

std::vector<std::uint64_t> seed_list(std::size_t count) {
    std::vector<std::uint64_t> seeds(count);
    for (std::size_t k = 0; k < count; ++k) seeds[k] = k;
    return seeds;
}

double mean_idle(double gates, std::size_t qubits, double depth) {
    return 1.0 - gates / (static_cast<double>(qubits) * depth);
}

struct Common {
    std::string out_dir;
    fs::path out_path() const {
        if (!out_dir.empty()) return out_dir;
        if (const char* env = std::getenv(out_env); env && *env) return env;
        return "qtopo-out";
    }
};

fs::path prepare_out(const Common& common) {
    const fs::path dir = common.out_path();
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
    return dir;
}

// Options of the chosen subcommand, without the output location, so two
// runs into different directories produce the same snapshot.
void write_snapshot(const fs::path& dir, const CLI::App& sub) {
    std::string text = "# qtopo " + sub.get_name() + "\n# source " QTOPO_SOURCE_HASH "\n";
    for (const CLI::Option* opt : sub.get_options()) {
        const std::string name = opt->get_single_name();
        if (name.empty() || name == "help") continue;
        const auto results = opt->results();
        std::string value;
        for (std::size_t k = 0; k < results.size(); ++k) value += (k ? " " : "") + results[k];
        if (results.empty()) value = opt->get_expected_max() == 0 ? "false" : opt->get_default_str();
        text += name + " = " + value + '\n';
    }
    write_file(dir / "config.ini", text);
}

struct TrainOptions {
    std::size_t iterations = 100;
    std::size_t batch = 512;
    std::size_t minibatch = 64;
    std::size_t epochs = 4;
    double lr = 0.01;
    std::string hidden = "64,64";
    int replay_threshold = 2;
    std::string objective = "depth";
    std::string reward_sign = "negated";
    std::size_t max_degree = TopologyGraph::default_max_degree;
    std::size_t horizon = 0;
    std::size_t eval_seeds = 3;
    std::size_t max_qubits = 20;
    std::uint64_t seed = 0;
    bool paper_scale = false;
    bool swap_as_one = false;

    void attach(CLI::App* app) {
        app->add_option("--iterations", iterations, "PPO iterations")->capture_default_str();
        app->add_option("--batch", batch, "environment steps per iteration")->capture_default_str();
        app->add_option("--minibatch", minibatch)->capture_default_str();
        app->add_option("--epochs", epochs, "SGD passes per iteration")->capture_default_str();
        app->add_option("--lr", lr)->capture_default_str();
        app->add_option("--hidden", hidden, "hidden widths, comma separated")->capture_default_str();
        app->add_option("--replay-threshold", replay_threshold, "reuses per cached reward; 0 disables")
            ->capture_default_str();
        app->add_option("--objective", objective)->check(CLI::IsMember({"depth", "gates"}))->capture_default_str();
        app->add_option("--reward-sign", reward_sign)
            ->check(CLI::IsMember({"negated", "verbatim"}))
            ->capture_default_str();
        app->add_option("--max-degree", max_degree)->capture_default_str();
        app->add_option("--horizon", horizon, "episode length; 0 means twice the qubit count")->capture_default_str();
        app->add_option("--eval-seeds", eval_seeds, "router seeds averaged per evaluation")->capture_default_str();
        app->add_option("--max-qubits", max_qubits)->capture_default_str();
        app->add_option("--seed", seed)->capture_default_str();
        app->add_flag("--paper-scale", paper_scale, "256x256 networks, batch 4000, minibatch 128, lr 5e-5");
        app->add_flag("--swap-as-one", swap_as_one, "count an inserted SWAP as one layer");
    }

    TrainSetup setup() const {
        TrainSetup s;
        if (paper_scale) {
            s.train = rl::TrainConfig::paper_scale();
        } else {
            s.train.batch_size = batch;
            s.train.minibatch_size = minibatch;
            s.train.lr = lr;
            std::vector<std::size_t> widths;
            for (const std::string& w : split(hidden, ',')) widths.push_back(to_size(w, "hidden width"));
            if (widths.empty()) throw std::invalid_argument("--hidden needs at least one width");
            s.train.policy_hidden = widths;
            s.train.value_hidden = widths;
        }
        s.train.epochs = epochs;
        s.train.iterations = iterations;
        s.train.replay_threshold = replay_threshold;
        s.train.seed = seed;
        s.train.validate();
        s.max_degree = max_degree;
        s.horizon = horizon;
        s.objective = objective == "gates" ? rl::Objective::Gates : rl::Objective::Depth;
        s.reward_sign = reward_sign == "verbatim" ? rl::RewardSign::Verbatim : rl::RewardSign::Negated;
        s.max_qubits = max_qubits;
        return s;
    }

    RoutingSetup routing() const {
        RoutingSetup r;
        r.router.swap_as_one = swap_as_one;
        r.seeds = seed_list(eval_seeds);
        if (r.seeds.empty()) throw std::invalid_argument("--eval-seeds must be positive");
        return r;
    }
};

// --- route ---------------------------------------------------------------

struct RouteArgs {
    std::string circuit;
    std::string topology = "grid:10x10";
    std::size_t seeds = 3;
    bool swap_as_one = false;
    std::string emit;
};

void cmd_route(const RouteArgs& a, const fs::path& dir, std::ostream& out) {
    const Circuit c = load_circuit(a.circuit);
    const TopologyGraph g = load_topology(a.topology);
    RouterOptions opts;
    opts.swap_as_one = a.swap_as_one;
    if (a.seeds == 0) throw InputError("--seeds must be positive");

    nlohmann::ordered_json report;
    report["circuit"] = a.circuit;
    report["qubits"] = c.num_qubits();
    report["gates"] = c.counted_gates();
    report["logical_depth"] = logical_depth(c);
    report["topology"] = a.topology;
    report["physical_qubits"] = g.size();
    report["runs"] = nlohmann::ordered_json::array();
    double depth = 0, gates = 0, swaps = 0;
    for (std::uint64_t seed : seed_list(a.seeds)) {
        RoutedCircuit rc;
        try {
            rc = route(c, g, opts, seed);
        } catch (const std::exception& e) {
            throw RouteError(a.circuit + " on " + a.topology + ": " + e.what());
        }
        report["runs"].push_back({{"seed", seed},
                                  {"depth", rc.depth},
                                  {"total_gates", rc.total_gates},
                                  {"swap_count", rc.swap_count}});
        depth += static_cast<double>(rc.depth);
        gates += static_cast<double>(rc.total_gates);
        swaps += static_cast<double>(rc.swap_count);
        if (seed == 0 && !a.emit.empty()) write_file(a.emit, emit_qasm(to_physical_circuit(rc)));
    }
    const double n = static_cast<double>(a.seeds);
    report["mean"] = {{"depth", depth / n},
                      {"total_gates", gates / n},
                      {"swap_count", swaps / n},
                      {"idle", mean_idle(gates / n, c.num_qubits(), depth / n)}};
    write_file(dir / "route.json", report.dump(2) + '\n');
    out << "depth " << depth / n << "  gates " << gates / n << "  swaps " << swaps / n << '\n';
}

// --- train ---------------------------------------------------------------

struct TrainArgs {
    std::string circuit;
    bool verbose = false;
    TrainOptions opt;
};

void cmd_train(const TrainArgs& a, const fs::path& dir, std::ostream& out) {
    const Circuit c = load_circuit(a.circuit);
    const TrainSetup setup = a.opt.setup();
    const RoutingSetup routing = a.opt.routing();
    TrainOutcome result;
    try {
        result = train_topology(c, setup, routing, [&](const rl::IterationMetrics& m) {
            if (a.verbose) {
                out << "iteration " << m.iteration << "  mean_reward " << m.mean_reward << "  best " << m.best_objective
                    << "  evals " << m.router_evals << '\n';
            }
        });
    } catch (const std::exception& e) {
        write_file(dir / "error.txt", std::string(e.what()) + '\n');
        throw TrainError(std::string("training failed: ") + e.what());
    }
    write_file(dir / "best_topology.txt", to_edge_list(result.best));
    write_file(dir / "metrics.csv", rl::metrics_to_csv(result.metrics, false));
    std::string timing = "iteration,wall_time,sample_time\n";
    for (const auto& m : result.metrics) {
        timing += std::to_string(m.iteration) + ',' + std::to_string(m.wall_time) + ',' +
                  std::to_string(m.sample_time) + '\n';
    }
    write_file(dir / "timing.csv", timing);
    write_file(dir / "best_trace.jsonl", rl::trace_to_jsonl(result.best_trace));
    write_file(dir / "checkpoint.txt", result.checkpoint);
    nlohmann::ordered_json summary;
    summary["circuit"] = a.circuit;
    summary["qubits"] = c.num_qubits();
    summary["start_objective"] = result.start_objective;
    summary["best_objective"] = result.best_objective;
    summary["best_edges"] = result.best.edge_count();
    write_file(dir / "summary.json", summary.dump(2) + '\n');
    out << "start " << result.start_objective << "  best " << result.best_objective << '\n';
}

// --- layout --------------------------------------------------------------

struct LayoutArgs {
    std::string topology;
    std::size_t restarts = 10;
    std::uint64_t seed = 0;
    double sparse = 1.0;
    std::size_t max_degree = TopologyGraph::default_max_degree;
};

void cmd_layout(const LayoutArgs& a, const fs::path& dir, std::ostream& out) {
    const TopologyGraph g = load_topology(a.topology, a.max_degree);
    LayoutParams p;
    p.sparse = a.sparse;
    if (a.restarts == 0) throw InputError("--restarts must be positive");
    const GridLayout l = layout_best_of(g, a.seed, a.restarts, p);
    write_file(dir / "layout.svg", layout_to_svg(l, g));
    write_file(dir / "layout.csv", layout_to_csv(l));
    nlohmann::ordered_json j;
    j["topology"] = a.topology;
    j["crossings"] = l.crossing_count;
    j["seed"] = l.seed;
    j["iterations"] = l.iterations_used;
    write_file(dir / "layout.json", j.dump(2) + '\n');
    out << "crossings " << l.crossing_count << "  seed " << l.seed << '\n';
}

// --- bench ---------------------------------------------------------------

struct BenchArgs {
    std::size_t generate = 10;
    std::string qubits = "6-10";
    double factor = 2.0;
    std::uint64_t circuit_seed = 0;
    std::string qasm_dir;
    std::string grid;
    TrainOptions opt;
};

void cmd_bench(const BenchArgs& a, const fs::path& dir, std::ostream& out) {
    std::vector<std::pair<std::string, std::string>> circuits;  // name, spec
    if (!a.qasm_dir.empty()) {
        std::error_code ec;
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(a.qasm_dir, ec)) {
            if (entry.path().extension() == ".qasm") files.push_back(entry.path());
        }
        if (ec) throw IoError("cannot list " + a.qasm_dir + ": " + ec.message());
        std::sort(files.begin(), files.end());
        for (const fs::path& f : files) circuits.emplace_back(f.stem().string(), f.string());
    } else {
        const auto range = split(a.qubits, '-');
        if (range.size() != 2) throw InputError("--qubits expects MIN-MAX");
        const std::size_t lo = to_size(range[0], "qubit count"), hi = to_size(range[1], "qubit count");
        if (lo < 2 || hi < lo) throw InputError("--qubits range is empty or below 2");
        for (std::size_t k = 0; k < a.generate; ++k) {
            const std::size_t n = lo + k % (hi - lo + 1);
            const std::uint64_t seed = a.circuit_seed + k;
            std::ostringstream spec;
            spec << "random:" << n << ':' << a.factor << ':' << seed;
            circuits.emplace_back("rand_q" + std::to_string(n) + "_s" + std::to_string(seed), spec.str());
        }
    }

    const TrainSetup setup = a.opt.setup();
    const RoutingSetup routing = a.opt.routing();
    fs::create_directories(dir / "topologies");
    std::vector<BenchRow> rows;
    for (const auto& [name, spec] : circuits) {
        BenchRow row;
        try {
            const Circuit c = load_circuit(spec);
            const std::string grid = a.grid.empty() ? "" : "grid:" + a.grid;
            const TopologyGraph baseline = grid.empty() ? baseline_grid(c.num_qubits()) : load_topology(grid);
            std::string baseline_name = grid;
            if (baseline_name.empty()) {
                std::size_t side = 1;
                while (side * side < c.num_qubits()) ++side;
                baseline_name = "grid:" + std::to_string(side) + 'x' + std::to_string(side);
            }
            TrainSetup per = setup;
            const TrainOutcome trained = train_topology(c, per, routing);
            write_file(dir / "topologies" / (name + ".txt"), to_edge_list(trained.best));
            row = compare_topologies(name, c, baseline, baseline_name, trained.best, routing);
        } catch (const IoError&) {
            throw;
        } catch (const std::exception& e) {
            row.circuit = name;
            row.error = e.what();
        }
        out << name << ": "
            << (row.error.empty() ? std::to_string(row.reduction_pct) + "% reduction" : "failed: " + row.error)
            << '\n';
        rows.push_back(std::move(row));
    }
    const BenchSummary summary = summarize(rows);
    write_file(dir / "bench.csv", bench_to_csv(rows));
    write_file(dir / "bench.json", bench_to_json(rows));
    write_file(dir / "summary.txt", summary_to_text(summary));
    out << summary_to_text(summary);
}

// --- metrics -------------------------------------------------------------

struct MetricsArgs {
    std::string circuit;
    std::vector<std::string> fidelity;
};

void cmd_metrics(const MetricsArgs& a, const fs::path& dir, std::ostream& out) {
    nlohmann::ordered_json j;
    if (!a.circuit.empty()) {
        const Circuit c = load_circuit(a.circuit);
        const std::size_t depth = logical_depth(c);
        j["circuit"] = a.circuit;
        j["qubits"] = c.num_qubits();
        j["gates"] = c.counted_gates();
        j["two_qubit_gates"] = c.two_qubit_gates();
        j["logical_depth"] = depth;
        if (depth > 0) j["idle"] = idle_ratio(c.counted_gates(), c.num_qubits(), depth);
    }
    if (!a.fidelity.empty()) {
        const auto p = parse_probability_csv(read_file(a.fidelity.at(0)));
        const auto q = parse_probability_csv(read_file(a.fidelity.at(1)));
        j["fidelity"] = distribution_fidelity(p, q);
    }
    if (j.empty()) throw InputError("metrics needs a circuit or --fidelity P Q");
    const std::string text = j.dump(2) + '\n';
    write_file(dir / "metrics.json", text);
    out << text;
}

}  // namespace

TopologyGraph load_topology(const std::string& spec, std::size_t max_degree) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos) throw std::invalid_argument("topology spec needs a kind: " + spec);
    const std::string kind = spec.substr(0, colon), arg = spec.substr(colon + 1);
    if (kind == "grid") {
        const auto dims = split(arg, 'x');
        if (dims.size() != 2) throw std::invalid_argument("grid spec is grid:RxC, got " + spec);
        return make_grid(to_size(dims[0], "grid rows"), to_size(dims[1], "grid cols"));
    }
    if (kind == "line") return make_line(to_size(arg, "line length"));
    if (kind == "file") {
        try {
            return parse_edge_list(read_file(arg), max_degree);
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument(arg + ": " + e.what());
        }
    }
    throw std::invalid_argument("unknown topology kind '" + kind + "'");
}

Circuit load_circuit(const std::string& spec) {
    if (spec.rfind("random:", 0) == 0) {
        const auto parts = split(spec.substr(7), ':');
        if (parts.size() != 3) throw std::invalid_argument("random circuit spec is random:QUBITS:FACTOR:SEED");
        double factor = 0.0;
        try {
            factor = std::stod(parts[1]);
        } catch (const std::exception&) {
            throw std::invalid_argument("bad gate factor '" + parts[1] + "'");
        }
        return generate_random_circuit(to_size(parts[0], "qubit count"), factor, to_size(parts[2], "seed"));
    }
    const std::string text = read_file(spec);
    try {
        return parse_qasm(text);
    } catch (const QasmError& e) {
        throw QasmError(spec + ": " + e.what(), e.line(), e.column());
    }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"qtopo: learn circuit-tailored qubit topologies and lay them out on a grid", "qtopo"};
    app.set_config("--config", "", "key = value file; command-line flags take precedence");
    app.require_subcommand(1);
    Common common;
    app.add_option("--out", common.out_dir, std::string("output directory (default $") + out_env + " or ./qtopo-out)");

    RouteArgs route_args;
    CLI::App* route_cmd = app.add_subcommand("route", "route a circuit on a topology and report depth");
    route_cmd->add_option("circuit", route_args.circuit, "QASM file or random:QUBITS:FACTOR:SEED")->required();
    route_cmd->add_option("--topology", route_args.topology, "grid:RxC, line:N or file:PATH")->capture_default_str();
    route_cmd->add_option("--seeds", route_args.seeds, "router seeds 0..N-1")->capture_default_str();
    route_cmd->add_flag("--swap-as-one", route_args.swap_as_one);
    route_cmd->add_option("--emit", route_args.emit, "write the seed-0 physical circuit as QASM");

    TrainArgs train_args;
    CLI::App* train_cmd = app.add_subcommand("train", "learn a topology for one circuit");
    train_cmd->add_option("circuit", train_args.circuit, "QASM file or random:QUBITS:FACTOR:SEED")->required();
    train_cmd->add_flag("--verbose", train_args.verbose, "print one line per iteration");
    train_args.opt.attach(train_cmd);

    LayoutArgs layout_args;
    CLI::App* layout_cmd = app.add_subcommand("layout", "place a topology on a grid");
    layout_cmd->add_option("topology", layout_args.topology, "grid:RxC, line:N or file:PATH")->required();
    layout_cmd->add_option("--restarts", layout_args.restarts, "keep the fewest-crossing of N seeds")
        ->capture_default_str();
    layout_cmd->add_option("--seed", layout_args.seed)->capture_default_str();
    layout_cmd->add_option("--sparse", layout_args.sparse, "repulsion multiplier")->capture_default_str();
    layout_cmd->add_option("--max-degree", layout_args.max_degree)->capture_default_str();

    BenchArgs bench_args;
    CLI::App* bench_cmd = app.add_subcommand("bench", "compare trained topologies with a square grid");
    bench_cmd->add_option("--generate", bench_args.generate, "number of generated circuits")->capture_default_str();
    bench_cmd->add_option("--qubits", bench_args.qubits, "generated qubit range MIN-MAX")->capture_default_str();
    bench_cmd->add_option("--factor", bench_args.factor, "gates per qubit")->capture_default_str();
    bench_cmd->add_option("--circuit-seed", bench_args.circuit_seed)->capture_default_str();
    bench_cmd->add_option("--qasm-dir", bench_args.qasm_dir, "benchmark every .qasm file here instead");
    bench_cmd->add_option("--grid", bench_args.grid, "baseline grid RxC (default: smallest square)");
    bench_args.opt.attach(bench_cmd);

    MetricsArgs metrics_args;
    CLI::App* metrics_cmd = app.add_subcommand("metrics", "logical metrics and distribution fidelity");
    metrics_cmd->add_option("circuit", metrics_args.circuit, "QASM file or random:QUBITS:FACTOR:SEED");
    metrics_cmd->add_option("--fidelity", metrics_args.fidelity, "two probability files P Q")->expected(2);

    std::vector<std::string> argv(args.rbegin(), args.rend());
    if (!argv.empty()) argv.pop_back();  // program name
    try {
        app.parse(argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? ok : parse_error;
    }

    try {
        const fs::path dir = prepare_out(common);
        const CLI::App* chosen = app.get_subcommands().front();
        write_snapshot(dir, *chosen);
        if (chosen == route_cmd) cmd_route(route_args, dir, out);
        if (chosen == train_cmd) cmd_train(train_args, dir, out);
        if (chosen == layout_cmd) cmd_layout(layout_args, dir, out);
        if (chosen == bench_cmd) cmd_bench(bench_args, dir, out);
        if (chosen == metrics_cmd) cmd_metrics(metrics_args, dir, out);
        return ok;
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return io_error;
    } catch (const TrainError& e) {
        err << "error: " << e.what() << '\n';
        return train_error;
    } catch (const RouteError& e) {
        err << "error: " << e.what() << '\n';
        return route_error;
    } catch (const QasmError& e) {
        err << "error: " << e.what() << '\n';
        return parse_error;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return parse_error;
    } catch (const InputError& e) {
        err << "error: " << e.what() << '\n';
        return parse_error;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace qtopo::cli
