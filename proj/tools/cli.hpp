// SPDX-License-Identifier: MIT
// Copyright (c) 2026 qtopo contributors

#pragma once

#include "qtopo/circuit.hpp"
#include "qtopo/topology.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace qtopo::cli {

enum ExitCode : int { ok = 0, parse_error = 2, route_error = 3, train_error = 4, io_error = 5 };

/// Environment variable naming the default output root.
inline constexpr const char* out_env = "QTOPO_OUT";

/// grid:RxC, line:N or file:PATH.
/// @throws std::invalid_argument for a malformed spec or topology file.
TopologyGraph load_topology(const std::string& spec, std::size_t max_degree = TopologyGraph::default_max_degree);

/// A QASM path or random:QUBITS:FACTOR:SEED.
Circuit load_circuit(const std::string& spec);

/// Full command line, argv[0] included. Never throws.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qtopo::cli
