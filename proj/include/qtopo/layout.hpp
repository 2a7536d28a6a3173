// SPDX-License-Identifier: MIT
// Copyright (c) 2026 qtopo contributors

/**
 * @file layout.hpp
 * @brief Force-directed placement of a coupling graph, snapped onto a grid.
 *
 * Phase 1 relaxes a seeded circular placement under inverse-square
 * repulsion between all vertex pairs and linear springs along edges.
 * Phase 2 adds a pull toward the nearest free grid point; a vertex that
 * comes within the claim radius of its target takes that point and keeps
 * it. Whatever is still unclaimed when phase 2 ends is snapped to the
 * nearest free point, so the output is always a bijection onto the grid.
 */

#pragma once

#include "qtopo/topology.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace qtopo {

struct Point {
    double x = 0.0;
    double y = 0.0;
    friend bool operator==(const Point&, const Point&) = default;
};

struct LayoutParams {
    double k1 = 1.0;            // repulsion constant
    double k2 = 0.05;           // spring constant
    double rest_length = 1.0;
    double step_size = 0.05;
    double damping = 0.9;
    double grid_pitch = 1.0;
    double tol = 1e-4;          // largest per-vertex displacement at equilibrium
    std::size_t max_iters = 500;  // per phase
    double sparse = 1.0;        // multiplier on k1; larger spreads vertices out
    double claim_radius = 0.25;  // in units of grid_pitch
    double grid_gain = 1.0;     // grid pull is grid_gain * k2 * distance

    /// @throws std::invalid_argument for non-positive constants.
    void validate() const;
};

struct LayoutState {
    std::vector<Point> positions;
    std::vector<Point> displacement;  // last step
};

/// One damped step; pair distances are floored at 1e-6.
LayoutState force_step(const LayoutState& s, const TopologyGraph& g, const LayoutParams& p = {});

struct GridPoint {
    long row = 0;
    long col = 0;
    friend auto operator<=>(const GridPoint&, const GridPoint&) = default;
};

struct GridLayout {
    std::vector<GridPoint> coords;  // per vertex, shifted so the minimum row and col are 0
    std::size_t crossing_count = 0;
    std::size_t iterations_used = 0;
    std::uint64_t seed = 0;
    friend bool operator==(const GridLayout&, const GridLayout&) = default;
};

/// Vertices evenly spaced on a circle in index order, seeded rotation, 1e-3 jitter.
std::vector<Point> circular_placement(std::size_t n, std::uint64_t seed, const LayoutParams& p = {});

/// @throws std::invalid_argument for an empty graph.
GridLayout layout(const TopologyGraph& g, std::uint64_t seed, const LayoutParams& p = {});

/// Fewest crossings over seeds seed .. seed+restarts-1; ties keep the earlier seed.
GridLayout layout_best_of(const TopologyGraph& g, std::uint64_t seed, std::size_t restarts,
                          const LayoutParams& p = {});

/// Unordered edge pairs whose open segments intersect. Pairs sharing a
/// vertex never count; a collinear overlap of positive length counts once.
std::size_t count_crossings(const std::vector<Point>& pos, const TopologyGraph& g);
std::size_t count_crossings(const GridLayout& layout, const TopologyGraph& g);

std::vector<Point> to_points(const GridLayout& layout, double pitch = 1.0);

/// "qubit,row,col" rows.
std::string layout_to_csv(const GridLayout& layout);
std::string layout_to_svg(const GridLayout& layout, const TopologyGraph& g);

}  // namespace qtopo
