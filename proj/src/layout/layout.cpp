// SPDX-License-Identifier: MIT
// Copyright (c) 2026 qtopo contributors

#include "qtopo/layout.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>

namespace qtopo {

namespace {

constexpr double min_distance = 1e-6;

std::vector<Point> forces(const std::vector<Point>& pos, const TopologyGraph& g, const LayoutParams& p) {
    const std::size_t n = pos.size();
    std::vector<Point> f(n);
    const double k1 = p.k1 * p.sparse;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double dx = pos[i].x - pos[j].x;
            const double dy = pos[i].y - pos[j].y;
            const double d = std::hypot(dx, dy);
            if (d == 0.0) continue;  // no direction; layout() jitters these apart
            const double r = std::max(d, min_distance);
            double mag = k1 / (r * r);
            if (g.has_edge(i, j)) mag -= p.k2 * (r - p.rest_length);
            const double ux = dx / d, uy = dy / d;
            f[i].x += mag * ux;
            f[i].y += mag * uy;
            f[j].x -= mag * ux;
            f[j].y -= mag * uy;
        }
    }
    return f;
}

double max_norm(const std::vector<Point>& v) {
    double m = 0.0;
    for (const Point& d : v) m = std::max(m, std::hypot(d.x, d.y));
    return m;
}

GridPoint nearest_grid(const Point& q, double pitch) {
    return {std::lround(q.y / pitch), std::lround(q.x / pitch)};
}

double grid_distance(const Point& q, GridPoint gp, double pitch) {
    return std::hypot(q.x - static_cast<double>(gp.col) * pitch, q.y - static_cast<double>(gp.row) * pitch);
}

// Nearest grid point not in `taken`, scanning square rings around the
// rounded position. Ties resolve to the smaller (row, col).
GridPoint nearest_free(const Point& q, const std::set<GridPoint>& taken, double pitch) {
    const GridPoint c = nearest_grid(q, pitch);
    std::optional<GridPoint> best;
    double best_d = std::numeric_limits<double>::infinity();
    for (long r = 0;; ++r) {
        if (best && (static_cast<double>(r) - 0.5) * pitch > best_d) break;
        for (long dr = -r; dr <= r; ++dr) {
            for (long dc = -r; dc <= r; ++dc) {
                if (std::max(std::labs(dr), std::labs(dc)) != r) continue;
                const GridPoint gp{c.row + dr, c.col + dc};
                if (taken.count(gp)) continue;
                const double d = grid_distance(q, gp, pitch);
                if (d < best_d || (d == best_d && gp < *best)) {
                    best = gp;
                    best_d = d;
                }
            }
        }
    }
    return *best;
}

void separate_coincident(std::vector<Point>& pos, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1e-3, 1e-3);
    for (std::size_t i = 0; i < pos.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            while (pos[i] == pos[j]) {
                pos[i].x += u(rng);
                pos[i].y += u(rng);
            }
        }
    }
}

double orient(const Point& a, const Point& b, const Point& c) {
    return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

int sign(double v) { return (v > 0.0) - (v < 0.0); }

bool open_segments_meet(const Point& a, const Point& b, const Point& c, const Point& d) {
    const int o1 = sign(orient(a, b, c));
    const int o2 = sign(orient(a, b, d));
    const int o3 = sign(orient(c, d, a));
    const int o4 = sign(orient(c, d, b));
    if (o1 == 0 && o2 == 0) {
        // Collinear: compare extents along the axis where ab is longer.
        const bool use_x = std::abs(b.x - a.x) >= std::abs(b.y - a.y);
        auto key = [&](const Point& q) { return use_x ? q.x : q.y; };
        const double lo = std::max(std::min(key(a), key(b)), std::min(key(c), key(d)));
        const double hi = std::min(std::max(key(a), key(b)), std::max(key(c), key(d)));
        return hi > lo;
    }
    // A zero orientation here means an endpoint touches the other segment,
    // which open segments do not.
    return o1 * o2 < 0 && o3 * o4 < 0;
}

}  // namespace

void LayoutParams::validate() const {
    for (double v : {k1, k2, rest_length, step_size, damping, grid_pitch, tol, sparse, claim_radius}) {
        if (!(v > 0.0)) throw std::invalid_argument("layout constants must be positive");
    }
    if (grid_gain < 0.0) throw std::invalid_argument("grid_gain must be non-negative");
}

LayoutState force_step(const LayoutState& s, const TopologyGraph& g, const LayoutParams& p) {
    if (s.positions.size() != g.size()) throw std::invalid_argument("layout state and graph differ in size");
    const std::vector<Point> f = forces(s.positions, g, p);
    LayoutState next;
    next.positions = s.positions;
    next.displacement.resize(f.size());
    const double scale = p.damping * p.step_size;
    for (std::size_t v = 0; v < f.size(); ++v) {
        next.displacement[v] = {scale * f[v].x, scale * f[v].y};
        next.positions[v].x += next.displacement[v].x;
        next.positions[v].y += next.displacement[v].y;
    }
    return next;
}

std::vector<Point> circular_placement(std::size_t n, std::uint64_t seed, const LayoutParams& p) {
    // Index order around the circle keeps a line backbone untangled; the
    // seed picks the rotation and the jitter.
    std::mt19937_64 rng(seed);
    const double radius = std::max(p.rest_length, static_cast<double>(n) * p.rest_length / (2.0 * std::numbers::pi));
    const double offset = std::uniform_real_distribution<double>(0.0, 2.0 * std::numbers::pi)(rng);
    std::uniform_real_distribution<double> jitter(-1e-3, 1e-3);
    std::vector<Point> pos(n);
    for (std::size_t v = 0; v < n; ++v) {
        const double angle = offset + 2.0 * std::numbers::pi * static_cast<double>(v) / static_cast<double>(n);
        pos[v] = {radius * std::cos(angle) + jitter(rng), radius * std::sin(angle) + jitter(rng)};
    }
    if (n == 1) pos[0] = {0.0, 0.0};
    separate_coincident(pos, rng);
    return pos;
}

GridLayout layout(const TopologyGraph& g, std::uint64_t seed, const LayoutParams& p) {
    p.validate();
    const std::size_t n = g.size();
    if (n == 0) throw std::invalid_argument("cannot lay out an empty graph");
    const double pitch = p.grid_pitch;

    LayoutState s;
    s.positions = circular_placement(n, seed, p);
    std::size_t iters = 0;
    for (std::size_t it = 0; it < p.max_iters; ++it) {
        s = force_step(s, g, p);
        ++iters;
        if (max_norm(s.displacement) < p.tol) break;
    }

    std::vector<std::optional<GridPoint>> claim(n);
    std::set<GridPoint> taken;
    std::size_t claimed = 0;
    const double scale = p.damping * p.step_size;
    for (std::size_t it = 0; it < p.max_iters && claimed < n; ++it) {
        std::vector<GridPoint> target(n);
        for (std::size_t v = 0; v < n; ++v) {
            if (claim[v]) {
                target[v] = *claim[v];
                continue;
            }
            target[v] = nearest_free(s.positions[v], taken, pitch);
            if (grid_distance(s.positions[v], target[v], pitch) <= p.claim_radius * pitch) {
                claim[v] = target[v];
                taken.insert(target[v]);
                ++claimed;
            }
        }
        std::vector<Point> f = forces(s.positions, g, p);
        for (std::size_t v = 0; v < n; ++v) {
            const double gain = p.grid_gain * p.k2;
            f[v].x += gain * (static_cast<double>(target[v].col) * pitch - s.positions[v].x);
            f[v].y += gain * (static_cast<double>(target[v].row) * pitch - s.positions[v].y);
            s.positions[v].x += scale * f[v].x;
            s.positions[v].y += scale * f[v].y;
        }
        ++iters;
    }

    // Forced snap: closest unclaimed vertex first.
    while (claimed < n) {
        std::size_t pick = n;
        GridPoint pick_point;
        double pick_d = std::numeric_limits<double>::infinity();
        for (std::size_t v = 0; v < n; ++v) {
            if (claim[v]) continue;
            const GridPoint gp = nearest_free(s.positions[v], taken, pitch);
            const double d = grid_distance(s.positions[v], gp, pitch);
            if (d < pick_d) {
                pick = v;
                pick_point = gp;
                pick_d = d;
            }
        }
        claim[pick] = pick_point;
        taken.insert(pick_point);
        ++claimed;
    }

    GridLayout out;
    out.seed = seed;
    out.iterations_used = iters;
    long min_row = std::numeric_limits<long>::max(), min_col = std::numeric_limits<long>::max();
    for (const auto& c : claim) {
        min_row = std::min(min_row, c->row);
        min_col = std::min(min_col, c->col);
    }
    for (const auto& c : claim) out.coords.push_back({c->row - min_row, c->col - min_col});
    out.crossing_count = count_crossings(out, g);
    return out;
}

GridLayout layout_best_of(const TopologyGraph& g, std::uint64_t seed, std::size_t restarts, const LayoutParams& p) {
    if (restarts == 0) throw std::invalid_argument("restarts must be positive");
    GridLayout best = layout(g, seed, p);
    for (std::size_t k = 1; k < restarts && best.crossing_count > 0; ++k) {
        GridLayout next = layout(g, seed + k, p);
        if (next.crossing_count < best.crossing_count) best = std::move(next);
    }
    return best;
}

std::size_t count_crossings(const std::vector<Point>& pos, const TopologyGraph& g) {
    if (pos.size() != g.size()) throw std::invalid_argument("positions and graph differ in size");
    const auto edges = g.edges();
    std::size_t count = 0;
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const auto [a, b] = edges[e];
        for (std::size_t f = e + 1; f < edges.size(); ++f) {
            const auto [c, d] = edges[f];
            if (a == c || a == d || b == c || b == d) continue;
            if (open_segments_meet(pos[a], pos[b], pos[c], pos[d])) ++count;
        }
    }
    return count;
}

std::vector<Point> to_points(const GridLayout& layout, double pitch) {
    std::vector<Point> pos;
    pos.reserve(layout.coords.size());
    for (const GridPoint& c : layout.coords) {
        pos.push_back({static_cast<double>(c.col) * pitch, static_cast<double>(c.row) * pitch});
    }
    return pos;
}

std::size_t count_crossings(const GridLayout& layout, const TopologyGraph& g) {
    return count_crossings(to_points(layout), g);
}

std::string layout_to_csv(const GridLayout& layout) {
    std::string out = "qubit,row,col\n";
    for (std::size_t v = 0; v < layout.coords.size(); ++v) {
        out += std::to_string(v) + ',' + std::to_string(layout.coords[v].row) + ',' +
               std::to_string(layout.coords[v].col) + '\n';
    }
    return out;
}

std::string layout_to_svg(const GridLayout& layout, const TopologyGraph& g) {
    constexpr double cell = 60.0, margin = 30.0, radius = 14.0;
    long rows = 0, cols = 0;
    for (const GridPoint& c : layout.coords) {
        rows = std::max(rows, c.row);
        cols = std::max(cols, c.col);
    }
    auto px = [&](long v) { return margin + cell * static_cast<double>(v); };
    char buf[256];
    std::string out;
    std::snprintf(buf, sizeof buf,
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\">\n",
                  2 * margin + cell * static_cast<double>(cols), 2 * margin + cell * static_cast<double>(rows));
    out += buf;
    for (const auto& [a, b] : g.edges()) {
        std::snprintf(buf, sizeof buf,
                      "  <line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"#444\" stroke-width=\"2\"/>\n",
                      px(layout.coords[a].col), px(layout.coords[a].row), px(layout.coords[b].col),
                      px(layout.coords[b].row));
        out += buf;
    }
    for (std::size_t v = 0; v < layout.coords.size(); ++v) {
        const double x = px(layout.coords[v].col), y = px(layout.coords[v].row);
        std::snprintf(buf, sizeof buf,
                      "  <circle cx=\"%.1f\" cy=\"%.1f\" r=\"%.1f\" fill=\"#fff\" stroke=\"#222\" stroke-width=\"2\"/>\n"
                      "  <text x=\"%.1f\" y=\"%.1f\" font-size=\"12\" text-anchor=\"middle\" "
                      "dominant-baseline=\"central\">%zu</text>\n",
                      x, y, radius, x, y, v);
        out += buf;
    }
    out += "</svg>\n";
    return out;
}

}  // namespace qtopo
