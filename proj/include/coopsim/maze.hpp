#pragma once

#include <array>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <vector>

#include "coopsim/errors.hpp"
#include "coopsim/rng.hpp"
#include "coopsim/taskgraph.hpp"

namespace coopsim {

struct Cell {
    int x = 0;
    int y = 0;

    friend bool operator==(const Cell&, const Cell&) = default;
};

// Grid solution space. Open cells form a single connected component, so
// any (start, target) pair the generator places is reachable.
struct Maze {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> open;  // row-major, width * height
    Cell start;
    Cell target;

    bool in_bounds(Cell c) const {
        return c.x >= 0 && c.x < width && c.y >= 0 && c.y < height;
    }
    bool is_open(Cell c) const {
        return in_bounds(c) && open[static_cast<std::size_t>(c.y) * width + c.x];
    }
    std::size_t open_count() const {
        std::size_t n = 0;
        for (auto v : open) n += v;
        return n;
    }
};

// A path discovered for one task, plus what the search cost to find it.
// steps_explored counts distinct cells visited, which is the quantity that
// drives simulated exploration time.
struct Solution {
    TaskId task_id;
    std::vector<Cell> path;
    std::size_t steps_explored = 0;

    friend bool operator==(const Solution&, const Solution&) = default;
};

struct ExploreResult {
    Solution solution;
    double duration = 0.0;
};

namespace detail {

inline std::array<Cell, 4> neighbors4(Cell c) {
    return {Cell{c.x + 1, c.y}, Cell{c.x - 1, c.y}, Cell{c.x, c.y + 1},
            Cell{c.x, c.y - 1}};
}

}  // namespace detail

// Recursive-backtracker maze on a room lattice: rooms sit at even
// coordinates and carving opens the wall cell between two rooms. The carved
// cells form a spanning tree of the rooms, hence one connected open region.
// Degenerate sizes below 3x3 in either direction fall back to an all-open
// grid so that two distinct endpoints always exist.
inline Maze generate_maze(int width, int height, std::uint64_t seed) {
    if (width < 2 || height < 2)
        throw InvalidParam("maze dimensions must be at least 2x2");

    Maze maze;
    maze.width = width;
    maze.height = height;
    maze.open.assign(static_cast<std::size_t>(width) * height, 0);
    Rng rng(derive_seed(seed, "maze-walls"));

    const int rw = (width + 1) / 2;
    const int rh = (height + 1) / 2;
    auto open_cell = [&](int x, int y) {
        maze.open[static_cast<std::size_t>(y) * width + x] = 1;
    };

    if (rw == 1 && rh == 1) {
        for (int y = 0; y < height; ++y)
            for (int x = 0; x < width; ++x) open_cell(x, y);
    } else {
        std::vector<std::uint8_t> seen(static_cast<std::size_t>(rw) * rh, 0);
        std::vector<Cell> stack;
        Cell first{static_cast<int>(rng.uniform(rw)),
                   static_cast<int>(rng.uniform(rh))};
        seen[static_cast<std::size_t>(first.y) * rw + first.x] = 1;
        open_cell(2 * first.x, 2 * first.y);
        stack.push_back(first);
        while (!stack.empty()) {
            Cell cur = stack.back();
            std::vector<Cell> next;
            for (Cell nb : detail::neighbors4(cur)) {
                if (nb.x < 0 || nb.x >= rw || nb.y < 0 || nb.y >= rh) continue;
                if (!seen[static_cast<std::size_t>(nb.y) * rw + nb.x])
                    next.push_back(nb);
            }
            if (next.empty()) {
                stack.pop_back();
                continue;
            }
            Cell nb = next[rng.uniform(next.size())];
            seen[static_cast<std::size_t>(nb.y) * rw + nb.x] = 1;
            open_cell(2 * nb.x, 2 * nb.y);
            open_cell(cur.x + nb.x, cur.y + nb.y);  // wall cell between rooms
            stack.push_back(nb);
        }
    }

    std::vector<Cell> open_cells;
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x)
            if (maze.is_open({x, y})) open_cells.push_back({x, y});
    Rng place(derive_seed(seed, "maze-endpoints"));
    std::size_t si = place.uniform(open_cells.size());
    std::size_t ti = place.uniform(open_cells.size() - 1);
    if (ti >= si) ++ti;
    maze.start = open_cells[si];
    maze.target = open_cells[ti];
    return maze;
}

// Randomized depth-first search from start until the target is entered.
// The path is the DFS stack at that moment; duration scales inversely with
// agent speed and nothing else.
inline ExploreResult explore(const Maze& maze, double speed,
                             std::uint64_t seed) {
    if (speed <= 0.0) throw InvalidParam("speed must be positive");

    Rng rng(seed);
    std::vector<std::uint8_t> visited(maze.open.size(), 0);
    auto idx = [&](Cell c) {
        return static_cast<std::size_t>(c.y) * maze.width + c.x;
    };
    if (!maze.is_open(maze.start))
        throw InvalidParam("maze start cell is blocked");
    std::vector<Cell> stack{maze.start};
    visited[idx(maze.start)] = 1;
    std::size_t distinct = 1;
    while (!(stack.back() == maze.target)) {
        Cell cur = stack.back();
        std::vector<Cell> next;
        for (Cell nb : detail::neighbors4(cur))
            if (maze.is_open(nb) && !visited[idx(nb)]) next.push_back(nb);
        if (next.empty()) {
            stack.pop_back();
            if (stack.empty())
                throw InvalidParam("maze target unreachable from start");
            continue;
        }
        Cell nb = next[rng.uniform(next.size())];
        visited[idx(nb)] = 1;
        ++distinct;
        stack.push_back(nb);
    }

    ExploreResult result;
    result.solution.path = std::move(stack);
    result.solution.steps_explored = distinct;
    result.duration = static_cast<double>(distinct) / speed;
    return result;
}

// True when the path is a real start-to-target walk over open cells. An
// empty path is valid only in the degenerate start == target case.
inline bool validate_solution(const Maze& maze, const Solution& solution) {
    const auto& path = solution.path;
    if (path.empty()) return maze.start == maze.target;
    if (!(path.front() == maze.start)) return false;
    if (!(path.back() == maze.target)) return false;
    for (std::size_t i = 0; i < path.size(); ++i) {
        if (!maze.is_open(path[i])) return false;
        if (i > 0) {
            int dist = std::abs(path[i].x - path[i - 1].x) +
                       std::abs(path[i].y - path[i - 1].y);
            if (dist != 1) return false;
        }
    }
    return true;
}

// Debug rendering: '#' wall, '.' open, 'S' start, 'T' target.
inline std::string dump_maze(const Maze& maze) {
    std::string out;
    out.reserve(static_cast<std::size_t>(maze.height) * (maze.width + 1));
    for (int y = 0; y < maze.height; ++y) {
        for (int x = 0; x < maze.width; ++x) {
            Cell c{x, y};
            if (c == maze.start)
                out += 'S';
            else if (c == maze.target)
                out += 'T';
            else
                out += maze.is_open(c) ? '.' : '#';
        }
        out += '\n';
    }
    return out;
}

}  // namespace coopsim
