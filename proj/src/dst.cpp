#include "morl/dst.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>

namespace morl {

DstMap DstMap::default_map() {
    DstMap m;
    // Classic staircase depths with the convex-front value set: the value
    // gained per extra step decreases strictly from treasure to treasure,
    // so every point of the gamma=1 front is the maximizer of some linear
    // scalarization. (20.35 instead of the usual 20.3, which sits exactly
    // on a hull edge and would leave that treasure unreachable; 20.35 also
    // keeps every switch point of the weight sweep away from grid ties.)
    m.treasures = {
        {1, 0, 0.7},  {2, 1, 8.2},  {3, 2, 11.5}, {4, 3, 14.0}, {4, 4, 15.1},
        {4, 5, 16.1}, {7, 6, 19.6}, {7, 7, 20.35}, {9, 8, 22.4}, {10, 9, 23.7},
    };
    return m;
}

int DstMap::floor_row(int col) const {
    for (const auto& t : treasures)
        if (t.col == col) return t.row;
    return rows - 1;
}

const DstMap::Treasure* DstMap::treasure_at(int row, int col) const {
    for (const auto& t : treasures)
        if (t.row == row && t.col == col) return &t;
    return nullptr;
}

void DstMap::validate() const {
    require(rows > 0 && cols > 0, "dst map: grid dimensions must be positive");
    require(!treasures.empty(), "dst map: no treasures");
    std::set<std::pair<int, int>> cells;
    for (const auto& t : treasures) {
        require(t.row >= 0 && t.row < rows && t.col >= 0 && t.col < cols,
                "dst map: treasure outside the grid");
        require(cells.insert({t.row, t.col}).second, "dst map: duplicate treasure cell");
    }
    std::vector<Treasure> sorted = treasures;
    std::sort(sorted.begin(), sorted.end(),
              [](const Treasure& a, const Treasure& b) { return a.col < b.col; });
    for (size_t i = 1; i < sorted.size(); ++i) {
        require(sorted[i].row >= sorted[i - 1].row, "dst map: floor must not rise to the right");
        require(sorted[i].value > sorted[i - 1].value,
                "dst map: deeper/farther treasures must have strictly larger values");
    }

    // Convexity: sweeping the treasure weight over a fine grid must make
    // every front point the maximizer somewhere.
    auto front = true_pareto_front(*this, 1.0);
    require(front.size() == treasures.size(),
            "dst map: front has dominated treasures, expected all " +
                std::to_string(treasures.size()) + " to be nondominated");
    std::set<int> seen;
    for (int i = 0; i <= 100; ++i) {
        double a1 = static_cast<double>(i) / 100.0;
        int best = 0;
        double best_u = -1e300;
        for (size_t j = 0; j < front.size(); ++j) {
            double u = a1 * front[j].treasure + (1.0 - a1) * front[j].fuel;
            if (u > best_u) {
                best_u = u;
                best = static_cast<int>(j);
            }
        }
        seen.insert(best);
    }
    require(seen.size() == front.size(),
            "dst map: front is not convex, the scalarization sweep reached only " +
                std::to_string(seen.size()) + " of " + std::to_string(front.size()) + " points");
}

DeepSeaTreasure::DeepSeaTreasure(DstMap map) : map_(std::move(map)) {
    map_.validate();
    spec_.state_dim = map_.rows * map_.cols;
    spec_.num_actions = 4;
    spec_.num_objectives = 2;
    spec_.max_episode_steps = map_.max_episode_steps;
    spec_.validate();
}

std::vector<double> DeepSeaTreasure::encode() const {
    std::vector<double> s(static_cast<size_t>(map_.rows) * map_.cols, 0.0);
    s[static_cast<size_t>(row_) * map_.cols + col_] = 1.0;
    return s;
}

std::vector<double> DeepSeaTreasure::reset(Rng&) {
    row_ = 0;
    col_ = 0;
    steps_ = 0;
    done_ = false;
    return encode();
}

Env::StepResult DeepSeaTreasure::step(int action) {
    require(!done_, "dst: step after episode end");
    require(action >= 0 && action < 4,
            "dst: action " + std::to_string(action) + " out of range [0,4)");
    int nr = row_, nc = col_;
    switch (action) {
        case kUp: nr -= 1; break;
        case kDown: nr += 1; break;
        case kLeft: nc -= 1; break;
        case kRight: nc += 1; break;
    }
    bool inside = nr >= 0 && nr < map_.rows && nc >= 0 && nc < map_.cols;
    if (inside && nr <= map_.floor_row(nc)) {
        row_ = nr;
        col_ = nc;
    }
    ++steps_;

    StepResult out;
    out.reward = {0.0, map_.step_fuel};
    if (const auto* t = map_.treasure_at(row_, col_)) {
        out.reward[0] = t->value;
        out.terminal = true;
    } else if (steps_ >= map_.max_episode_steps) {
        out.truncated = true;
    }
    done_ = out.terminal || out.truncated;
    out.state = encode();
    return out;
}

std::unique_ptr<Env> DeepSeaTreasure::clone() const {
    return std::make_unique<DeepSeaTreasure>(map_);
}

std::vector<DstFrontPoint> true_pareto_front(const DstMap& map, double gamma) {
    // BFS over reachable cells, walls and floor respected.
    std::vector<int> dist(static_cast<size_t>(map.rows) * map.cols, -1);
    auto idx = [&](int r, int c) { return static_cast<size_t>(r) * map.cols + c; };
    std::deque<std::pair<int, int>> queue;
    queue.push_back({0, 0});
    dist[idx(0, 0)] = 0;
    while (!queue.empty()) {
        auto [r, c] = queue.front();
        queue.pop_front();
        if (map.treasure_at(r, c)) continue;  // terminal, no movement past it
        const int dr[4] = {-1, 1, 0, 0};
        const int dc[4] = {0, 0, -1, 1};
        for (int k = 0; k < 4; ++k) {
            int nr = r + dr[k], nc = c + dc[k];
            if (nr < 0 || nr >= map.rows || nc < 0 || nc >= map.cols) continue;
            if (nr > map.floor_row(nc)) continue;
            if (dist[idx(nr, nc)] >= 0) continue;
            dist[idx(nr, nc)] = dist[idx(r, c)] + 1;
            queue.push_back({nr, nc});
        }
    }

    std::vector<DstFrontPoint> points;
    for (const auto& t : map.treasures) {
        int d = dist[idx(t.row, t.col)];
        require(d > 0, "dst map: treasure unreachable from the start cell");
        DstFrontPoint p;
        p.steps = d;
        p.raw_value = t.value;
        p.treasure = t.value * std::pow(gamma, d - 1);
        double fuel = 0;
        for (int j = 0; j < d; ++j) fuel += std::pow(gamma, j);
        p.fuel = -fuel;
        points.push_back(p);
    }

    // Keep the nondominated subset (strict dominance).
    std::vector<DstFrontPoint> front;
    for (const auto& p : points) {
        bool dominated = false;
        for (const auto& q : points)
            if (q.treasure > p.treasure && q.fuel > p.fuel) {
                dominated = true;
                break;
            }
        if (!dominated) front.push_back(p);
    }
    std::sort(front.begin(), front.end(),
              [](const DstFrontPoint& a, const DstFrontPoint& b) { return a.steps < b.steps; });
    return front;
}

double dst_worst_fuel(const DstMap& map, double gamma) {
    double fuel = 0;
    for (int j = 0; j < map.max_episode_steps; ++j) fuel += std::pow(gamma, j);
    return -fuel;
}

}  // namespace morl
