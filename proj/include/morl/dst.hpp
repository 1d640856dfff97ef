#pragma once

#include <vector>

#include "morl/env.hpp"

namespace morl {

// Submarine gridworld with two objectives: treasure value and fuel cost
// (-1 per step). Treasures sit on the sea floor, which descends from left
// to right; cells below the floor are impassable and moves into walls or
// the floor leave the position unchanged. The episode ends on a treasure
// or is truncated at max_episode_steps.
struct DstMap {
    struct Treasure {
        int row = 0;
        int col = 0;
        double value = 0;
    };

    int rows = 11;
    int cols = 10;
    std::vector<Treasure> treasures;
    double step_fuel = -1.0;
    int max_episode_steps = 200;

    // Ten treasures placed so that every point of the undiscounted front is
    // picked up by some linear scalarization (checked by validate()).
    static DstMap default_map();

    // Distinct cells, values strictly increasing with depth and column, and
    // a sweep over 101 scalarization weights that reaches every treasure of
    // the gamma=1 front. Throws when any of it fails.
    void validate() const;

    int floor_row(int col) const;  // treasure row in that column
    const Treasure* treasure_at(int row, int col) const;
};

class DeepSeaTreasure final : public Env {
public:
    explicit DeepSeaTreasure(DstMap map = DstMap::default_map());

    const EnvSpec& spec() const override { return spec_; }
    std::vector<double> reset(Rng& rng) override;
    StepResult step(int action) override;
    std::unique_ptr<Env> clone() const override;
    std::string id() const override { return "dst"; }

    const DstMap& map() const { return map_; }
    int row() const { return row_; }
    int col() const { return col_; }

    // Actions.
    static constexpr int kUp = 0, kDown = 1, kLeft = 2, kRight = 3;

private:
    std::vector<double> encode() const;

    DstMap map_;
    EnvSpec spec_;
    int row_ = 0, col_ = 0;
    int steps_ = 0;
    bool done_ = true;
};

// Exact Pareto front of a DST map: one point (value * gamma^(d-1),
// -sum_{j<d} gamma^j) per treasure, with d the BFS shortest-path step count
// from the start, reduced to its nondominated subset.
struct DstFrontPoint {
    double treasure = 0;
    double fuel = 0;
    int steps = 0;
    double raw_value = 0;
};
std::vector<DstFrontPoint> true_pareto_front(const DstMap& map, double gamma);

// Worst-case discounted fuel spend over a full-length episode; used as the
// fuel coordinate of the hypervolume reference point.
double dst_worst_fuel(const DstMap& map, double gamma);

}  // namespace morl
