#pragma once

#include <vector>

#include "morl/env.hpp"

namespace morl {

// Cart in the unit square collecting two ore types from five mines and
// selling them at the base in the lower-left corner. Three objectives:
// ore 1 sold, ore 2 sold (both scaled to [0,1] by capacity and paid only
// on delivery), and fuel, which is negative on every step. Terminal on
// returning to base with cargo. The stochastic variant perturbs mining
// yields through the environment's own child stream.
struct MinecartConfig {
    struct Mine {
        double x = 0, y = 0;
        double ore1 = 0, ore2 = 0;  // yield per mining action
    };

    std::vector<Mine> mines;
    double capacity = 1.5;
    double mine_radius = 0.14;
    double base_x = 0.0, base_y = 0.0;
    double base_radius = 0.15;
    double acceleration = 0.0125;
    double brake = 0.025;
    double max_speed = 0.05;
    double rotation_deg = 15.0;
    double fuel_idle = -0.005;
    double fuel_accelerate = -0.025;
    double fuel_mine = -0.05;
    double yield_noise = 0.5;  // stochastic yields drawn from U(1-n, 1+n) * base
    bool deterministic = false;
    int max_episode_steps = 250;

    static MinecartConfig default_config(bool deterministic);
    void validate() const;
};

class Minecart final : public Env {
public:
    explicit Minecart(MinecartConfig config = MinecartConfig::default_config(false));

    const EnvSpec& spec() const override { return spec_; }
    std::vector<double> reset(Rng& rng) override;
    StepResult step(int action) override;
    std::unique_ptr<Env> clone() const override;
    std::string id() const override;

    const MinecartConfig& config() const { return cfg_; }
    double cargo(int ore) const { return cargo_[ore]; }

    static constexpr int kMine = 0, kAccelerate = 1, kBrake = 2, kTurnLeft = 3, kTurnRight = 4,
                         kNone = 5;

private:
    std::vector<double> encode() const;

    MinecartConfig cfg_;
    EnvSpec spec_;
    Rng rng_{0};
    double x_ = 0, y_ = 0, speed_ = 0, heading_ = 0;
    double cargo_[2] = {0, 0};
    int steps_ = 0;
    bool done_ = true;
};

}  // namespace morl
