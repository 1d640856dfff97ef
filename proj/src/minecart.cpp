#include "morl/minecart.hpp"

#include <algorithm>
#include <cmath>

namespace morl {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

MinecartConfig MinecartConfig::default_config(bool deterministic) {
    MinecartConfig c;
    c.deterministic = deterministic;
    c.mines = {
        {0.85, 0.20, 0.25, 0.05},
        {0.75, 0.55, 0.18, 0.12},
        {0.50, 0.80, 0.15, 0.15},
        {0.22, 0.75, 0.12, 0.18},
        {0.35, 0.40, 0.05, 0.25},
    };
    return c;
}

void MinecartConfig::validate() const {
    require(capacity > 0, "minecart config: capacity must be positive");
    require(!mines.empty(), "minecart config: no mines");
    require(yield_noise >= 0 && yield_noise <= 1,
            "minecart config: yield noise must lie in [0,1]");
    require(max_episode_steps > 0, "minecart config: max_episode_steps must be positive");
    for (const auto& m : mines) {
        require(m.x >= 0 && m.x <= 1 && m.y >= 0 && m.y <= 1,
                "minecart config: mine outside the unit square");
        require(m.ore1 >= 0 && m.ore2 >= 0, "minecart config: negative ore yield");
    }
    require(fuel_idle <= 0 && fuel_accelerate <= 0 && fuel_mine <= 0,
            "minecart config: fuel costs must not be positive");
}

Minecart::Minecart(MinecartConfig config) : cfg_(std::move(config)) {
    cfg_.validate();
    spec_.state_dim = 7;  // x, y, speed, sin/cos heading, cargo1, cargo2
    spec_.num_actions = 6;
    spec_.num_objectives = 3;
    spec_.max_episode_steps = cfg_.max_episode_steps;
    spec_.validate();
}

std::vector<double> Minecart::encode() const {
    return {x_,
            y_,
            speed_ / cfg_.max_speed,
            std::sin(heading_),
            std::cos(heading_),
            cargo_[0] / cfg_.capacity,
            cargo_[1] / cfg_.capacity};
}

std::vector<double> Minecart::reset(Rng& rng) {
    rng_ = Rng(rng.next_u64());
    x_ = cfg_.base_x;
    y_ = cfg_.base_y;
    speed_ = 0;
    heading_ = kPi / 4;  // facing into the square
    cargo_[0] = cargo_[1] = 0;
    steps_ = 0;
    done_ = false;
    return encode();
}

Env::StepResult Minecart::step(int action) {
    require(!done_, "minecart: step after episode end");
    require(action >= 0 && action < 6,
            "minecart: action " + std::to_string(action) + " out of range [0,6)");

    double fuel = cfg_.fuel_idle;
    switch (action) {
        case kMine: {
            fuel += cfg_.fuel_mine;
            for (const auto& m : cfg_.mines) {
                double dx = x_ - m.x, dy = y_ - m.y;
                if (dx * dx + dy * dy > cfg_.mine_radius * cfg_.mine_radius) continue;
                double f1 = 1.0, f2 = 1.0;
                if (!cfg_.deterministic) {
                    f1 = rng_.uniform(1.0 - cfg_.yield_noise, 1.0 + cfg_.yield_noise);
                    f2 = rng_.uniform(1.0 - cfg_.yield_noise, 1.0 + cfg_.yield_noise);
                }
                cargo_[0] += m.ore1 * f1;
                cargo_[1] += m.ore2 * f2;
                double total = cargo_[0] + cargo_[1];
                if (total > cfg_.capacity) {
                    double s = cfg_.capacity / total;
                    cargo_[0] *= s;
                    cargo_[1] *= s;
                }
                break;
            }
            break;
        }
        case kAccelerate:
            fuel += cfg_.fuel_accelerate;
            speed_ = std::min(speed_ + cfg_.acceleration, cfg_.max_speed);
            break;
        case kBrake:
            speed_ = std::max(speed_ - cfg_.brake, 0.0);
            break;
        case kTurnLeft:
            heading_ += cfg_.rotation_deg * kPi / 180.0;
            break;
        case kTurnRight:
            heading_ -= cfg_.rotation_deg * kPi / 180.0;
            break;
        case kNone:
            break;
    }

    x_ = std::clamp(x_ + speed_ * std::cos(heading_), 0.0, 1.0);
    y_ = std::clamp(y_ + speed_ * std::sin(heading_), 0.0, 1.0);
    ++steps_;

    StepResult out;
    out.reward = {0.0, 0.0, fuel};
    double bx = x_ - cfg_.base_x, by = y_ - cfg_.base_y;
    bool at_base = bx * bx + by * by <= cfg_.base_radius * cfg_.base_radius;
    if (at_base && cargo_[0] + cargo_[1] > 0) {
        out.reward[0] = cargo_[0] / cfg_.capacity;
        out.reward[1] = cargo_[1] / cfg_.capacity;
        cargo_[0] = cargo_[1] = 0;
        out.terminal = true;
    } else if (steps_ >= cfg_.max_episode_steps) {
        out.truncated = true;
    }
    done_ = out.terminal || out.truncated;
    out.state = encode();
    return out;
}

std::unique_ptr<Env> Minecart::clone() const { return std::make_unique<Minecart>(cfg_); }

std::string Minecart::id() const {
    return cfg_.deterministic ? "minecart-deterministic" : "minecart";
}

}  // namespace morl
