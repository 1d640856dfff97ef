#pragma once

#include <vector>

#include "morl/param_tree.hpp"

namespace morl {

struct AdamConfig {
    double lr = 3e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    // Decoupled weight decay, applied only to "critic."-prefixed entries.
    double weight_decay = 0.0;
    ParamScope scope = ParamScope::all;
};

// Adam with bias correction. Moments are laid out per tree entry and are
// created lazily on the first step. Copyable, so training can snapshot and
// restore optimizer state together with the parameters.
class AdamState {
public:
    explicit AdamState(AdamConfig cfg = {}) : cfg_(cfg) {}

    AdamConfig& config() { return cfg_; }
    const AdamConfig& config() const { return cfg_; }
    int64_t steps_taken() const { return t_; }

    struct Moments {
        Tensor m, v;
    };
    std::vector<Moments>& moments() { return moments_; }
    const std::vector<Moments>& moments() const { return moments_; }
    void set_steps_taken(int64_t t) { t_ = t; }

private:
    friend void adam_step(ParamTree&, AdamState&);
    AdamConfig cfg_;
    std::vector<Moments> moments_;  // aligned with tree entry order
    int64_t t_ = 0;
};

// Applies one Adam update to every in-scope entry, zeroes the used grads and
// increments the tree's step_count. Throws without touching any parameter
// when an in-scope gradient is non-finite, so callers can discard the step.
void adam_step(ParamTree& params, AdamState& state);

}  // namespace morl
