#pragma once

#include <memory>
#include <string>
#include <vector>

#include "morl/common.hpp"
#include "morl/rng.hpp"

namespace morl {

struct EnvSpec {
    int state_dim = 0;
    int num_actions = 0;
    int num_objectives = 0;
    int max_episode_steps = 0;

    void validate() const {
        require(state_dim > 0 && num_actions > 0 && num_objectives > 0 && max_episode_steps > 0,
                "environment spec fields must all be positive");
    }
};

// Episodic vector-reward environment. One instance is single-threaded;
// independent instances (via clone) may run in parallel. Stochastic
// environments draw only from the stream handed to reset, so a fixed seed
// reproduces a trajectory exactly.
class Env {
public:
    virtual ~Env() = default;

    struct StepResult {
        std::vector<double> state;
        std::vector<double> reward;
        bool terminal = false;
        bool truncated = false;  // episode step limit hit without a terminal state
    };

    virtual const EnvSpec& spec() const = 0;
    virtual std::vector<double> reset(Rng& rng) = 0;
    virtual StepResult step(int action) = 0;
    virtual std::unique_ptr<Env> clone() const = 0;
    virtual std::string id() const = 0;
};

}  // namespace morl
