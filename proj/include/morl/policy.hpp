#pragma once

#include <span>

#include "morl/nets.hpp"
#include "morl/tensor.hpp"
#include "morl/weights.hpp"

namespace morl {

struct PolicyDecision {
    int action = 0;
    double log_prob = 0;
    double entropy = 0;
};

// Batched action source for rollouts and evaluation. One decision per row
// of (states, alphas); row i draws from rngs[i] only.
class Policy {
public:
    virtual ~Policy() = default;
    virtual void act(const Tensor& states, const Tensor& alphas, std::span<Rng*> rngs,
                     std::span<PolicyDecision> out) = 0;
};

// Samples from the categorical distribution of an actor-critic net. The
// referenced tree must stay alive; snapshots of it are safe to share across
// threads since act() only reads.
class NetPolicy final : public Policy {
public:
    NetPolicy(ParamTree& params, const ArchConfig& arch, const EnvSpec& spec,
              bool greedy = false)
        : params_(params), arch_(arch), spec_(spec), greedy_(greedy) {}

    void act(const Tensor& states, const Tensor& alphas, std::span<Rng*> rngs,
             std::span<PolicyDecision> out) override;

private:
    ParamTree& params_;
    ArchConfig arch_;
    EnvSpec spec_;
    bool greedy_;
};

int sample_categorical(std::span<const double> probs, Rng& rng);

}  // namespace morl
