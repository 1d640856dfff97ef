#pragma once

#include <functional>
#include <ostream>
#include <span>
#include <vector>

#include "morl/env.hpp"
#include "morl/policy.hpp"
#include "morl/popart.hpp"
#include "morl/weights.hpp"

namespace morl {

struct Transition {
    std::vector<double> state;
    int action = 0;
    std::vector<double> reward;
    double log_prob = 0;
    double entropy = 0;
    bool terminal = false;   // set on the final step of a finished episode
    bool truncated = false;  // set on the final step when cut off instead
};

struct Trajectory {
    std::vector<Transition> steps;
    WeightVector alpha;
    std::vector<double> bootstrap_state;  // successor state, present iff truncated

    bool truncated() const { return !bootstrap_state.empty(); }
};

struct TrajectoryBatch {
    std::vector<Trajectory> trajectories;

    int64_t total_steps() const {
        int64_t n = 0;
        for (const auto& t : trajectories) n += static_cast<int64_t>(t.steps.size());
        return n;
    }
};

// Unnormalized critic prediction for a single (state, alpha).
using CriticFn =
    std::function<std::vector<double>(std::span<const double>, const WeightVector&)>;

// Runs one episode until terminal or truncation. Truncation comes from the
// environment's own step limit or from max_steps, whichever is first; the
// successor state is kept for bootstrapping. env_rng seeds the environment,
// action_rng drives the policy.
Trajectory rollout(Env& env, Policy& policy, const WeightVector& alpha, int max_steps,
                   Rng env_rng, Rng action_rng);

// Spec-level convenience: derives the two streams from one.
Trajectory rollout(Env& env, Policy& policy, const WeightVector& alpha, int max_steps, Rng& rng);

// Runs |envs| episodes in lockstep with one batched policy call per step.
// Produces exactly the trajectories the sequential rollout would.
TrajectoryBatch rollout_batch(std::span<Env* const> envs, Policy& policy,
                              std::span<const WeightVector> alphas, int max_steps,
                              std::span<Rng> env_rngs, std::span<Rng> action_rngs);

// Discounted reward-to-go per step; truncated trajectories bootstrap with
// the critic's unnormalized prediction at the successor state.
std::vector<std::vector<double>> reward_to_go(const Trajectory& traj, double gamma,
                                              const CriticFn& critic);

// Vector advantage q - V(s, alpha) plus its sigma-normalized scalarization
// alpha^T(adv / sigma).
struct Advantages {
    std::vector<std::vector<double>> vec;
    std::vector<double> scalar;
};
Advantages advantages(const Trajectory& traj, const std::vector<std::vector<double>>& q_hats,
                      const CriticFn& critic, const PopArtStats& popart);

std::vector<double> discounted_return(const std::vector<std::vector<double>>& rewards,
                                      double gamma);
std::vector<double> discounted_return(const Trajectory& traj, double gamma);

// Debug dump: step, trajectory_id, action, done (0 mid, 1 terminal,
// 2 truncated), r_1..r_K, logprob.
void dump_trajectories_csv(const TrajectoryBatch& batch, std::ostream& os);

}  // namespace morl
