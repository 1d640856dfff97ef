#pragma once

#include <vector>

#include "morl/env.hpp"
#include "morl/pareto.hpp"
#include "morl/policy.hpp"
#include "morl/weights.hpp"

namespace morl {

// Policy evaluation protocol: a fixed weight grid (equally spaced for two
// objectives, uniform simplex samples otherwise), several episodes per
// weight, and a dedicated seed so sweeps are reproducible.
struct EvalProtocol {
    int grid_points = 101;      // K = 2
    int simplex_samples = 64;   // K >= 3
    int episodes_per_weight = 10;
    double gamma = 0.99;
    uint64_t seed = 9001;
    int max_steps = 0;  // 0: the environment's episode limit

    void validate() const {
        require(grid_points >= 1 && simplex_samples >= 1 && episodes_per_weight >= 1,
                "evaluation protocol fields must be at least 1");
        require(gamma >= 0 && gamma <= 1, "evaluation gamma must lie in [0,1]");
    }
};

std::vector<WeightVector> protocol_weights(int num_objectives, const EvalProtocol& protocol);

// Mean return vector per protocol weight, discounted at protocol.gamma and
// undiscounted in parallel.
struct EvalSweep {
    std::vector<WeightVector> alphas;
    std::vector<std::vector<double>> mean_returns;
    std::vector<std::vector<double>> mean_returns_undiscounted;
};

EvalSweep evaluate_policy(const Env& prototype, Policy& policy, const EvalProtocol& protocol);

// Mean over protocol weights of alpha^T J(alpha).
double expected_utility(const EvalSweep& sweep);
double expected_utility(const Env& prototype, Policy& policy, const EvalProtocol& protocol);

// Worst-case utility regret against a reference front:
//   max_alpha ( max_p alpha^T p - alpha^T J(alpha) ).
double max_utility_loss(const EvalSweep& sweep,
                        const std::vector<std::vector<double>>& reference_front);
double max_utility_loss(const Env& prototype, Policy& policy, const EvalProtocol& protocol,
                        const std::vector<std::vector<double>>& reference_front);

// Nondominated subset of the sweep, each survivor tagged with its weight.
std::vector<FrontPoint> extract_front(const EvalSweep& sweep);
std::vector<FrontPoint> extract_front(const Env& prototype, Policy& policy,
                                      const EvalProtocol& protocol);

}  // namespace morl
