#pragma once

#include <span>
#include <vector>

#include "morl/common.hpp"

namespace morl {

// Per-objective running mean/scale of value targets. The critic predicts
// normalized values; unnormalized predictions are sigma*v + mu. Updates use
// exponential moving averages of the first and second moments; the paired
// head rescale that keeps unnormalized predictions intact lives in nets.
struct PopArtStats {
    std::vector<double> mu;
    std::vector<double> sigma;
    std::vector<double> second_moment;
    double step_size = 1e-3;
    double sigma_min = 1e-4;
    bool enabled = true;  // disabled: identity normalization, update is a no-op
    int64_t updates = 0;

    static PopArtStats identity(int num_objectives, double step_size = 1e-3,
                                bool enabled = true);

    int dim() const { return static_cast<int>(mu.size()); }

    // EMA update from a flat row-major [n x K] target batch, with the
    // bias-corrected adaptive step of the original method: the first batch
    // sets the statistics outright and the effective step decays to
    // step_size, so normalization is meaningful from the first iteration.
    // No-op when disabled or when the batch is empty.
    void update(std::span<const double> targets, int num_objectives);

    double normalize(double value, int objective) const {
        return (value - mu[objective]) / sigma[objective];
    }
    double unnormalize(double value, int objective) const {
        return sigma[objective] * value + mu[objective];
    }
};

}  // namespace morl
