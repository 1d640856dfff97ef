#pragma once

#include <span>
#include <vector>

#include "morl/common.hpp"
#include "morl/rng.hpp"

namespace morl {

// Point on the (K-1)-simplex used to condition the policy and critic.
struct WeightVector {
    std::vector<double> alpha;

    int dim() const { return static_cast<int>(alpha.size()); }
    void validate(double tol = 1e-9) const;
};

// Uniform sample from the simplex via sorted-uniform spacings.
WeightVector sample_weight(int num_objectives, Rng& rng);

double scalarize(const WeightVector& w, std::span<const double> v);

}  // namespace morl
