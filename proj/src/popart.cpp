#include "morl/popart.hpp"

#include <cmath>

namespace morl {

PopArtStats PopArtStats::identity(int num_objectives, double step_size, bool enabled) {
    PopArtStats s;
    s.mu.assign(num_objectives, 0.0);
    s.sigma.assign(num_objectives, 1.0);
    s.second_moment.assign(num_objectives, 1.0);  // keeps sigma^2 = nu - mu^2 consistent
    s.step_size = step_size;
    s.enabled = enabled;
    return s;
}

void PopArtStats::update(std::span<const double> targets, int num_objectives) {
    require(num_objectives == dim(), "popart update dimension mismatch");
    if (!enabled || targets.empty() || step_size <= 0) return;
    require(targets.size() % static_cast<size_t>(num_objectives) == 0,
            "popart update: target batch is not a multiple of K");
    size_t n = targets.size() / static_cast<size_t>(num_objectives);
    ++updates;
    double beta = step_size / (1.0 - std::pow(1.0 - step_size, static_cast<double>(updates)));
    for (int k = 0; k < num_objectives; ++k) {
        double mean = 0, sq = 0;
        for (size_t i = 0; i < n; ++i) {
            double t = targets[i * num_objectives + k];
            mean += t;
            sq += t * t;
        }
        mean /= static_cast<double>(n);
        sq /= static_cast<double>(n);
        mu[k] += beta * (mean - mu[k]);
        second_moment[k] += beta * (sq - second_moment[k]);
        double var = second_moment[k] - mu[k] * mu[k];
        sigma[k] = std::sqrt(std::max(var, sigma_min * sigma_min));
    }
}

}  // namespace morl
