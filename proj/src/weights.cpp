#include "morl/weights.hpp"

#include <algorithm>
#include <cmath>

namespace morl {

void WeightVector::validate(double tol) const {
    require(dim() >= 1, "weight vector is empty");
    double sum = 0;
    for (double a : alpha) {
        require(a >= 0 && std::isfinite(a), "weight vector has a negative or non-finite entry");
        sum += a;
    }
    require(std::abs(sum - 1.0) <= tol,
            "weight vector entries sum to " + std::to_string(sum) + ", expected 1");
}

WeightVector sample_weight(int num_objectives, Rng& rng) {
    require(num_objectives >= 2, "sample_weight: need at least two objectives");
    std::vector<double> cuts(static_cast<size_t>(num_objectives) - 1);
    for (double& c : cuts) c = rng.uniform01();
    std::sort(cuts.begin(), cuts.end());
    WeightVector w;
    w.alpha.resize(num_objectives);
    double prev = 0;
    for (int i = 0; i + 1 < num_objectives; ++i) {
        w.alpha[i] = cuts[i] - prev;
        prev = cuts[i];
    }
    w.alpha[num_objectives - 1] = 1.0 - prev;
    return w;
}

double scalarize(const WeightVector& w, std::span<const double> v) {
    require(static_cast<size_t>(w.dim()) == v.size(),
            "scalarize: weight dimension " + std::to_string(w.dim()) +
                " does not match value dimension " + std::to_string(v.size()));
    double s = 0;
    for (int i = 0; i < w.dim(); ++i) s += w.alpha[i] * v[i];
    return s;
}

}  // namespace morl
