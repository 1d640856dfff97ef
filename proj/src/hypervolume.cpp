#include "morl/hypervolume.hpp"

#include <algorithm>
#include <cmath>

namespace morl {

namespace {

// points are filtered (every coordinate strictly above ref) and dim >= 2.
double hv_recursive(std::vector<std::vector<double>> points, std::span<const double> ref,
                    size_t dim) {
    if (points.empty()) return 0.0;
    if (dim == 2) {
        std::sort(points.begin(), points.end(),
                  [](const auto& a, const auto& b) { return a[0] > b[0]; });
        double hv = 0;
        double level = ref[1];
        for (const auto& p : points) {
            if (p[1] > level) {
                hv += (p[0] - ref[0]) * (p[1] - level);
                level = p[1];
            }
        }
        return hv;
    }

    size_t last = dim - 1;
    std::sort(points.begin(), points.end(),
              [last](const auto& a, const auto& b) { return a[last] > b[last]; });
    double hv = 0;
    std::vector<std::vector<double>> slice;
    for (size_t i = 0; i < points.size(); ++i) {
        double z_hi = points[i][last];
        double z_lo = i + 1 < points.size() ? points[i + 1][last] : ref[last];
        slice.push_back(std::vector<double>(points[i].begin(), points[i].begin() + last));
        if (z_hi > z_lo)
            hv += (z_hi - z_lo) * hv_recursive(slice, ref.subspan(0, last), last);
    }
    return hv;
}

}  // namespace

double hypervolume(const std::vector<std::vector<double>>& points,
                   std::span<const double> reference) {
    size_t dim = reference.size();
    require(dim >= 2 && dim <= 4,
            "hypervolume supports 2 to 4 objectives, got " + std::to_string(dim));
    for (double r : reference) require(std::isfinite(r), "hypervolume reference must be finite");

    std::vector<std::vector<double>> filtered;
    for (const auto& p : points) {
        require(p.size() == dim, "hypervolume: point dimension does not match reference");
        bool dominates_ref = true;
        for (size_t i = 0; i < dim; ++i) {
            require(std::isfinite(p[i]), "hypervolume: non-finite point");
            if (p[i] <= reference[i]) {
                dominates_ref = false;
                break;
            }
        }
        if (dominates_ref) filtered.push_back(p);
    }
    return hv_recursive(std::move(filtered), reference, dim);
}

}  // namespace morl
