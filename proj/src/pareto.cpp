#include "morl/pareto.hpp"

namespace morl {

bool strictly_dominates(std::span<const double> p, std::span<const double> q) {
    require(p.size() == q.size(), "dominance check: dimension mismatch");
    for (size_t i = 0; i < p.size(); ++i)
        if (p[i] <= q[i]) return false;
    return true;
}

std::vector<FrontPoint> pareto_filter(const std::vector<FrontPoint>& points) {
    require(!points.empty(), "pareto_filter: empty point set");
    std::vector<FrontPoint> front;
    for (size_t i = 0; i < points.size(); ++i) {
        bool dominated = false;
        for (size_t j = 0; j < points.size() && !dominated; ++j)
            if (j != i && strictly_dominates(points[j].value, points[i].value)) dominated = true;
        if (dominated) continue;
        bool duplicate = false;
        for (const auto& kept : front)
            if (kept.value == points[i].value) {
                duplicate = true;
                break;
            }
        if (!duplicate) front.push_back(points[i]);
    }
    return front;
}

}  // namespace morl
