#pragma once

#include <span>
#include <vector>

#include "morl/common.hpp"

namespace morl {

// Evaluated return vector, optionally tagged with the weight that produced
// it.
struct FrontPoint {
    std::vector<double> value;
    std::vector<double> alpha;
};

// p strictly dominates q iff p_i > q_i on every axis.
bool strictly_dominates(std::span<const double> p, std::span<const double> q);

// Keeps exactly the points no other point strictly dominates; exact
// duplicates are kept once. Idempotent.
std::vector<FrontPoint> pareto_filter(const std::vector<FrontPoint>& points);

}  // namespace morl
