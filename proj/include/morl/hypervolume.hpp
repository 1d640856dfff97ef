#pragma once

#include <span>
#include <vector>

#include "morl/common.hpp"

namespace morl {

// Exact Lebesgue measure of the union of boxes [ref, p] over all points
// dominating the reference, computed by a recursive sweep over the last
// coordinate. Supports K in {2, 3, 4}. Points that fail to dominate the
// reference on any axis contribute nothing.
double hypervolume(const std::vector<std::vector<double>>& points,
                   std::span<const double> reference);

}  // namespace morl
