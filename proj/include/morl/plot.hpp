#pragma once

#include <string>
#include <vector>

#include "morl/run.hpp"

namespace morl {

// Deterministic SVG scatter of two-objective fronts. Each input file gets
// its own color; the optional oracle front is drawn as a connected line
// with cross markers. Axis ranges cover every point with a 5% margin.
// Data points are <circle class="pt"> elements, exactly one per row.
std::string render_front_svg(const std::vector<FrontFile>& fronts,
                             const std::vector<std::string>& labels,
                             const std::vector<std::vector<double>>& oracle_front);

int cmd_plot(const std::vector<std::string>& front_paths, const std::string& oracle_env,
             double gamma, const std::string& out_path);

}  // namespace morl
