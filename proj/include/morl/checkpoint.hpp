#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "morl/optimizer.hpp"
#include "morl/param_tree.hpp"

namespace morl {

// Versioned binary checkpoint: every parameter entry as (name, shape, raw
// little-endian f64 data), the tree's step_count, optimizer states, and a
// named map of auxiliary double vectors (normalizer statistics, controller
// state, progress counters). Save followed by load round-trips bit-exactly.
struct Checkpoint {
    ParamTree params;
    std::vector<AdamState> optimizers;
    std::map<std::string, std::vector<double>> extras;
};

void save_checkpoint(const std::string& path, const ParamTree& params,
                     std::span<const AdamState> optimizers,
                     const std::map<std::string, std::vector<double>>& extras);

Checkpoint load_checkpoint(const std::string& path);

// Copies checkpoint parameter values into an already-built tree; the entry
// names and shapes must match exactly.
void apply_checkpoint_params(const Checkpoint& ckpt, ParamTree& params);

}  // namespace morl
