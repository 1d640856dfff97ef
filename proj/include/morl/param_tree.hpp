#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "morl/tensor.hpp"

namespace morl {

struct ParamEntry {
    std::string name;
    Tensor value;
    Tensor grad;
};

// Entries prefixed "critic." belong exclusively to the critic; everything
// else (trunk, actor head, hypernet) is reachable from the actor objective.
enum class ParamScope { all, actor, critic };

bool in_scope(const std::string& name, ParamScope scope);

// Named, shaped parameter storage with paired gradient buffers.
// Iteration order is insertion order and is deterministic.
class ParamTree {
public:
    ParamEntry& add(const std::string& name, Tensor init);
    ParamEntry& at(const std::string& name);
    const ParamEntry& at(const std::string& name) const;
    bool has(const std::string& name) const;

    std::vector<ParamEntry>& entries() { return entries_; }
    const std::vector<ParamEntry>& entries() const { return entries_; }
    size_t num_params() const;

    void zero_grads(ParamScope scope = ParamScope::all);
    double grad_norm(ParamScope scope = ParamScope::all) const;

    std::vector<Tensor> copy_grads() const;
    void copy_grads_into(std::vector<Tensor>& out) const;  // reuses capacity
    void scale_grads(double factor, ParamScope scope = ParamScope::all);
    void add_grads(const std::vector<Tensor>& other);
    // grad = self_scale * grad + other, one pass.
    void combine_grads(const std::vector<Tensor>& other, double self_scale);

    std::vector<Tensor> copy_values() const;
    void restore_values(const std::vector<Tensor>& values);

    int64_t step_count = 0;

private:
    std::vector<ParamEntry> entries_;
    std::unordered_map<std::string, size_t> index_;
};

// Scales every in-scope gradient by max_norm/norm when the global L2 norm
// exceeds max_norm. Returns the pre-clip norm.
double clip_global_norm(ParamTree& params, double max_norm, ParamScope scope = ParamScope::all);

}  // namespace morl
