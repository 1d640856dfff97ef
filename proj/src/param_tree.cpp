#include "morl/param_tree.hpp"

#include <cmath>

namespace morl {

bool in_scope(const std::string& name, ParamScope scope) {
    if (scope == ParamScope::all) return true;
    bool critic = name.rfind("critic.", 0) == 0;
    return scope == ParamScope::critic ? critic : !critic;
}

ParamEntry& ParamTree::add(const std::string& name, Tensor init) {
    require(!has(name), "parameter '" + name + "' already exists");
    ParamEntry e;
    e.name = name;
    e.grad = Tensor::zeros(init.shape);
    e.value = std::move(init);
    entries_.push_back(std::move(e));
    index_[name] = entries_.size() - 1;
    return entries_.back();
}

ParamEntry& ParamTree::at(const std::string& name) {
    auto it = index_.find(name);
    require(it != index_.end(), "unknown parameter '" + name + "'");
    return entries_[it->second];
}

const ParamEntry& ParamTree::at(const std::string& name) const {
    auto it = index_.find(name);
    require(it != index_.end(), "unknown parameter '" + name + "'");
    return entries_[it->second];
}

bool ParamTree::has(const std::string& name) const { return index_.count(name) > 0; }

size_t ParamTree::num_params() const {
    size_t n = 0;
    for (const auto& e : entries_) n += e.value.size();
    return n;
}

void ParamTree::zero_grads(ParamScope scope) {
    for (auto& e : entries_)
        if (in_scope(e.name, scope)) e.grad.fill(0.0);
}

double ParamTree::grad_norm(ParamScope scope) const {
    double sq = 0;
    for (const auto& e : entries_) {
        if (!in_scope(e.name, scope)) continue;
        for (double v : e.grad.data) sq += v * v;
    }
    return std::sqrt(sq);
}

std::vector<Tensor> ParamTree::copy_grads() const {
    std::vector<Tensor> out;
    copy_grads_into(out);
    return out;
}

void ParamTree::copy_grads_into(std::vector<Tensor>& out) const {
    if (out.size() != entries_.size()) {
        out.clear();
        out.reserve(entries_.size());
        for (const auto& e : entries_) out.push_back(e.grad);
        return;
    }
    for (size_t i = 0; i < entries_.size(); ++i) {
        out[i].shape = entries_[i].grad.shape;
        out[i].data.assign(entries_[i].grad.data.begin(), entries_[i].grad.data.end());
    }
}

void ParamTree::scale_grads(double factor, ParamScope scope) {
    for (auto& e : entries_) {
        if (!in_scope(e.name, scope)) continue;
        for (double& v : e.grad.data) v *= factor;
    }
}

void ParamTree::add_grads(const std::vector<Tensor>& other) {
    require(other.size() == entries_.size(), "gradient snapshot does not match tree layout");
    for (size_t i = 0; i < entries_.size(); ++i)
        for (size_t j = 0; j < entries_[i].grad.size(); ++j)
            entries_[i].grad.data[j] += other[i].data[j];
}

void ParamTree::combine_grads(const std::vector<Tensor>& other, double self_scale) {
    require(other.size() == entries_.size(), "gradient snapshot does not match tree layout");
    for (size_t i = 0; i < entries_.size(); ++i) {
        double* g = entries_[i].grad.data.data();
        const double* o = other[i].data.data();
        size_t n = entries_[i].grad.size();
        for (size_t j = 0; j < n; ++j) g[j] = self_scale * g[j] + o[j];
    }
}

std::vector<Tensor> ParamTree::copy_values() const {
    std::vector<Tensor> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) out.push_back(e.value);
    return out;
}

void ParamTree::restore_values(const std::vector<Tensor>& values) {
    require(values.size() == entries_.size(), "value snapshot does not match tree layout");
    for (size_t i = 0; i < entries_.size(); ++i) {
        require(values[i].same_shape(entries_[i].value),
                "value snapshot shape mismatch at '" + entries_[i].name + "'");
        entries_[i].value = values[i];
    }
}

double clip_global_norm(ParamTree& params, double max_norm, ParamScope scope) {
    require(max_norm > 0, "clip_global_norm: max_norm must be positive");
    double norm = params.grad_norm(scope);
    if (norm > max_norm) params.scale_grads(max_norm / norm, scope);
    return norm;
}

}  // namespace morl
