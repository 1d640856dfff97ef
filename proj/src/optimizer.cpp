#include "morl/optimizer.hpp"

#include <cmath>

namespace morl {

void adam_step(ParamTree& params, AdamState& state) {
    auto& entries = params.entries();
    const AdamConfig& cfg = state.cfg_;
    require(cfg.beta1 > 0 && cfg.beta1 < 1 && cfg.beta2 > 0 && cfg.beta2 < 1,
            "adam_step: beta1 and beta2 must lie in (0,1)");

    if (state.moments_.empty()) {
        state.moments_.resize(entries.size());
        for (size_t i = 0; i < entries.size(); ++i) {
            state.moments_[i].m = Tensor::zeros(entries[i].value.shape);
            state.moments_[i].v = Tensor::zeros(entries[i].value.shape);
        }
    }
    require(state.moments_.size() == entries.size(),
            "adam_step: optimizer state does not match tree layout");

    for (const auto& e : entries) {
        if (!in_scope(e.name, cfg.scope)) continue;
        require(e.grad.all_finite(),
                "adam_step: non-finite gradient in '" + e.name + "', step rejected");
    }

    ++state.t_;
    double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t_));
    double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t_));

    for (size_t i = 0; i < entries.size(); ++i) {
        ParamEntry& e = entries[i];
        if (!in_scope(e.name, cfg.scope)) continue;
        auto& mom = state.moments_[i];
        bool decay = cfg.weight_decay > 0 && e.name.rfind("critic.", 0) == 0;
        for (size_t j = 0; j < e.value.size(); ++j) {
            double g = e.grad.data[j];
            mom.m.data[j] = cfg.beta1 * mom.m.data[j] + (1.0 - cfg.beta1) * g;
            mom.v.data[j] = cfg.beta2 * mom.v.data[j] + (1.0 - cfg.beta2) * g * g;
            double mhat = mom.m.data[j] / bc1;
            double vhat = mom.v.data[j] / bc2;
            if (decay) e.value.data[j] -= cfg.lr * cfg.weight_decay * e.value.data[j];
            e.value.data[j] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
        }
        e.grad.fill(0.0);
    }
    ++params.step_count;
}

}  // namespace morl
