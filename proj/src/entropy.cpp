#include "morl/entropy.hpp"

#include <algorithm>

namespace morl {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

EntropySchedule entropy_schedule_from_string(const std::string& name) {
    if (name == "linear") return EntropySchedule::linear;
    if (name == "cosine") return EntropySchedule::cosine;
    if (name == "custom") return EntropySchedule::custom;
    if (name == "fixed") return EntropySchedule::fixed;
    fail("unknown entropy schedule '" + name + "', expected linear, cosine, custom or fixed");
}

std::string to_string(EntropySchedule schedule) {
    switch (schedule) {
        case EntropySchedule::linear: return "linear";
        case EntropySchedule::cosine: return "cosine";
        case EntropySchedule::custom: return "custom";
        case EntropySchedule::fixed: return "fixed";
    }
    return "?";
}

double entropy_target(EntropySchedule schedule, double u, double h_min, double h_max) {
    u = std::clamp(u, 0.0, 1.0);
    double range = h_max - h_min;
    switch (schedule) {
        case EntropySchedule::linear:
            return h_max - range * u;
        case EntropySchedule::cosine:
            return range * std::cos(kPi * u / 2.0) + h_min;
        case EntropySchedule::custom:
            return range * (0.5 - std::cos(kPi * std::pow(1.0 - u, 1.3)) / 2.0) + h_min;
        case EntropySchedule::fixed:
            return h_min;
    }
    return h_min;
}

double entropy_step(EntropyController& ctrl, double h_hat, double h_target) {
    if (ctrl.schedule == EntropySchedule::fixed) return ctrl.fixed_lambda;
    double gap = h_target - h_hat;
    double coefficient = ctrl.lambda + ctrl.damping * gap;
    ctrl.lambda += ctrl.eta_tilde * gap;
    if (ctrl.trace) ctrl.trace->push_back({h_hat, h_target, ctrl.lambda});
    return coefficient;
}

}  // namespace morl
