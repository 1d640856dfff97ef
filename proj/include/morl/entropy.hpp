#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "morl/common.hpp"

namespace morl {

enum class EntropySchedule { linear, cosine, custom, fixed };

EntropySchedule entropy_schedule_from_string(const std::string& name);
std::string to_string(EntropySchedule schedule);

// Scheduled entropy target H(u) for training progress u in [0, 1] (clamped).
// Every schedule starts at h_max and ends at h_min; "custom" holds a flat
// start for exploration and a flat end for exploitation.
double entropy_target(EntropySchedule schedule, double u, double h_min, double h_max);

// One multiplier update, recorded when tracing is enabled.
struct EntropyTraceEntry {
    double h_hat;
    double h_target;
    double lambda_after;
};

// Constrained entropy control via the modified differential method of
// multipliers: the actor update receives (lambda + c(H_target - H)) grad H
// and lambda integrates the constraint violation. lambda may go negative,
// pushing entropy down towards the target. The "fixed" schedule degrades to
// a constant entropy bonus with weight fixed_lambda.
struct EntropyController {
    EntropySchedule schedule = EntropySchedule::custom;
    double lambda = 0.01;
    double eta_tilde = 0;  // lambda learning rate; training loops set lr/10
    double damping = 0.01;
    double h_min = 0.1;
    double h_max = std::log(4.0);
    double fixed_lambda = 0.01;
    std::vector<EntropyTraceEntry>* trace = nullptr;  // optional instrumentation

    double target(double progress) const {
        return entropy_target(schedule, progress, h_min, h_max);
    }
};

// Returns the coefficient applied to grad H for this step and advances
// lambda by eta_tilde * (H_target - H). The coefficient uses the
// pre-update lambda. Fixed mode returns fixed_lambda and leaves state
// untouched.
double entropy_step(EntropyController& ctrl, double h_hat, double h_target);

}  // namespace morl
