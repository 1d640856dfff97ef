#include "morl/discard.hpp"

#include <cmath>

namespace morl {

int DiscardState::discards_in_window() const {
    int n = 0;
    for (int f : discard_flags_) n += f;
    return n;
}

void DiscardState::push_discard_flag(int flag) {
    discard_flags_.push_back(flag);
    while (discard_flags_.size() > static_cast<size_t>(cfg_.window)) discard_flags_.pop_front();
}

void DiscardState::record_forced_discard() { push_discard_flag(1); }

StepAction DiscardState::check(double entropy_now, double entropy_prev, double mean_reward_now,
                               double mean_reward_prev, double actor_grad_norm) {
    ++iteration_;

    if (entropy_now < cfg_.zero_tol || actor_grad_norm < cfg_.zero_tol) {
        if (++zero_run_ >= cfg_.zero_run_limit) {
            zero_run_ = 0;
            abs_changes_.clear();
            discard_flags_.clear();
            return StepAction::reset_to_checkpoint;
        }
    } else {
        zero_run_ = 0;
    }

    double dh = entropy_now - entropy_prev;
    double adh = std::abs(dh);
    StepAction action = StepAction::accept;
    if (iteration_ > cfg_.warmup && dh < 0 && !abs_changes_.empty() && budget_available() &&
        mean_reward_now <= mean_reward_prev) {
        double mean = 0;
        for (double v : abs_changes_) mean += v;
        mean /= static_cast<double>(abs_changes_.size());
        double var = 0;
        for (double v : abs_changes_) var += (v - mean) * (v - mean);
        var /= static_cast<double>(abs_changes_.size());
        if (adh > mean + cfg_.sigma_mult * std::sqrt(var)) action = StepAction::discard_step;
    }

    if (action == StepAction::discard_step) {
        push_discard_flag(1);  // the undone change is kept out of the statistics
    } else {
        push_discard_flag(0);
        abs_changes_.push_back(adh);
        while (abs_changes_.size() > static_cast<size_t>(cfg_.window)) abs_changes_.pop_front();
    }
    return action;
}

double update_beta(double beta_c, double actor_grad_norm, double critic_grad_norm,
                   double ratio_c, double delta) {
    require(actor_grad_norm >= 0 && critic_grad_norm >= 0, "update_beta: norms must be >= 0");
    if (actor_grad_norm < 1e-12) return beta_c;
    return delta * ratio_c * critic_grad_norm / actor_grad_norm + (1.0 - delta) * beta_c;
}

}  // namespace morl
