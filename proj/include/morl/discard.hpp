#pragma once

#include <deque>

#include "morl/common.hpp"

namespace morl {

enum class StepAction { accept, discard_step, reset_to_checkpoint };

struct DiscardConfig {
    int warmup = 30;            // no discards until this many iterations passed
    int window = 100;           // history length for statistics and budget
    int max_discards = 5;       // budget over the trailing window
    double sigma_mult = 3.0;    // entropy-drop threshold in standard deviations
    int zero_run_limit = 200;   // near-zero streak before a checkpoint reset
    double zero_tol = 1e-6;
};

// Safeguards against learning collapse. A step is discarded when entropy
// drops hard (negative change beyond mean + 3 sigma of recent absolute
// changes) while the mean reward did not improve; a checkpoint reset fires
// after a long streak of near-zero entropy or actor gradient. Discards are
// capped by the window budget.
class DiscardState {
public:
    explicit DiscardState(DiscardConfig cfg = {}) : cfg_(cfg) {}

    StepAction check(double entropy_now, double entropy_prev, double mean_reward_now,
                     double mean_reward_prev, double actor_grad_norm);

    // Counts an externally forced discard (e.g. a non-finite update) against
    // the same budget.
    void record_forced_discard();

    int discards_in_window() const;
    bool budget_available() const { return discards_in_window() < cfg_.max_discards; }
    int64_t iterations_seen() const { return iteration_; }
    const DiscardConfig& config() const { return cfg_; }

private:
    void push_discard_flag(int flag);

    DiscardConfig cfg_;
    std::deque<double> abs_changes_;
    std::deque<int> discard_flags_;
    int zero_run_ = 0;
    int64_t iteration_ = 0;
};

// Relative critic-loss weight: running average of C * |g_c| / |g_a|,
// smoothed by delta. Skipped when the actor gradient vanishes.
double update_beta(double beta_c, double actor_grad_norm, double critic_grad_norm,
                   double ratio_c, double delta);

}  // namespace morl
