#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "morl/discard.hpp"
#include "morl/entropy.hpp"
#include "morl/env.hpp"
#include "morl/losses.hpp"
#include "morl/optimizer.hpp"

namespace morl {

enum class Algo { moppo, moa2c };

Algo algo_from_string(const std::string& name);
std::string to_string(Algo algo);

struct TrainConfig {
    double gamma = 0.99;
    int batch_trajectories = 8;  // B
    int ppo_epochs = 4;          // E
    int minibatches = 8;
    double clip_eps = 0.2;
    int64_t total_steps = 100000;
    double lr = 1e-3;
    double critic_ratio = 3.0;     // C: beta balancing (shared) / lr ratio (non-shared)
    int critic_inner_updates = 2;  // F critic passes per epoch, non-shared only
    double beta_smoothing = 0.001;
    double max_grad_norm_actor = 0.5;
    double max_grad_norm_critic = 0.5;
    double popart_step_size = 1e-3;
    int popart = -1;  // -1 auto (off for hypernets), 0 off, 1 on
    double critic_weight_decay = 0.01;
    int checkpoint_interval = 50;  // iterations between in-memory reset points
    int max_rollout_steps = 0;     // 0: the environment's episode limit
    int max_resets = 25;
    std::string dump_rollouts;     // debug: write the first sampled batch here

    void validate() const;
    bool popart_enabled(const ArchConfig& arch) const;
};

struct MetricsRow {
    int64_t iteration = 0;
    int64_t env_steps = 0;
    double mean_scalarized_return = 0;
    double entropy = 0;
    double lambda = 0;
    double beta_c = 0;
    double actor_grad_norm = 0;
    double critic_grad_norm = 0;
    int discarded = 0;
};

struct MetricsLog {
    std::vector<MetricsRow> rows;

    void write_csv(std::ostream& os) const;
    static MetricsLog read_csv(std::istream& is);
};

struct TrainResult {
    ParamTree params;
    std::vector<AdamState> optimizers;  // [combined] or [actor, critic]
    PopArtStats popart;
    EntropyController entropy;
    MetricsLog log;
    int64_t env_steps = 0;
    int64_t iterations = 0;
    int resets = 0;
    bool failed = false;
    std::string failure;
};

// Weight-conditioned on-policy training. The entropy controller's h_max is
// clamped to log|A|; eta_tilde defaults to lr/10 when unset. The rng seeds
// every stream (weights, environments, shuffles) via fixed children, so a
// (config, seed) pair reproduces the metrics log bit for bit.
TrainResult train(Algo algo, const TrainConfig& cfg, const EntropyController& entropy,
                  Env& env, const ArchConfig& arch, Rng rng);

TrainResult train_moppo(const TrainConfig& cfg, const EntropyController& entropy, Env& env,
                        const ArchConfig& arch, Rng rng);
TrainResult train_moa2c(const TrainConfig& cfg, const EntropyController& entropy, Env& env,
                        const ArchConfig& arch, Rng rng);

}  // namespace morl
