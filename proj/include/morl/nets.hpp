#pragma once

#include <optional>
#include <string>
#include <vector>

#include "morl/env.hpp"
#include "morl/param_tree.hpp"
#include "morl/popart.hpp"
#include "morl/rng.hpp"
#include "morl/tape.hpp"
#include "morl/weights.hpp"

namespace morl {

enum class ArchKind { multi_body, merge, hypernet, hypernet_obs };

ArchKind arch_kind_from_string(const std::string& name);
std::string to_string(ArchKind kind);

// Weight-conditioned actor-critic configuration. All four kinds end in a
// softmax actor head and a linear critic head over K normalized values.
//   multi_body:   per-objective state embeddings interpolated by alpha
//   merge:        sigmoid state and alpha embeddings combined elementwise
//   hypernet:     plain state trunk; alpha generates both heads
//   hypernet_obs: as hypernet, with [alpha; state] fed to the hypernetwork
struct ArchConfig {
    ArchKind kind = ArchKind::multi_body;
    bool shared_trunk = true;
    int hidden_dim = 0;   // 0: 256 for multi_body/merge, 64 for hypernets
    int feature_dim = 0;  // 0: same as hidden
    int mlp_depth = 2;    // hidden ReLU layers after the combine stage

    int hidden() const;
    int features() const { return feature_dim > 0 ? feature_dim : hidden(); }
    bool is_hypernet() const {
        return kind == ArchKind::hypernet || kind == ArchKind::hypernet_obs;
    }
};

// Builds the full parameter set. Names and shapes are determined by
// (arch, spec); critic-exclusive entries carry the "critic." prefix and
// non-shared trunks duplicate the trunk under it. Hidden layers use
// uniform Glorot init with zero biases; hypernet generator layers are
// scaled down so generated heads start near zero.
ParamTree build_actor_critic(const ArchConfig& arch, const EnvSpec& spec, Rng& rng);

// Which output paths a forward pass should build; skipping the unused
// side saves the whole critic (or actor) trunk in non-shared mode.
enum class NetHeads { both, actor_only, critic_only };

// Tape handles for one batched forward pass. The tape references the tree,
// which must stay alive and unmodified while the tape is in use.
struct NetForward {
    Tape tape;
    Var logits;
    Var probs;           // [n, A]
    Var log_probs;       // [n, A]
    Var entropies;       // [n, 1]
    Var entropy_mean;    // [1]
    Var taken_log_prob;  // [n, 1] when actions were given
    Var value_norm;      // [n, K]
    Var features;        // [n, F] actor-side features
};

// states [n, ds], alphas [n, K]; every alpha row must lie on the simplex
// within 1e-6. With trainable=false parameters enter as constants and
// backward() will not touch the tree.
NetForward net_forward(ParamTree& params, const ArchConfig& arch, const EnvSpec& spec,
                       const Tensor& states, const Tensor& alphas,
                       const std::vector<int>* actions, bool trainable,
                       NetHeads heads = NetHeads::both);

struct ActorCriticOutput {
    std::vector<double> action_probs;
    std::vector<double> normalized_value;
    std::vector<double> unnormalized_value;
};

// Single-state convenience forward. popart=null means identity
// normalization.
ActorCriticOutput forward(ParamTree& params, const ArchConfig& arch, const EnvSpec& spec,
                          std::span<const double> state, const WeightVector& alpha,
                          const PopArtStats* popart = nullptr);

// ART step: rewrites whichever parameters produce the critic output so the
// unnormalized prediction sigma*v + mu is identical before and after a
// (mu, sigma) change. For hypernets this rescales the generator slice.
void rescale_critic_head(ParamTree& params, const ArchConfig& arch, const EnvSpec& spec,
                         std::span<const double> old_sigma, std::span<const double> old_mu,
                         std::span<const double> new_sigma, std::span<const double> new_mu);

// Statistics update plus the paired head rescale. targets is a flat
// row-major [n x K] batch of unnormalized value targets.
void popart_update(PopArtStats& stats, ParamTree& params, const ArchConfig& arch,
                   const EnvSpec& spec, std::span<const double> targets);

}  // namespace morl
