#pragma once

#include <span>
#include <vector>

#include "morl/entropy.hpp"
#include "morl/nets.hpp"
#include "morl/popart.hpp"
#include "morl/trajectory.hpp"

namespace morl {

// Flattened transition minibatch. scalar_advantages and normalized_targets
// are treated as constants by the losses.
struct MinibatchView {
    Tensor states;  // [n, ds]
    Tensor alphas;  // [n, K]
    std::vector<int> actions;
    std::vector<double> old_log_probs;      // recorded at sampling time (pi_ref)
    std::vector<double> scalar_advantages;  // alpha^T(adv / sigma)
    Tensor normalized_targets;              // [n, K], (q - mu) / sigma

    int size() const { return states.rank() == 2 ? states.rows() : 0; }
};

struct ActorBackwardResult {
    double objective = 0;     // value of the maximized surrogate
    double entropy = 0;       // mean policy entropy over the minibatch
    double entropy_coef = 0;  // coefficient that multiplied grad H
};

// Clipped-surrogate actor step: accumulates the descent gradient of
// -(sum_k min(r_k A_k, clip(r_k, 1-eps, 1+eps) A_k)) - coef * H_mean
// into params.grad, where coef comes from entropy_step() on this
// minibatch's entropy. At the reference policy all ratios are 1 and the
// gradient reduces to the vanilla policy gradient.
ActorBackwardResult ppo_actor_backward(ParamTree& params, const ArchConfig& arch,
                                       const EnvSpec& spec, const MinibatchView& mb,
                                       double clip_eps, EntropyController& ctrl,
                                       double h_target);
// Same, on an already-built forward pass (actions must have been given),
// so one tape can serve both the actor and the critic step.
ActorBackwardResult ppo_actor_backward(NetForward& f, const MinibatchView& mb, double clip_eps,
                                       EntropyController& ctrl, double h_target);

// Policy-gradient actor step used by the A2C loop. timestep_weights holds
// gamma^t * scalar_advantage (already averaged over the trajectory batch);
// the entropy bonus uses the fixed coefficient entropy_coef.
ActorBackwardResult a2c_actor_backward(ParamTree& params, const ArchConfig& arch,
                                       const EnvSpec& spec, const MinibatchView& mb,
                                       std::span<const double> timestep_weights,
                                       double entropy_coef);
ActorBackwardResult a2c_actor_backward(NetForward& f, const MinibatchView& mb,
                                       std::span<const double> timestep_weights,
                                       double entropy_coef);

// Least-squares critic step on normalized predictions vs normalized
// targets; accumulates the descent gradient and returns the loss. With
// mu = 0, sigma = 1 this equals the plain sum of squared errors against
// the raw targets.
double critic_backward(ParamTree& params, const ArchConfig& arch, const EnvSpec& spec,
                       const MinibatchView& mb);
double critic_backward(NetForward& f, const MinibatchView& mb);

// Single-trajectory estimator of the utility gradient:
//   sum_t gamma^t alpha^T((q_t - V(s_t, alpha)) / sigma) grad log pi(a_t)
// accumulated into params.grad as a descent gradient (negated estimator).
void a2c_gradient(ParamTree& params, const ArchConfig& arch, const EnvSpec& spec,
                  const Trajectory& traj, const std::vector<std::vector<double>>& q_hats,
                  const PopArtStats& popart, double gamma);

}  // namespace morl
