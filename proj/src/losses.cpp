#include "morl/losses.hpp"

#include <cmath>

#include "morl/entropy.hpp"

namespace morl {

ActorBackwardResult ppo_actor_backward(ParamTree& params, const ArchConfig& arch,
                                       const EnvSpec& spec, const MinibatchView& mb,
                                       double clip_eps, EntropyController& ctrl,
                                       double h_target) {
    NetForward f = net_forward(params, arch, spec, mb.states, mb.alphas, &mb.actions, true,
                               NetHeads::actor_only);
    return ppo_actor_backward(f, mb, clip_eps, ctrl, h_target);
}

ActorBackwardResult ppo_actor_backward(NetForward& f, const MinibatchView& mb, double clip_eps,
                                       EntropyController& ctrl, double h_target) {
    require(clip_eps > 0 && clip_eps < 1, "ppo clip epsilon must lie in (0,1)");
    int n = mb.size();
    require(n > 0, "ppo_actor_backward: empty minibatch");
    Tape& tape = f.tape;

    Var old_lp = tape.input(Tensor::matrix(n, 1, mb.old_log_probs));
    Var adv = tape.input(Tensor::matrix(n, 1, mb.scalar_advantages));
    Var ratio = tape.exp(tape.sub(f.taken_log_prob, old_lp));
    Var unclipped = tape.mul(ratio, adv);
    Var clipped = tape.mul(tape.clip(ratio, 1.0 - clip_eps, 1.0 + clip_eps), adv);
    Var surrogate = tape.sum(tape.min_elts(unclipped, clipped));

    ActorBackwardResult out;
    out.objective = tape.value(surrogate).data[0];
    out.entropy = tape.value(f.entropy_mean).data[0];
    out.entropy_coef = entropy_step(ctrl, out.entropy, h_target);

    // Ascent on surrogate + coef * H, fed to a minimizer.
    Var loss = tape.add(tape.scale(surrogate, -1.0), tape.scale(f.entropy_mean, -out.entropy_coef));
    tape.backward_scalar(loss);
    return out;
}

ActorBackwardResult a2c_actor_backward(ParamTree& params, const ArchConfig& arch,
                                       const EnvSpec& spec, const MinibatchView& mb,
                                       std::span<const double> timestep_weights,
                                       double entropy_coef) {
    NetForward f = net_forward(params, arch, spec, mb.states, mb.alphas, &mb.actions, true,
                               NetHeads::actor_only);
    return a2c_actor_backward(f, mb, timestep_weights, entropy_coef);
}

ActorBackwardResult a2c_actor_backward(NetForward& f, const MinibatchView& mb,
                                       std::span<const double> timestep_weights,
                                       double entropy_coef) {
    int n = mb.size();
    require(n > 0, "a2c_actor_backward: empty batch");
    require(static_cast<int>(timestep_weights.size()) == n,
            "a2c_actor_backward: weights do not match batch");
    Tape& tape = f.tape;
    Var w = tape.input(
        Tensor::matrix(n, 1, std::vector<double>(timestep_weights.begin(), timestep_weights.end())));
    Var objective = tape.dot(f.taken_log_prob, w);

    ActorBackwardResult out;
    out.objective = tape.value(objective).data[0];
    out.entropy = tape.value(f.entropy_mean).data[0];
    out.entropy_coef = entropy_coef;

    Var loss = tape.add(tape.scale(objective, -1.0), tape.scale(f.entropy_mean, -entropy_coef));
    tape.backward_scalar(loss);
    return out;
}

double critic_backward(ParamTree& params, const ArchConfig& arch, const EnvSpec& spec,
                       const MinibatchView& mb) {
    NetForward f = net_forward(params, arch, spec, mb.states, mb.alphas, nullptr, true,
                               NetHeads::critic_only);
    return critic_backward(f, mb);
}

double critic_backward(NetForward& f, const MinibatchView& mb) {
    int n = mb.size();
    require(n > 0, "critic_backward: empty minibatch");
    require(mb.normalized_targets.rows() == n, "critic_backward: targets do not match batch");
    Tape& tape = f.tape;
    Var target = tape.input(mb.normalized_targets);
    Var loss = tape.sum(tape.square(tape.sub(f.value_norm, target)));
    double value = tape.value(loss).data[0];
    tape.backward_scalar(loss);
    return value;
}

void a2c_gradient(ParamTree& params, const ArchConfig& arch, const EnvSpec& spec,
                  const Trajectory& traj, const std::vector<std::vector<double>>& q_hats,
                  const PopArtStats& popart, double gamma) {
    size_t len = traj.steps.size();
    require(len > 0 && q_hats.size() == len, "a2c_gradient: bad trajectory or targets");

    // Critic baseline from the current network, unnormalized.
    MinibatchView mb;
    mb.states = Tensor::zeros({static_cast<int>(len), spec.state_dim});
    mb.alphas = Tensor::zeros({static_cast<int>(len), spec.num_objectives});
    for (size_t t = 0; t < len; ++t) {
        std::copy(traj.steps[t].state.begin(), traj.steps[t].state.end(),
                  mb.states.data.begin() + static_cast<long>(t) * spec.state_dim);
        std::copy(traj.alpha.alpha.begin(), traj.alpha.alpha.end(),
                  mb.alphas.data.begin() + static_cast<long>(t) * spec.num_objectives);
        mb.actions.push_back(traj.steps[t].action);
    }

    std::vector<double> weights(len);
    {
        NetForward f = net_forward(params, arch, spec, mb.states, mb.alphas, nullptr, false,
                                   NetHeads::critic_only);
        const Tensor& vnorm = f.tape.value(f.value_norm);
        double g = 1.0;
        for (size_t t = 0; t < len; ++t) {
            double scal = 0;
            for (int k = 0; k < spec.num_objectives; ++k) {
                double v = popart.unnormalize(vnorm.at(static_cast<int>(t), k), k);
                scal += traj.alpha.alpha[k] * (q_hats[t][k] - v) / popart.sigma[k];
            }
            weights[t] = g * scal;
            g *= gamma;
        }
    }
    a2c_actor_backward(params, arch, spec, mb, weights, 0.0);
}

}  // namespace morl
