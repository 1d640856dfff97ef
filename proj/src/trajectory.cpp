#include "morl/trajectory.hpp"

#include <cstdio>

namespace morl {

Trajectory rollout(Env& env, Policy& policy, const WeightVector& alpha, int max_steps,
                   Rng env_rng, Rng action_rng) {
    Env* e = &env;
    WeightVector a = alpha;
    Rng er = env_rng, ar = action_rng;
    TrajectoryBatch batch = rollout_batch({&e, 1}, policy, {&a, 1}, max_steps, {&er, 1}, {&ar, 1});
    return std::move(batch.trajectories[0]);
}

Trajectory rollout(Env& env, Policy& policy, const WeightVector& alpha, int max_steps,
                   Rng& rng) {
    return rollout(env, policy, alpha, max_steps, rng.child(0), rng.child(1));
}

TrajectoryBatch rollout_batch(std::span<Env* const> envs, Policy& policy,
                              std::span<const WeightVector> alphas, int max_steps,
                              std::span<Rng> env_rngs, std::span<Rng> action_rngs) {
    size_t n = envs.size();
    require(alphas.size() == n && env_rngs.size() == n && action_rngs.size() == n,
            "rollout_batch: mismatched batch arrays");
    require(max_steps > 0, "rollout_batch: max_steps must be positive");

    TrajectoryBatch batch;
    batch.trajectories.resize(n);
    std::vector<std::vector<double>> states(n);
    std::vector<char> active(n, 1);
    int ds = 0, num_obj = 0;
    for (size_t i = 0; i < n; ++i) {
        const EnvSpec& spec = envs[i]->spec();
        ds = spec.state_dim;
        num_obj = spec.num_objectives;
        alphas[i].validate(1e-6);
        require(alphas[i].dim() == num_obj, "rollout_batch: alpha dimension mismatch");
        batch.trajectories[i].alpha = alphas[i];
        states[i] = envs[i]->reset(env_rngs[i]);
    }

    std::vector<int> live;
    for (int step = 0; step < max_steps; ++step) {
        live.clear();
        for (size_t i = 0; i < n; ++i)
            if (active[i]) live.push_back(static_cast<int>(i));
        if (live.empty()) break;

        Tensor s = Tensor::zeros({static_cast<int>(live.size()), ds});
        Tensor a = Tensor::zeros({static_cast<int>(live.size()), num_obj});
        std::vector<Rng*> rngs(live.size());
        for (size_t r = 0; r < live.size(); ++r) {
            int i = live[r];
            std::copy(states[i].begin(), states[i].end(),
                      s.data.begin() + static_cast<long>(r) * ds);
            std::copy(alphas[i].alpha.begin(), alphas[i].alpha.end(),
                      a.data.begin() + static_cast<long>(r) * num_obj);
            rngs[r] = &action_rngs[i];
        }
        std::vector<PolicyDecision> decisions(live.size());
        policy.act(s, a, rngs, decisions);

        for (size_t r = 0; r < live.size(); ++r) {
            int i = live[r];
            Env::StepResult res = envs[i]->step(decisions[r].action);
            Transition tr;
            tr.state = std::move(states[i]);
            tr.action = decisions[r].action;
            tr.reward = res.reward;
            tr.log_prob = decisions[r].log_prob;
            tr.entropy = decisions[r].entropy;
            bool out_of_budget = step + 1 >= max_steps;
            bool terminal = res.terminal;
            bool truncated = !res.terminal && (res.truncated || out_of_budget);
            tr.terminal = terminal;
            tr.truncated = truncated;
            batch.trajectories[i].steps.push_back(std::move(tr));
            if (terminal || truncated) {
                if (truncated) batch.trajectories[i].bootstrap_state = res.state;
                active[i] = 0;
            } else {
                states[i] = std::move(res.state);
            }
        }
    }
    return batch;
}

std::vector<std::vector<double>> reward_to_go(const Trajectory& traj, double gamma,
                                              const CriticFn& critic) {
    require(gamma >= 0 && gamma < 1.0 + 1e-12, "reward_to_go: gamma must lie in [0, 1)");
    require(!traj.steps.empty(), "reward_to_go: empty trajectory");
    size_t len = traj.steps.size();
    std::vector<std::vector<double>> q(len);
    std::vector<double> carry(traj.steps[0].reward.size(), 0.0);
    if (traj.truncated()) carry = critic(traj.bootstrap_state, traj.alpha);
    for (size_t t = len; t-- > 0;) {
        const auto& r = traj.steps[t].reward;
        for (size_t k = 0; k < carry.size(); ++k) carry[k] = r[k] + gamma * carry[k];
        q[t] = carry;
    }
    return q;
}

Advantages advantages(const Trajectory& traj, const std::vector<std::vector<double>>& q_hats,
                      const CriticFn& critic, const PopArtStats& popart) {
    require(q_hats.size() == traj.steps.size(), "advantages: q_hats do not match trajectory");
    Advantages out;
    out.vec.resize(q_hats.size());
    out.scalar.resize(q_hats.size());
    for (size_t t = 0; t < q_hats.size(); ++t) {
        std::vector<double> v = critic(traj.steps[t].state, traj.alpha);
        std::vector<double> adv(v.size());
        double scal = 0;
        for (size_t k = 0; k < v.size(); ++k) {
            adv[k] = q_hats[t][k] - v[k];
            scal += traj.alpha.alpha[k] * adv[k] / popart.sigma[k];
        }
        out.vec[t] = std::move(adv);
        out.scalar[t] = scal;
    }
    return out;
}

std::vector<double> discounted_return(const std::vector<std::vector<double>>& rewards,
                                      double gamma) {
    require(!rewards.empty(), "discounted_return: no rewards");
    std::vector<double> acc(rewards[0].size(), 0.0);
    double g = 1.0;
    for (const auto& r : rewards) {
        for (size_t k = 0; k < acc.size(); ++k) acc[k] += g * r[k];
        g *= gamma;
    }
    return acc;
}

std::vector<double> discounted_return(const Trajectory& traj, double gamma) {
    std::vector<std::vector<double>> rewards;
    rewards.reserve(traj.steps.size());
    for (const auto& s : traj.steps) rewards.push_back(s.reward);
    return discounted_return(rewards, gamma);
}

void dump_trajectories_csv(const TrajectoryBatch& batch, std::ostream& os) {
    int num_obj = 0;
    for (const auto& t : batch.trajectories)
        if (!t.steps.empty()) num_obj = static_cast<int>(t.steps[0].reward.size());
    os << "step,trajectory_id,action,done";
    for (int k = 1; k <= num_obj; ++k) os << ",r_" << k;
    os << ",logprob\n";
    char buf[64];
    for (size_t i = 0; i < batch.trajectories.size(); ++i) {
        const auto& steps = batch.trajectories[i].steps;
        for (size_t t = 0; t < steps.size(); ++t) {
            const Transition& tr = steps[t];
            int done = tr.terminal ? 1 : (tr.truncated ? 2 : 0);
            os << t << "," << i << "," << tr.action << "," << done;
            for (double r : tr.reward) {
                std::snprintf(buf, sizeof(buf), "%.17g", r);
                os << "," << buf;
            }
            std::snprintf(buf, sizeof(buf), "%.17g", tr.log_prob);
            os << "," << buf << "\n";
        }
    }
}

}  // namespace morl
