#include "morl/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "morl/policy.hpp"
#include "morl/trajectory.hpp"

namespace morl {

Algo algo_from_string(const std::string& name) {
    if (name == "moppo") return Algo::moppo;
    if (name == "moa2c") return Algo::moa2c;
    fail("unknown algorithm '" + name + "', expected moppo or moa2c");
}

std::string to_string(Algo algo) { return algo == Algo::moppo ? "moppo" : "moa2c"; }

void TrainConfig::validate() const {
    require(gamma >= 0 && gamma < 1, "train.gamma must lie in [0,1)");
    require(batch_trajectories > 0, "train.batch_trajectories must be positive");
    require(ppo_epochs > 0, "train.ppo_epochs must be positive");
    require(minibatches > 0, "train.minibatches must be positive");
    require(clip_eps > 0 && clip_eps < 1, "train.clip_eps must lie in (0,1)");
    require(total_steps >= 0, "train.total_steps must not be negative");
    require(lr > 0, "train.lr must be positive");
    require(critic_ratio > 0, "train.critic_ratio must be positive");
    require(critic_inner_updates > 0, "train.critic_inner_updates must be positive");
    require(beta_smoothing >= 0 && beta_smoothing <= 1, "train.beta_smoothing must lie in [0,1]");
    require(max_grad_norm_actor > 0 && max_grad_norm_critic > 0,
            "gradient norm limits must be positive");
}

bool TrainConfig::popart_enabled(const ArchConfig& arch) const {
    if (popart == 0) return false;
    if (popart == 1) return true;
    return !arch.is_hypernet();
}

namespace {

void write_double(std::ostream& os, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    os << buf;
}

}  // namespace

void MetricsLog::write_csv(std::ostream& os) const {
    os << "iteration,env_steps,mean_scalarized_return,entropy,lambda,beta_c,"
          "actor_grad_norm,critic_grad_norm,discarded\n";
    for (const auto& r : rows) {
        os << r.iteration << "," << r.env_steps << ",";
        write_double(os, r.mean_scalarized_return);
        os << ",";
        write_double(os, r.entropy);
        os << ",";
        write_double(os, r.lambda);
        os << ",";
        write_double(os, r.beta_c);
        os << ",";
        write_double(os, r.actor_grad_norm);
        os << ",";
        write_double(os, r.critic_grad_norm);
        os << "," << r.discarded << "\n";
    }
}

MetricsLog MetricsLog::read_csv(std::istream& is) {
    MetricsLog log;
    std::string line;
    require(bool(std::getline(is, line)), "metrics csv: missing header");
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        MetricsRow r;
        std::istringstream ls(line);
        std::string field;
        auto next = [&]() {
            require(bool(std::getline(ls, field, ',')), "metrics csv: short row");
            return field;
        };
        r.iteration = std::stoll(next());
        r.env_steps = std::stoll(next());
        r.mean_scalarized_return = std::stod(next());
        r.entropy = std::stod(next());
        r.lambda = std::stod(next());
        r.beta_c = std::stod(next());
        r.actor_grad_norm = std::stod(next());
        r.critic_grad_norm = std::stod(next());
        r.discarded = std::stoi(next());
        log.rows.push_back(r);
    }
    return log;
}

namespace {

// Flattened rollout batch with row-aligned auxiliary arrays.
struct FlatBatch {
    int n = 0;
    Tensor states, alphas, rewards;
    std::vector<int> actions;
    std::vector<double> old_logp;
    std::vector<int> traj_of_row, t_of_row;
    std::vector<int> traj_first_row, traj_len;
    std::vector<char> traj_truncated;
    Tensor boot_states, boot_alphas;  // one row per truncated trajectory
    std::vector<int> boot_traj;
    double mean_entropy = 0;
    double mean_scalarized_return = 0;
};

FlatBatch flatten(const TrajectoryBatch& batch, const EnvSpec& spec, double gamma) {
    FlatBatch fb;
    int64_t n_steps = batch.total_steps();
    fb.n = static_cast<int>(n_steps);
    fb.states = Tensor::zeros({fb.n, spec.state_dim});
    fb.alphas = Tensor::zeros({fb.n, spec.num_objectives});
    fb.rewards = Tensor::zeros({fb.n, spec.num_objectives});
    int n_trunc = 0;
    for (const auto& t : batch.trajectories) n_trunc += t.truncated() ? 1 : 0;
    fb.boot_states = Tensor::zeros({std::max(n_trunc, 1), spec.state_dim});
    fb.boot_alphas = Tensor::zeros({std::max(n_trunc, 1), spec.num_objectives});
    if (n_trunc == 0) {
        fb.boot_states = Tensor::zeros({0 + 1, spec.state_dim});  // unused
    }

    int row = 0, brow = 0;
    double ent_sum = 0, ret_sum = 0;
    for (size_t ti = 0; ti < batch.trajectories.size(); ++ti) {
        const Trajectory& traj = batch.trajectories[ti];
        fb.traj_first_row.push_back(row);
        fb.traj_len.push_back(static_cast<int>(traj.steps.size()));
        fb.traj_truncated.push_back(traj.truncated() ? 1 : 0);
        for (size_t t = 0; t < traj.steps.size(); ++t) {
            const Transition& tr = traj.steps[t];
            std::copy(tr.state.begin(), tr.state.end(),
                      fb.states.data.begin() + static_cast<long>(row) * spec.state_dim);
            std::copy(traj.alpha.alpha.begin(), traj.alpha.alpha.end(),
                      fb.alphas.data.begin() + static_cast<long>(row) * spec.num_objectives);
            std::copy(tr.reward.begin(), tr.reward.end(),
                      fb.rewards.data.begin() + static_cast<long>(row) * spec.num_objectives);
            fb.actions.push_back(tr.action);
            fb.old_logp.push_back(tr.log_prob);
            fb.traj_of_row.push_back(static_cast<int>(ti));
            fb.t_of_row.push_back(static_cast<int>(t));
            ent_sum += tr.entropy;
            ++row;
        }
        if (traj.truncated()) {
            std::copy(traj.bootstrap_state.begin(), traj.bootstrap_state.end(),
                      fb.boot_states.data.begin() + static_cast<long>(brow) * spec.state_dim);
            std::copy(traj.alpha.alpha.begin(), traj.alpha.alpha.end(),
                      fb.boot_alphas.data.begin() + static_cast<long>(brow) * spec.num_objectives);
            fb.boot_traj.push_back(static_cast<int>(ti));
            ++brow;
        }
        ret_sum += scalarize(traj.alpha, discounted_return(traj, gamma));
    }
    fb.mean_entropy = fb.n > 0 ? ent_sum / fb.n : 0.0;
    fb.mean_scalarized_return =
        batch.trajectories.empty() ? 0.0 : ret_sum / static_cast<double>(batch.trajectories.size());
    return fb;
}

// Per-epoch targets and advantages, recomputed from the current critic.
struct EpochTargets {
    std::vector<double> q;           // [n x K] flat
    std::vector<double> norm_q;      // normalized targets
    std::vector<double> adv_scalar;  // [n]
};

EpochTargets compute_targets(ParamTree& params, const ArchConfig& arch, const EnvSpec& spec,
                             const FlatBatch& fb, const PopArtStats& popart, double gamma) {
    int K = spec.num_objectives;
    int n_boot = static_cast<int>(fb.boot_traj.size());

    // One forward over all states plus bootstrap states.
    std::vector<double> values(static_cast<size_t>(fb.n) * K);
    std::vector<double> boot_values(static_cast<size_t>(std::max(n_boot, 0)) * K);
    {
        NetForward f = net_forward(params, arch, spec, fb.states, fb.alphas, nullptr, false,
                                   NetHeads::critic_only);
        const Tensor& vn = f.tape.value(f.value_norm);
        for (int i = 0; i < fb.n; ++i)
            for (int k = 0; k < K; ++k) values[static_cast<size_t>(i) * K + k] =
                popart.unnormalize(vn.at(i, k), k);
    }
    if (n_boot > 0) {
        Tensor bs = Tensor::zeros({n_boot, spec.state_dim});
        Tensor ba = Tensor::zeros({n_boot, K});
        std::copy(fb.boot_states.data.begin(),
                  fb.boot_states.data.begin() + static_cast<long>(n_boot) * spec.state_dim,
                  bs.data.begin());
        std::copy(fb.boot_alphas.data.begin(),
                  fb.boot_alphas.data.begin() + static_cast<long>(n_boot) * K, ba.data.begin());
        NetForward f = net_forward(params, arch, spec, bs, ba, nullptr, false,
                                   NetHeads::critic_only);
        const Tensor& vn = f.tape.value(f.value_norm);
        for (int i = 0; i < n_boot; ++i)
            for (int k = 0; k < K; ++k) boot_values[static_cast<size_t>(i) * K + k] =
                popart.unnormalize(vn.at(i, k), k);
    }

    EpochTargets out;
    out.q.assign(static_cast<size_t>(fb.n) * K, 0.0);
    std::vector<double> carry(K);
    for (size_t ti = 0; ti < fb.traj_len.size(); ++ti) {
        std::fill(carry.begin(), carry.end(), 0.0);
        if (fb.traj_truncated[ti]) {
            int b = 0;
            while (fb.boot_traj[b] != static_cast<int>(ti)) ++b;
            for (int k = 0; k < K; ++k) carry[k] = boot_values[static_cast<size_t>(b) * K + k];
        }
        int first = fb.traj_first_row[ti];
        for (int t = fb.traj_len[ti] - 1; t >= 0; --t) {
            size_t row = static_cast<size_t>(first + t);
            for (int k = 0; k < K; ++k) {
                carry[k] = fb.rewards.data[row * K + k] + gamma * carry[k];
                out.q[row * K + k] = carry[k];
            }
        }
    }
    out.norm_q.resize(out.q.size());
    out.adv_scalar.assign(fb.n, 0.0);
    return out;
}

MinibatchView gather_minibatch(const FlatBatch& fb, const EpochTargets& targets,
                               const EnvSpec& spec, std::span<const int> rows) {
    int K = spec.num_objectives;
    MinibatchView mb;
    int m = static_cast<int>(rows.size());
    mb.states = Tensor::zeros({m, spec.state_dim});
    mb.alphas = Tensor::zeros({m, K});
    mb.normalized_targets = Tensor::zeros({m, K});
    for (int i = 0; i < m; ++i) {
        int r = rows[i];
        std::copy(fb.states.data.begin() + static_cast<long>(r) * spec.state_dim,
                  fb.states.data.begin() + static_cast<long>(r + 1) * spec.state_dim,
                  mb.states.data.begin() + static_cast<long>(i) * spec.state_dim);
        std::copy(fb.alphas.data.begin() + static_cast<long>(r) * K,
                  fb.alphas.data.begin() + static_cast<long>(r + 1) * K,
                  mb.alphas.data.begin() + static_cast<long>(i) * K);
        std::copy(targets.norm_q.begin() + static_cast<long>(r) * K,
                  targets.norm_q.begin() + static_cast<long>(r + 1) * K,
                  mb.normalized_targets.data.begin() + static_cast<long>(i) * K);
        mb.actions.push_back(fb.actions[r]);
        mb.old_log_probs.push_back(fb.old_logp[r]);
        mb.scalar_advantages.push_back(targets.adv_scalar[r]);
    }
    return mb;
}

struct FullSnapshot {
    std::vector<Tensor> values;
    int64_t step_count = 0;
    std::vector<AdamState> optimizers;
    PopArtStats popart;
    EntropyController entropy;
    double beta_c = 1.0;
};

FullSnapshot snapshot(const ParamTree& params, const std::vector<AdamState>& opts,
                      const PopArtStats& popart, const EntropyController& ctrl, double beta_c) {
    return FullSnapshot{params.copy_values(), params.step_count, opts, popart, ctrl, beta_c};
}

void restore(const FullSnapshot& s, ParamTree& params, std::vector<AdamState>& opts,
             PopArtStats& popart, EntropyController& ctrl, double& beta_c) {
    params.restore_values(s.values);
    params.step_count = s.step_count;
    params.zero_grads();
    opts = s.optimizers;
    popart = s.popart;
    ctrl = s.entropy;
    beta_c = s.beta_c;
}

}  // namespace

TrainResult train(Algo algo, const TrainConfig& cfg, const EntropyController& entropy_cfg,
                  Env& env, const ArchConfig& arch, Rng rng) {
    cfg.validate();
    const EnvSpec& spec = env.spec();
    int K = spec.num_objectives;
    int B = cfg.batch_trajectories;
    int max_steps = cfg.max_rollout_steps > 0 ? cfg.max_rollout_steps : spec.max_episode_steps;

    TrainResult res;
    res.params = build_actor_critic(arch, spec, rng);
    res.popart = PopArtStats::identity(K, cfg.popart_step_size, cfg.popart_enabled(arch));
    res.entropy = entropy_cfg;
    res.entropy.h_max = std::log(static_cast<double>(spec.num_actions));
    if (res.entropy.eta_tilde == 0) res.entropy.eta_tilde = cfg.lr / 10.0;
    if (algo == Algo::moa2c) res.entropy.schedule = EntropySchedule::fixed;

    bool shared = arch.shared_trunk;
    if (shared) {
        AdamConfig ac;
        ac.lr = cfg.lr;
        ac.weight_decay = cfg.critic_weight_decay;
        ac.scope = ParamScope::all;
        res.optimizers.emplace_back(ac);
    } else {
        AdamConfig actor_cfg;
        actor_cfg.lr = cfg.lr;
        actor_cfg.scope = ParamScope::actor;
        AdamConfig critic_cfg;
        critic_cfg.lr = cfg.lr / cfg.critic_ratio;
        critic_cfg.weight_decay = cfg.critic_weight_decay;
        critic_cfg.scope = ParamScope::critic;
        res.optimizers.emplace_back(actor_cfg);
        res.optimizers.emplace_back(critic_cfg);
    }

    std::vector<std::unique_ptr<Env>> envs;
    std::vector<Env*> env_ptrs;
    for (int b = 0; b < B; ++b) {
        envs.push_back(env.clone());
        env_ptrs.push_back(envs.back().get());
    }
    NetPolicy policy(res.params, arch, spec);

    double beta_c = 1.0;
    DiscardState discard;
    FullSnapshot checkpoint = snapshot(res.params, res.optimizers, res.popart, res.entropy, beta_c);
    FullSnapshot last_pre_update = checkpoint;
    double h_prev = 0, r_prev = 0;
    bool have_prev = false;
    double last_actor_norm = 1.0;
    int consecutive_failures = 0;

    // Coarse phase timing, reported when MORL_TIMING is set.
    const bool timing = std::getenv("MORL_TIMING") != nullptr;
    double t_rollout = 0, t_targets = 0, t_update = 0, t_snapshot = 0;
    auto tick = [] { return std::chrono::steady_clock::now(); };
    auto tock = [&](std::chrono::steady_clock::time_point t0, double& acc) {
        if (timing) acc += std::chrono::duration<double>(tick() - t0).count();
    };

    while (res.env_steps < cfg.total_steps) {
        int64_t iter = res.iterations;

        // Sample B trajectories, each with its own weight vector and streams.
        std::vector<WeightVector> alphas;
        std::vector<Rng> env_rngs, act_rngs;
        for (int b = 0; b < B; ++b) {
            Rng wr = rng.child(1, static_cast<uint64_t>(iter), static_cast<uint64_t>(b));
            alphas.push_back(sample_weight(K, wr));
            env_rngs.push_back(rng.child(2, static_cast<uint64_t>(iter), static_cast<uint64_t>(b)));
            act_rngs.push_back(rng.child(5, static_cast<uint64_t>(iter), static_cast<uint64_t>(b)));
        }
        auto t_roll0 = tick();
        TrajectoryBatch batch = rollout_batch(env_ptrs, policy, alphas, max_steps, env_rngs,
                                              act_rngs);
        tock(t_roll0, t_rollout);
        if (iter == 0 && !cfg.dump_rollouts.empty()) {
            std::ofstream os(cfg.dump_rollouts, std::ios::trunc);
            require(bool(os), "cannot open '" + cfg.dump_rollouts + "' for the rollout dump");
            dump_trajectories_csv(batch, os);
        }
        FlatBatch fb = flatten(batch, spec, cfg.gamma);
        res.env_steps += batch.total_steps();

        double h_now = fb.mean_entropy;
        double r_now = fb.mean_scalarized_return;
        if (!have_prev) {
            h_prev = h_now;
            r_prev = r_now;
            have_prev = true;
        }

        MetricsRow row;
        row.iteration = iter;
        row.env_steps = res.env_steps;
        row.mean_scalarized_return = r_now;
        row.entropy = h_now;

        StepAction action = discard.check(h_now, h_prev, r_now, r_prev, last_actor_norm);
        if (action == StepAction::discard_step) {
            restore(last_pre_update, res.params, res.optimizers, res.popart, res.entropy, beta_c);
            row.discarded = 1;
            row.lambda = res.entropy.schedule == EntropySchedule::fixed ? res.entropy.fixed_lambda
                                                                        : res.entropy.lambda;
            row.beta_c = beta_c;
            res.log.rows.push_back(row);
            ++res.iterations;
            continue;
        }
        if (action == StepAction::reset_to_checkpoint) {
            restore(checkpoint, res.params, res.optimizers, res.popart, res.entropy, beta_c);
            ++res.resets;
            if (res.resets > cfg.max_resets) {
                res.failed = true;
                res.failure = "training collapsed: checkpoint reset budget exhausted";
                res.log.rows.push_back(row);
                break;
            }
            row.lambda = res.entropy.schedule == EntropySchedule::fixed ? res.entropy.fixed_lambda
                                                                        : res.entropy.lambda;
            row.beta_c = beta_c;
            res.log.rows.push_back(row);
            ++res.iterations;
            have_prev = false;
            continue;
        }

        auto t_snap0 = tick();
        FullSnapshot pre_update = snapshot(res.params, res.optimizers, res.popart, res.entropy,
                                           beta_c);
        tock(t_snap0, t_snapshot);
        res.params.zero_grads();
        std::vector<Tensor> g_actor;
        auto t_upd0 = tick();
        double progress = cfg.total_steps > 0
                              ? static_cast<double>(res.env_steps) / static_cast<double>(cfg.total_steps)
                              : 1.0;
        double h_target = res.entropy.target(progress);

        double actor_norm_sum = 0, critic_norm_sum = 0;
        int actor_norm_samples = 0, critic_norm_samples = 0;
        bool step_ok = true;
        std::string step_error;

        try {
            for (int epoch = 0; epoch < cfg.ppo_epochs; ++epoch) {
                auto t_tgt0 = tick();
                EpochTargets targets =
                    compute_targets(res.params, arch, spec, fb, res.popart, cfg.gamma);
                popart_update(res.popart, res.params, arch, spec, targets.q);
                // Advantages under the refreshed statistics; the rescale kept
                // unnormalized predictions intact, so values need no refresh.
                {
                    NetForward f = net_forward(res.params, arch, spec, fb.states, fb.alphas,
                                               nullptr, false, NetHeads::critic_only);
                    const Tensor& vn = f.tape.value(f.value_norm);
                    for (int i = 0; i < fb.n; ++i) {
                        double scal = 0;
                        for (int k = 0; k < K; ++k) {
                            size_t idx = static_cast<size_t>(i) * K + k;
                            double v = res.popart.unnormalize(vn.at(i, k), k);
                            targets.norm_q[idx] = res.popart.normalize(targets.q[idx], k);
                            scal += fb.alphas.at(i, k) * (targets.q[idx] - v) / res.popart.sigma[k];
                        }
                        targets.adv_scalar[i] = scal;
                    }
                }
                tock(t_tgt0, t_targets);

                if (algo == Algo::moppo) {
                    std::vector<int> perm(fb.n);
                    for (int i = 0; i < fb.n; ++i) perm[i] = i;
                    Rng shuffle_rng = rng.child(3, static_cast<uint64_t>(iter),
                                                static_cast<uint64_t>(epoch));
                    for (int i = fb.n - 1; i > 0; --i)
                        std::swap(perm[i], perm[shuffle_rng.uniform_int(i + 1)]);
                    int chunks = std::min(cfg.minibatches, fb.n);

                    if (!shared) {
                        // F critic passes on the separate optimizer first.
                        for (int f_pass = 0; f_pass < cfg.critic_inner_updates; ++f_pass) {
                            for (int c = 0; c < chunks; ++c) {
                                int lo = static_cast<int>(static_cast<int64_t>(fb.n) * c / chunks);
                                int hi = static_cast<int>(static_cast<int64_t>(fb.n) * (c + 1) / chunks);
                                MinibatchView mb = gather_minibatch(
                                    fb, targets, spec, std::span<const int>(perm.data() + lo, hi - lo));
                                critic_backward(res.params, arch, spec, mb);
                                double cn = clip_global_norm(res.params, cfg.max_grad_norm_critic);
                                critic_norm_sum += cn;
                                ++critic_norm_samples;
                                adam_step(res.params, res.optimizers[1]);
                            }
                        }
                    }
                    for (int c = 0; c < chunks; ++c) {
                        int lo = static_cast<int>(static_cast<int64_t>(fb.n) * c / chunks);
                        int hi = static_cast<int>(static_cast<int64_t>(fb.n) * (c + 1) / chunks);
                        MinibatchView mb = gather_minibatch(
                            fb, targets, spec, std::span<const int>(perm.data() + lo, hi - lo));
                        NetForward f = net_forward(res.params, arch, spec, mb.states, mb.alphas,
                                                   &mb.actions, true,
                                                   shared ? NetHeads::both : NetHeads::actor_only);
                        ppo_actor_backward(f, mb, cfg.clip_eps, res.entropy, h_target);
                        double an = clip_global_norm(res.params, cfg.max_grad_norm_actor);
                        actor_norm_sum += an;
                        ++actor_norm_samples;
                        if (shared) {
                            res.params.copy_grads_into(g_actor);
                            res.params.zero_grads();
                            critic_backward(f, mb);
                            double cn = clip_global_norm(res.params, cfg.max_grad_norm_critic);
                            critic_norm_sum += cn;
                            ++critic_norm_samples;
                            beta_c = update_beta(beta_c, std::min(an, cfg.max_grad_norm_actor),
                                                 std::min(cn, cfg.max_grad_norm_critic),
                                                 cfg.critic_ratio, cfg.beta_smoothing);
                            res.params.combine_grads(g_actor, beta_c);
                            adam_step(res.params, res.optimizers[0]);
                        } else {
                            adam_step(res.params, res.optimizers[0]);
                        }
                    }
                } else {  // moa2c
                    std::vector<int> all_rows(fb.n);
                    for (int i = 0; i < fb.n; ++i) all_rows[i] = i;
                    MinibatchView mb = gather_minibatch(fb, targets, spec, all_rows);
                    std::vector<double> w(fb.n);
                    double inv_b = 1.0 / static_cast<double>(B);
                    for (int i = 0; i < fb.n; ++i)
                        w[i] = std::pow(cfg.gamma, fb.t_of_row[i]) * targets.adv_scalar[i] * inv_b;

                    if (!shared) {
                        for (int f_pass = 0; f_pass < cfg.critic_inner_updates; ++f_pass) {
                            critic_backward(res.params, arch, spec, mb);
                            double cn = clip_global_norm(res.params, cfg.max_grad_norm_critic);
                            critic_norm_sum += cn;
                            ++critic_norm_samples;
                            adam_step(res.params, res.optimizers[1]);
                        }
                        a2c_actor_backward(res.params, arch, spec, mb, w,
                                           res.entropy.fixed_lambda);
                        double an = clip_global_norm(res.params, cfg.max_grad_norm_actor);
                        actor_norm_sum += an;
                        ++actor_norm_samples;
                        adam_step(res.params, res.optimizers[0]);
                    } else {
                        NetForward f = net_forward(res.params, arch, spec, mb.states, mb.alphas,
                                                   &mb.actions, true, NetHeads::both);
                        a2c_actor_backward(f, mb, w, res.entropy.fixed_lambda);
                        double an = clip_global_norm(res.params, cfg.max_grad_norm_actor);
                        actor_norm_sum += an;
                        ++actor_norm_samples;
                        res.params.copy_grads_into(g_actor);
                        res.params.zero_grads();
                        critic_backward(f, mb);
                        double cn = clip_global_norm(res.params, cfg.max_grad_norm_critic);
                        critic_norm_sum += cn;
                        ++critic_norm_samples;
                        beta_c = update_beta(beta_c, std::min(an, cfg.max_grad_norm_actor),
                                             std::min(cn, cfg.max_grad_norm_critic),
                                             cfg.critic_ratio, cfg.beta_smoothing);
                        res.params.combine_grads(g_actor, beta_c);
                        adam_step(res.params, res.optimizers[0]);
                    }
                }
            }
        } catch (const Error& e) {
            step_ok = false;
            step_error = e.what();
        }
        tock(t_upd0, t_update);

        if (!step_ok) {
            restore(pre_update, res.params, res.optimizers, res.popart, res.entropy, beta_c);
            discard.record_forced_discard();
            row.discarded = 1;
            if (++consecutive_failures >= 20) {
                restore(checkpoint, res.params, res.optimizers, res.popart, res.entropy, beta_c);
                consecutive_failures = 0;
                if (++res.resets > cfg.max_resets) {
                    res.failed = true;
                    res.failure = "training diverged: " + step_error;
                    res.log.rows.push_back(row);
                    break;
                }
            }
        } else {
            consecutive_failures = 0;
            last_pre_update = std::move(pre_update);
            h_prev = h_now;
            r_prev = r_now;
            last_actor_norm = actor_norm_samples > 0 ? actor_norm_sum / actor_norm_samples : 0.0;
        }

        row.lambda = res.entropy.schedule == EntropySchedule::fixed ? res.entropy.fixed_lambda
                                                                    : res.entropy.lambda;
        row.beta_c = beta_c;
        row.actor_grad_norm = actor_norm_samples > 0 ? actor_norm_sum / actor_norm_samples : 0.0;
        row.critic_grad_norm =
            critic_norm_samples > 0 ? critic_norm_sum / critic_norm_samples : 0.0;
        res.log.rows.push_back(row);
        ++res.iterations;

        if (step_ok && cfg.checkpoint_interval > 0 &&
            res.iterations % cfg.checkpoint_interval == 0) {
            checkpoint = snapshot(res.params, res.optimizers, res.popart, res.entropy, beta_c);
        }
    }
    if (timing)
        std::fprintf(stderr,
                     "train timing: rollout %.1fs targets %.1fs update %.1fs snapshot %.1fs "
                     "(%lld iterations, %lld steps)\n",
                     t_rollout, t_targets, t_update - t_targets, t_snapshot,
                     (long long)res.iterations, (long long)res.env_steps);
    return res;
}

TrainResult train_moppo(const TrainConfig& cfg, const EntropyController& entropy, Env& env,
                        const ArchConfig& arch, Rng rng) {
    return train(Algo::moppo, cfg, entropy, env, arch, rng);
}

TrainResult train_moa2c(const TrainConfig& cfg, const EntropyController& entropy, Env& env,
                        const ArchConfig& arch, Rng rng) {
    return train(Algo::moa2c, cfg, entropy, env, arch, rng);
}

}  // namespace morl
