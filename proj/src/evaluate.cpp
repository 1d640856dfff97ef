#include "morl/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace morl {

std::vector<WeightVector> protocol_weights(int num_objectives, const EvalProtocol& protocol) {
    protocol.validate();
    require(num_objectives >= 2, "protocol_weights: need at least two objectives");
    std::vector<WeightVector> out;
    if (num_objectives == 2) {
        int m = protocol.grid_points;
        for (int i = 0; i < m; ++i) {
            double a = m == 1 ? 0.5 : static_cast<double>(i) / static_cast<double>(m - 1);
            out.push_back(WeightVector{{a, 1.0 - a}});
        }
    } else {
        Rng rng = Rng(protocol.seed).child(7);
        for (int i = 0; i < protocol.simplex_samples; ++i)
            out.push_back(sample_weight(num_objectives, rng));
    }
    return out;
}

EvalSweep evaluate_policy(const Env& prototype, Policy& policy, const EvalProtocol& protocol) {
    const EnvSpec& spec = prototype.spec();
    int K = spec.num_objectives;
    int ds = spec.state_dim;
    int episodes = protocol.episodes_per_weight;
    int max_steps = protocol.max_steps > 0 ? protocol.max_steps : spec.max_episode_steps;

    EvalSweep sweep;
    sweep.alphas = protocol_weights(K, protocol);
    size_t n_weights = sweep.alphas.size();
    sweep.mean_returns.assign(n_weights, std::vector<double>(K, 0.0));
    sweep.mean_returns_undiscounted.assign(n_weights, std::vector<double>(K, 0.0));

    // All (weight, episode) pairs run in lockstep; finished episodes drop
    // out of the policy batch.
    struct Slot {
        std::unique_ptr<Env> env;
        size_t weight = 0;
        Rng action_rng{0};
        std::vector<double> state;
        std::vector<double> disc, undisc;
        double gamma_pow = 1.0;
        bool active = true;
    };
    std::vector<Slot> slots;
    slots.reserve(n_weights * static_cast<size_t>(episodes));
    Rng master(protocol.seed);
    for (size_t w = 0; w < n_weights; ++w) {
        for (int e = 0; e < episodes; ++e) {
            Slot s;
            s.env = prototype.clone();
            s.weight = w;
            Rng env_rng = master.child(4, w, static_cast<uint64_t>(e));
            s.action_rng = master.child(5, w, static_cast<uint64_t>(e));
            s.state = s.env->reset(env_rng);
            s.disc.assign(K, 0.0);
            s.undisc.assign(K, 0.0);
            slots.push_back(std::move(s));
        }
    }

    std::vector<int> live;
    for (int step = 0; step < max_steps; ++step) {
        live.clear();
        for (size_t i = 0; i < slots.size(); ++i)
            if (slots[i].active) live.push_back(static_cast<int>(i));
        if (live.empty()) break;

        Tensor states = Tensor::zeros({static_cast<int>(live.size()), ds});
        Tensor alphas = Tensor::zeros({static_cast<int>(live.size()), K});
        std::vector<Rng*> rngs(live.size());
        for (size_t r = 0; r < live.size(); ++r) {
            Slot& s = slots[live[r]];
            std::copy(s.state.begin(), s.state.end(),
                      states.data.begin() + static_cast<long>(r) * ds);
            const auto& a = sweep.alphas[s.weight].alpha;
            std::copy(a.begin(), a.end(), alphas.data.begin() + static_cast<long>(r) * K);
            rngs[r] = &s.action_rng;
        }
        std::vector<PolicyDecision> decisions(live.size());
        policy.act(states, alphas, rngs, decisions);

        for (size_t r = 0; r < live.size(); ++r) {
            Slot& s = slots[live[r]];
            Env::StepResult res = s.env->step(decisions[r].action);
            for (int k = 0; k < K; ++k) {
                s.disc[k] += s.gamma_pow * res.reward[k];
                s.undisc[k] += res.reward[k];
            }
            s.gamma_pow *= protocol.gamma;
            if (res.terminal || res.truncated)
                s.active = false;
            else
                s.state = std::move(res.state);
        }
    }

    double inv_e = 1.0 / static_cast<double>(episodes);
    for (const Slot& s : slots) {
        for (int k = 0; k < K; ++k) {
            sweep.mean_returns[s.weight][k] += s.disc[k] * inv_e;
            sweep.mean_returns_undiscounted[s.weight][k] += s.undisc[k] * inv_e;
        }
    }
    return sweep;
}

double expected_utility(const EvalSweep& sweep) {
    require(!sweep.alphas.empty(), "expected_utility: empty sweep");
    double sum = 0;
    for (size_t i = 0; i < sweep.alphas.size(); ++i)
        sum += scalarize(sweep.alphas[i], sweep.mean_returns[i]);
    return sum / static_cast<double>(sweep.alphas.size());
}

double expected_utility(const Env& prototype, Policy& policy, const EvalProtocol& protocol) {
    return expected_utility(evaluate_policy(prototype, policy, protocol));
}

double max_utility_loss(const EvalSweep& sweep,
                        const std::vector<std::vector<double>>& reference_front) {
    require(!reference_front.empty(), "max_utility_loss: reference front is empty");
    require(!sweep.alphas.empty(), "max_utility_loss: empty sweep");
    double worst = -1e300;
    for (size_t i = 0; i < sweep.alphas.size(); ++i) {
        double best_ref = -1e300;
        for (const auto& p : reference_front)
            best_ref = std::max(best_ref, scalarize(sweep.alphas[i], p));
        double regret = best_ref - scalarize(sweep.alphas[i], sweep.mean_returns[i]);
        worst = std::max(worst, regret);
    }
    return worst;
}

double max_utility_loss(const Env& prototype, Policy& policy, const EvalProtocol& protocol,
                        const std::vector<std::vector<double>>& reference_front) {
    return max_utility_loss(evaluate_policy(prototype, policy, protocol), reference_front);
}

std::vector<FrontPoint> extract_front(const EvalSweep& sweep) {
    std::vector<FrontPoint> points;
    for (size_t i = 0; i < sweep.alphas.size(); ++i)
        points.push_back(FrontPoint{sweep.mean_returns[i], sweep.alphas[i].alpha});
    return pareto_filter(points);
}

std::vector<FrontPoint> extract_front(const Env& prototype, Policy& policy,
                                      const EvalProtocol& protocol) {
    return extract_front(evaluate_policy(prototype, policy, protocol));
}

}  // namespace morl
