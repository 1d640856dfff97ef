#include "morl/policy.hpp"

namespace morl {

int sample_categorical(std::span<const double> probs, Rng& rng) {
    double u = rng.uniform01();
    double acc = 0;
    for (size_t a = 0; a < probs.size(); ++a) {
        acc += probs[a];
        if (u < acc) return static_cast<int>(a);
    }
    return static_cast<int>(probs.size()) - 1;  // guards against rounding at u ~ 1
}

void NetPolicy::act(const Tensor& states, const Tensor& alphas, std::span<Rng*> rngs,
                    std::span<PolicyDecision> out) {
    NetForward f =
        net_forward(params_, arch_, spec_, states, alphas, nullptr, false, NetHeads::actor_only);
    const Tensor& probs = f.tape.value(f.probs);
    const Tensor& logp = f.tape.value(f.log_probs);
    const Tensor& ent = f.tape.value(f.entropies);
    int n = probs.rows();
    int num_actions = probs.cols();
    for (int i = 0; i < n; ++i) {
        std::span<const double> row(probs.data.data() + static_cast<size_t>(i) * num_actions,
                                    static_cast<size_t>(num_actions));
        int a;
        if (greedy_) {
            a = 0;
            for (int c = 1; c < num_actions; ++c)
                if (row[c] > row[a]) a = c;
        } else {
            a = sample_categorical(row, *rngs[i]);
        }
        out[i].action = a;
        out[i].log_prob = logp.at(i, a);
        out[i].entropy = ent.data[i];
    }
}

}  // namespace morl
