#include "morl/nets.hpp"

#include <cmath>

namespace morl {

ArchKind arch_kind_from_string(const std::string& name) {
    if (name == "multi-body" || name == "multi_body") return ArchKind::multi_body;
    if (name == "merge") return ArchKind::merge;
    if (name == "hypernet") return ArchKind::hypernet;
    if (name == "hypernet-obs" || name == "hypernet_obs") return ArchKind::hypernet_obs;
    fail("unknown architecture '" + name +
         "', expected one of multi-body, merge, hypernet, hypernet-obs");
}

std::string to_string(ArchKind kind) {
    switch (kind) {
        case ArchKind::multi_body: return "multi-body";
        case ArchKind::merge: return "merge";
        case ArchKind::hypernet: return "hypernet";
        case ArchKind::hypernet_obs: return "hypernet-obs";
    }
    return "?";
}

int ArchConfig::hidden() const {
    if (hidden_dim > 0) return hidden_dim;
    return is_hypernet() ? 64 : 256;
}

namespace {

void add_linear(ParamTree& tree, const std::string& prefix, int out, int in, Rng& rng,
                double init_scale = 1.0) {
    double a = std::sqrt(6.0 / static_cast<double>(in + out)) * init_scale;
    Tensor w = Tensor::zeros({out, in});
    for (double& v : w.data) v = rng.uniform(-a, a);
    tree.add(prefix + ".W", std::move(w));
    tree.add(prefix + ".b", Tensor::zeros({out}));
}

// MLP stack of `depth` ReLU layers mapping in -> hidden -> ... -> features.
void add_mlp(ParamTree& tree, const std::string& prefix, int in, int hidden, int features,
             int depth, Rng& rng) {
    require(depth >= 1, "mlp_depth must be at least 1");
    int cur = in;
    for (int j = 0; j < depth; ++j) {
        int out = (j + 1 == depth) ? features : hidden;
        add_linear(tree, prefix + ".mlp" + std::to_string(j), out, cur, rng);
        cur = out;
    }
}

void add_trunk(ParamTree& tree, const std::string& ns, const ArchConfig& arch,
               const EnvSpec& spec, Rng& rng) {
    int h = arch.hidden();
    int f = arch.features();
    switch (arch.kind) {
        case ArchKind::multi_body:
            for (int i = 0; i < spec.num_objectives; ++i)
                add_linear(tree, ns + "body" + std::to_string(i), h, spec.state_dim, rng);
            add_mlp(tree, ns.substr(0, ns.size() - 1), h, h, f, arch.mlp_depth, rng);
            break;
        case ArchKind::merge:
            add_linear(tree, ns + "state_emb", h, spec.state_dim, rng);
            add_linear(tree, ns + "weight_emb", h, spec.num_objectives, rng);
            add_mlp(tree, ns.substr(0, ns.size() - 1), h, h, f, arch.mlp_depth, rng);
            break;
        case ArchKind::hypernet:
        case ArchKind::hypernet_obs:
            add_mlp(tree, ns.substr(0, ns.size() - 1), spec.state_dim, h, f, arch.mlp_depth,
                    rng);
            break;
    }
}

void add_hyper_input(ParamTree& tree, const std::string& ns, const ArchConfig& arch,
                     const EnvSpec& spec, Rng& rng) {
    int in = spec.num_objectives + (arch.kind == ArchKind::hypernet_obs ? spec.state_dim : 0);
    add_linear(tree, ns + "in", arch.hidden(), in, rng);
}

constexpr double kGeneratorInitScale = 0.01;

}  // namespace

ParamTree build_actor_critic(const ArchConfig& arch, const EnvSpec& spec, Rng& rng) {
    spec.validate();
    ParamTree tree;
    int f = arch.features();
    add_trunk(tree, "trunk.", arch, spec, rng);
    if (arch.is_hypernet()) {
        add_hyper_input(tree, "hyper.", arch, spec, rng);
        add_linear(tree, "actor.gen", (f + 1) * spec.num_actions, arch.hidden(), rng,
                   kGeneratorInitScale);
        add_linear(tree, "critic.gen", (f + 1) * spec.num_objectives, arch.hidden(), rng,
                   kGeneratorInitScale);
        if (!arch.shared_trunk) {
            add_trunk(tree, "critic.trunk.", arch, spec, rng);
            add_hyper_input(tree, "critic.hyper.", arch, spec, rng);
        }
    } else {
        add_linear(tree, "actor.head", spec.num_actions, f, rng);
        add_linear(tree, "critic.head", spec.num_objectives, f, rng);
        if (!arch.shared_trunk) add_trunk(tree, "critic.trunk.", arch, spec, rng);
    }
    return tree;
}

namespace {

struct Ctx {
    Tape& tape;
    ParamTree& params;
    bool trainable;

    Var p(const std::string& name) {
        ParamEntry& e = params.at(name);
        return tape.param(e.value, trainable ? &e.grad : nullptr);
    }

    Var linear(const std::string& prefix, Var x) {
        return tape.add_rowvec(tape.matmul_nt(x, p(prefix + ".W")), p(prefix + ".b"));
    }

    Var mlp(const std::string& ns, Var x, int depth) {
        for (int j = 0; j < depth; ++j)
            x = tape.relu(linear(ns + ".mlp" + std::to_string(j), x));
        return x;
    }
};

// Feature extraction for one namespace ("trunk." or "critic.trunk.").
Var trunk_features(Ctx& ctx, const std::string& ns, const ArchConfig& arch, const EnvSpec& spec,
                   Var states, Var alphas) {
    std::string base = ns.substr(0, ns.size() - 1);
    switch (arch.kind) {
        case ArchKind::multi_body: {
            std::vector<Var> bodies;
            for (int i = 0; i < spec.num_objectives; ++i)
                bodies.push_back(
                    ctx.tape.relu(ctx.linear(ns + "body" + std::to_string(i), states)));
            Var mixed = ctx.tape.weighted_sum(bodies, alphas);
            return ctx.mlp(base, mixed, arch.mlp_depth);
        }
        case ArchKind::merge: {
            Var s = ctx.tape.sigmoid(ctx.linear(ns + "state_emb", states));
            Var w = ctx.tape.sigmoid(ctx.linear(ns + "weight_emb", alphas));
            return ctx.mlp(base, ctx.tape.mul(s, w), arch.mlp_depth);
        }
        case ArchKind::hypernet:
        case ArchKind::hypernet_obs:
            return ctx.mlp(base, states, arch.mlp_depth);
    }
    fail("unreachable architecture kind");
}

Var hyper_embedding(Ctx& ctx, const std::string& ns, const ArchConfig& arch, Var states,
                    Var alphas) {
    Var in = arch.kind == ArchKind::hypernet_obs ? ctx.tape.concat_cols(alphas, states) : alphas;
    return ctx.tape.relu(ctx.linear(ns + "in", in));
}

void validate_alphas(const Tensor& alphas) {
    require(alphas.rank() == 2, "alphas must be a [n x K] matrix, got " + alphas.shape_str());
    for (int r = 0; r < alphas.rows(); ++r) {
        double sum = 0;
        for (int c = 0; c < alphas.cols(); ++c) {
            double a = alphas.at(r, c);
            require(a >= -1e-6, "alpha entry " + std::to_string(a) + " is negative");
            sum += a;
        }
        require(std::abs(sum - 1.0) <= 1e-6,
                "alpha row sums to " + std::to_string(sum) + ", not a simplex point");
    }
}

}  // namespace

NetForward net_forward(ParamTree& params, const ArchConfig& arch, const EnvSpec& spec,
                       const Tensor& states, const Tensor& alphas,
                       const std::vector<int>* actions, bool trainable, NetHeads heads) {
    require(states.rank() == 2 && states.cols() == spec.state_dim,
            "states must be [n x " + std::to_string(spec.state_dim) + "], got " +
                states.shape_str());
    require(alphas.rows() == states.rows() && alphas.cols() == spec.num_objectives,
            "alphas " + alphas.shape_str() + " do not match states " + states.shape_str());
    validate_alphas(alphas);

    bool want_actor = heads != NetHeads::critic_only;
    bool want_critic = heads != NetHeads::actor_only;

    NetForward out;
    Ctx ctx{out.tape, params, trainable};
    Var s = out.tape.input(states);
    Var al = out.tape.input(alphas);

    Var feat;
    if (want_actor || arch.shared_trunk)
        feat = trunk_features(ctx, "trunk.", arch, spec, s, al);
    Var feat_c;
    if (want_critic)
        feat_c = arch.shared_trunk ? feat
                                   : trunk_features(ctx, "critic.trunk.", arch, spec, s, al);

    if (arch.is_hypernet()) {
        Var h;
        if (want_actor || arch.shared_trunk) h = hyper_embedding(ctx, "hyper.", arch, s, al);
        if (want_actor) {
            Var gen_a = ctx.linear("actor.gen", h);
            out.logits = out.tape.generated_affine(gen_a, feat, spec.num_actions);
        }
        if (want_critic) {
            Var h_c = arch.shared_trunk ? h : hyper_embedding(ctx, "critic.hyper.", arch, s, al);
            Var gen_c = ctx.linear("critic.gen", h_c);
            out.value_norm = out.tape.generated_affine(gen_c, feat_c, spec.num_objectives);
        }
    } else {
        if (want_actor) out.logits = ctx.linear("actor.head", feat);
        if (want_critic) out.value_norm = ctx.linear("critic.head", feat_c);
    }

    out.features = feat;
    if (want_actor) {
        out.probs = out.tape.softmax_rows(out.logits);
        out.log_probs = out.tape.log_softmax_rows(out.logits);
        out.entropies =
            out.tape.scale(out.tape.row_sum(out.tape.mul(out.probs, out.log_probs)), -1.0);
        out.entropy_mean = out.tape.mean(out.entropies);
        if (actions) out.taken_log_prob = out.tape.select_col(out.log_probs, *actions);
    }
    return out;
}

ActorCriticOutput forward(ParamTree& params, const ArchConfig& arch, const EnvSpec& spec,
                          std::span<const double> state, const WeightVector& alpha,
                          const PopArtStats* popart) {
    Tensor s = Tensor::matrix(1, spec.state_dim, {state.begin(), state.end()});
    Tensor a = Tensor::matrix(1, spec.num_objectives, {alpha.alpha.begin(), alpha.alpha.end()});
    NetForward f = net_forward(params, arch, spec, s, a, nullptr, false);

    ActorCriticOutput out;
    out.action_probs = f.tape.value(f.probs).data;
    out.normalized_value = f.tape.value(f.value_norm).data;
    out.unnormalized_value = out.normalized_value;
    if (popart) {
        for (int k = 0; k < spec.num_objectives; ++k)
            out.unnormalized_value[k] = popart->unnormalize(out.normalized_value[k], k);
    }
    return out;
}

void rescale_critic_head(ParamTree& params, const ArchConfig& arch, const EnvSpec& spec,
                         std::span<const double> old_sigma, std::span<const double> old_mu,
                         std::span<const double> new_sigma, std::span<const double> new_mu) {
    int num_obj = spec.num_objectives;
    if (!arch.is_hypernet()) {
        Tensor& w = params.at("critic.head.W").value;
        Tensor& b = params.at("critic.head.b").value;
        for (int i = 0; i < num_obj; ++i) {
            double scale = old_sigma[i] / new_sigma[i];
            for (int j = 0; j < w.cols(); ++j) w.at(i, j) *= scale;
            b.data[i] = (old_sigma[i] * b.data[i] + old_mu[i] - new_mu[i]) / new_sigma[i];
        }
        return;
    }
    // Generated critic head: the generator output is affine in the hypernet
    // embedding, so rescaling its rows rescales the generated (W_c, b_c)
    // identically for every embedding.
    Tensor& gw = params.at("critic.gen.W").value;
    Tensor& gb = params.at("critic.gen.b").value;
    int f = arch.features();
    for (int i = 0; i < num_obj; ++i) {
        double scale = old_sigma[i] / new_sigma[i];
        for (int j = 0; j < f; ++j) {
            int row = i * f + j;
            for (int c = 0; c < gw.cols(); ++c) gw.at(row, c) *= scale;
            gb.data[row] *= scale;
        }
        int brow = num_obj * f + i;
        for (int c = 0; c < gw.cols(); ++c) gw.at(brow, c) *= scale;
        gb.data[brow] = (old_sigma[i] * gb.data[brow] + old_mu[i] - new_mu[i]) / new_sigma[i];
    }
}

void popart_update(PopArtStats& stats, ParamTree& params, const ArchConfig& arch,
                   const EnvSpec& spec, std::span<const double> targets) {
    if (!stats.enabled || targets.empty()) return;
    std::vector<double> old_mu = stats.mu;
    std::vector<double> old_sigma = stats.sigma;
    stats.update(targets, spec.num_objectives);
    rescale_critic_head(params, arch, spec, old_sigma, old_mu, stats.sigma, stats.mu);
}

}  // namespace morl
