// Command-line experiment harness: train, eval, metrics, plot.
// Exit codes: 0 success, 2 usage or configuration error, 3 training failure.

#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "morl/config.hpp"
#include "morl/plot.hpp"
#include "morl/run.hpp"

namespace {

struct FlagSpec {
    std::string flag;
    std::string key;
    std::string help;
};

// Every config key is reachable as a flag; flags override the config file,
// which overrides MORL_* environment variables' lower layer counterpart
// (precedence: defaults < file < environment < flags).
const std::vector<FlagSpec> kTrainFlags = {
    {"--env", "env.id", "environment id (dst, minecart, minecart-deterministic)"},
    {"--algo", "algo", "moppo or moa2c"},
    {"--seed", "seed", "run seed"},
    {"--out", "out_dir", "output directory"},
    {"--arch", "arch.kind", "multi-body, merge, hypernet or hypernet-obs"},
    {"--shared-trunk", "arch.shared_trunk", "share the trunk between actor and critic"},
    {"--hidden-dim", "arch.hidden_dim", "hidden width (0: per-architecture default)"},
    {"--feature-dim", "arch.feature_dim", "feature width (0: hidden width)"},
    {"--mlp-depth", "arch.mlp_depth", "hidden layers after the combine stage"},
    {"--gamma", "train.gamma", "discount factor"},
    {"--batch", "train.batch_trajectories", "trajectories per iteration"},
    {"--epochs", "train.ppo_epochs", "optimization epochs per batch"},
    {"--minibatches", "train.minibatches", "minibatches per epoch"},
    {"--clip", "train.clip_eps", "ppo clip range"},
    {"--steps", "train.total_steps", "total environment steps"},
    {"--lr", "train.lr", "learning rate"},
    {"--critic-ratio", "train.critic_ratio", "actor-to-critic gradient/lr ratio C"},
    {"--critic-inner", "train.critic_inner_updates", "critic passes per epoch (non-shared)"},
    {"--beta-smoothing", "train.beta_smoothing", "critic weight smoothing delta"},
    {"--max-grad-norm", "train.max_grad_norm_actor", "actor gradient norm limit"},
    {"--max-grad-norm-critic", "train.max_grad_norm_critic", "critic gradient norm limit"},
    {"--popart", "train.popart", "value normalization: auto, on or off"},
    {"--popart-step", "train.popart_step_size", "normalizer learning rate"},
    {"--weight-decay", "train.critic_weight_decay", "critic weight decay"},
    {"--checkpoint-interval", "train.checkpoint_interval", "iterations between reset points"},
    {"--rollout-steps", "train.max_rollout_steps", "rollout truncation (0: env limit)"},
    {"--max-resets", "train.max_resets", "checkpoint resets before giving up"},
    {"--dump-rollouts", "train.dump_rollouts", "debug: write the first sampled batch as csv"},
    {"--entropy-schedule", "entropy.schedule", "linear, cosine, custom or fixed"},
    {"--lambda-init", "entropy.lambda_init", "initial entropy multiplier"},
    {"--entropy-damping", "entropy.damping", "entropy constraint damping"},
    {"--h-min", "entropy.h_min", "entropy floor (default 0.1 dst, 0.4 otherwise)"},
    {"--fixed-lambda", "entropy.fixed_lambda", "entropy weight for the fixed schedule"},
    {"--eta-tilde", "entropy.eta_tilde", "multiplier learning rate (0: lr/10)"},
};

const std::vector<FlagSpec> kEvalFlags = {
    {"--grid", "eval.grid_points", "weights on the two-objective grid"},
    {"--simplex-samples", "eval.simplex_samples", "weights sampled for three or more objectives"},
    {"--episodes", "eval.episodes_per_weight", "episodes per weight"},
    {"--eval-gamma", "eval.gamma", "evaluation discount"},
    {"--eval-seed", "eval.seed", "evaluation seed"},
    {"--eval-steps", "eval.max_steps", "episode cap during evaluation (0: env limit)"},
};

void add_config_flags(CLI::App* cmd, const std::vector<FlagSpec>& specs,
                      std::vector<std::pair<std::string, std::string>>& sink) {
    for (const auto& spec : specs) {
        cmd->add_option_function<std::string>(
               spec.flag,
               [&sink, key = spec.key](const std::string& v) { sink.emplace_back(key, v); },
               spec.help)
            ->expected(1);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"weight-conditioned multi-objective reinforcement learning"};
    app.require_subcommand(1);

    // train
    auto* train_cmd = app.add_subcommand("train", "train a policy");
    std::string train_config_file;
    train_cmd->add_option("--config", train_config_file, "key = value config file");
    std::vector<std::pair<std::string, std::string>> train_overrides;
    add_config_flags(train_cmd, kTrainFlags, train_overrides);
    add_config_flags(train_cmd, kEvalFlags, train_overrides);

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint, write front + metrics");
    std::string eval_run_dir, eval_out_dir;
    eval_cmd->add_option("--run-dir", eval_run_dir, "directory with manifest.json + checkpoint.bin")
        ->required();
    eval_cmd->add_option("--out", eval_out_dir, "output directory (default: <run-dir>/eval)");
    std::vector<std::pair<std::string, std::string>> eval_overrides;
    add_config_flags(eval_cmd, kEvalFlags, eval_overrides);

    // metrics
    auto* metrics_cmd = app.add_subcommand("metrics", "recompute hv/eu/mul from a front file");
    std::string metrics_front, metrics_env, metrics_ref_front, metrics_out;
    std::vector<double> metrics_ref;
    double metrics_gamma = 0.99;
    metrics_cmd->add_option("--front", metrics_front, "front csv")->required();
    metrics_cmd->add_option("--env", metrics_env, "environment for reference point/front");
    metrics_cmd->add_option("--reference-front", metrics_ref_front, "reference front csv");
    metrics_cmd->add_option("--ref", metrics_ref, "explicit reference point coordinates");
    metrics_cmd->add_option("--gamma", metrics_gamma, "discount for the reference");
    metrics_cmd->add_option("--out", metrics_out, "write report here instead of stdout");

    // plot
    auto* plot_cmd = app.add_subcommand("plot", "render two-objective fronts as svg");
    std::vector<std::string> plot_fronts;
    std::string plot_out = "front.svg", plot_oracle_env;
    double plot_gamma = 0.99;
    plot_cmd->add_option("fronts", plot_fronts, "front csv files")->required();
    plot_cmd->add_option("--out", plot_out, "output svg path");
    plot_cmd->add_option("--oracle-env", plot_oracle_env, "overlay this environment's true front");
    plot_cmd->add_option("--gamma", plot_gamma, "discount for the oracle front");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (train_cmd->parsed()) {
            morl::ConfigMap map;
            if (!train_config_file.empty()) map.load_file(train_config_file);
            map.load_environment();
            for (const auto& [key, value] : train_overrides) map.set(key, value);
            return morl::cmd_train(map.to_run_config());
        }
        if (eval_cmd->parsed()) {
            morl::ConfigMap overrides;
            for (const auto& [key, value] : eval_overrides) overrides.set(key, value);
            return morl::cmd_eval(eval_run_dir, eval_out_dir, overrides);
        }
        if (metrics_cmd->parsed()) {
            return morl::cmd_metrics(metrics_front, metrics_env, metrics_ref_front, metrics_ref,
                                     metrics_gamma, metrics_out);
        }
        if (plot_cmd->parsed()) {
            return morl::cmd_plot(plot_fronts, plot_oracle_env, plot_gamma, plot_out);
        }
    } catch (const morl::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 2;
}
