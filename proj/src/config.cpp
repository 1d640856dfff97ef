#include "morl/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

extern char** environ;

namespace morl {

void RunConfig::finalize(const EnvSpec& spec) {
    entropy.h_max = std::log(static_cast<double>(spec.num_actions));
    if (!h_min_explicit) entropy.h_min = env_id == "dst" ? 0.1 : 0.4;
    if (entropy.eta_tilde == 0) entropy.eta_tilde = train.lr / 10.0;
    require(entropy.h_min > 0 && entropy.h_min < entropy.h_max,
            "entropy.h_min must lie in (0, log|A|)");
}

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

int64_t parse_int(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        int64_t out = std::stoll(v, &pos);
        require(pos == v.size(), "");
        return out;
    } catch (...) {
        fail("config key '" + key + "': cannot parse '" + v + "' as an integer");
    }
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        double out = std::stod(v, &pos);
        require(pos == v.size(), "");
        return out;
    } catch (...) {
        fail("config key '" + key + "': cannot parse '" + v + "' as a number");
    }
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "off" || v == "no") return false;
    fail("config key '" + key + "': cannot parse '" + v + "' as a boolean");
}

}  // namespace

const std::vector<std::string>& ConfigMap::known_keys() {
    static const std::vector<std::string> keys = {
        "env.id", "algo", "seed", "out_dir",
        "arch.kind", "arch.shared_trunk", "arch.hidden_dim", "arch.feature_dim",
        "arch.mlp_depth",
        "train.gamma", "train.batch_trajectories", "train.ppo_epochs", "train.minibatches",
        "train.clip_eps", "train.total_steps", "train.lr", "train.critic_ratio",
        "train.critic_inner_updates", "train.beta_smoothing", "train.max_grad_norm_actor",
        "train.max_grad_norm_critic", "train.popart_step_size", "train.popart",
        "train.critic_weight_decay", "train.checkpoint_interval", "train.max_rollout_steps",
        "train.max_resets", "train.dump_rollouts",
        "entropy.schedule", "entropy.lambda_init", "entropy.damping", "entropy.h_min",
        "entropy.fixed_lambda", "entropy.eta_tilde",
        "eval.grid_points", "eval.simplex_samples", "eval.episodes_per_weight", "eval.gamma",
        "eval.seed", "eval.max_steps",
    };
    return keys;
}

void ConfigMap::set(const std::string& key, const std::string& value) {
    const auto& keys = known_keys();
    require(std::find(keys.begin(), keys.end(), key) != keys.end(),
            "unknown config key '" + key + "'");
    values_[key] = value;
}

void ConfigMap::load_file(const std::string& path) {
    std::ifstream is(path);
    require(bool(is), "cannot open config file '" + path + "'");
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        size_t eq = t.find('=');
        require(eq != std::string::npos, "config file '" + path + "' line " +
                                             std::to_string(lineno) + ": expected key = value");
        set(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    }
}

void ConfigMap::load_environment() {
    for (char** env = environ; *env; ++env) {
        std::string entry(*env);
        if (entry.rfind("MORL_", 0) != 0) continue;
        size_t eq = entry.find('=');
        if (eq == std::string::npos) continue;
        std::string raw = entry.substr(5, eq - 5);
        std::string value = entry.substr(eq + 1);
        // MORL_TRAIN_LR -> train.lr; the first underscore separates the
        // section from the field.
        std::string key;
        size_t us = raw.find('_');
        if (us == std::string::npos) {
            key = raw;
        } else {
            key = raw.substr(0, us) + "." + raw.substr(us + 1);
        }
        std::transform(key.begin(), key.end(), key.begin(),
                       [](unsigned char c) { return std::tolower(c); });
        if (key == "out.dir") key = "out_dir";  // single non-sectioned compound key
        set(key, value);
    }
}

RunConfig ConfigMap::to_run_config() const {
    RunConfig cfg;
    for (const auto& [key, v] : values_) {
        if (key == "env.id") cfg.env_id = v;
        else if (key == "algo") cfg.algo = algo_from_string(v);
        else if (key == "seed") cfg.seed = static_cast<uint64_t>(parse_int(key, v));
        else if (key == "out_dir") cfg.out_dir = v;
        else if (key == "arch.kind") cfg.arch.kind = arch_kind_from_string(v);
        else if (key == "arch.shared_trunk") cfg.arch.shared_trunk = parse_bool(key, v);
        else if (key == "arch.hidden_dim") cfg.arch.hidden_dim = static_cast<int>(parse_int(key, v));
        else if (key == "arch.feature_dim") cfg.arch.feature_dim = static_cast<int>(parse_int(key, v));
        else if (key == "arch.mlp_depth") cfg.arch.mlp_depth = static_cast<int>(parse_int(key, v));
        else if (key == "train.gamma") cfg.train.gamma = parse_double(key, v);
        else if (key == "train.batch_trajectories")
            cfg.train.batch_trajectories = static_cast<int>(parse_int(key, v));
        else if (key == "train.ppo_epochs") cfg.train.ppo_epochs = static_cast<int>(parse_int(key, v));
        else if (key == "train.minibatches") cfg.train.minibatches = static_cast<int>(parse_int(key, v));
        else if (key == "train.clip_eps") cfg.train.clip_eps = parse_double(key, v);
        else if (key == "train.total_steps") cfg.train.total_steps = parse_int(key, v);
        else if (key == "train.lr") cfg.train.lr = parse_double(key, v);
        else if (key == "train.critic_ratio") cfg.train.critic_ratio = parse_double(key, v);
        else if (key == "train.critic_inner_updates")
            cfg.train.critic_inner_updates = static_cast<int>(parse_int(key, v));
        else if (key == "train.beta_smoothing") cfg.train.beta_smoothing = parse_double(key, v);
        else if (key == "train.max_grad_norm_actor")
            cfg.train.max_grad_norm_actor = parse_double(key, v);
        else if (key == "train.max_grad_norm_critic")
            cfg.train.max_grad_norm_critic = parse_double(key, v);
        else if (key == "train.popart_step_size")
            cfg.train.popart_step_size = parse_double(key, v);
        else if (key == "train.popart") {
            if (v == "auto") cfg.train.popart = -1;
            else cfg.train.popart = parse_bool(key, v) ? 1 : 0;
        } else if (key == "train.critic_weight_decay")
            cfg.train.critic_weight_decay = parse_double(key, v);
        else if (key == "train.checkpoint_interval")
            cfg.train.checkpoint_interval = static_cast<int>(parse_int(key, v));
        else if (key == "train.max_rollout_steps")
            cfg.train.max_rollout_steps = static_cast<int>(parse_int(key, v));
        else if (key == "train.max_resets") cfg.train.max_resets = static_cast<int>(parse_int(key, v));
        else if (key == "train.dump_rollouts") cfg.train.dump_rollouts = v;
        else if (key == "entropy.schedule")
            cfg.entropy.schedule = entropy_schedule_from_string(v);
        else if (key == "entropy.lambda_init") cfg.entropy.lambda = parse_double(key, v);
        else if (key == "entropy.damping") cfg.entropy.damping = parse_double(key, v);
        else if (key == "entropy.h_min") {
            cfg.entropy.h_min = parse_double(key, v);
            cfg.h_min_explicit = true;
        } else if (key == "entropy.fixed_lambda") cfg.entropy.fixed_lambda = parse_double(key, v);
        else if (key == "entropy.eta_tilde") cfg.entropy.eta_tilde = parse_double(key, v);
        else if (key == "eval.grid_points") cfg.eval.grid_points = static_cast<int>(parse_int(key, v));
        else if (key == "eval.simplex_samples")
            cfg.eval.simplex_samples = static_cast<int>(parse_int(key, v));
        else if (key == "eval.episodes_per_weight")
            cfg.eval.episodes_per_weight = static_cast<int>(parse_int(key, v));
        else if (key == "eval.gamma") cfg.eval.gamma = parse_double(key, v);
        else if (key == "eval.seed") cfg.eval.seed = static_cast<uint64_t>(parse_int(key, v));
        else if (key == "eval.max_steps") cfg.eval.max_steps = static_cast<int>(parse_int(key, v));
        else fail("unknown config key '" + key + "'");
    }
    return cfg;
}

std::string run_config_to_json(const RunConfig& cfg) {
    nlohmann::json j;
    j["env.id"] = cfg.env_id;
    j["algo"] = to_string(cfg.algo);
    j["seed"] = cfg.seed;
    j["out_dir"] = cfg.out_dir;
    j["arch.kind"] = to_string(cfg.arch.kind);
    j["arch.shared_trunk"] = cfg.arch.shared_trunk;
    j["arch.hidden_dim"] = cfg.arch.hidden();
    j["arch.feature_dim"] = cfg.arch.features();
    j["arch.mlp_depth"] = cfg.arch.mlp_depth;
    j["train.gamma"] = cfg.train.gamma;
    j["train.batch_trajectories"] = cfg.train.batch_trajectories;
    j["train.ppo_epochs"] = cfg.train.ppo_epochs;
    j["train.minibatches"] = cfg.train.minibatches;
    j["train.clip_eps"] = cfg.train.clip_eps;
    j["train.total_steps"] = cfg.train.total_steps;
    j["train.lr"] = cfg.train.lr;
    j["train.critic_ratio"] = cfg.train.critic_ratio;
    j["train.critic_inner_updates"] = cfg.train.critic_inner_updates;
    j["train.beta_smoothing"] = cfg.train.beta_smoothing;
    j["train.max_grad_norm_actor"] = cfg.train.max_grad_norm_actor;
    j["train.max_grad_norm_critic"] = cfg.train.max_grad_norm_critic;
    j["train.popart_step_size"] = cfg.train.popart_step_size;
    j["train.popart"] = cfg.train.popart;
    j["train.critic_weight_decay"] = cfg.train.critic_weight_decay;
    j["train.checkpoint_interval"] = cfg.train.checkpoint_interval;
    j["train.max_rollout_steps"] = cfg.train.max_rollout_steps;
    j["train.max_resets"] = cfg.train.max_resets;
    j["train.dump_rollouts"] = cfg.train.dump_rollouts;
    j["entropy.schedule"] = to_string(cfg.entropy.schedule);
    j["entropy.lambda_init"] = cfg.entropy.lambda;
    j["entropy.damping"] = cfg.entropy.damping;
    j["entropy.h_min"] = cfg.entropy.h_min;
    j["entropy.h_max"] = cfg.entropy.h_max;
    j["entropy.fixed_lambda"] = cfg.entropy.fixed_lambda;
    j["entropy.eta_tilde"] = cfg.entropy.eta_tilde;
    j["eval.grid_points"] = cfg.eval.grid_points;
    j["eval.simplex_samples"] = cfg.eval.simplex_samples;
    j["eval.episodes_per_weight"] = cfg.eval.episodes_per_weight;
    j["eval.gamma"] = cfg.eval.gamma;
    j["eval.seed"] = cfg.eval.seed;
    j["eval.max_steps"] = cfg.eval.max_steps;
    return j.dump(2);
}

}  // namespace morl
