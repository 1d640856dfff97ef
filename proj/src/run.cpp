#include "morl/run.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "morl/checkpoint.hpp"
#include "morl/dst.hpp"
#include "morl/env_factory.hpp"
#include "morl/hypervolume.hpp"

namespace morl {

namespace fs = std::filesystem;

std::string version_string() { return "morl 0.1.0"; }

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void atomic_write(const std::string& path, const std::string& content) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        require(bool(os), "cannot open '" + tmp + "' for writing");
        os << content;
        require(bool(os), "write to '" + tmp + "' failed");
    }
    require(std::rename(tmp.c_str(), path.c_str()) == 0,
            "cannot move '" + tmp + "' into place");
}

std::string timestamp_utc() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

}  // namespace

void write_front_csv(const std::string& path, const std::vector<WeightVector>& alphas,
                     const std::vector<std::vector<double>>& returns) {
    require(!alphas.empty() && alphas.size() == returns.size(),
            "front csv: mismatched sweep arrays");
    int K = alphas[0].dim();
    std::ostringstream os;
    for (int k = 1; k <= K; ++k) os << (k > 1 ? "," : "") << "alpha_" << k;
    for (int k = 1; k <= K; ++k) os << ",ret_" << k;
    os << "\n";
    for (size_t i = 0; i < alphas.size(); ++i) {
        for (int k = 0; k < K; ++k) os << (k ? "," : "") << fmt(alphas[i].alpha[k]);
        for (int k = 0; k < K; ++k) os << "," << fmt(returns[i][k]);
        os << "\n";
    }
    atomic_write(path, os.str());
}

FrontFile read_front_csv(const std::string& path) {
    std::ifstream is(path);
    require(bool(is), "cannot open front file '" + path + "'");
    std::string line;
    require(bool(std::getline(is, line)), "front file '" + path + "' is empty");

    // Header: alpha_1..alpha_K,ret_1..ret_K.
    std::vector<std::string> cols;
    {
        std::istringstream hs(line);
        std::string c;
        while (std::getline(hs, c, ',')) cols.push_back(c);
    }
    int K = 0;
    while (K < static_cast<int>(cols.size()) &&
           cols[K] == "alpha_" + std::to_string(K + 1))
        ++K;
    require(K >= 1 && static_cast<int>(cols.size()) == 2 * K,
            "front file '" + path + "' line 1: malformed header");
    for (int k = 0; k < K; ++k)
        require(cols[K + k] == "ret_" + std::to_string(k + 1),
                "front file '" + path + "' line 1: malformed header");

    FrontFile out;
    out.num_objectives = K;
    int lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string field;
        std::vector<double> vals;
        while (std::getline(ls, field, ',')) {
            try {
                size_t pos = 0;
                vals.push_back(std::stod(field, &pos));
                require(pos == field.size(), "");
            } catch (...) {
                fail("front file '" + path + "' line " + std::to_string(lineno) +
                     ": cannot parse '" + field + "'");
            }
        }
        require(static_cast<int>(vals.size()) == 2 * K,
                "front file '" + path + "' line " + std::to_string(lineno) + ": expected " +
                    std::to_string(2 * K) + " fields, got " + std::to_string(vals.size()));
        out.alphas.push_back({vals.begin(), vals.begin() + K});
        out.returns.push_back({vals.begin() + K, vals.end()});
    }
    require(!out.alphas.empty(), "front file '" + path + "' has no data rows");
    return out;
}

void write_metrics_report(const std::string& path,
                          const std::vector<std::pair<std::string, double>>& rows) {
    std::ostringstream os;
    os << "metric,value\n";
    for (const auto& [name, value] : rows) os << name << "," << fmt(value) << "\n";
    atomic_write(path, os.str());
}

std::vector<double> hv_reference_point(const std::string& env_id, double gamma) {
    if (env_id == "dst") {
        DstMap map = DstMap::default_map();
        return {0.0, dst_worst_fuel(map, gamma)};
    }
    if (env_id == "minecart" || env_id == "minecart-deterministic") return {0.0, 0.0, -200.0};
    fail("no hypervolume reference point defined for environment '" + env_id + "'");
}

RunConfig run_config_from_manifest(const std::string& manifest_path) {
    std::ifstream is(manifest_path);
    require(bool(is), "cannot open manifest '" + manifest_path + "'");
    nlohmann::json j;
    try {
        is >> j;
    } catch (const std::exception& e) {
        fail("manifest '" + manifest_path + "' is not valid JSON: " + e.what());
    }
    require(j.contains("config"), "manifest '" + manifest_path + "' has no config section");
    const auto& c = j["config"];

    RunConfig cfg;
    cfg.env_id = c.at("env.id").get<std::string>();
    cfg.algo = algo_from_string(c.at("algo").get<std::string>());
    cfg.seed = c.at("seed").get<uint64_t>();
    cfg.out_dir = c.at("out_dir").get<std::string>();
    cfg.arch.kind = arch_kind_from_string(c.at("arch.kind").get<std::string>());
    cfg.arch.shared_trunk = c.at("arch.shared_trunk").get<bool>();
    cfg.arch.hidden_dim = c.at("arch.hidden_dim").get<int>();
    cfg.arch.feature_dim = c.at("arch.feature_dim").get<int>();
    cfg.arch.mlp_depth = c.at("arch.mlp_depth").get<int>();
    cfg.train.gamma = c.at("train.gamma").get<double>();
    cfg.train.batch_trajectories = c.at("train.batch_trajectories").get<int>();
    cfg.train.ppo_epochs = c.at("train.ppo_epochs").get<int>();
    cfg.train.minibatches = c.at("train.minibatches").get<int>();
    cfg.train.clip_eps = c.at("train.clip_eps").get<double>();
    cfg.train.total_steps = c.at("train.total_steps").get<int64_t>();
    cfg.train.lr = c.at("train.lr").get<double>();
    cfg.train.critic_ratio = c.at("train.critic_ratio").get<double>();
    cfg.train.critic_inner_updates = c.at("train.critic_inner_updates").get<int>();
    cfg.train.beta_smoothing = c.at("train.beta_smoothing").get<double>();
    cfg.train.max_grad_norm_actor = c.at("train.max_grad_norm_actor").get<double>();
    cfg.train.max_grad_norm_critic = c.at("train.max_grad_norm_critic").get<double>();
    cfg.train.popart_step_size = c.at("train.popart_step_size").get<double>();
    cfg.train.popart = c.at("train.popart").get<int>();
    cfg.train.critic_weight_decay = c.at("train.critic_weight_decay").get<double>();
    cfg.train.checkpoint_interval = c.at("train.checkpoint_interval").get<int>();
    cfg.train.max_rollout_steps = c.at("train.max_rollout_steps").get<int>();
    cfg.train.max_resets = c.at("train.max_resets").get<int>();
    if (c.contains("train.dump_rollouts"))
        cfg.train.dump_rollouts = c.at("train.dump_rollouts").get<std::string>();
    cfg.entropy.schedule = entropy_schedule_from_string(c.at("entropy.schedule").get<std::string>());
    cfg.entropy.lambda = c.at("entropy.lambda_init").get<double>();
    cfg.entropy.damping = c.at("entropy.damping").get<double>();
    cfg.entropy.h_min = c.at("entropy.h_min").get<double>();
    cfg.entropy.h_max = c.at("entropy.h_max").get<double>();
    cfg.entropy.fixed_lambda = c.at("entropy.fixed_lambda").get<double>();
    cfg.entropy.eta_tilde = c.at("entropy.eta_tilde").get<double>();
    cfg.h_min_explicit = true;
    cfg.eval.grid_points = c.at("eval.grid_points").get<int>();
    cfg.eval.simplex_samples = c.at("eval.simplex_samples").get<int>();
    cfg.eval.episodes_per_weight = c.at("eval.episodes_per_weight").get<int>();
    cfg.eval.gamma = c.at("eval.gamma").get<double>();
    cfg.eval.seed = c.at("eval.seed").get<uint64_t>();
    cfg.eval.max_steps = c.at("eval.max_steps").get<int>();
    return cfg;
}

int cmd_train(RunConfig cfg) {
    std::unique_ptr<Env> env = make_env(cfg.env_id);
    cfg.finalize(env->spec());
    cfg.train.validate();
    fs::create_directories(cfg.out_dir);

    std::string started = timestamp_utc();
    TrainResult result =
        train(cfg.algo, cfg.train, cfg.entropy, *env, cfg.arch, Rng(cfg.seed));

    {
        std::ostringstream os;
        result.log.write_csv(os);
        atomic_write(cfg.out_dir + "/metrics.csv", os.str());
    }

    std::map<std::string, std::vector<double>> extras;
    extras["popart.mu"] = result.popart.mu;
    extras["popart.sigma"] = result.popart.sigma;
    extras["popart.second_moment"] = result.popart.second_moment;
    extras["popart.step_size"] = {result.popart.step_size};
    extras["popart.enabled"] = {result.popart.enabled ? 1.0 : 0.0};
    extras["entropy.lambda"] = {result.entropy.lambda};
    extras["progress"] = {static_cast<double>(result.env_steps),
                          static_cast<double>(result.iterations)};
    save_checkpoint(cfg.out_dir + "/checkpoint.bin", result.params, result.optimizers, extras);

    nlohmann::json manifest;
    manifest["config"] = nlohmann::json::parse(run_config_to_json(cfg));
    manifest["started"] = started;
    manifest["finished"] = timestamp_utc();
    manifest["version"] = version_string();
    manifest["env_steps"] = result.env_steps;
    manifest["iterations"] = result.iterations;
    manifest["resets"] = result.resets;
    manifest["failed"] = result.failed;
    if (result.failed) manifest["failure"] = result.failure;
    if (!result.log.rows.empty()) {
        const MetricsRow& last = result.log.rows.back();
        manifest["final.mean_scalarized_return"] = last.mean_scalarized_return;
        manifest["final.entropy"] = last.entropy;
        manifest["final.lambda"] = last.lambda;
    }
    atomic_write(cfg.out_dir + "/manifest.json", manifest.dump(2));

    if (result.failed) {
        std::fprintf(stderr, "training failed: %s\n", result.failure.c_str());
        return 3;
    }
    return 0;
}

int cmd_eval(const std::string& run_dir, std::string out_dir, const ConfigMap& overrides) {
    RunConfig cfg = run_config_from_manifest(run_dir + "/manifest.json");
    for (const auto& [key, value] : overrides.values()) {
        require(key.rfind("eval.", 0) == 0, "cmd_eval accepts only eval.* overrides, got '" +
                                                key + "'");
    }
    {
        // Re-apply via the typed parser to keep validation in one place.
        ConfigMap merged;
        for (const auto& [k, v] : overrides.values()) merged.set(k, v);
        RunConfig o = merged.to_run_config();
        if (overrides.has("eval.grid_points")) cfg.eval.grid_points = o.eval.grid_points;
        if (overrides.has("eval.simplex_samples")) cfg.eval.simplex_samples = o.eval.simplex_samples;
        if (overrides.has("eval.episodes_per_weight"))
            cfg.eval.episodes_per_weight = o.eval.episodes_per_weight;
        if (overrides.has("eval.gamma")) cfg.eval.gamma = o.eval.gamma;
        if (overrides.has("eval.seed")) cfg.eval.seed = o.eval.seed;
        if (overrides.has("eval.max_steps")) cfg.eval.max_steps = o.eval.max_steps;
    }
    cfg.eval.validate();

    std::unique_ptr<Env> env = make_env(cfg.env_id);
    Rng build_rng(cfg.seed);
    ParamTree params = build_actor_critic(cfg.arch, env->spec(), build_rng);
    Checkpoint ckpt = load_checkpoint(run_dir + "/checkpoint.bin");
    apply_checkpoint_params(ckpt, params);

    if (out_dir.empty()) out_dir = run_dir + "/eval";
    fs::create_directories(out_dir);

    NetPolicy policy(params, cfg.arch, env->spec());
    EvalSweep sweep = evaluate_policy(*env, policy, cfg.eval);
    write_front_csv(out_dir + "/front.csv", sweep.alphas, sweep.mean_returns);
    write_front_csv(out_dir + "/front_gamma1.csv", sweep.alphas, sweep.mean_returns_undiscounted);

    std::vector<std::pair<std::string, double>> report;
    auto add_metrics = [&](const std::vector<std::vector<double>>& returns, double gamma,
                           const std::string& suffix) {
        std::vector<FrontPoint> points;
        for (size_t i = 0; i < sweep.alphas.size(); ++i)
            points.push_back(FrontPoint{returns[i], sweep.alphas[i].alpha});
        std::vector<std::vector<double>> front_values;
        for (const auto& p : pareto_filter(points)) front_values.push_back(p.value);
        std::vector<double> ref = hv_reference_point(cfg.env_id, gamma);
        report.emplace_back("hv" + suffix, hypervolume(front_values, ref));

        double eu = 0;
        for (size_t i = 0; i < sweep.alphas.size(); ++i)
            eu += scalarize(sweep.alphas[i], returns[i]);
        eu /= static_cast<double>(sweep.alphas.size());
        report.emplace_back("eu" + suffix, eu);

        if (cfg.env_id == "dst") {
            std::vector<std::vector<double>> oracle;
            for (const auto& p : true_pareto_front(DstMap::default_map(), gamma))
                oracle.push_back({p.treasure, p.fuel});
            double mul = -1e300;
            for (size_t i = 0; i < sweep.alphas.size(); ++i) {
                double best = -1e300;
                for (const auto& p : oracle) best = std::max(best, scalarize(sweep.alphas[i], p));
                mul = std::max(mul, best - scalarize(sweep.alphas[i], returns[i]));
            }
            report.emplace_back("mul" + suffix, mul);
        }
    };
    add_metrics(sweep.mean_returns, cfg.eval.gamma, "");
    add_metrics(sweep.mean_returns_undiscounted, 1.0, "_gamma1");
    write_metrics_report(out_dir + "/metrics.csv", report);
    return 0;
}

int cmd_metrics(const std::string& front_path, const std::string& reference_env,
                const std::string& reference_front_path, const std::vector<double>& ref_point,
                double gamma, const std::string& out_path) {
    FrontFile front = read_front_csv(front_path);
    int K = front.num_objectives;

    std::vector<double> ref = ref_point;
    if (ref.empty() && !reference_env.empty()) ref = hv_reference_point(reference_env, gamma);
    require(!ref.empty(), "no hypervolume reference: pass --ref or --env");
    require(static_cast<int>(ref.size()) == K,
            "reference point dimension " + std::to_string(ref.size()) +
                " does not match front dimension " + std::to_string(K));

    std::vector<FrontPoint> points;
    for (size_t i = 0; i < front.returns.size(); ++i)
        points.push_back(FrontPoint{front.returns[i], front.alphas[i]});
    std::vector<std::vector<double>> front_values;
    for (const auto& p : pareto_filter(points)) front_values.push_back(p.value);

    std::vector<std::pair<std::string, double>> report;
    report.emplace_back("hv", hypervolume(front_values, ref));

    double eu = 0;
    for (size_t i = 0; i < front.returns.size(); ++i) {
        WeightVector w{front.alphas[i]};
        eu += scalarize(w, front.returns[i]);
    }
    report.emplace_back("eu", eu / static_cast<double>(front.returns.size()));

    std::vector<std::vector<double>> reference_front;
    if (!reference_front_path.empty()) {
        FrontFile rf = read_front_csv(reference_front_path);
        require(rf.num_objectives == K, "reference front dimension mismatch");
        reference_front = rf.returns;
    } else if (reference_env == "dst") {
        for (const auto& p : true_pareto_front(DstMap::default_map(), gamma))
            reference_front.push_back({p.treasure, p.fuel});
    }
    if (!reference_front.empty()) {
        double mul = -1e300;
        for (size_t i = 0; i < front.returns.size(); ++i) {
            WeightVector w{front.alphas[i]};
            double best = -1e300;
            for (const auto& p : reference_front) best = std::max(best, scalarize(w, p));
            mul = std::max(mul, best - scalarize(w, front.returns[i]));
        }
        report.emplace_back("mul", mul);
    }

    if (out_path.empty()) {
        std::printf("metric,value\n");
        for (const auto& [name, value] : report) std::printf("%s,%s\n", name.c_str(), fmt(value).c_str());
    } else {
        write_metrics_report(out_path, report);
    }
    return 0;
}

}  // namespace morl
