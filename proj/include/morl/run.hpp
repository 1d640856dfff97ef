#pragma once

#include <string>
#include <vector>

#include "morl/config.hpp"
#include "morl/evaluate.hpp"

namespace morl {

// Raw evaluation sweep as stored in a front file: one row per evaluated
// weight, header alpha_1..alpha_K,ret_1..ret_K.
struct FrontFile {
    int num_objectives = 0;
    std::vector<std::vector<double>> alphas;
    std::vector<std::vector<double>> returns;
};

void write_front_csv(const std::string& path, const std::vector<WeightVector>& alphas,
                     const std::vector<std::vector<double>>& returns);
FrontFile read_front_csv(const std::string& path);

void write_metrics_report(const std::string& path,
                          const std::vector<std::pair<std::string, double>>& rows);

RunConfig run_config_from_manifest(const std::string& manifest_path);

// Hypervolume reference point for an environment at a given discount.
std::vector<double> hv_reference_point(const std::string& env_id, double gamma);

// Subcommand bodies. Each returns a process exit code: 0 success,
// 2 usage/config error (raised as Error by callers), 3 training failure.
int cmd_train(RunConfig cfg);
int cmd_eval(const std::string& run_dir, std::string out_dir, const ConfigMap& overrides);
int cmd_metrics(const std::string& front_path, const std::string& reference_env,
                const std::string& reference_front_path, const std::vector<double>& ref_point,
                double gamma, const std::string& out_path);

std::string version_string();

}  // namespace morl
