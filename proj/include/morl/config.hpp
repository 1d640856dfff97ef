#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "morl/entropy.hpp"
#include "morl/evaluate.hpp"
#include "morl/nets.hpp"
#include "morl/train.hpp"

namespace morl {

// One full training/evaluation run. Defaults follow the standard
// experiment configuration; the entropy floor falls back to 0.1 on dst and
// 0.4 elsewhere when not set explicitly.
struct RunConfig {
    std::string env_id = "dst";
    Algo algo = Algo::moppo;
    ArchConfig arch;
    TrainConfig train;
    EntropyController entropy;
    EvalProtocol eval;
    uint64_t seed = 1;
    std::string out_dir = "run";

    bool h_min_explicit = false;

    // Applies environment-dependent defaults (h_min, h_max, eta_tilde).
    void finalize(const EnvSpec& spec);
};

// Ordered key/value layers: defaults, then config file, then MORL_*
// environment variables, then command-line flags. Unknown keys and
// malformed values raise Error naming the key.
class ConfigMap {
public:
    void load_file(const std::string& path);
    void load_environment();  // MORL_TRAIN_LR -> train.lr
    void set(const std::string& key, const std::string& value);
    bool has(const std::string& key) const { return values_.count(key) > 0; }
    const std::map<std::string, std::string>& values() const { return values_; }

    RunConfig to_run_config() const;

    static const std::vector<std::string>& known_keys();

private:
    std::map<std::string, std::string> values_;
};

std::string run_config_to_json(const RunConfig& cfg);

}  // namespace morl
