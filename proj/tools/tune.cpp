// Scratch harness for picking training defaults: runs one DST
// configuration per invocation and prints the oracle-relative hypervolume.
#include <chrono>
#include <cstdio>
#include <cstring>
#include <string>

#include "morl/dst.hpp"
#include "morl/evaluate.hpp"
#include "morl/hypervolume.hpp"
#include "morl/run.hpp"
#include "morl/train.hpp"

using namespace morl;

int main(int argc, char** argv) {
    double lr = 1e-3, C = 3.0;
    int64_t steps = 100000;
    uint64_t seed = 1;
    std::string arch_name = "multi-body", algo_name = "moppo", schedule = "custom";
    bool shared = true;
    for (int i = 1; i + 1 < argc; i += 2) {
        if (!std::strcmp(argv[i], "--lr")) lr = std::stod(argv[i + 1]);
        if (!std::strcmp(argv[i], "--c")) C = std::stod(argv[i + 1]);
        if (!std::strcmp(argv[i], "--steps")) steps = std::stoll(argv[i + 1]);
        if (!std::strcmp(argv[i], "--seed")) seed = std::stoull(argv[i + 1]);
        if (!std::strcmp(argv[i], "--arch")) arch_name = argv[i + 1];
        if (!std::strcmp(argv[i], "--algo")) algo_name = argv[i + 1];
        if (!std::strcmp(argv[i], "--shared")) shared = std::string(argv[i + 1]) == "1";
        if (!std::strcmp(argv[i], "--schedule")) schedule = argv[i + 1];
    }

    DeepSeaTreasure env;
    ArchConfig arch;
    arch.kind = arch_kind_from_string(arch_name);
    arch.shared_trunk = shared;
    TrainConfig cfg;
    cfg.total_steps = steps;
    cfg.lr = lr;
    cfg.critic_ratio = C;
    EntropyController ctrl;
    ctrl.schedule = entropy_schedule_from_string(schedule);
    ctrl.h_min = 0.1;

    auto t0 = std::chrono::steady_clock::now();
    TrainResult res = train(algo_from_string(algo_name), cfg, ctrl, env, arch, Rng(seed));
    auto t1 = std::chrono::steady_clock::now();

    EvalProtocol protocol;
    NetPolicy policy(res.params, arch, env.spec());
    EvalSweep sweep = evaluate_policy(env, policy, protocol);
    std::vector<std::vector<double>> vals;
    for (const auto& p : extract_front(sweep)) vals.push_back(p.value);
    std::vector<double> ref = hv_reference_point("dst", protocol.gamma);
    double hv = hypervolume(vals, ref);

    std::vector<std::vector<double>> oracle_vals;
    for (const auto& p : true_pareto_front(env.map(), protocol.gamma))
        oracle_vals.push_back({p.treasure, p.fuel});
    double oracle_hv = hypervolume(oracle_vals, ref);
    auto t2 = std::chrono::steady_clock::now();

    int discards = 0;
    for (const auto& r : res.log.rows) discards += r.discarded;
    std::printf(
        "algo=%s arch=%s shared=%d sched=%s lr=%g C=%g seed=%llu  ratio=%.4f hv=%.1f oracle=%.1f "
        "eu=%.3f discards=%d resets=%d failed=%d train=%.1fs eval=%.1fs\n",
        algo_name.c_str(), arch_name.c_str(), shared ? 1 : 0, schedule.c_str(), lr, C,
        (unsigned long long)seed, hv / oracle_hv, hv, oracle_hv, expected_utility(sweep),
        discards, res.resets, res.failed ? 1 : 0,
        std::chrono::duration<double>(t1 - t0).count(),
        std::chrono::duration<double>(t2 - t1).count());
    return 0;
}
