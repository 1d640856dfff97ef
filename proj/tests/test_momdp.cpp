#include <doctest.h>

#include <cmath>
#include <sstream>

#include "morl/dst.hpp"
#include "morl/nets.hpp"
#include "morl/trajectory.hpp"
#include "morl/weights.hpp"
#include "support.hpp"

using namespace morl;

TEST_CASE("sample_weight lies on the simplex") {
    Rng rng(1);
    for (int i = 0; i < 2000; ++i) {
        WeightVector w = sample_weight(3, rng);
        double sum = 0;
        for (double a : w.alpha) {
            CHECK(a >= 0);
            sum += a;
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
        w.validate();
    }
    CHECK_THROWS_AS(sample_weight(1, rng), Error);
}

TEST_CASE("sample_weight is uniform") {
    Rng rng(2);
    double mean_a1 = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) mean_a1 += sample_weight(2, rng).alpha[0];
    CHECK(mean_a1 / n == doctest::Approx(0.5).epsilon(0.01));

    // K=3: P(a1 > 1/2) = 1/4 for a uniform simplex, checked against a
    // rejection-sampling draw over the triangle.
    Rng r3(3);
    int hits = 0;
    for (int i = 0; i < n; ++i)
        if (sample_weight(3, r3).alpha[0] > 0.5) ++hits;
    double p_direct = static_cast<double>(hits) / n;
    CHECK(p_direct == doctest::Approx(0.25).epsilon(0.04));

    Rng rej(4);
    int rej_hits = 0, rej_total = 0;
    while (rej_total < n) {
        double x = rej.uniform01(), y = rej.uniform01();
        if (x + y > 1.0) continue;  // uniform over the triangle a1 + a2 <= 1
        ++rej_total;
        if (x > 0.5) ++rej_hits;
    }
    double p_oracle = static_cast<double>(rej_hits) / n;
    CHECK(p_direct == doctest::Approx(p_oracle).epsilon(0.04));
}

TEST_CASE("scalarize") {
    WeightVector half{{0.5, 0.5}};
    std::vector<double> v{2, -1};
    CHECK(scalarize(half, v) == doctest::Approx(0.5));
    WeightVector corner{{1, 0}};
    std::vector<double> v2{3, 7};
    CHECK(scalarize(corner, v2) == doctest::Approx(3.0));
    WeightVector w3{{0.2, 0.3, 0.5}};
    std::vector<double> ones{1, 1, 1};
    CHECK(scalarize(w3, ones) == doctest::Approx(1.0));
    CHECK_THROWS_AS(scalarize(half, ones), Error);
}

TEST_CASE("reward_to_go") {
    Trajectory traj;
    traj.alpha = WeightVector{{0.5, 0.5}};
    auto add = [&](std::vector<double> r) {
        Transition t;
        t.reward = std::move(r);
        t.state = {1.0};
        traj.steps.push_back(std::move(t));
    };
    add({1, 0});
    add({0, 1});
    traj.steps.back().terminal = true;
    CriticFn unused = [](std::span<const double>, const WeightVector&) {
        return std::vector<double>{0, 0};
    };

    SUBCASE("geometric sum at gamma 0.5") {
        auto q = reward_to_go(traj, 0.5, unused);
        CHECK(q[0][0] == doctest::Approx(1.0));
        CHECK(q[0][1] == doctest::Approx(0.5));
        CHECK(q[1][0] == doctest::Approx(0.0));
        CHECK(q[1][1] == doctest::Approx(1.0));
    }
    SUBCASE("gamma 0 returns immediate rewards") {
        auto q = reward_to_go(traj, 0.0, unused);
        CHECK(q[0] == traj.steps[0].reward);
        CHECK(q[1] == traj.steps[1].reward);
    }
    SUBCASE("recursion holds exactly") {
        double gamma = 0.97;
        auto q = reward_to_go(traj, gamma, unused);
        for (size_t t = 0; t + 1 < q.size(); ++t)
            for (size_t k = 0; k < q[t].size(); ++k)
                CHECK(q[t][k] == traj.steps[t].reward[k] + gamma * q[t + 1][k]);
    }
}

TEST_CASE("reward_to_go bootstraps truncated trajectories") {
    Trajectory traj;
    traj.alpha = WeightVector{{1, 0}};
    Transition t;
    t.reward = {0, 0};
    t.state = {1.0};
    t.truncated = true;
    traj.steps.push_back(t);
    traj.bootstrap_state = {2.0};
    CriticFn critic = [](std::span<const double> s, const WeightVector&) {
        CHECK(s[0] == 2.0);
        return std::vector<double>{2, 4};
    };
    auto q = reward_to_go(traj, 0.99, critic);
    CHECK(q[0][0] == doctest::Approx(1.98));
    CHECK(q[0][1] == doctest::Approx(3.96));
}

TEST_CASE("advantages") {
    Trajectory traj;
    traj.alpha = WeightVector{{0.5, 0.5}};
    Transition t;
    t.reward = {0, 0};
    t.state = {1.0};
    t.terminal = true;
    traj.steps.push_back(t);
    std::vector<std::vector<double>> q = {{2, 2}};

    SUBCASE("normalized scalarization") {
        PopArtStats pa = PopArtStats::identity(2);
        pa.sigma = {1, 2};
        CriticFn critic = [](std::span<const double>, const WeightVector&) {
            return std::vector<double>{1, 0};
        };
        Advantages adv = advantages(traj, q, critic, pa);
        CHECK(adv.vec[0][0] == doctest::Approx(1.0));
        CHECK(adv.vec[0][1] == doctest::Approx(2.0));
        CHECK(adv.scalar[0] == doctest::Approx(0.5 * 1 + 0.5 * 1));
    }
    SUBCASE("unit sigma reduces to plain scalarized difference") {
        PopArtStats pa = PopArtStats::identity(2);
        CriticFn critic = [](std::span<const double>, const WeightVector&) {
            return std::vector<double>{0.5, -1};
        };
        Advantages adv = advantages(traj, q, critic, pa);
        CHECK(adv.scalar[0] == doctest::Approx(0.5 * (2 - 0.5) + 0.5 * (2 + 1)));
    }
    SUBCASE("perfect critic gives zero") {
        PopArtStats pa = PopArtStats::identity(2);
        CriticFn critic = [&](std::span<const double>, const WeightVector&) { return q[0]; };
        Advantages adv = advantages(traj, q, critic, pa);
        CHECK(adv.scalar[0] == doctest::Approx(0.0));
    }
}

TEST_CASE("discounted_return") {
    SUBCASE("single step episode") {
        CHECK(discounted_return({{1, -1}}, 0.99) == std::vector<double>{1, -1});
    }
    SUBCASE("three term geometric sum") {
        auto r = discounted_return({{0, -1}, {0, -1}, {10, -1}}, 0.99);
        CHECK(r[0] == doctest::Approx(10 * 0.99 * 0.99));
        CHECK(r[1] == doctest::Approx(-(1 + 0.99 + 0.99 * 0.99)));
    }
    SUBCASE("all zero rewards") {
        auto r = discounted_return({{0, 0}, {0, 0}}, 0.5);
        CHECK(r == std::vector<double>{0, 0});
    }
}

TEST_CASE("popart statistics") {
    PopArtStats pa = PopArtStats::identity(2, 0.05);

    SUBCASE("constant targets converge to them with minimal scale") {
        std::vector<double> targets = {5, -3};
        for (int i = 0; i < 5000; ++i) pa.update(targets, 2);
        CHECK(pa.mu[0] == doctest::Approx(5.0).epsilon(1e-6));
        CHECK(pa.mu[1] == doctest::Approx(-3.0).epsilon(1e-6));
        CHECK(pa.sigma[0] == doctest::Approx(pa.sigma_min));
        CHECK(pa.sigma[1] == doctest::Approx(pa.sigma_min));
    }
    SUBCASE("zero step size is a no-op") {
        pa.step_size = 0;
        std::vector<double> targets = {100, 100};
        pa.update(targets, 2);
        CHECK(pa.mu[0] == 0.0);
        CHECK(pa.sigma[0] == 1.0);
    }
    SUBCASE("sigma respects the floor and the moment identity") {
        Rng rng(6);
        for (int i = 0; i < 200; ++i) {
            std::vector<double> t = {rng.uniform(-1e-6, 1e-6), rng.uniform(-5, 5)};
            pa.update(t, 2);
            CHECK(pa.sigma[0] >= pa.sigma_min);
            CHECK(pa.sigma[1] >= pa.sigma_min);
            CHECK(pa.sigma[1] * pa.sigma[1] ==
                  doctest::Approx(std::max(pa.second_moment[1] - pa.mu[1] * pa.mu[1],
                                           pa.sigma_min * pa.sigma_min)));
        }
    }
}

TEST_CASE("popart update preserves unnormalized critic predictions") {
    EnvSpec spec{6, 3, 2, 50};
    Rng rng(17);
    for (ArchKind kind : {ArchKind::multi_body, ArchKind::hypernet}) {
        ArchConfig arch;
        arch.kind = kind;
        arch.hidden_dim = 8;
        ParamTree params = build_actor_critic(arch, spec, rng);
        PopArtStats pa = PopArtStats::identity(2, 0.2);

        Tensor state = Tensor::zeros({1, 6});
        for (double& v : state.data) v = rng.uniform(-1, 1);
        WeightVector alpha{{0.3, 0.7}};

        for (int round = 0; round < 50; ++round) {
            auto before = forward(params, arch, spec, state.data, alpha, &pa);
            std::vector<double> targets(8);
            for (double& t : targets) t = rng.uniform(-20, 20);
            popart_update(pa, params, arch, spec, targets);
            auto after = forward(params, arch, spec, state.data, alpha, &pa);
            for (int k = 0; k < 2; ++k)
                CHECK(std::abs(after.unnormalized_value[k] - before.unnormalized_value[k]) <
                      1e-8);
        }
    }
}

namespace {

struct DownPolicy final : Policy {
    void act(const Tensor& states, const Tensor&, std::span<Rng*>,
             std::span<PolicyDecision> out) override {
        for (int i = 0; i < states.rows(); ++i)
            out[i] = PolicyDecision{DeepSeaTreasure::kDown, 0.0, 0.0};
    }
};

}  // namespace

TEST_CASE("rollout is deterministic and honors truncation") {
    DeepSeaTreasure env;
    DownPolicy down;

    WeightVector alpha{{0.5, 0.5}};
    Rng rng(31);
    Trajectory t1 = rollout(env, down, alpha, 200, rng.child(0), rng.child(1));
    Trajectory t2 = rollout(env, down, alpha, 200, rng.child(0), rng.child(1));
    REQUIRE(t1.steps.size() == t2.steps.size());
    for (size_t i = 0; i < t1.steps.size(); ++i) {
        CHECK(t1.steps[i].action == t2.steps[i].action);
        CHECK(t1.steps[i].reward == t2.steps[i].reward);
    }

    // Straight down from the start hits the first column's treasure.
    const DstMap& map = env.map();
    int depth = map.treasures[0].row;
    double value = map.treasures[0].value;
    CHECK(static_cast<int>(t1.steps.size()) == depth);
    CHECK(t1.steps.back().terminal);
    CHECK(t1.steps.back().reward[0] == doctest::Approx(value));
    auto ret = discounted_return(t1, 1.0);
    CHECK(ret[0] == doctest::Approx(value));
    CHECK(ret[1] == doctest::Approx(-depth));

    // max_steps 1 truncates and records the bootstrap state.
    Trajectory t3 = rollout(env, down, alpha, 1, rng.child(2), rng.child(3));
    CHECK(t3.steps.size() == 1);
    if (!t3.steps[0].terminal) {
        CHECK(t3.steps[0].truncated);
        CHECK(t3.truncated());
        CHECK(t3.bootstrap_state.size() == 110);
    }
}

TEST_CASE("lockstep batch equals sequential rollouts") {
    EnvSpec spec{110, 4, 2, 200};
    ArchConfig arch;
    arch.hidden_dim = 16;
    Rng rng(77);
    ParamTree params = build_actor_critic(arch, spec, rng);
    NetPolicy policy(params, arch, spec);

    DeepSeaTreasure proto;
    const int B = 4;
    std::vector<std::unique_ptr<Env>> envs;
    std::vector<Env*> ptrs;
    std::vector<WeightVector> alphas;
    std::vector<Rng> env_rngs, act_rngs;
    for (int b = 0; b < B; ++b) {
        envs.push_back(proto.clone());
        ptrs.push_back(envs.back().get());
        Rng wr = rng.child(1, b);
        alphas.push_back(sample_weight(2, wr));
        env_rngs.push_back(rng.child(2, b));
        act_rngs.push_back(rng.child(3, b));
    }
    TrajectoryBatch batch = rollout_batch(ptrs, policy, alphas, 200, env_rngs, act_rngs);

    for (int b = 0; b < B; ++b) {
        DeepSeaTreasure lone;
        Trajectory t = rollout(lone, policy, alphas[b], 200, rng.child(2, b), rng.child(3, b));
        REQUIRE(t.steps.size() == batch.trajectories[b].steps.size());
        for (size_t i = 0; i < t.steps.size(); ++i) {
            CHECK(t.steps[i].action == batch.trajectories[b].steps[i].action);
            CHECK(t.steps[i].log_prob == batch.trajectories[b].steps[i].log_prob);
        }
    }
}

TEST_CASE("trajectory csv dump") {
    TrajectoryBatch batch;
    Trajectory t;
    t.alpha = WeightVector{{1, 0}};
    Transition a;
    a.state = {1};
    a.action = 2;
    a.reward = {0.5, -1};
    a.log_prob = -0.7;
    t.steps.push_back(a);
    Transition b = a;
    b.terminal = true;
    t.steps.push_back(b);
    batch.trajectories.push_back(t);

    std::ostringstream os;
    dump_trajectories_csv(batch, os);
    std::string text = os.str();
    CHECK(text.find("step,trajectory_id,action,done,r_1,r_2,logprob\n") == 0);
    CHECK(text.find("0,0,2,0,0.5,-1,") != std::string::npos);
    CHECK(text.find("1,0,2,1,0.5,-1,") != std::string::npos);
}
