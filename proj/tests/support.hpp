#pragma once

// Shared test helpers: independent oracles (finite differences,
// inclusion-exclusion and Monte-Carlo hypervolume, quadratic dominance
// filter), tiny environments for estimator checks, and temp-dir plumbing.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "morl/env.hpp"
#include "morl/param_tree.hpp"
#include "morl/pareto.hpp"
#include "morl/rng.hpp"

namespace testsupport {

// Central finite differences on randomly sampled parameter coordinates
// against grads produced by backward_fn. backward_fn must zero and then
// fill params.grad; value_fn must evaluate the same scalar.
inline double max_grad_error(morl::ParamTree& params, const std::function<double()>& value_fn,
                             const std::function<void()>& backward_fn, morl::Rng& rng,
                             int coords_per_entry = 4, double h = 1e-5) {
    backward_fn();
    double worst = 0;
    for (auto& entry : params.entries()) {
        int n = static_cast<int>(entry.value.size());
        for (int c = 0; c < std::min(coords_per_entry, n); ++c) {
            int idx = rng.uniform_int(n);
            double saved = entry.value.data[idx];
            entry.value.data[idx] = saved + h;
            double up = value_fn();
            entry.value.data[idx] = saved - h;
            double down = value_fn();
            entry.value.data[idx] = saved;
            double fd = (up - down) / (2 * h);
            double an = entry.grad.data[idx];
            double err = std::abs(fd - an) / std::max({1.0, std::abs(fd), std::abs(an)});
            worst = std::max(worst, err);
        }
    }
    return worst;
}

// Exact union-of-boxes volume by inclusion-exclusion; exponential in the
// point count, fine for small fronts.
inline double hv_inclusion_exclusion(const std::vector<std::vector<double>>& points,
                                     const std::vector<double>& ref) {
    size_t n = points.size(), dim = ref.size();
    double total = 0;
    for (size_t mask = 1; mask < (size_t(1) << n); ++mask) {
        double vol = 1;
        int bits = 0;
        for (size_t d = 0; d < dim && vol > 0; ++d) {
            double lo = 1e300;
            for (size_t i = 0; i < n; ++i)
                if (mask & (size_t(1) << i)) lo = std::min(lo, points[i][d]);
            vol *= std::max(0.0, lo - ref[d]);
        }
        for (size_t i = 0; i < n; ++i) bits += (mask >> i) & 1;
        total += (bits % 2 == 1 ? 1.0 : -1.0) * vol;
    }
    return total;
}

struct McEstimate {
    double value = 0;
    double stderr_ = 0;
};

inline McEstimate hv_monte_carlo(const std::vector<std::vector<double>>& points,
                                 const std::vector<double>& ref, int samples, morl::Rng& rng) {
    size_t dim = ref.size();
    std::vector<double> hi(dim, -1e300);
    for (const auto& p : points)
        for (size_t d = 0; d < dim; ++d) hi[d] = std::max(hi[d], p[d]);
    double box = 1;
    for (size_t d = 0; d < dim; ++d) box *= std::max(0.0, hi[d] - ref[d]);
    if (box <= 0) return {0.0, 0.0};
    int inside = 0;
    std::vector<double> z(dim);
    for (int s = 0; s < samples; ++s) {
        for (size_t d = 0; d < dim; ++d) z[d] = rng.uniform(ref[d], hi[d]);
        for (const auto& p : points) {
            bool dom = true;
            for (size_t d = 0; d < dim; ++d)
                if (z[d] > p[d]) {
                    dom = false;
                    break;
                }
            if (dom) {
                ++inside;
                break;
            }
        }
    }
    double frac = static_cast<double>(inside) / samples;
    McEstimate est;
    est.value = frac * box;
    est.stderr_ = box * std::sqrt(frac * (1 - frac) / samples);
    return est;
}

inline std::vector<morl::FrontPoint> dominance_filter_quadratic(
    const std::vector<morl::FrontPoint>& pts) {
    std::vector<morl::FrontPoint> out;
    for (size_t i = 0; i < pts.size(); ++i) {
        bool dominated = false;
        for (size_t j = 0; j < pts.size(); ++j) {
            if (i == j) continue;
            bool strict = true;
            for (size_t d = 0; d < pts[i].value.size(); ++d)
                if (pts[j].value[d] <= pts[i].value[d]) {
                    strict = false;
                    break;
                }
            if (strict) {
                dominated = true;
                break;
            }
        }
        if (dominated) continue;
        bool dup = false;
        for (const auto& kept : out)
            if (kept.value == pts[i].value) dup = true;
        if (!dup) out.push_back(pts[i]);
    }
    return out;
}

// Stateless bandit: one observation, 4 actions, zero two-dimensional
// reward, fixed episode length. Any policy is optimal, so entropy control
// fully determines the learned distribution.
class BanditEnv final : public morl::Env {
public:
    explicit BanditEnv(int episode_len = 8) : len_(episode_len) {
        spec_.state_dim = 1;
        spec_.num_actions = 4;
        spec_.num_objectives = 2;
        spec_.max_episode_steps = len_;
    }
    const morl::EnvSpec& spec() const override { return spec_; }
    std::vector<double> reset(morl::Rng&) override {
        t_ = 0;
        return {1.0};
    }
    StepResult step(int) override {
        ++t_;
        StepResult r;
        r.state = {1.0};
        r.reward = {0.0, 0.0};
        r.terminal = t_ >= len_;
        return r;
    }
    std::unique_ptr<morl::Env> clone() const override {
        return std::make_unique<BanditEnv>(len_);
    }
    std::string id() const override { return "bandit4"; }

private:
    morl::EnvSpec spec_;
    int len_;
    int t_ = 0;
};

// Two-state, two-action deterministic MOMDP with a fixed horizon: the
// action chooses the next state, rewards depend on (state, action). Small
// enough to enumerate every trajectory exactly.
class TwoStateMdp final : public morl::Env {
public:
    static constexpr int kHorizon = 3;

    TwoStateMdp() {
        spec_.state_dim = 2;
        spec_.num_actions = 2;
        spec_.num_objectives = 2;
        spec_.max_episode_steps = kHorizon;
    }
    static std::vector<double> reward(int state, int action) {
        static const double table[2][2][2] = {
            {{1.0, -0.5}, {0.2, 0.8}},
            {{-0.3, 1.2}, {0.6, 0.1}},
        };
        return {table[state][action][0], table[state][action][1]};
    }
    const morl::EnvSpec& spec() const override { return spec_; }
    std::vector<double> reset(morl::Rng&) override {
        s_ = 0;
        t_ = 0;
        return encode();
    }
    StepResult step(int action) override {
        StepResult r;
        r.reward = reward(s_, action);
        s_ = action;
        ++t_;
        r.state = encode();
        r.terminal = t_ >= kHorizon;
        return r;
    }
    std::unique_ptr<morl::Env> clone() const override { return std::make_unique<TwoStateMdp>(); }
    std::string id() const override { return "two-state"; }

private:
    std::vector<double> encode() const { return s_ == 0 ? std::vector<double>{1.0, 0.0}
                                                        : std::vector<double>{0.0, 1.0}; }
    morl::EnvSpec spec_;
    int s_ = 0, t_ = 0;
};

inline std::string make_temp_dir(const std::string& tag) {
    namespace fs = std::filesystem;
    fs::path base = fs::temp_directory_path() / ("morl_test_" + tag + "_" +
                                                 std::to_string(std::rand()));
    fs::create_directories(base);
    return base.string();
}

}  // namespace testsupport
