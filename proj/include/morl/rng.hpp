#pragma once

#include <cstdint>

namespace morl {

// Counter-based pseudo-random stream built on the splitmix64 finalizer.
// A stream is identified by an immutable seed; draws advance a counter.
// Child streams are derived from the seed and the child path alone, so
// stream layout never depends on how many values a parent has drawn.
//
// Stream layout used across the project:
//   master              = Rng(run seed)
//   weight sampling     = master.child(1, iteration, trajectory)
//   environment streams = master.child(2, iteration, trajectory)
//   minibatch shuffles  = master.child(3, iteration, epoch)
//   evaluation          = Rng(eval seed).child(4, weight_index, episode)
class Rng {
public:
    explicit Rng(uint64_t seed) : seed_(seed), counter_(0) {}

    uint64_t next_u64() { return mix(seed_ + kGolden * ++counter_); }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Uniform integer in [0, n).
    int uniform_int(int n) {
        return static_cast<int>((static_cast<unsigned __int128>(next_u64()) *
                                 static_cast<unsigned __int128>(n)) >>
                                64);
    }

    Rng child(uint64_t a, uint64_t b = 0, uint64_t c = 0) const {
        uint64_t s = mix(seed_ ^ mix(a + 0x7f4a7c15));
        s = mix(s ^ mix(b + 0x94d049bb));
        s = mix(s ^ mix(c + 0x2545f491));
        return Rng(s);
    }

    uint64_t seed() const { return seed_; }

private:
    static constexpr uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

    static uint64_t mix(uint64_t z) {
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ULL;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebULL;
        z ^= z >> 31;
        return z;
    }

    uint64_t seed_;
    uint64_t counter_;
};

}  // namespace morl
