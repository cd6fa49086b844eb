#pragma once

#include <cstdint>
#include <vector>

namespace perclab {

// Counter-based generator: output i of stream s is a fixed hash of
// (seed, s, i). Streams are independent and replicas are reproducible
// regardless of scheduling, which is what the replica-parallel reductions
// rely on. The mixer is the splitmix64 finalizer applied twice.
class CounterRng {
  public:
    CounterRng(std::uint64_t seed, std::uint64_t stream)
        : key_(mix(mix(seed + 0x9e3779b97f4a7c15ull) ^
                   mix(stream + 0xbf58476d1ce4e5b9ull))) {}

    std::uint64_t next_u64() { return mix(key_ + counter_++ * 0x9e3779b97f4a7c15ull); }

    // Uniform double in [0, 1) with 53 random bits.
    double u01() { return double(next_u64() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return u01() < p; }

    // Uniform integer in [0, n). Unbiased (rejection on the tail).
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t lim = n * ((~0ull) / n);
        std::uint64_t v;
        do { v = next_u64(); } while (v >= lim);
        return v % n;
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[below(i)]);
        }
    }

    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30; z *= 0xbf58476d1ce4e5b9ull;
        z ^= z >> 27; z *= 0x94d049bb133111ebull;
        z ^= z >> 31;
        z ^= z >> 30; z *= 0xbf58476d1ce4e5b9ull;
        z ^= z >> 27; z *= 0x94d049bb133111ebull;
        z ^= z >> 31;
        return z;
    }

  private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

// Stream ids for replica r of experiment tag t under one master seed.
// Documented scheme: stream = mix(tag) + r, so replicas of one experiment
// occupy a contiguous stream range and experiments never collide in practice.
inline std::uint64_t replica_stream(std::uint64_t experiment_tag,
                                    std::uint64_t replica) {
    return CounterRng::mix(experiment_tag ^ 0x2545f4914f6cdd1dull) + replica;
}

}  // namespace perclab
