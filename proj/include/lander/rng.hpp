#ifndef LANDER_RNG_HPP
#define LANDER_RNG_HPP

#include <cstdint>
#include <random>

namespace lander {

// splitmix64 finalizer; used to whiten seeds and derive independent streams.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Deterministic seed for sub-stream `stream`, item `idx` of a master seed.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t idx = 0) {
    return mix64(mix64(master ^ mix64(stream)) ^ mix64(idx));
}

// mt19937_64 wrapper with hand-rolled draws. std::uniform_real_distribution is
// implementation-defined, so outputs here depend only on the engine stream.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(mix64(seed)) {}

    double uniform01() {  // [0, 1)
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    std::uint64_t below(std::uint64_t n) {  // [0, n)
        return n ? gen_() % n : 0;
    }
    bool bernoulli(double p) { return uniform01() < p; }

    std::uint64_t raw() { return gen_(); }

private:
    std::mt19937_64 gen_;
};

}  // namespace lander

#endif
