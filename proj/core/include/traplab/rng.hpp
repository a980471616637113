#pragma once

#include <cstdint>

namespace traplab {

// Mixing finalizer from SplitMix64 (Steele, Lea, Flood; Vigna's constants).
// Used both as the generator step and to derive independent substream seeds.
constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Deterministic RNG stream with self-contained samplers. Every replica of a
// Monte Carlo experiment owns a private stream derived from (master seed,
// stage tag, replica index), so results do not depend on thread scheduling.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    // Substream derivation: chained mixing of master seed, a stage tag and a
    // replica index. Distinct triples give (statistically) disjoint streams.
    static Rng stream(std::uint64_t master, std::uint64_t tag, std::uint64_t index) {
        return Rng(mix64(mix64(mix64(master) ^ tag) ^ index));
    }

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ull;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Uniform on [0,1), 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform on (0,1]; safe to pass through log().
    double uniform_pos() { return 1.0 - uniform(); }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    bool coin() { return (next_u64() >> 63) != 0; }

    // Index uniform on {0, ..., n-1}.
    std::uint64_t below(std::uint64_t n);

    double exponential(double mean);
    double normal();
    double normal(double mu, double sigma) { return mu + sigma * normal(); }

    // Poisson(mean): inversion for small means, Hormann's PTRD otherwise.
    std::uint64_t poisson(double mean);

    // Gamma(shape, scale 1): Marsaglia-Tsang; shape 0 returns 0 exactly.
    double gamma(double shape);

    // Sum of `count` independent Geometric(1/2) on {0,1,...}; i.e. the
    // negative binomial NB(count, 1/2), sampled as Poisson(Gamma(count)).
    std::uint64_t neg_binomial_half(std::uint64_t count);

  private:
    std::uint64_t state_;
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

} // namespace traplab
