#pragma once

#include <cstdint>

namespace pisco {

// Counter-keyed deterministic random streams.
//
// Every stochastic draw in a run is keyed by (seed, purpose, round, agent,
// step), so independently executed code paths (staged vs compact rounds,
// per-agent parallel evaluation) consume identical randomness, and the
// communication Bernoulli stream never interferes with batch sampling.
// The generator is splitmix64; outputs are platform-independent.

enum class StreamPurpose : std::uint64_t {
    batch = 1,       // mini-batch index draws
    comm_draw = 2,   // per-round server-availability Bernoulli
    param_init = 3,  // model initialization
    synth_data = 4,  // synthetic dataset generation
    spectral = 5,    // power-iteration start vector (fixed internal seed)
    generic = 6,     // tests and miscellaneous
};

class RngStream {
  public:
    explicit RngStream(std::uint64_t state) : state_(state) {}

    static RngStream keyed(std::uint64_t seed, StreamPurpose purpose,
                           std::uint64_t round = 0, std::uint64_t agent = 0,
                           std::uint64_t step = 0) {
        std::uint64_t s = mix(seed ^ 0x9e3779b97f4a7c15ull);
        s = mix(s ^ static_cast<std::uint64_t>(purpose) * 0xbf58476d1ce4e5b9ull);
        s = mix(s ^ round * 0x94d049bb133111ebull);
        s = mix(s ^ agent * 0xd6e8feb86659fd93ull);
        s = mix(s ^ step * 0xa0761d6478bd642full);
        return RngStream(s);
    }

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ull;
        return mix(state_);
    }

    // Uniform in [0, 1) with 53-bit resolution.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n), unbiased (rejection sampling).
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t threshold = -n % n;  // 2^64 mod n
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

    // Standard normal via Box-Muller; consumes two uniforms per call.
    double normal();

  private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
};

}  // namespace pisco
