#pragma once

#include <cstdint>

namespace mpbell {

// SplitMix64 step function (Steele, Lea & Flood): one 64-bit state word
// advanced by the golden-ratio increment and finalized with a 3-stage mixer.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Counter-based stream derivation: child seed = mix(mix(master) ^ counter).
// Stream ids are trial indices, replica numbers, level numbers and the like,
// so every stochastic quantity is a pure function of (master seed, id path)
// and never of worker count or scheduling.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t counter) {
    std::uint64_t s = master;
    std::uint64_t h = splitmix64_next(s);
    s = h ^ (counter + 0x9e3779b97f4a7c15ull);
    return splitmix64_next(s);
}

// One independent random stream. Doubles and Bernoulli draws are computed
// from raw bits with fixed arithmetic only.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : state_(seed) {}
    RngStream(std::uint64_t master, std::uint64_t stream_id)
        : state_(derive_seed(master, stream_id)) {}

    std::uint64_t next_u64() { return splitmix64_next(state_); }

    // Uniform in [0, 1) with 53-bit resolution.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return next_double() < p; }

    // Uniform integer in [0, n), n >= 1 (Lemire multiply-shift).
    std::uint64_t next_below(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

private:
    std::uint64_t state_;
};

}  // namespace mpbell
