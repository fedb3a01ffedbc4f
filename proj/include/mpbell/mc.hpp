#pragma once

#include <cstdint>
#include <thread>
#include <vector>

#include "mpbell/rng.hpp"

namespace mpbell {

inline int resolve_workers(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs `samples` independent trials split into contiguous index chunks, one
// chunk per worker. Trial i always draws from stream (seed, i), and tallies
// are merged per-chunk in index order, so any tally built from commutative
// integer accumulation is a pure function of (seed, samples) no matter how
// many workers run.
//
// TrialFn: void(std::uint64_t trial_index, RngStream&, Tally&).
template <class Tally, class TrialFn>
Tally accumulate_trials(std::uint64_t samples, int workers, std::uint64_t seed, TrialFn fn) {
    const int w = resolve_workers(workers);
    std::vector<Tally> parts(static_cast<std::size_t>(w));
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(w));
    for (int wi = 0; wi < w; ++wi) {
        const std::uint64_t lo = samples * wi / w;
        const std::uint64_t hi = samples * (wi + 1) / w;
        threads.emplace_back([&, lo, hi, wi] {
            Tally& t = parts[static_cast<std::size_t>(wi)];
            for (std::uint64_t i = lo; i < hi; ++i) {
                RngStream rng(seed, i);
                fn(i, rng, t);
            }
        });
    }
    for (auto& th : threads) th.join();
    Tally total{};
    for (const Tally& part : parts) total.merge(part);
    return total;
}

}  // namespace mpbell
