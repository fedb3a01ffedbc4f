#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "mpbell/loss_model.hpp"
#include "mpbell/mc.hpp"
#include "mpbell/rng.hpp"
#include "mpbell/steane.hpp"

namespace mpbell {

// Block error rates at one concatenation level: p_fail is the locatable
// (heralded) failure rate of a block Bell measurement, p_z and p_x the
// unlocated flip rates.
struct ErrorRates {
    double p_fail = 0.0;
    double p_z = 0.0;
    double p_x = 0.0;
    int level = 0;
};

inline double max_rate(const ErrorRates& r) { return std::max(r.p_fail, std::max(r.p_z, r.p_x)); }

struct TelecorrectionConfig {
    int n_photons = 4;
    double eta = 0.0;
    int samples = 10000;
    int levels = 3;
    // Loss exposures of the data qubit per round (memory time).
    int memory_steps = 1;
    // Channel blocks carry the same unlocated rates as the data blocks.
    bool offline_loss = true;
    // Gate-teleportation slots per position and round. A failed slot leaves
    // the position depolarized but heralded, so it counts as an erasure; a
    // working slot still inherits the unlocated flips of its offline resource
    // block, which the gate's Clifford action spreads over both sectors.
    int gates_per_position = 1;
    std::uint64_t seed = 42;
    int replicas = 5;
    int workers = 0;
};

inline void validate_config(const TelecorrectionConfig& cfg) {
    if (cfg.n_photons < 1) throw std::invalid_argument("n_photons must be >= 1");
    require_loss_rate(cfg.eta);
    if (cfg.samples < 1000) throw std::invalid_argument("samples must be >= 1000");
    if (cfg.levels < 1 || cfg.levels > 5) throw std::invalid_argument("levels must be in 1..5");
    if (cfg.memory_steps < 0) throw std::invalid_argument("memory_steps must be >= 0");
    if (cfg.gates_per_position < 0) throw std::invalid_argument("gates_per_position must be >= 0");
    if (cfg.replicas < 1) throw std::invalid_argument("replicas must be >= 1");
}

// Level-0 rates of a physical GHZ block: the Bell measurement fails with the
// ((1+eta)/2)^N law; each loss exposure leaves an unlocated Z with
// probability (1 - (1-eta)^N)/2; loss alone never produces X errors.
inline ErrorRates physical_rates(int n_photons, double eta, int memory_steps = 1) {
    if (n_photons < 1) throw std::invalid_argument("n_photons must be >= 1");
    require_loss_rate(eta);
    if (memory_steps < 0) throw std::invalid_argument("memory_steps must be >= 0");
    ErrorRates r;
    r.p_fail = bm_failure_prob(n_photons, eta);
    r.p_z = memory_steps * qubit_loss_prob(n_photons, eta) / 2.0;
    r.p_x = 0.0;
    r.level = 0;
    return r;
}

namespace detail {

struct LevelTally {
    std::uint64_t decode_failures = 0;
    std::uint64_t z_flips = 0;
    std::uint64_t x_flips = 0;
    void merge(const LevelTally& o) {
        decode_failures += o.decode_failures;
        z_flips += o.z_flips;
        x_flips += o.x_flips;
    }
};

}  // namespace detail

// One telecorrection round, Monte Carlo. Per position: the block Bell
// measurement and each gate-teleportation slot fail independently with
// p_fail; any such failure is heralded, depolarizing the position into a
// known erasure in both sector words (the random Pauli content of a heralded
// failure never reaches the decoder because the erased bit is free anyway).
// A surviving position picks up unlocated flips from the data block
// (p_z, p_x), from the channel block at the same rates when offline_loss is
// on, and one Z-type contribution per gate slot for the slot's loss exposure
// (gate time plus resource inheritance; loss alone produces no X errors).
// Both 7-bit words are decoded with the erasure-aware decoder; a trial
// counts as failed when either sector's decode is ambiguous, and otherwise
// contributes its residual logical flips.
inline ErrorRates simulate_level(const ErrorRates& in, const TelecorrectionConfig& cfg,
                                 std::uint64_t seed) {
    validate_config(cfg);
    const SteaneDecoder& decoder = steane_decoder();
    auto tally = accumulate_trials<detail::LevelTally>(
        static_cast<std::uint64_t>(cfg.samples), cfg.workers, seed,
        [&](std::uint64_t, RngStream& rng, detail::LevelTally& t) {
            std::uint8_t erased = 0;
            std::uint8_t ez = 0;
            std::uint8_t ex = 0;
            for (int pos = 0; pos < SteaneCode::kLength; ++pos) {
                bool heralded = rng.bernoulli(in.p_fail);
                bool zb = false;
                bool xb = false;
                for (int g = 0; g < cfg.gates_per_position; ++g) {
                    heralded = heralded || rng.bernoulli(in.p_fail);
                    zb = zb != rng.bernoulli(in.p_z);
                }
                if (heralded) {
                    erased |= static_cast<std::uint8_t>(1u << pos);
                    continue;
                }
                zb = zb != rng.bernoulli(in.p_z);
                xb = xb != rng.bernoulli(in.p_x);
                if (cfg.offline_loss) {
                    zb = zb != rng.bernoulli(in.p_z);
                    xb = xb != rng.bernoulli(in.p_x);
                }
                ez |= static_cast<std::uint8_t>((zb ? 1u : 0u) << pos);
                ex |= static_cast<std::uint8_t>((xb ? 1u : 0u) << pos);
            }
            const SteaneDecodeResult dz = decoder.decode(SteaneCode::syndrome(ez), erased);
            const SteaneDecodeResult dx = decoder.decode(SteaneCode::syndrome(ex), erased);
            if (dz.failure || dx.failure) {
                ++t.decode_failures;
                return;
            }
            t.z_flips += std::popcount(static_cast<unsigned>(ez ^ dz.correction)) & 1u;
            t.x_flips += std::popcount(static_cast<unsigned>(ex ^ dx.correction)) & 1u;
        });

    ErrorRates out;
    out.level = in.level + 1;
    const double n = static_cast<double>(cfg.samples);
    out.p_fail = tally.decode_failures / n;
    const double survivors = n - static_cast<double>(tally.decode_failures);
    out.p_z = survivors > 0 ? tally.z_flips / survivors : 0.0;
    out.p_x = survivors > 0 ? tally.x_flips / survivors : 0.0;
    return out;
}

// Runs the concatenation recursion and reports the per-level rates,
// rates[0] being the physical input.
inline std::vector<ErrorRates> simulate_levels(int n_photons, double eta,
                                               const TelecorrectionConfig& cfg,
                                               std::uint64_t seed) {
    std::vector<ErrorRates> rates;
    rates.push_back(physical_rates(n_photons, eta, cfg.memory_steps));
    for (int level = 1; level <= cfg.levels; ++level)
        rates.push_back(simulate_level(rates.back(), cfg, derive_seed(seed, level)));
    return rates;
}

// Sub-threshold predicate: the worst rate still shrinks between the last two
// simulated levels. Rates that reached exactly zero count as contracted
// (deep levels routinely sample zero events well below threshold).
inline bool rates_contract(int n_photons, double eta, const TelecorrectionConfig& cfg,
                           std::uint64_t seed) {
    const auto rates = simulate_levels(n_photons, eta, cfg, seed);
    const std::size_t last = rates.size() - 1;
    const double worst = max_rate(rates[last]);
    return worst < max_rate(rates[last - 1]) || worst == 0.0;
}

struct no_threshold_found : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ThresholdResult {
    int n_photons = 0;
    double eta_threshold = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    int levels_used = 0;
};

inline constexpr double kThresholdBracketLow = 1e-5;
inline constexpr double kThresholdBracketHigh = 1e-1;

namespace detail {

// Two-sided 95% Student-t critical values for small replica counts.
inline double t95(int df) {
    static constexpr double table[] = {12.706, 4.303, 3.182, 2.776, 2.571, 2.447,
                                       2.365,  2.306, 2.262, 2.228, 2.201, 2.179};
    if (df < 1) return 0.0;
    if (df <= 12) return table[df - 1];
    return 1.96;
}

}  // namespace detail

// Bisection for the largest eta at which the recursion still contracts.
// Each replica runs its own geometric bisection on [1e-5, 1e-1] with its own
// seeds (levels share randomness across eta evaluations, common random
// numbers); the estimate is the replica mean with a 95% t-interval.
inline ThresholdResult find_threshold(int n_photons, TelecorrectionConfig cfg) {
    cfg.n_photons = n_photons;
    validate_config(cfg);
    if (cfg.levels < 2)
        throw std::invalid_argument("threshold search needs at least two levels");

    std::vector<double> estimates;
    estimates.reserve(static_cast<std::size_t>(cfg.replicas));
    for (int rep = 0; rep < cfg.replicas; ++rep) {
        const std::uint64_t rep_seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(rep));
        double lo = kThresholdBracketLow;
        double hi = kThresholdBracketHigh;
        if (!rates_contract(n_photons, lo, cfg, rep_seed))
            throw no_threshold_found("rates do not contract at the lower bracket end");
        if (rates_contract(n_photons, hi, cfg, rep_seed)) {
            estimates.push_back(hi);  // threshold at or above the search range
            continue;
        }
        while (hi / lo > 1.05) {
            const double mid = std::sqrt(lo * hi);
            if (rates_contract(n_photons, mid, cfg, rep_seed))
                lo = mid;
            else
                hi = mid;
        }
        estimates.push_back(std::sqrt(lo * hi));
    }

    double mean = 0.0;
    for (double e : estimates) mean += e;
    mean /= static_cast<double>(estimates.size());
    double var = 0.0;
    for (double e : estimates) var += (e - mean) * (e - mean);
    const int df = static_cast<int>(estimates.size()) - 1;
    double half = 0.0;
    if (df >= 1) {
        var /= df;
        half = detail::t95(df) * std::sqrt(var / static_cast<double>(estimates.size()));
    }

    ThresholdResult r;
    r.n_photons = n_photons;
    r.eta_threshold = mean;
    r.ci_low = std::max(mean - half, 0.0);
    r.ci_high = mean + half;
    r.levels_used = cfg.levels;
    return r;
}

}  // namespace mpbell
