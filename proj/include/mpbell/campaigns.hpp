#pragma once

#include <cmath>
#include <cstdint>

#include "mpbell/ghz_logic.hpp"
#include "mpbell/loss_model.hpp"
#include "mpbell/mc.hpp"

namespace mpbell {

struct RateEstimate {
    std::uint64_t samples = 0;
    std::uint64_t successes = 0;
    double estimate = 0.0;
    double std_error = 0.0;
    double analytic = 0.0;

    // |estimate - analytic| in binomial standard deviations of the analytic rate.
    double sigmas() const {
        const double sd = std::sqrt(analytic * (1.0 - analytic) / static_cast<double>(samples));
        if (sd == 0.0) return estimate == analytic ? 0.0 : HUGE_VAL;
        return std::abs(estimate - analytic) / sd;
    }
};

namespace detail {

struct CountTally {
    std::uint64_t hits = 0;
    void merge(const CountTally& o) { hits += o.hits; }
};

inline RateEstimate finish_estimate(std::uint64_t samples, std::uint64_t hits, double analytic) {
    RateEstimate e;
    e.samples = samples;
    e.successes = hits;
    e.estimate = static_cast<double>(hits) / static_cast<double>(samples);
    e.std_error = std::sqrt(e.estimate * (1.0 - e.estimate) / static_cast<double>(samples));
    e.analytic = analytic;
    return e;
}

inline LogicalBellKind uniform_bell_kind(RngStream& rng) {
    return kAllLogicalBellKinds[rng.next_below(4)];
}

// Uniform Bloch-sphere qubit.
inline LogicalQubit random_qubit(int n, RngStream& rng) {
    const double theta = std::acos(1.0 - 2.0 * rng.next_double());
    const double phi = 2.0 * std::acos(-1.0) * rng.next_double();
    return make_logical_qubit(n, Complex(std::cos(theta / 2.0)),
                              std::polar(std::sin(theta / 2.0), phi));
}

}  // namespace detail

// Success rate of the logical Bell measurement over uniformly random
// Bell-state inputs; analytic value 1 - 2^-n.
inline RateEstimate estimate_logical_bm_success(int n, std::uint64_t samples, std::uint64_t seed,
                                                int workers = 0) {
    if (samples < 1) throw std::invalid_argument("samples must be >= 1");
    auto tally = accumulate_trials<detail::CountTally>(
        samples, workers, seed, [n](std::uint64_t, RngStream& rng, detail::CountTally& t) {
            const LogicalBellKind kind = detail::uniform_bell_kind(rng);
            if (measure_logical_bell(kind, n, rng).result.has_value()) ++t.hits;
        });
    return detail::finish_estimate(samples, tally.hits, success_probability(n));
}

// Teleportation success rate with per-photon loss on all three registers;
// analytic value 1 - (1 - (1-eta)^2/2)^n. Each trial teleports a fresh
// random qubit.
inline RateEstimate estimate_teleport_success(int n, double eta, std::uint64_t samples,
                                              std::uint64_t seed, int workers = 0) {
    if (samples < 1) throw std::invalid_argument("samples must be >= 1");
    auto tally = accumulate_trials<detail::CountTally>(
        samples, workers, seed, [n, eta](std::uint64_t, RngStream& rng, detail::CountTally& t) {
            const LogicalQubit q = detail::random_qubit(n, rng);
            if (teleport(q, eta, rng).success) ++t.hits;
        });
    return detail::finish_estimate(samples, tally.hits, teleport_success_probability(n, eta));
}

// Failure rate of the logical Bell measurement with one loss exposure per
// pair, the full pipeline behind the ((1+eta)/2)^n law: uniformly random
// Bell input, per-photon loss on the measured register, exact per-pair
// sampling through the branch engine.
inline RateEstimate estimate_bm_failure_lossy(int n, double eta, std::uint64_t samples,
                                              std::uint64_t seed, int workers = 0) {
    if (samples < 1) throw std::invalid_argument("samples must be >= 1");
    auto tally = accumulate_trials<detail::CountTally>(
        samples, workers, seed, [n, eta](std::uint64_t, RngStream& rng, detail::CountTally& t) {
            const LogicalBellKind kind = detail::uniform_bell_kind(rng);
            if (!measure_logical_bell_lossy(kind, n, eta, rng).result.has_value()) ++t.hits;
        });
    return detail::finish_estimate(samples, tally.hits, bm_failure_prob(n, eta));
}

struct TeleportFidelityReport {
    std::uint64_t trials = 0;
    std::uint64_t successes = 0;
    std::uint64_t fidelity_violations = 0;  // successes with |F - 1| > tolerance
    std::uint64_t failures = 0;
    double max_deviation = 0.0;
    double failure_rate() const { return static_cast<double>(failures) / trials; }

    void merge(const TeleportFidelityReport& o) {
        trials += o.trials;
        successes += o.successes;
        fidelity_violations += o.fidelity_violations;
        failures += o.failures;
        max_deviation = std::max(max_deviation, o.max_deviation);
    }
};

// Teleports `qubits` random qubits `trials_per_qubit` times each at the given
// loss rate and checks the fidelity of every successful run against 1.
inline TeleportFidelityReport check_teleport_fidelity(
    int n, double eta, std::uint64_t qubits, std::uint64_t trials_per_qubit, std::uint64_t seed,
    double tolerance = 1e-10, int workers = 0,
    const CorrectionTable& table = kStandardCorrections) {
    const std::uint64_t total = qubits * trials_per_qubit;
    auto report = accumulate_trials<TeleportFidelityReport>(
        total, workers, seed,
        [&](std::uint64_t idx, RngStream& rng, TeleportFidelityReport& t) {
            // Qubit amplitudes depend only on the qubit id, drawn from a
            // dedicated stream so every trial of a qubit sees the same state.
            RngStream qubit_rng(derive_seed(seed, 0x51b1d0ull), idx / trials_per_qubit);
            const LogicalQubit q = detail::random_qubit(n, qubit_rng);
            const TeleportRecord rec = teleport(q, eta, rng, table);
            ++t.trials;
            if (rec.success) {
                ++t.successes;
                const double dev = std::abs(rec.fidelity - 1.0);
                t.max_deviation = std::max(t.max_deviation, dev);
                if (dev > tolerance) ++t.fidelity_violations;
            } else {
                ++t.failures;
            }
        });
    return report;
}

}  // namespace mpbell
