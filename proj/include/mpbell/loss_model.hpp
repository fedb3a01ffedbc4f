#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "mpbell/logical_qubit.hpp"
#include "mpbell/rng.hpp"

namespace mpbell {

// Per-mode photon loss channel. eta = 1 - exp(-gamma t) is the only exposed
// parameter; gamma and t are never modeled separately.
struct LossChannel {
    double eta = 0.0;
};

inline void require_loss_rate(double eta) {
    if (!(eta >= 0.0 && eta <= 1.0)) throw std::invalid_argument("loss rate must be in [0, 1]");
}

// Outcome of one loss exposure of an n-photon register.
struct LossEvent {
    std::vector<bool> mask;  // per-photon loss indicators
    int k = 0;               // number lost
    bool z_flip = false;     // XOR of one fair coin per lost photon
};

// Each photon is lost independently with probability eta. Sign bookkeeping
// (the fair coin per lost photon) is left to the caller.
inline std::vector<bool> sample_loss_mask(int n, double eta, RngStream& rng) {
    require_loss_rate(eta);
    if (n < 0) throw std::invalid_argument("photon count must be >= 0");
    std::vector<bool> mask(n);
    for (int i = 0; i < n; ++i) mask[i] = rng.bernoulli(eta);
    return mask;
}

// Loss exposure with the phase-flip coin resolved per lost photon. The XOR
// of per-photon fair coins equals a single fair coin whenever k >= 1, but the
// per-photon form composes across multiple exposure stages.
inline LossEvent sample_loss(int n, double eta, RngStream& rng) {
    LossEvent ev;
    ev.mask = sample_loss_mask(n, eta, rng);
    for (int i = 0; i < n; ++i) {
        if (ev.mask[i]) {
            ++ev.k;
            ev.z_flip = ev.z_flip != rng.bernoulli(0.5);
        }
    }
    return ev;
}

// Applies a loss event to a standalone GHZ qubit: k photons are removed and
// the surviving (N-k)-photon state is a|+>^(N-k) +- b|->^(N-k), the sign
// resolved by the event's coin.
inline LogicalQubit apply_loss(const LogicalQubit& q, const LossEvent& ev) {
    if (static_cast<int>(ev.mask.size()) != q.photons_present)
        throw std::invalid_argument("loss mask length does not match photons present");
    LogicalQubit out = q;
    out.photons_present -= ev.k;
    if (ev.z_flip) {
        out.amp_minus = -out.amp_minus;
        out.z_flag = !out.z_flag;
    }
    return out;
}

// Closed-form failure probability of the logical Bell measurement under one
// loss exposure per photon pair: ((1 + eta)/2)^n.
inline double bm_failure_prob(int n, double eta) {
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    require_loss_rate(eta);
    return std::pow((1.0 + eta) / 2.0, n);
}

// The same quantity as the explicit binomial mixture
// sum_k C(n,k) (1-eta)^(n-k) eta^k (1/2)^(n-k); kept as an independent route
// for cross-checking the closed form.
inline double bm_failure_prob_binomial(int n, double eta) {
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    require_loss_rate(eta);
    double sum = 0.0;
    double binom = 1.0;  // C(n, 0), updated multiplicatively
    for (int k = 0; k <= n; ++k) {
        sum += binom * std::pow(1.0 - eta, n - k) * std::pow(eta, k) * std::pow(0.5, n - k);
        binom = binom * (n - k) / (k + 1);
    }
    return sum;
}

// Probability that a logical qubit loses at least one photon: 1 - (1-eta)^n.
inline double qubit_loss_prob(int n, double eta) {
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    require_loss_rate(eta);
    return 1.0 - std::pow(1.0 - eta, n);
}

}  // namespace mpbell
