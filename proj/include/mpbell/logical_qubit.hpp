#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>

#include "mpbell/optics.hpp"

namespace mpbell {

// N-photon GHZ-encoded qubit a|+>^N + b|->^N. photons_present tracks loss;
// z_flag is an audit marker for the parity of accumulated loss-induced phase
// flips, environment collapses and V-type clicks of half-lost pairs alike
// (the amplitudes themselves are always kept exact).
struct LogicalQubit {
    int n_photons = 1;
    Complex amp_plus{1.0};
    Complex amp_minus{0.0};
    int photons_present = 1;
    bool z_flag = false;
};

inline LogicalQubit make_logical_qubit(int n_photons, Complex amp_plus, Complex amp_minus) {
    if (n_photons < 1) throw std::invalid_argument("a logical qubit needs at least one photon");
    const double n2 = std::norm(amp_plus) + std::norm(amp_minus);
    if (n2 <= 0.0) throw std::invalid_argument("zero amplitude pair");
    const double inv = 1.0 / std::sqrt(n2);
    return {n_photons, amp_plus * inv, amp_minus * inv, n_photons, false};
}

// Logical X swaps the basis amplitudes; physically a phase flip on every
// photon mode.
inline LogicalQubit logical_pauli_x(LogicalQubit q) {
    std::swap(q.amp_plus, q.amp_minus);
    return q;
}

// Logical Z negates the |->^N amplitude; physically an H/V bit flip on any
// single photon.
inline LogicalQubit logical_pauli_z(LogicalQubit q) {
    q.amp_minus = -q.amp_minus;
    return q;
}

inline LogicalQubit logical_phase(LogicalQubit q, double theta) {
    q.amp_minus *= std::polar(1.0, theta);
    return q;
}

}  // namespace mpbell
