#pragma once

#include <array>
#include <map>
#include <stdexcept>
#include <vector>

#include "mpbell/optics.hpp"
#include "mpbell/rng.hpp"

namespace mpbell {

enum class BellFamily { Phi, Psi };
enum class BellSign { Plus, Minus };

// One of the four single-photon-qubit Bell states, written in the diagonal
// polarization basis |+-> = (|H> +- |V>)/sqrt(2).
struct BellKind {
    BellFamily family = BellFamily::Phi;
    BellSign sign = BellSign::Plus;

    bool operator==(const BellKind&) const = default;
    auto operator<=>(const BellKind&) const = default;
};

inline constexpr std::array<BellKind, 4> kAllBellKinds = {
    BellKind{BellFamily::Phi, BellSign::Plus},
    BellKind{BellFamily::Phi, BellSign::Minus},
    BellKind{BellFamily::Psi, BellSign::Plus},
    BellKind{BellFamily::Psi, BellSign::Minus},
};

inline int bell_kind_index(BellKind k) {
    return 2 * (k.family == BellFamily::Psi ? 1 : 0) + (k.sign == BellSign::Minus ? 1 : 0);
}

inline const char* bell_kind_name(BellKind k) {
    switch (bell_kind_index(k)) {
        case 0: return "phi_plus";
        case 1: return "phi_minus";
        case 2: return "psi_plus";
        default: return "psi_minus";
    }
}

enum class BsOutcomeKind { SuccessPhiMinus, SuccessPsiMinus, Ambiguous, ClickDeficit };

// Result of one two-photon Bell measurement. Success outcomes always carry
// two clicks, Ambiguous one, ClickDeficit zero; the click count is kept so
// higher layers can do loss accounting.
struct BsOutcome {
    BsOutcomeKind kind = BsOutcomeKind::ClickDeficit;
    int clicks = 0;

    bool operator==(const BsOutcome&) const = default;
};

inline BsOutcome make_bs_outcome(BsOutcomeKind kind) {
    switch (kind) {
        case BsOutcomeKind::SuccessPhiMinus:
        case BsOutcomeKind::SuccessPsiMinus:
            return {kind, 2};
        case BsOutcomeKind::Ambiguous:
            return {kind, 1};
        default:
            return {kind, 0};
    }
}

// The fixed 4-mode single-photon-qubit Bell measurement device: a balanced
// splitter across the two spatial ports (acting identically on the H and V
// components, hence two embedded blocks) followed by polarizing separation,
// which in this mode numbering is just labeling; all four modes are detected.
//
// The detectors resolve H/V while the qubits are written in the diagonal
// basis. That mismatch is what selects the identified pair: in the H/V basis
// |Phi-_diag> equals the symmetric |Psi+> (both photons exit one port, H and
// V detectors of that port fire) and |Psi-_diag> is the singlet (photons exit
// different ports), while the two plus states bunch into a single mode and
// give one click only. See docs/bell_device_notes.md for the derivation.
struct BsDevice {
    std::vector<ModeTransform> circuit;
    std::vector<int> detector_modes;
    int mode_count = 4;

    ModeTransform total() const {
        ModeTransform t(mode_count);
        for (const auto& stage : circuit) t = t.then(stage);
        return t;
    }
};

inline BsDevice build_bs_device() {
    BsDevice dev;
    dev.circuit.push_back(build_beamsplitter(std::acos(-1.0) / 4.0, {0, Polarization::H},
                                             {1, Polarization::H}, 4));
    dev.circuit.push_back(build_beamsplitter(std::acos(-1.0) / 4.0, {0, Polarization::V},
                                             {1, Polarization::V}, 4));
    dev.detector_modes = {0, 1, 2, 3};
    return dev;
}

// Two-photon state of the given Bell kind: one photon on port 0, one on
// port 1, in the diagonal basis.
inline PureOpticalState diag_bell_state(BellKind kind) {
    PureOpticalState st(4, 2);
    const double r = 1.0 / std::sqrt(2.0);
    // |s>_0 |t>_1 expands over polarization with signs s^[V on 0] t^[V on 1].
    auto add_product = [&st](int s, int t, double coef) {
        for (int p0 = 0; p0 < 2; ++p0) {
            for (int p1 = 0; p1 < 2; ++p1) {
                OccupationVector occ(4, 0);
                occ[p0] += 1;
                occ[2 + p1] += 1;
                const double sign = (p0 == 1 ? s : 1) * (p1 == 1 ? t : 1);
                st.add_amplitude(occ, coef * sign * 0.5);
            }
        }
    };
    const int minus = -1;
    const int plus = 1;
    const double rel = kind.sign == BellSign::Plus ? r : -r;
    if (kind.family == BellFamily::Phi) {
        add_product(plus, plus, r);
        add_product(minus, minus, rel);
    } else {
        add_product(plus, minus, r);
        add_product(minus, plus, rel);
    }
    st.prune();
    return st;
}

// Click-pattern classification: two clicks in one output port identify
// |Phi->, two clicks in different ports identify |Psi->, one click is the
// ambiguous failure, zero clicks the loss herald.
inline BsOutcome classify_clicks(const ClickPattern& pattern) {
    if (pattern.mask & ~0xfu)
        throw std::invalid_argument("click pattern outside the 4 detector modes");
    const int n = pattern.count();
    switch (n) {
        case 0:
            return make_bs_outcome(BsOutcomeKind::ClickDeficit);
        case 1:
            return make_bs_outcome(BsOutcomeKind::Ambiguous);
        case 2: {
            const bool port0 = (pattern.mask & 0x3u) != 0;
            const bool port1 = (pattern.mask & 0xcu) != 0;
            if (port0 && port1) return make_bs_outcome(BsOutcomeKind::SuccessPsiMinus);
            return make_bs_outcome(BsOutcomeKind::SuccessPhiMinus);
        }
        default:
            throw std::invalid_argument("more than two clicks is impossible for two photons");
    }
}

// Exact outcome probabilities for a Bell-state input, obtained by Fock
// propagation through the device followed by on-off detection.
inline std::map<BsOutcomeKind, double> exact_outcome_table(BellKind input) {
    const BsDevice dev = build_bs_device();
    PureOpticalState st = diag_bell_state(input);
    for (const auto& stage : dev.circuit) st = apply_transform(st, stage);
    std::map<BsOutcomeKind, double> table = {
        {BsOutcomeKind::SuccessPhiMinus, 0.0},
        {BsOutcomeKind::SuccessPsiMinus, 0.0},
        {BsOutcomeKind::Ambiguous, 0.0},
        {BsOutcomeKind::ClickDeficit, 0.0},
    };
    for (const auto& [pattern, p] : click_distribution(st, dev.detector_modes))
        table[classify_clicks(pattern).kind] += p;
    return table;
}

// Samples one Bs outcome for the given input, distributed per the exact
// outcome table.
inline BsOutcome sample_bs(BellKind input, RngStream& rng) {
    static const std::array<std::map<BsOutcomeKind, double>, 4> tables = [] {
        std::array<std::map<BsOutcomeKind, double>, 4> t;
        for (BellKind k : kAllBellKinds) t[bell_kind_index(k)] = exact_outcome_table(k);
        return t;
    }();
    const auto& table = tables[bell_kind_index(input)];
    double u = rng.next_double();
    for (const auto& [kind, p] : table) {
        if (u < p) return make_bs_outcome(kind);
        u -= p;
    }
    return make_bs_outcome(table.rbegin()->first);
}

}  // namespace mpbell
