#pragma once

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "mpbell/bell_device.hpp"
#include "mpbell/logical_qubit.hpp"
#include "mpbell/loss_model.hpp"
#include "mpbell/rng.hpp"

namespace mpbell {

// One of the four N-photon logical Bell states.
struct LogicalBellKind {
    BellFamily family = BellFamily::Phi;
    BellSign sign = BellSign::Plus;

    bool operator==(const LogicalBellKind&) const = default;
};

inline int logical_kind_index(LogicalBellKind k) {
    return 2 * (k.family == BellFamily::Psi ? 1 : 0) + (k.sign == BellSign::Minus ? 1 : 0);
}

inline constexpr std::array<LogicalBellKind, 4> kAllLogicalBellKinds = {
    LogicalBellKind{BellFamily::Phi, BellSign::Plus},
    LogicalBellKind{BellFamily::Phi, BellSign::Minus},
    LogicalBellKind{BellFamily::Psi, BellSign::Plus},
    LogicalBellKind{BellFamily::Psi, BellSign::Minus},
};

inline const char* logical_kind_name(LogicalBellKind k) {
    switch (logical_kind_index(k)) {
        case 0: return "phi_plus";
        case 1: return "phi_minus";
        case 2: return "psi_plus";
        default: return "psi_minus";
    }
}

// Success probability of the logical Bell measurement over equally likely
// Bell-state inputs: 1 - 2^-n. Minus-sign inputs always succeed; plus-sign
// inputs succeed with 1 - 2^(1-n); the four average to 1 - 2^-n, which is
// also the exact success probability of teleporting any qubit.
inline double success_probability(int n) {
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    return 1.0 - std::ldexp(1.0, -n);
}

// Decomposition of a logical Bell state over per-pair Bell states: all
// 2^(n-1) same-family sequences whose minus-sign count has the parity of the
// logical sign (even for Plus, odd for Minus), each with amplitude
// 2^-(n-1)/2.
inline std::map<std::vector<BellKind>, double> expand_logical_bell(LogicalBellKind kind, int n) {
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    if (n > 16) throw std::invalid_argument("expansion size 2^(n-1) is impractical beyond n = 16");
    const int want_parity = kind.sign == BellSign::Minus ? 1 : 0;
    const double amp = 1.0 / std::sqrt(std::ldexp(1.0, n - 1));
    std::map<std::vector<BellKind>, double> out;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        if (std::popcount(mask) % 2 != want_parity) continue;
        std::vector<BellKind> seq(n);
        for (int i = 0; i < n; ++i)
            seq[i] = BellKind{kind.family, ((mask >> i) & 1u) ? BellSign::Minus : BellSign::Plus};
        out.emplace(std::move(seq), amp);
    }
    return out;
}

// Raised when a measurement record mixes Bs successes of both families,
// which has probability zero for any legal joint state.
struct impossible_outcome : std::logic_error {
    using std::logic_error::logic_error;
};

// Parity classification of N Bs outcomes: the identified family is the one
// the successes belong to, the sign is fixed by the parity of the identified
// minus-state count (even -> Plus, odd -> Minus, where zero counts as even
// as long as at least one success of the family exists). No success at all
// is the failure case. Order-independent by construction.
inline std::optional<LogicalBellKind> classify_logical(const std::vector<BsOutcome>& outcomes) {
    if (outcomes.empty()) throw std::invalid_argument("outcome list must not be empty");
    int phi = 0;
    int psi = 0;
    for (const BsOutcome& o : outcomes) {
        if (o.kind == BsOutcomeKind::SuccessPhiMinus) ++phi;
        if (o.kind == BsOutcomeKind::SuccessPsiMinus) ++psi;
    }
    if (phi > 0 && psi > 0) throw impossible_outcome("Bs successes from both Bell families");
    if (phi + psi == 0) return std::nullopt;
    const BellFamily family = phi > 0 ? BellFamily::Phi : BellFamily::Psi;
    const int count = phi > 0 ? phi : psi;
    return LogicalBellKind{family, count % 2 == 0 ? BellSign::Plus : BellSign::Minus};
}

struct LogicalBMRecord {
    std::vector<BsOutcome> outcomes;
    std::optional<LogicalBellKind> result;
    int phi_minus_count = 0;
    int psi_minus_count = 0;
};

// Fine-grained projection outcome of one Bs inside the branch engine. Bunch
// outcomes are the single-click two-photon events (both photons exit into
// one H-type or one V-type detector mode); Single outcomes are one-photon
// pairs whose partner was lost; Deficit is an empty pair.
enum class PairOutcome { PhiMinus, PsiMinus, BunchH, BunchV, SingleH, SingleV, Deficit };

inline BsOutcome to_bs_outcome(PairOutcome o) {
    switch (o) {
        case PairOutcome::PhiMinus: return make_bs_outcome(BsOutcomeKind::SuccessPhiMinus);
        case PairOutcome::PsiMinus: return make_bs_outcome(BsOutcomeKind::SuccessPsiMinus);
        case PairOutcome::Deficit: return make_bs_outcome(BsOutcomeKind::ClickDeficit);
        default: return make_bs_outcome(BsOutcomeKind::Ambiguous);
    }
}

// Exact symbolic state of a joint GHZ system, tracked as at most four
// branches indexed by the two sign variables (first register sign s, shared
// partner sign t):
//
//     |psi> = sum_{s,t} c(s,t) |s>^(a) |t>^(b)
//
// where a photons still carry s and b photons still carry t. Measuring one
// pair multiplies each branch by the outcome's overlap factor (+-1/sqrt2 for
// the Bell projections, +-1/2 for the bunch projections); losing a photon
// collapses it against the environment in the H/V basis with the exact
// conditional probability. Branches with equal surviving product states are
// summed coherently, which is what makes the last pair (and loss edge cases)
// interfere correctly.
class BranchState {
public:
    enum class Axis { First, Second };

    // Joint state of two n-photon logical qubits in a Bell state; both
    // registers are measured pairwise.
    static BranchState bell_input(LogicalBellKind kind, int n) {
        if (n < 1) throw std::invalid_argument("n must be >= 1");
        BranchState st;
        const double r = 1.0 / std::sqrt(2.0);
        const double rel = kind.sign == BellSign::Plus ? r : -r;
        if (kind.family == BellFamily::Phi) {
            st.c_ = {Complex(r), Complex(0.0), Complex(0.0), Complex(rel)};
        } else {
            st.c_ = {Complex(0.0), Complex(r), Complex(rel), Complex(0.0)};
        }
        st.first_carriers_ = n;
        st.second_carriers_ = n;
        st.pairs_remaining_ = n;
        return st;
    }

    // Input qubit (sign s) against the 2n-photon channel
    // (|+>^n|+>^n + |->^n|->^n)/sqrt2 (sign t). The sender half of the
    // channel is measured pairwise against the input; the receiver half
    // keeps carrying t.
    static BranchState teleport_input(const LogicalQubit& q) {
        if (q.photons_present != q.n_photons)
            throw std::invalid_argument("teleport input must have all photons present");
        BranchState st;
        const double r = 1.0 / std::sqrt(2.0);
        st.c_ = {q.amp_plus * r, q.amp_plus * r, q.amp_minus * r, q.amp_minus * r};
        st.first_carriers_ = q.n_photons;
        st.second_carriers_ = 2 * q.n_photons;
        st.pairs_remaining_ = q.n_photons;
        return st;
    }

    int pairs_remaining() const { return pairs_remaining_; }
    int first_carriers() const { return first_carriers_; }
    int second_carriers() const { return second_carriers_; }

    // Exact conditional outcome distribution of the next pair, given which
    // of its two photons survived loss.
    std::vector<std::pair<PairOutcome, double>> outcome_distribution(bool first_alive,
                                                                     bool second_alive) const {
        if (pairs_remaining_ < 1) throw std::logic_error("no pairs left to measure");
        const double cur = grouped_norm2(c_, first_carriers_, second_carriers_);
        const int fa = first_carriers_ - (first_alive ? 1 : 0);
        const int sa = second_carriers_ - (second_alive ? 1 : 0);
        std::vector<std::pair<PairOutcome, double>> dist;
        for (PairOutcome o : candidate_outcomes(first_alive, second_alive)) {
            if (o == PairOutcome::Deficit) {
                dist.emplace_back(o, 1.0);
                continue;
            }
            const auto cc = multiplied(c_, o, first_alive, second_alive);
            dist.emplace_back(o, grouped_norm2(cc, fa, sa) / cur);
        }
        return dist;
    }

    void apply_outcome(PairOutcome o, bool first_alive, bool second_alive) {
        if (pairs_remaining_ < 1) throw std::logic_error("no pairs left to measure");
        c_ = multiplied(c_, o, first_alive, second_alive);
        first_carriers_ -= first_alive ? 1 : 0;
        second_carriers_ -= second_alive ? 1 : 0;
        --pairs_remaining_;
        renormalize();
    }

    PairOutcome sample_outcome(bool first_alive, bool second_alive, RngStream& rng) {
        const auto dist = outcome_distribution(first_alive, second_alive);
        double u = rng.next_double();
        // Rounding dust can leave u above the final cumulative bin; fall
        // back to the last outcome of nonzero probability.
        PairOutcome picked = dist.front().first;
        for (const auto& [o, p] : dist) {
            if (p <= 0.0) continue;
            picked = o;
            if (u < p) break;
            u -= p;
        }
        apply_outcome(picked, first_alive, second_alive);
        return picked;
    }

    // Environment collapse for one lost photon carrying the given sign.
    // Returns true when the environment outcome was the V type, which flips
    // the relative sign of that axis' minus branches.
    bool collapse_lost_photon(Axis axis, RngStream& rng) {
        const int fa = first_carriers_ - (axis == Axis::First ? 1 : 0);
        const int sa = second_carriers_ - (axis == Axis::Second ? 1 : 0);
        if (fa < 0 || sa < 0) throw std::logic_error("no photon left to lose on this register");
        const auto cv = sign_flipped(c_, axis);
        const double nh = grouped_norm2(c_, fa, sa);
        const double nv = grouped_norm2(cv, fa, sa);
        const bool v = rng.next_double() < nv / (nh + nv);
        if (v) c_ = cv;
        first_carriers_ = fa;
        second_carriers_ = sa;
        renormalize();
        return v;
    }

    // Unnormalized-within-norm readout of the surviving register after all
    // pairs are measured: amplitude on |+>^b and |->^b.
    Complex group_plus() const { return c_[0] + c_[2]; }
    Complex group_minus() const { return c_[1] + c_[3]; }

    double norm2() const { return grouped_norm2(c_, first_carriers_, second_carriers_); }

private:
    // Branch order: (s,t) = (+,+), (+,-), (-,+), (-,-).
    std::array<Complex, 4> c_{};
    int first_carriers_ = 0;
    int second_carriers_ = 0;
    int pairs_remaining_ = 0;

    static constexpr double kR2 = 0.70710678118654752440;

    static std::vector<PairOutcome> candidate_outcomes(bool first_alive, bool second_alive) {
        if (first_alive && second_alive)
            return {PairOutcome::PhiMinus, PairOutcome::PsiMinus, PairOutcome::BunchH,
                    PairOutcome::BunchV};
        if (first_alive || second_alive) return {PairOutcome::SingleH, PairOutcome::SingleV};
        return {PairOutcome::Deficit};
    }

    // Overlap factors of each outcome against the four sign branches. For
    // single-photon outcomes the surviving register decides the sign pattern.
    static std::array<double, 4> factors(PairOutcome o, bool first_alive, bool /*second_alive*/) {
        switch (o) {
            case PairOutcome::PhiMinus: return {kR2, 0.0, 0.0, -kR2};
            case PairOutcome::PsiMinus: return {0.0, kR2, -kR2, 0.0};
            case PairOutcome::BunchH: return {0.5, 0.5, 0.5, 0.5};
            case PairOutcome::BunchV: return {0.5, -0.5, -0.5, 0.5};
            case PairOutcome::SingleH: return {kR2, kR2, kR2, kR2};
            case PairOutcome::SingleV:
                return first_alive ? std::array<double, 4>{kR2, kR2, -kR2, -kR2}
                                   : std::array<double, 4>{kR2, -kR2, kR2, -kR2};
            default: return {1.0, 1.0, 1.0, 1.0};
        }
    }

    static std::array<Complex, 4> multiplied(const std::array<Complex, 4>& c, PairOutcome o,
                                             bool first_alive, bool second_alive) {
        const auto f = factors(o, first_alive, second_alive);
        return {c[0] * f[0], c[1] * f[1], c[2] * f[2], c[3] * f[3]};
    }

    static std::array<Complex, 4> sign_flipped(const std::array<Complex, 4>& c, Axis axis) {
        if (axis == Axis::First) return {c[0], c[1], -c[2], -c[3]};
        return {c[0], -c[1], c[2], -c[3]};
    }

    // Squared norm with branches of identical surviving product states summed
    // coherently: branches stay orthogonal in a sign variable only while at
    // least one photon still carries it.
    static double grouped_norm2(const std::array<Complex, 4>& c, int first_rem, int second_rem) {
        if (first_rem > 0 && second_rem > 0)
            return std::norm(c[0]) + std::norm(c[1]) + std::norm(c[2]) + std::norm(c[3]);
        if (first_rem > 0) return std::norm(c[0] + c[1]) + std::norm(c[2] + c[3]);
        if (second_rem > 0) return std::norm(c[0] + c[2]) + std::norm(c[1] + c[3]);
        return std::norm(c[0] + c[1] + c[2] + c[3]);
    }

    void renormalize() {
        const double n2 = norm2();
        if (n2 <= 0.0) throw std::logic_error("branch state collapsed to zero norm");
        const double inv = 1.0 / std::sqrt(n2);
        for (Complex& c : c_) {
            c *= inv;
            if (std::abs(c) < 1e-14) c = Complex(0.0);
        }
    }
};

namespace detail {

inline LogicalBMRecord finish_record(std::vector<BsOutcome> outcomes) {
    LogicalBMRecord rec;
    rec.outcomes = std::move(outcomes);
    rec.result = classify_logical(rec.outcomes);
    for (const BsOutcome& o : rec.outcomes) {
        if (o.kind == BsOutcomeKind::SuccessPhiMinus) ++rec.phi_minus_count;
        if (o.kind == BsOutcomeKind::SuccessPsiMinus) ++rec.psi_minus_count;
    }
    return rec;
}

}  // namespace detail

// Logical Bell measurement of a lossless Bell-state input: n Bs projections
// sampled from the exact joint distribution, then parity classification.
inline LogicalBMRecord measure_logical_bell(LogicalBellKind kind, int n, RngStream& rng) {
    BranchState st = BranchState::bell_input(kind, n);
    std::vector<BsOutcome> outcomes;
    outcomes.reserve(n);
    for (int k = 0; k < n; ++k)
        outcomes.push_back(to_bs_outcome(st.sample_outcome(true, true, rng)));
    return detail::finish_record(std::move(outcomes));
}

// Logical Bell measurement with one loss exposure per pair: the measured
// register's photons each pass the loss channel before the Bs array (the
// partner register is taken fresh). This is the accounting under which the
// failure rate is ((1+eta)/2)^n.
inline LogicalBMRecord measure_logical_bell_lossy(LogicalBellKind kind, int n, double eta,
                                                  RngStream& rng) {
    require_loss_rate(eta);
    BranchState st = BranchState::bell_input(kind, n);
    const std::vector<bool> lost = sample_loss_mask(n, eta, rng);
    for (int i = 0; i < n; ++i)
        if (lost[i]) st.collapse_lost_photon(BranchState::Axis::First, rng);
    std::vector<BsOutcome> outcomes;
    outcomes.reserve(n);
    for (int k = 0; k < n; ++k)
        outcomes.push_back(to_bs_outcome(st.sample_outcome(!lost[k], true, rng)));
    return detail::finish_record(std::move(outcomes));
}

enum class BMResult { PhiPlus, PhiMinus, PsiPlus, PsiMinus, Fail };

inline int bm_result_index(BMResult r) { return static_cast<int>(r); }

// Exact outcome-class distribution of the lossless logical Bell measurement
// on a Bell-state input, by depth-first enumeration of all pair-outcome
// sequences with their exact probabilities.
inline std::array<double, 5> enumerate_bm_distribution(LogicalBellKind kind, int n) {
    if (n < 1 || n > 10) throw std::invalid_argument("enumeration supports n in 1..10");
    std::array<double, 5> dist{};
    auto rec = [&dist](auto&& self, const BranchState& st, int left, int phi, int psi,
                       double prob) -> void {
        if (left == 0) {
            int idx;
            if (phi > 0)
                idx = phi % 2 == 0 ? 0 : 1;
            else if (psi > 0)
                idx = psi % 2 == 0 ? 2 : 3;
            else
                idx = 4;
            dist[idx] += prob;
            return;
        }
        for (const auto& [o, p] : st.outcome_distribution(true, true)) {
            if (p < 1e-15) continue;
            BranchState child = st;
            child.apply_outcome(o, true, true);
            self(self, child, left - 1, phi + (o == PairOutcome::PhiMinus ? 1 : 0),
                 psi + (o == PairOutcome::PsiMinus ? 1 : 0), prob * p);
        }
    };
    rec(rec, BranchState::bell_input(kind, n), n, 0, 0, 1.0);
    return dist;
}

// Exact success probability averaged over equally likely Bell inputs.
inline double uniform_bm_success_exact(int n) {
    double s = 0.0;
    for (LogicalBellKind kind : kAllLogicalBellKinds)
        s += 1.0 - enumerate_bm_distribution(kind, n)[bm_result_index(BMResult::Fail)];
    return s / 4.0;
}

struct PauliCorrection {
    bool x = false;
    bool z = false;
};

// Receiver correction per identified Bell kind (X applied before Z).
using CorrectionTable = std::array<PauliCorrection, 4>;

inline constexpr CorrectionTable kStandardCorrections = {
    PauliCorrection{false, false},  // Phi+
    PauliCorrection{false, true},   // Phi-
    PauliCorrection{true, false},   // Psi+
    PauliCorrection{true, true},    // Psi-
};

struct TeleportRecord {
    bool success = false;
    std::optional<LogicalBellKind> identified;
    PauliCorrection correction;
    LogicalQubit output;
    double fidelity = 0.0;
    Complex raw_plus{0.0};   // receiver amplitudes before correction
    Complex raw_minus{0.0};
    int input_photons_lost = 0;
    int sender_channel_photons_lost = 0;
    int receiver_photons_lost = 0;
    LogicalBMRecord bm;
};

// Success probability of teleportation when all 3n photons (input qubit and
// both channel halves) see one loss exposure of rate eta: a pair can succeed
// only if both measured photons survive, and then does so with probability
// 1/2 regardless of history.
inline double teleport_success_probability(int n, double eta) {
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    require_loss_rate(eta);
    const double q = (1.0 - eta) * (1.0 - eta);
    return 1.0 - std::pow(1.0 - q / 2.0, n);
}

// Teleports a logical qubit through the GHZ channel: per-photon loss is
// sampled on all three registers, the n pair outcomes are drawn from the
// exact joint distribution, the record is classified, and the identified
// kind's Pauli correction is applied to the receiver amplitudes.
inline TeleportRecord teleport(const LogicalQubit& input, double eta, RngStream& rng,
                               const CorrectionTable& table = kStandardCorrections) {
    require_loss_rate(eta);
    const int n = input.n_photons;
    BranchState st = BranchState::teleport_input(input);

    bool flip_audit = false;
    const std::vector<bool> in_lost = sample_loss_mask(n, eta, rng);
    for (int i = 0; i < n; ++i)
        if (in_lost[i]) flip_audit ^= st.collapse_lost_photon(BranchState::Axis::First, rng);
    const std::vector<bool> chan_lost = sample_loss_mask(n, eta, rng);
    for (int i = 0; i < n; ++i)
        if (chan_lost[i]) flip_audit ^= st.collapse_lost_photon(BranchState::Axis::Second, rng);
    const std::vector<bool> recv_lost = sample_loss_mask(n, eta, rng);
    int recv_lost_count = 0;
    for (int i = 0; i < n; ++i) {
        if (recv_lost[i]) {
            ++recv_lost_count;
            flip_audit ^= st.collapse_lost_photon(BranchState::Axis::Second, rng);
        }
    }

    std::vector<BsOutcome> outcomes;
    outcomes.reserve(n);
    for (int k = 0; k < n; ++k) {
        const PairOutcome o = st.sample_outcome(!in_lost[k], !chan_lost[k], rng);
        // A V-type click of a half-lost pair projects the surviving photon
        // with sign-dependent overlap, one more loss-induced phase flip.
        if (o == PairOutcome::SingleV) flip_audit = !flip_audit;
        outcomes.push_back(to_bs_outcome(o));
    }

    TeleportRecord tr;
    tr.bm = detail::finish_record(std::move(outcomes));
    tr.identified = tr.bm.result;
    tr.success = tr.bm.result.has_value();
    tr.raw_plus = st.group_plus();
    tr.raw_minus = st.group_minus();
    for (bool b : in_lost) tr.input_photons_lost += b ? 1 : 0;
    for (bool b : chan_lost) tr.sender_channel_photons_lost += b ? 1 : 0;
    tr.receiver_photons_lost = recv_lost_count;

    Complex p = tr.raw_plus;
    Complex m = tr.raw_minus;
    if (tr.success) {
        tr.correction = table[logical_kind_index(*tr.identified)];
        if (tr.correction.x) std::swap(p, m);
        if (tr.correction.z) m = -m;
    }

    const int present = n - recv_lost_count;
    const double n2 = std::norm(p) + std::norm(m);
    LogicalQubit out;
    out.n_photons = n;
    out.photons_present = present;
    out.z_flag = flip_audit;
    if (present > 0 && n2 > 1e-24) {
        const double inv = 1.0 / std::sqrt(n2);
        out.amp_plus = p * inv;
        out.amp_minus = m * inv;
        tr.fidelity =
            std::norm(std::conj(input.amp_plus) * p + std::conj(input.amp_minus) * m) / n2;
    } else {
        out.amp_plus = Complex(1.0);
        out.amp_minus = Complex(0.0);
        tr.fidelity = 0.0;
    }
    tr.output = out;
    return tr;
}

}  // namespace mpbell
