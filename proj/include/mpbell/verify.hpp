#pragma once

// Runtime self-test: every module's invariants at reduced sample counts,
// one pass/fail line each. Exact checks are seed-independent; sampled checks
// use wide (4 sigma) bands so a passing build passes for any seed.

#include <bit>
#include <cmath>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "mpbell/bell_device.hpp"
#include "mpbell/campaigns.hpp"
#include "mpbell/ghz_logic.hpp"
#include "mpbell/loss_model.hpp"
#include "mpbell/scheme_compare.hpp"
#include "mpbell/steane.hpp"
#include "mpbell/telecorrect.hpp"

namespace mpbell {

namespace verify_detail {

inline bool check_optics_core(std::uint64_t) {
    const double r2 = 1.0 / std::sqrt(2.0);
    const double pi = std::acos(-1.0);

    // Hong-Ou-Mandel on a balanced splitter.
    PureOpticalState in(2, 2);
    in.add_amplitude({1, 1}, Complex(1.0));
    const ModeTransform bs =
        build_beamsplitter(pi / 4.0, {0, Polarization::H}, {0, Polarization::V}, 2);
    const PureOpticalState out = apply_transform(in, bs);
    const auto& amps = out.amplitudes();
    const auto a20 = amps.find({2, 0});
    const auto a02 = amps.find({0, 2});
    if (a20 == amps.end() || a02 == amps.end()) return false;
    if (std::abs(a20->second - Complex(r2)) > 1e-12) return false;
    if (std::abs(a02->second + Complex(r2)) > 1e-12) return false;
    if (amps.count({1, 1})) return false;
    if (std::abs(out.norm2() - 1.0) > 1e-10) return false;

    // Composition of a rotation with its inverse.
    const ModeIndex m0{0, Polarization::H};
    const ModeIndex m1{1, Polarization::H};
    const ModeTransform round_trip =
        build_beamsplitter(0.7, m0, m1, 4).then(build_beamsplitter(-0.7, m0, m1, 4));
    if (round_trip.unitarity_defect() > 1e-12) return false;
    for (int i = 0; i < 4; ++i)
        if (std::abs(round_trip.at(i, i) - 1.0) > 1e-12) return false;

    // Waveplate involution.
    const ModeTransform wp = build_waveplate_diag_to_hv(0, 2);
    const ModeTransform wp2 = wp.then(wp);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            if (std::abs(wp2.at(i, j) - (i == j ? 1.0 : 0.0)) > 1e-12) return false;
    return true;
}

inline bool check_one_photon_matrix_action(std::uint64_t seed) {
    RngStream rng(seed, 1u);
    for (int rep = 0; rep < 10; ++rep) {
        ModeTransform u(3);
        for (int step = 0; step < 6; ++step) {
            const int a = static_cast<int>(rng.next_below(3));
            int b = static_cast<int>(rng.next_below(2));
            if (b >= a) ++b;
            ModeTransform bs(3);
            const double t = rng.next_double() * 6.28318530717958648;
            bs.at(a, a) = std::cos(t);
            bs.at(a, b) = std::sin(t);
            bs.at(b, a) = -std::sin(t);
            bs.at(b, b) = std::cos(t);
            u = u.then(bs);
        }
        Complex in[3] = {Complex(rng.next_double(), rng.next_double()),
                         Complex(rng.next_double(), rng.next_double()),
                         Complex(rng.next_double(), rng.next_double())};
        double n2 = 0.0;
        for (const Complex& c : in) n2 += std::norm(c);
        for (Complex& c : in) c /= std::sqrt(n2);

        PureOpticalState st(3, 2);
        st.add_amplitude({1, 0, 0}, in[0]);
        st.add_amplitude({0, 1, 0}, in[1]);
        st.add_amplitude({0, 0, 1}, in[2]);
        const PureOpticalState out = apply_transform(st, u);
        const OccupationVector basis[3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
        for (int m = 0; m < 3; ++m) {
            Complex want(0.0);
            for (int i = 0; i < 3; ++i) want += u.at(m, i) * in[i];
            const auto it = out.amplitudes().find(basis[m]);
            const Complex got = it == out.amplitudes().end() ? Complex(0.0) : it->second;
            if (std::abs(got - want) > 1e-10) return false;
        }
    }
    return true;
}

inline bool check_bell_device_tables(std::uint64_t) {
    for (BellKind k : kAllBellKinds) {
        const auto table = exact_outcome_table(k);
        double total = 0.0;
        for (const auto& [kind, p] : table) total += p;
        if (std::abs(total - 1.0) > 1e-10) return false;
        const double phi = table.at(BsOutcomeKind::SuccessPhiMinus);
        const double psi = table.at(BsOutcomeKind::SuccessPsiMinus);
        if (k.family == BellFamily::Phi && psi > 1e-12) return false;
        if (k.family == BellFamily::Psi && phi > 1e-12) return false;
        const double success = phi + psi;
        if (k.sign == BellSign::Minus && std::abs(success - 1.0) > 1e-12) return false;
        if (k.sign == BellSign::Plus && success > 1e-12) return false;
    }
    return true;
}

inline bool check_bs_sampling(std::uint64_t seed) {
    RngStream rng(seed, 2u);
    const int n = 10000;
    int success = 0;
    for (int i = 0; i < n; ++i) {
        const BellKind k = kAllBellKinds[rng.next_below(4)];
        const BsOutcome o = sample_bs(k, rng);
        success += o.kind == BsOutcomeKind::SuccessPhiMinus ||
                   o.kind == BsOutcomeKind::SuccessPsiMinus;
    }
    return std::abs(success / static_cast<double>(n) - 0.5) < 4.0 * std::sqrt(0.25 / n);
}

inline bool check_expansion_parity(std::uint64_t) {
    for (int n = 1; n <= 8; ++n) {
        for (LogicalBellKind kind : kAllLogicalBellKinds) {
            const auto exp = expand_logical_bell(kind, n);
            if (exp.size() != (1u << (n - 1))) return false;
            double norm2 = 0.0;
            for (const auto& [seq, amp] : exp) {
                int minus = 0;
                for (BellKind b : seq) {
                    if (b.family != kind.family) return false;
                    minus += b.sign == BellSign::Minus;
                }
                if (minus % 2 != (kind.sign == BellSign::Minus ? 1 : 0)) return false;
                norm2 += amp * amp;
            }
            if (std::abs(norm2 - 1.0) > 1e-12) return false;
        }
    }
    return true;
}

inline bool check_enumeration_closed_form(std::uint64_t) {
    for (int n = 1; n <= 4; ++n)
        if (std::abs(uniform_bm_success_exact(n) - success_probability(n)) > 1e-12) return false;
    return true;
}

inline bool check_classify_permutation(std::uint64_t seed) {
    RngStream rng(seed, 3u);
    const std::vector<BsOutcome> pool = {
        make_bs_outcome(BsOutcomeKind::SuccessPhiMinus), make_bs_outcome(BsOutcomeKind::Ambiguous),
        make_bs_outcome(BsOutcomeKind::ClickDeficit)};
    for (int rep = 0; rep < 200; ++rep) {
        std::vector<BsOutcome> outcomes;
        for (int i = 0; i < 5; ++i) outcomes.push_back(pool[rng.next_below(pool.size())]);
        const auto base = classify_logical(outcomes);
        for (int sh = 0; sh < 10; ++sh) {
            for (std::size_t i = outcomes.size(); i > 1; --i)
                std::swap(outcomes[i - 1], outcomes[rng.next_below(i)]);
            if (classify_logical(outcomes) != base) return false;
        }
    }
    return true;
}

inline bool check_bm_success_rate(std::uint64_t seed) {
    for (int n : {2, 4, 8}) {
        const RateEstimate est = estimate_logical_bm_success(n, 10000, derive_seed(seed, n), 0);
        if (est.sigmas() > 4.0) return false;
    }
    return true;
}

inline bool check_family_purity(std::uint64_t seed) {
    RngStream rng(seed, 4u);
    for (int i = 0; i < 100000; ++i) {
        const LogicalBellKind kind = kAllLogicalBellKinds[rng.next_below(4)];
        const LogicalBMRecord rec = measure_logical_bell(kind, 3, rng);
        if (rec.phi_minus_count > 0 && rec.psi_minus_count > 0) return false;
        if (rec.result.has_value() && !(*rec.result == kind)) return false;
    }
    return true;
}

inline bool check_teleport_exactness(std::uint64_t seed,
                                     const CorrectionTable& table = kStandardCorrections) {
    for (int n = 1; n <= 4; ++n) {
        const TeleportFidelityReport rep =
            mpbell::check_teleport_fidelity(n, 0.0, 30, 20, derive_seed(seed, n), 1e-10, 0, table);
        if (rep.fidelity_violations != 0) return false;
    }
    return true;
}

inline bool check_teleport_failure_rate(std::uint64_t seed) {
    const TeleportFidelityReport rep =
        mpbell::check_teleport_fidelity(3, 0.0, 100, 200, seed, 1e-10, 0);
    const double pf = 0.125;
    const double sigma = std::sqrt(pf * (1.0 - pf) / static_cast<double>(rep.trials));
    return std::abs(rep.failure_rate() - pf) < 4.0 * sigma;
}

inline bool check_teleport_total_loss(std::uint64_t seed) {
    RngStream rng(seed, 5u);
    for (int i = 0; i < 20; ++i) {
        const TeleportRecord tr = teleport(make_logical_qubit(3, Complex(0.6), Complex(0.8)), 1.0, rng);
        if (tr.success || tr.output.photons_present != 0) return false;
    }
    return true;
}

inline bool check_loss_identity(std::uint64_t) {
    for (int n = 1; n <= 20; ++n)
        for (double eta : {0.0, 0.05, 0.3, 0.8, 1.0})
            if (std::abs(bm_failure_prob(n, eta) - bm_failure_prob_binomial(n, eta)) > 1e-12)
                return false;
    for (int n = 1; n <= 10; ++n)
        if (bm_failure_prob(n, 0.0) + success_probability(n) != 1.0) return false;
    return true;
}

inline bool check_zflip_conditional(std::uint64_t seed) {
    RngStream rng(seed, 6u);
    int losses = 0;
    int flips = 0;
    for (int i = 0; i < 20000; ++i) {
        const LossEvent ev = sample_loss(3, 0.3, rng);
        if (ev.k >= 1) {
            ++losses;
            flips += ev.z_flip;
        }
    }
    return std::abs(flips / static_cast<double>(losses) - 0.5) < 4.0 * std::sqrt(0.25 / losses);
}

inline bool check_loss_pipeline(std::uint64_t seed) {
    for (int n : {1, 3, 5}) {
        for (double eta : {0.0, 0.2, 0.5}) {
            const RateEstimate est = estimate_bm_failure_lossy(
                n, eta, 10000, derive_seed(seed, static_cast<std::uint64_t>(n * 100 + eta * 10)),
                0);
            if (est.sigmas() > 4.0) return false;
        }
    }
    return true;
}

inline bool check_curves(std::uint64_t) {
    if (std::abs(ps_this_work(4.0) - 0.75) > 1e-12) return false;
    if (std::abs(ps_grice(4.0) - 0.75) > 1e-12) return false;
    if (!(ps_this_work(8.0) > ps_grice(8.0) && ps_grice(8.0) > ps_ewert(8.0))) return false;
    for (int n = 1; n <= 12; ++n)
        if (ps_this_work(2.0 * n) != success_probability(n)) return false;
    const CurvePoint z = zaidi_point();
    if (z.nbar != 6.00029 || z.ps != 0.643) return false;
    if (std::abs(zaidi_nbar(kZaidiBestSqueezing) - 6.00029) > 1e-3) return false;
    return true;
}

inline bool check_steane_structure(std::uint64_t) {
    for (std::uint8_t row : SteaneCode::kParityRows)
        if (std::popcount(static_cast<unsigned>(row)) != 4) return false;
    for (int j = 0; j < 7; ++j)
        if (SteaneCode::syndrome(static_cast<std::uint8_t>(1u << j)) != j + 1) return false;
    int min_logical = 8;
    for (std::uint8_t w : SteaneCode::codewords()) {
        if (SteaneCode::syndrome(w) != 0) return false;
        if (w != 0 && SteaneCode::is_logical(w))
            min_logical = std::min(min_logical, std::popcount(static_cast<unsigned>(w)));
    }
    return min_logical == 3;
}

inline bool check_steane_decoder(std::uint64_t) {
    const SteaneDecoder& dec = steane_decoder();
    for (int s = 0; s < 8; ++s) {
        for (int e = 0; e < 128; ++e) {
            // Brute-force minimum outside-weight per parity class.
            int best[2] = {99, 99};
            for (int cand = 0; cand < 128; ++cand) {
                if (SteaneCode::syndrome(static_cast<std::uint8_t>(cand)) != s) continue;
                const int w = std::popcount(static_cast<unsigned>(cand & ~e & 0x7f));
                best[std::popcount(static_cast<unsigned>(cand)) & 1] =
                    std::min(best[std::popcount(static_cast<unsigned>(cand)) & 1], w);
            }
            const auto r = dec.decode(s, static_cast<std::uint8_t>(e));
            if (r.failure != (best[0] == best[1])) return false;
            if (!r.failure) {
                const int cls = std::popcount(static_cast<unsigned>(r.correction)) & 1;
                if (best[cls] >= best[1 - cls]) return false;
                if (std::popcount(static_cast<unsigned>(r.correction & ~e & 0x7f)) != best[cls])
                    return false;
                if (SteaneCode::syndrome(r.correction) != s) return false;
            }
        }
    }
    return true;
}

inline bool check_steane_guarantees(std::uint64_t) {
    const SteaneDecoder& dec = steane_decoder();
    for (int j = 0; j < 7; ++j) {
        const std::uint8_t err = static_cast<std::uint8_t>(1u << j);
        const auto r = dec.decode(SteaneCode::syndrome(err), 0);
        if (r.failure || r.correction != err) return false;
    }
    for (int e = 0; e < 128; ++e) {
        if (std::popcount(static_cast<unsigned>(e)) > 2) continue;
        for (int err = 0; err < 128; ++err) {
            if (err & ~e) continue;
            const auto r =
                dec.decode(SteaneCode::syndrome(static_cast<std::uint8_t>(err)),
                           static_cast<std::uint8_t>(e));
            if (r.failure || r.correction != static_cast<std::uint8_t>(err)) return false;
        }
    }
    return true;
}

inline bool check_telecorrect_trivial(std::uint64_t seed) {
    TelecorrectionConfig cfg;
    cfg.n_photons = 4;
    cfg.eta = 0.0;
    cfg.samples = 5000;
    const ErrorRates zero = simulate_level({0.0, 0.0, 0.0, 0}, cfg, seed);
    if (zero.p_fail != 0.0 || zero.p_z != 0.0 || zero.p_x != 0.0) return false;
    const ErrorRates broken = simulate_level({1.0, 0.0, 0.0, 0}, cfg, seed);
    return broken.p_fail == 1.0;
}

inline bool check_telecorrect_contraction(std::uint64_t seed) {
    TelecorrectionConfig cfg;
    cfg.n_photons = 4;
    cfg.eta = 5e-4;
    cfg.samples = 20000;
    cfg.levels = 2;
    const auto rates = simulate_levels(4, 5e-4, cfg, seed);
    return max_rate(rates[2]) < max_rate(rates[1]);
}

inline bool check_determinism(std::uint64_t seed) {
    const RateEstimate a = estimate_logical_bm_success(3, 20000, seed, 1);
    const RateEstimate b = estimate_logical_bm_success(3, 20000, seed, 4);
    if (a.successes != b.successes) return false;
    TelecorrectionConfig cfg;
    cfg.n_photons = 4;
    cfg.eta = 1e-3;
    cfg.samples = 5000;
    cfg.workers = 1;
    const ErrorRates r1 = simulate_level({0.06, 0.004, 0.001, 0}, cfg, seed);
    cfg.workers = 3;
    const ErrorRates r2 = simulate_level({0.06, 0.004, 0.001, 0}, cfg, seed);
    return r1.p_fail == r2.p_fail && r1.p_z == r2.p_z && r1.p_x == r2.p_x;
}

}  // namespace verify_detail

struct VerifyCheck {
    std::string name;
    std::function<bool(std::uint64_t)> run;
};

inline std::vector<VerifyCheck> verify_checks() {
    using namespace verify_detail;
    return {
        {"optics.core_transforms", check_optics_core},
        {"optics.one_photon_matrix_action", check_one_photon_matrix_action},
        {"bell_device.exact_tables", check_bell_device_tables},
        {"bell_device.sampling", check_bs_sampling},
        {"ghz.expansion_parity", check_expansion_parity},
        {"ghz.enumeration_closed_form", check_enumeration_closed_form},
        {"ghz.classify_permutation_invariance", check_classify_permutation},
        {"ghz.mc_success_rate", check_bm_success_rate},
        {"ghz.family_purity", check_family_purity},
        {"teleport.fidelity_on_success",
         [](std::uint64_t s) { return check_teleport_exactness(s); }},
        {"teleport.failure_rate", check_teleport_failure_rate},
        {"teleport.total_loss_fails", check_teleport_total_loss},
        {"loss.binomial_identity", check_loss_identity},
        {"loss.zflip_conditional", check_zflip_conditional},
        {"loss.pipeline_failure_law", check_loss_pipeline},
        {"curves.closed_forms", check_curves},
        {"steane.structure", check_steane_structure},
        {"steane.decoder_vs_bruteforce", check_steane_decoder},
        {"steane.erasure_guarantees", check_steane_guarantees},
        {"telecorrect.trivial_levels", check_telecorrect_trivial},
        {"telecorrect.subthreshold_contraction", check_telecorrect_contraction},
        {"mc.determinism_across_workers", check_determinism},
    };
}

// Runs all checks, printing one line per check. Returns 0 when all pass,
// 3 otherwise.
inline int run_verify(std::uint64_t seed, std::ostream& os = std::cout) {
    bool all_ok = true;
    for (const VerifyCheck& check : verify_checks()) {
        const bool ok = check.run(seed);
        all_ok = all_ok && ok;
        os << (ok ? "PASS " : "FAIL ") << check.name << "\n";
    }
    os << (all_ok ? "verify: all checks passed\n" : "verify: FAILURES detected\n");
    return all_ok ? 0 : 3;
}

}  // namespace mpbell
