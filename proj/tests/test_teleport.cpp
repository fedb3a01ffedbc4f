#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "mpbell/campaigns.hpp"
#include "mpbell/ghz_logic.hpp"

using namespace mpbell;

TEST_CASE("logical Pauli operators") {
    const LogicalQubit q = make_logical_qubit(3, Complex(0.6), Complex(0.0, 0.8));
    SECTION("X swaps the amplitudes") {
        const LogicalQubit x = logical_pauli_x(q);
        REQUIRE(x.amp_plus == q.amp_minus);
        REQUIRE(x.amp_minus == q.amp_plus);
    }
    SECTION("Z twice is the identity") {
        const LogicalQubit zz = logical_pauli_z(logical_pauli_z(q));
        REQUIRE(std::abs(zz.amp_plus - q.amp_plus) < 1e-15);
        REQUIRE(std::abs(zz.amp_minus - q.amp_minus) < 1e-15);
    }
    SECTION("phase(pi) equals Z") {
        const LogicalQubit p = logical_phase(q, std::acos(-1.0));
        const LogicalQubit z = logical_pauli_z(q);
        REQUIRE(std::abs(p.amp_minus - z.amp_minus) < 1e-12);
        REQUIRE(std::abs(p.amp_plus - z.amp_plus) < 1e-12);
    }
    SECTION("construction normalizes and validates") {
        const LogicalQubit big = make_logical_qubit(2, Complex(3.0), Complex(4.0));
        REQUIRE(std::norm(big.amp_plus) + std::norm(big.amp_minus) ==
                Catch::Approx(1.0).margin(1e-12));
        REQUIRE_THROWS_AS(make_logical_qubit(0, Complex(1.0), Complex(0.0)),
                          std::invalid_argument);
        REQUIRE_THROWS_AS(make_logical_qubit(2, Complex(0.0), Complex(0.0)),
                          std::invalid_argument);
    }
}

TEST_CASE("lossless teleportation is exact on every success") {
    for (int n = 1; n <= 6; ++n) {
        const TeleportFidelityReport rep = check_teleport_fidelity(n, 0.0, 100, 20, 42u, 1e-10, 2);
        INFO("n = " << n << " max fidelity deviation " << rep.max_deviation);
        REQUIRE(rep.fidelity_violations == 0);
        REQUIRE(rep.successes + rep.failures == rep.trials);

        // Failure frequency matches 2^-n within three binomial sigmas.
        const double pf = std::ldexp(1.0, -n);
        const double sigma = std::sqrt(pf * (1.0 - pf) / static_cast<double>(rep.trials));
        REQUIRE(std::abs(rep.failure_rate() - pf) < 3.0 * sigma);
    }
}

TEST_CASE("three-photon failure frequency is about one eighth") {
    const TeleportFidelityReport rep = check_teleport_fidelity(3, 0.0, 100, 1000, 7u, 1e-10, 2);
    const double sigma = std::sqrt(0.125 * 0.875 / static_cast<double>(rep.trials));
    REQUIRE(std::abs(rep.failure_rate() - 0.125) < 3.0 * sigma);
}

TEST_CASE("total loss always fails with zero clicks") {
    RngStream rng(1u);
    for (int rep = 0; rep < 50; ++rep) {
        const LogicalQubit q = make_logical_qubit(3, Complex(0.8), Complex(0.6));
        const TeleportRecord tr = teleport(q, 1.0, rng);
        REQUIRE(!tr.success);
        REQUIRE(tr.output.photons_present == 0);
        for (const BsOutcome& o : tr.bm.outcomes) {
            REQUIRE(o.kind == BsOutcomeKind::ClickDeficit);
            REQUIRE(o.clicks == 0);
        }
        REQUIRE(tr.fidelity == 0.0);
    }
}

TEST_CASE("failed lossless runs keep both families in the raw output") {
    RngStream rng(5u);
    const LogicalQubit q = make_logical_qubit(2, Complex(0.8), Complex(0.6));
    int fails = 0;
    for (int i = 0; i < 2000 && fails < 50; ++i) {
        const TeleportRecord tr = teleport(q, 0.0, rng);
        if (tr.success) continue;
        ++fails;
        REQUIRE(std::abs(tr.raw_plus) > 1e-6);
        REQUIRE(std::abs(tr.raw_minus) > 1e-6);
    }
    REQUIRE(fails >= 50);
}

TEST_CASE("identified kind dictates the applied correction") {
    RngStream rng(13u);
    const LogicalQubit q = make_logical_qubit(4, Complex(0.6), Complex(0.8));
    for (int i = 0; i < 2000; ++i) {
        const TeleportRecord tr = teleport(q, 0.0, rng);
        if (!tr.success) continue;
        const PauliCorrection want = kStandardCorrections[logical_kind_index(*tr.identified)];
        REQUIRE(tr.correction.x == want.x);
        REQUIRE(tr.correction.z == want.z);
        REQUIRE((tr.identified->family == BellFamily::Psi) == tr.correction.x);
        REQUIRE((tr.identified->sign == BellSign::Minus) == tr.correction.z);
    }
}

TEST_CASE("a corrupted correction table breaks fidelity") {
    CorrectionTable bad = kStandardCorrections;
    bad[logical_kind_index({BellFamily::Phi, BellSign::Minus})] = {true, false};
    const TeleportFidelityReport rep =
        check_teleport_fidelity(3, 0.0, 20, 50, 42u, 1e-10, 2, bad);
    REQUIRE(rep.fidelity_violations > 0);
}

TEST_CASE("teleport success rate under loss matches the pair-survival law") {
    REQUIRE(teleport_success_probability(3, 0.0) == Catch::Approx(success_probability(3)));
    for (double eta : {0.1, 0.3}) {
        const RateEstimate est = estimate_teleport_success(3, eta, 40000, 99u, 2);
        INFO("eta " << eta << " estimate " << est.estimate << " analytic " << est.analytic);
        REQUIRE(est.sigmas() < 3.0);
    }
}

TEST_CASE("teleporting a partially lost qubit is rejected") {
    LogicalQubit q = make_logical_qubit(3, Complex(1.0), Complex(0.0));
    q.photons_present = 2;
    RngStream rng(3u);
    REQUIRE_THROWS_AS(teleport(q, 0.0, rng), std::invalid_argument);
}

TEST_CASE("environment collapse of the last sign carrier is exact") {
    // A single-photon qubit in |V> = (|+> - |->)/sqrt2 that loses its photon
    // must collapse the environment to the V outcome with certainty.
    const double r2 = 1.0 / std::sqrt(2.0);
    const LogicalQubit q = make_logical_qubit(1, Complex(r2), Complex(-r2));
    for (std::uint64_t seed = 0; seed < 32; ++seed) {
        BranchState st = BranchState::teleport_input(q);
        RngStream rng(seed);
        REQUIRE(st.collapse_lost_photon(BranchState::Axis::First, rng) == true);
    }
}

TEST_CASE("lossy runs that happen to lose nothing stay exact") {
    RngStream rng(2718u);
    const LogicalQubit q = make_logical_qubit(3, Complex(0.6, 0.4), Complex(0.2, -0.66332495807108));
    int clean_successes = 0;
    for (int i = 0; i < 5000; ++i) {
        const TeleportRecord tr = teleport(q, 0.15, rng);
        const int lost = tr.input_photons_lost + tr.sender_channel_photons_lost +
                         tr.receiver_photons_lost;
        if (lost == 0 && tr.success) {
            ++clean_successes;
            REQUIRE(std::abs(tr.fidelity - 1.0) < 1e-10);
        }
    }
    REQUIRE(clean_successes > 100);
}

TEST_CASE("total loss on the measured side alone gives single-click records") {
    // Measured-register loss with the partner intact: every pair still
    // produces exactly one click, so the record fails without deficits.
    RngStream rng(99u);
    for (int i = 0; i < 200; ++i) {
        const LogicalBMRecord rec =
            measure_logical_bell_lossy({BellFamily::Phi, BellSign::Minus}, 3, 1.0, rng);
        REQUIRE(!rec.result.has_value());
        for (const BsOutcome& o : rec.outcomes) {
            REQUIRE(o.kind == BsOutcomeKind::Ambiguous);
            REQUIRE(o.clicks == 1);
        }
    }
}

TEST_CASE("loss collapses act as logical Z flips tracked by the audit flag") {
    // For the X eigenstate (|0L> + |1L>)/sqrt2 every V-type environment
    // outcome is one logical Z, so on success the fidelity is exactly 1 for
    // an even number of flips and 0 for an odd number; z_flag records that
    // parity.
    const double r2 = 1.0 / std::sqrt(2.0);
    const LogicalQubit plus = make_logical_qubit(3, Complex(r2), Complex(r2));
    RngStream rng(31u);
    int successes = 0;
    int flagged = 0;
    for (int i = 0; i < 20000; ++i) {
        const TeleportRecord tr = teleport(plus, 0.2, rng);
        if (!tr.success || tr.output.photons_present == 0) continue;
        ++successes;
        flagged += tr.output.z_flag;
        const double want = tr.output.z_flag ? 0.0 : 1.0;
        REQUIRE(std::abs(tr.fidelity - want) < 1e-10);
    }
    REQUIRE(successes > 5000);
    // Both parities occur in quantity.
    REQUIRE(flagged > successes / 10);
    REQUIRE(flagged < successes - successes / 10);
}

TEST_CASE("Z-basis states survive loss untouched") {
    const LogicalQubit zero = make_logical_qubit(4, Complex(1.0), Complex(0.0));
    RngStream rng(77u);
    for (int i = 0; i < 5000; ++i) {
        const TeleportRecord tr = teleport(zero, 0.25, rng);
        if (!tr.success || tr.output.photons_present == 0) continue;
        REQUIRE(std::abs(tr.fidelity - 1.0) < 1e-10);
    }
}

TEST_CASE("teleportation is deterministic for a fixed stream") {
    const LogicalQubit q = make_logical_qubit(4, Complex(0.28), Complex(0.96));
    RngStream a(123u);
    RngStream b(123u);
    for (int i = 0; i < 200; ++i) {
        const TeleportRecord ta = teleport(q, 0.2, a);
        const TeleportRecord tb = teleport(q, 0.2, b);
        REQUIRE(ta.success == tb.success);
        REQUIRE(ta.fidelity == tb.fidelity);
        REQUIRE(ta.output.amp_plus == tb.output.amp_plus);
        REQUIRE(ta.output.amp_minus == tb.output.amp_minus);
        REQUIRE(ta.output.photons_present == tb.output.photons_present);
    }
}
