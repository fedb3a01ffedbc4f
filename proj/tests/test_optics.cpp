#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "mpbell/optics.hpp"
#include "mpbell/rng.hpp"
#include "oracles.hpp"

using namespace mpbell;

namespace {

const double kPi = std::acos(-1.0);

PureOpticalState two_photon_state(int mode_a, int mode_b, int mode_count) {
    PureOpticalState st(mode_count, 2);
    OccupationVector occ(mode_count, 0);
    occ[mode_a] += 1;
    occ[mode_b] += 1;
    st.add_amplitude(occ, Complex(1.0));
    return st;
}

Complex amp_at(const PureOpticalState& st, const OccupationVector& occ) {
    const auto it = st.amplitudes().find(occ);
    return it == st.amplitudes().end() ? Complex(0.0) : it->second;
}

// Random unitary built by composing beamsplitter rotations on random pairs.
ModeTransform random_unitary(int modes, RngStream& rng) {
    ModeTransform u(modes);
    for (int step = 0; step < 8; ++step) {
        const int a = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(modes)));
        int b = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(modes - 1)));
        if (b >= a) ++b;
        const double theta = rng.next_double() * 2.0 * kPi;
        ModeTransform bs(modes);
        bs.at(a, a) = std::cos(theta);
        bs.at(a, b) = std::sin(theta);
        bs.at(b, a) = -std::sin(theta);
        bs.at(b, b) = std::cos(theta);
        u = u.then(bs);
    }
    return u;
}

}  // namespace

TEST_CASE("identity transform keeps any state") {
    PureOpticalState st = two_photon_state(0, 1, 2);
    const PureOpticalState out = apply_transform(st, ModeTransform(2));
    REQUIRE(amp_at(out, {1, 1}) == Complex(1.0));
    REQUIRE(out.amplitudes().size() == 1);
}

TEST_CASE("balanced splitter on |1,1> bunches (Hong-Ou-Mandel)") {
    const ModeTransform bs =
        build_beamsplitter(kPi / 4.0, {0, Polarization::H}, {0, Polarization::V}, 2);
    const PureOpticalState out = apply_transform(two_photon_state(0, 1, 2), bs);

    // Hand expansion: (a1 - a2)(a1 + a2)/2 = (a1^2 - a2^2)/2.
    const double r2 = 1.0 / std::sqrt(2.0);
    REQUIRE(std::abs(amp_at(out, {2, 0}) - Complex(r2)) < 1e-12);
    REQUIRE(std::abs(amp_at(out, {0, 2}) - Complex(-r2)) < 1e-12);
    REQUIRE(std::abs(amp_at(out, {1, 1})) < 1e-12);

    const auto dist = click_distribution(out, {0, 1});
    REQUIRE(dist.size() == 2);
    REQUIRE(dist.at(ClickPattern{0b01}) == Catch::Approx(0.5).margin(1e-10));
    REQUIRE(dist.at(ClickPattern{0b10}) == Catch::Approx(0.5).margin(1e-10));
}

TEST_CASE("balanced splitter splits a single photon evenly") {
    PureOpticalState st(2, 2);
    st.add_amplitude({1, 0}, Complex(1.0));
    const ModeTransform bs =
        build_beamsplitter(kPi / 4.0, {0, Polarization::H}, {0, Polarization::V}, 2);
    const PureOpticalState out = apply_transform(st, bs);
    REQUIRE(std::norm(amp_at(out, {1, 0})) == Catch::Approx(0.5).margin(1e-12));
    REQUIRE(std::norm(amp_at(out, {0, 1})) == Catch::Approx(0.5).margin(1e-12));
}

TEST_CASE("beamsplitter construction") {
    SECTION("theta = 0 is the identity") {
        const ModeTransform u =
            build_beamsplitter(0.0, {0, Polarization::H}, {1, Polarization::H}, 4);
        ModeTransform id(4);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) REQUIRE(std::abs(u.at(i, j) - id.at(i, j)) < 1e-15);
    }
    SECTION("theta = pi/4 has balanced magnitudes on the block") {
        const ModeTransform u =
            build_beamsplitter(kPi / 4.0, {0, Polarization::H}, {1, Polarization::H}, 4);
        const double r2 = 1.0 / std::sqrt(2.0);
        REQUIRE(std::abs(std::abs(u.at(0, 0)) - r2) < 1e-12);
        REQUIRE(std::abs(std::abs(u.at(0, 2)) - r2) < 1e-12);
        REQUIRE(std::abs(std::abs(u.at(2, 0)) - r2) < 1e-12);
        REQUIRE(std::abs(std::abs(u.at(2, 2)) - r2) < 1e-12);
    }
    SECTION("inverse rotation composes to the identity") {
        const ModeIndex a{0, Polarization::H};
        const ModeIndex b{1, Polarization::V};
        const ModeTransform u = build_beamsplitter(0.37, a, b, 4).then(build_beamsplitter(-0.37, a, b, 4));
        REQUIRE(u.unitarity_defect() < 1e-12);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                REQUIRE(std::abs(u.at(i, j) - (i == j ? 1.0 : 0.0)) < 1e-12);
    }
    SECTION("duplicate or out-of-range modes are rejected") {
        REQUIRE_THROWS_AS(
            build_beamsplitter(0.1, {0, Polarization::H}, {0, Polarization::H}, 4),
            std::invalid_argument);
        REQUIRE_THROWS_AS(
            build_beamsplitter(0.1, {0, Polarization::H}, {5, Polarization::H}, 4),
            std::invalid_argument);
    }
}

TEST_CASE("waveplate basis change") {
    SECTION("applied twice gives the identity") {
        const ModeTransform w = build_waveplate_diag_to_hv(0, 2);
        const ModeTransform ww = w.then(w);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                REQUIRE(std::abs(ww.at(i, j) - (i == j ? 1.0 : 0.0)) < 1e-12);
    }
    SECTION("|+> maps to |H> with certainty") {
        PureOpticalState st(2, 2);
        const double r2 = 1.0 / std::sqrt(2.0);
        st.add_amplitude({1, 0}, Complex(r2));
        st.add_amplitude({0, 1}, Complex(r2));
        const PureOpticalState out = apply_transform(st, build_waveplate_diag_to_hv(0, 2));
        REQUIRE(std::norm(amp_at(out, {1, 0})) == Catch::Approx(1.0).margin(1e-12));
    }
    SECTION("the singlet is invariant up to a global phase") {
        // (|+->-|-+>)/sqrt2 on two ports, diagonal encoding.
        PureOpticalState st(4, 2);
        constexpr double half = 0.5;
        auto add_pair = [&st](int s, int t, double c) {
            for (int p0 = 0; p0 < 2; ++p0)
                for (int p1 = 0; p1 < 2; ++p1) {
                    OccupationVector occ(4, 0);
                    occ[p0] += 1;
                    occ[2 + p1] += 1;
                    st.add_amplitude(occ, c * (p0 ? s : 1) * (p1 ? t : 1) * half);
                }
        };
        const double r2 = 1.0 / std::sqrt(2.0);
        add_pair(1, -1, r2);
        add_pair(-1, 1, -r2);
        PureOpticalState out = apply_transform(st, build_waveplate_diag_to_hv(0, 4));
        out = apply_transform(out, build_waveplate_diag_to_hv(1, 4));
        // Expect (|HV> - |VH>)/sqrt2 up to a global phase.
        const Complex hv = amp_at(out, {1, 0, 0, 1});
        const Complex vh = amp_at(out, {0, 1, 1, 0});
        REQUIRE(std::abs(std::abs(hv) - r2) < 1e-12);
        REQUIRE(std::abs(hv + vh) < 1e-12);
        REQUIRE(std::abs(amp_at(out, {1, 0, 1, 0})) < 1e-12);
        REQUIRE(std::abs(amp_at(out, {0, 1, 0, 1})) < 1e-12);
    }
}

TEST_CASE("click distribution basics") {
    SECTION("vacuum clicks nothing") {
        PureOpticalState st(2, 2);
        st.add_amplitude({0, 0}, Complex(1.0));
        const auto dist = click_distribution(st, {0, 1});
        REQUIRE(dist.size() == 1);
        REQUIRE(dist.at(ClickPattern{0}) == Catch::Approx(1.0));
    }
    SECTION("|1,1> clicks both detectors") {
        const auto dist = click_distribution(two_photon_state(0, 1, 2), {0, 1});
        REQUIRE(dist.size() == 1);
        REQUIRE(dist.at(ClickPattern{0b11}) == Catch::Approx(1.0));
    }
    SECTION("unnormalized states are rejected") {
        PureOpticalState st(2, 2);
        st.add_amplitude({1, 0}, Complex(0.5));
        REQUIRE_THROWS_AS(click_distribution(st, {0, 1}), std::invalid_argument);
    }
    SECTION("support outside the detector set is rejected") {
        REQUIRE_THROWS_AS(click_distribution(two_photon_state(0, 1, 2), {0}),
                          std::invalid_argument);
    }
}

TEST_CASE("transform preconditions") {
    PureOpticalState st = two_photon_state(0, 1, 2);
    SECTION("dimension mismatch") {
        REQUIRE_THROWS_AS(apply_transform(st, ModeTransform(3)), std::invalid_argument);
    }
    SECTION("non-unitary matrix") {
        ModeTransform bad(2);
        bad.at(0, 0) = 2.0;
        REQUIRE_THROWS_AS(apply_transform(st, bad), std::invalid_argument);
    }
}

TEST_CASE("unitarity and norm are preserved through random circuits") {
    RngStream rng(2024u);
    for (int rep = 0; rep < 20; ++rep) {
        const ModeTransform u = random_unitary(4, rng);
        REQUIRE(u.unitarity_defect() < 1e-12);

        PureOpticalState st(4, 2);
        st.add_amplitude({1, 0, 1, 0}, Complex(0.6));
        st.add_amplitude({0, 1, 0, 1}, Complex(0.0, 0.8));
        const PureOpticalState out = apply_transform(st, u);
        REQUIRE(out.norm2() == Catch::Approx(1.0).margin(1e-10));

        // Total photon number is conserved on every occupation in support.
        for (const auto& [occ, amp] : out.amplitudes()) REQUIRE(photon_total(occ) == 2);

        const auto dist = click_distribution(out, {0, 1, 2, 3});
        double total = 0.0;
        for (const auto& [pattern, p] : dist) total += p;
        REQUIRE(total == Catch::Approx(1.0).margin(1e-10));
    }
}

TEST_CASE("one-photon transport agrees with direct matrix action") {
    RngStream rng(555u);
    for (int rep = 0; rep < 20; ++rep) {
        const ModeTransform u = random_unitary(3, rng);
        std::vector<Complex> in = {Complex(rng.next_double(), rng.next_double()),
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

        const auto expect = mpbell::test::one_photon_matvec(u, in);
        OccupationVector basis[3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
        for (int m = 0; m < 3; ++m) REQUIRE(std::abs(amp_at(out, basis[m]) - expect[m]) < 1e-10);
    }
}
