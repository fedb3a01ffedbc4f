#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace mpbell {

enum class SchemeId { ThisWork, Grice, ZaidiVanLoock, EwertVanLoock };

inline const char* scheme_name(SchemeId s) {
    switch (s) {
        case SchemeId::ThisWork: return "this_work";
        case SchemeId::Grice: return "grice";
        case SchemeId::ZaidiVanLoock: return "zaidi_van_loock";
        default: return "ewert_van_loock";
    }
}

struct CurvePoint {
    SchemeId scheme = SchemeId::ThisWork;
    double nbar = 0.0;
    double ps = 0.0;
    bool physical = false;  // nbar realizable by an integer parameter choice
};

// GHZ-encoded Bell measurement: n photons per qubit, nbar = 2n, no ancillas.
inline double ps_this_work(double nbar) {
    if (nbar <= 0.0) throw std::invalid_argument("nbar must be positive");
    return 1.0 - std::exp2(-nbar / 2.0);
}

// Entangled-ancilla boosting: success 1 - 2^-Na with nbar = 2^Na photons in
// total, i.e. 1 - 1/nbar.
inline double ps_grice(double nbar) {
    if (nbar < 2.0) throw std::invalid_argument("nbar must be >= 2");
    return 1.0 - 1.0 / nbar;
}

// Mean photon number of the four-mode squeezed Bell state at squeezing r.
inline double zaidi_nbar(double r) {
    if (r < 0.0) throw std::invalid_argument("squeezing parameter must be >= 0");
    return 2.0 * std::cosh(2.0 * r) + 4.0 * std::sinh(r) * std::sinh(r);
}

// Best published operating point of the squeezing scheme. The quoted mean
// photon number agrees with zaidi_nbar(r) at the quoted r to about 1e-3;
// the point carries the quoted values verbatim.
inline constexpr double kZaidiBestSqueezing = 0.6585;
inline constexpr double kZaidiPointNbar = 6.00029;
inline constexpr double kZaidiPointPs = 0.643;

inline CurvePoint zaidi_point() {
    return {SchemeId::ZaidiVanLoock, kZaidiPointNbar, kZaidiPointPs, true};
}

enum class EwertForm {
    PhotonAccounting,  // 1 - 2^(-nbar/4 - 1/2), from the nbar = 4 Nm + 2 count
    Envelope,          // 1 - 2^(-nbar/4), drops the two-photon offset
};

// Ancilla-boosted scheme of Ewert and van Loock. The photon-accounting form
// is canonical; the envelope form is kept for plot matching.
inline double ps_ewert(double nbar, EwertForm form = EwertForm::PhotonAccounting) {
    if (nbar < 2.0) throw std::invalid_argument("nbar must be >= 2");
    if (form == EwertForm::Envelope) return 1.0 - std::exp2(-nbar / 4.0);
    return 1.0 - std::exp2(-nbar / 4.0 - 0.5);
}

namespace detail {

inline bool near_integer(double x, double& rounded) {
    rounded = std::round(x);
    return std::abs(x - rounded) < 1e-9;
}

}  // namespace detail

// Whether a grid point corresponds to a physically realizable parameter:
// nbar = 2N for this work, 2^Na for Grice, 4Nm + 2 for Ewert.
inline bool is_physical_nbar(SchemeId scheme, double nbar) {
    double r = 0.0;
    switch (scheme) {
        case SchemeId::ThisWork:
            return detail::near_integer(nbar / 2.0, r) && r >= 1.0;
        case SchemeId::Grice: {
            if (nbar < 2.0) return false;
            const double k = std::log2(nbar);
            return detail::near_integer(k, r) && r >= 1.0;
        }
        case SchemeId::EwertVanLoock:
            return detail::near_integer((nbar - 2.0) / 4.0, r) && r >= 0.0;
        default:
            return false;
    }
}

// Samples the three closed-form curves on the grid {2, 2+step, ...} up to
// nbar_max and appends the single squeezing-scheme point; ordering is
// scheme-major, nbar-ascending.
inline std::vector<CurvePoint> emit_curves(double nbar_max, double step,
                                           EwertForm ewert_form = EwertForm::PhotonAccounting) {
    if (!(nbar_max > 2.0)) throw std::invalid_argument("nbar_max must exceed 2");
    if (!(step > 0.0)) throw std::invalid_argument("step must be positive");
    std::vector<CurvePoint> points;
    const auto grid_eval = [&](SchemeId scheme, auto&& fn) {
        for (int i = 0;; ++i) {
            const double nbar = 2.0 + step * i;
            if (nbar > nbar_max + 1e-12) break;
            points.push_back({scheme, nbar, fn(nbar), is_physical_nbar(scheme, nbar)});
        }
    };
    grid_eval(SchemeId::ThisWork, [](double x) { return ps_this_work(x); });
    grid_eval(SchemeId::Grice, [](double x) { return ps_grice(x); });
    points.push_back(zaidi_point());
    grid_eval(SchemeId::EwertVanLoock, [&](double x) { return ps_ewert(x, ewert_form); });
    return points;
}

}  // namespace mpbell
