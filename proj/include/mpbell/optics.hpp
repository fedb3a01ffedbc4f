#pragma once

#include <bit>
#include <cmath>
#include <compare>
#include <complex>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

namespace mpbell {

using Complex = std::complex<double>;

inline constexpr double kAmplitudePruneTol = 1e-12;
inline constexpr double kUnitarityTol = 1e-12;
inline constexpr double kNormTol = 1e-10;

enum class Polarization { H, V };

// One optical mode: a spatial port carrying one polarization component.
struct ModeIndex {
    int port = 0;
    Polarization pol = Polarization::H;
};

// Flat mode numbering is port-major with H before V.
inline int flat_mode(const ModeIndex& m) {
    return 2 * m.port + (m.pol == Polarization::V ? 1 : 0);
}

// Photon counts per mode.
using OccupationVector = std::vector<int>;

inline int photon_total(const OccupationVector& occ) {
    int total = 0;
    for (int n : occ) total += n;
    return total;
}

namespace detail {

inline double occupation_factorial(const OccupationVector& occ) {
    double f = 1.0;
    for (int n : occ)
        for (int k = 2; k <= n; ++k) f *= static_cast<double>(k);
    return f;
}

}  // namespace detail

// A finite superposition over photon occupation vectors. Amplitudes are kept
// in a lexicographically ordered map so iteration and serialization are
// deterministic.
class PureOpticalState {
public:
    explicit PureOpticalState(int mode_count, int photon_cap = 2)
        : mode_count_(mode_count), photon_cap_(photon_cap) {
        if (mode_count < 1) throw std::invalid_argument("mode_count must be >= 1");
        if (photon_cap < 0) throw std::invalid_argument("photon_cap must be >= 0");
    }

    int mode_count() const { return mode_count_; }
    int photon_cap() const { return photon_cap_; }

    void add_amplitude(const OccupationVector& occ, Complex amp) {
        if (static_cast<int>(occ.size()) != mode_count_)
            throw std::invalid_argument("occupation vector length mismatch");
        for (int n : occ)
            if (n < 0) throw std::invalid_argument("negative photon count");
        if (photon_total(occ) > photon_cap_)
            throw std::invalid_argument("occupation exceeds photon cap");
        amplitudes_[occ] += amp;
    }

    const std::map<OccupationVector, Complex>& amplitudes() const { return amplitudes_; }

    double norm2() const {
        double s = 0.0;
        for (const auto& [occ, amp] : amplitudes_) s += std::norm(amp);
        return s;
    }

    bool is_normalized(double tol = kNormTol) const { return std::abs(norm2() - 1.0) <= tol; }

    void normalize() {
        const double n2 = norm2();
        if (n2 <= 0.0) throw std::domain_error("cannot normalize a zero state");
        const double inv = 1.0 / std::sqrt(n2);
        for (auto& [occ, amp] : amplitudes_) amp *= inv;
    }

    void prune(double tol = kAmplitudePruneTol) {
        for (auto it = amplitudes_.begin(); it != amplitudes_.end();) {
            if (std::abs(it->second) < tol)
                it = amplitudes_.erase(it);
            else
                ++it;
        }
    }

private:
    int mode_count_;
    int photon_cap_;
    std::map<OccupationVector, Complex> amplitudes_;
};

// A unitary acting on the mode creation operators.
class ModeTransform {
public:
    explicit ModeTransform(int dim) : dim_(dim), u_(static_cast<std::size_t>(dim) * dim, Complex(0.0)) {
        if (dim < 1) throw std::invalid_argument("transform dimension must be >= 1");
        for (int i = 0; i < dim; ++i) at(i, i) = Complex(1.0);
    }

    int dim() const { return dim_; }

    Complex& at(int row, int col) { return u_[static_cast<std::size_t>(row) * dim_ + col]; }
    const Complex& at(int row, int col) const { return u_[static_cast<std::size_t>(row) * dim_ + col]; }

    // Max-entry norm of U†U - I.
    double unitarity_defect() const {
        double worst = 0.0;
        for (int i = 0; i < dim_; ++i)
            for (int j = 0; j < dim_; ++j) {
                Complex dot(0.0);
                for (int k = 0; k < dim_; ++k) dot += std::conj(at(k, i)) * at(k, j);
                if (i == j) dot -= Complex(1.0);
                worst = std::max(worst, std::abs(dot));
            }
        return worst;
    }

    bool is_unitary(double tol = kUnitarityTol) const { return unitarity_defect() <= tol; }

    void require_unitary(double tol = kUnitarityTol) const {
        if (!is_unitary(tol)) throw std::invalid_argument("mode transform is not unitary");
    }

    // Composition: returns the transform that applies *this first, then next.
    ModeTransform then(const ModeTransform& next) const {
        if (next.dim_ != dim_) throw std::invalid_argument("transform dimension mismatch");
        ModeTransform out(dim_);
        for (int i = 0; i < dim_; ++i)
            for (int j = 0; j < dim_; ++j) {
                Complex s(0.0);
                for (int k = 0; k < dim_; ++k) s += next.at(i, k) * at(k, j);
                out.at(i, j) = s;
            }
        return out;
    }

private:
    int dim_;
    std::vector<Complex> u_;
};

// Set of detectors that fired (bit i = flat mode i clicked).
struct ClickPattern {
    std::uint32_t mask = 0;

    int count() const { return std::popcount(mask); }
    bool clicked(int mode) const { return (mask >> mode) & 1u; }
    auto operator<=>(const ClickPattern&) const = default;
};

// Applies a mode unitary to a state: every creation operator a†_i is replaced
// by sum_j u(j,i) a†_j and the product re-expanded. Exact for any photon
// number below the cap; amplitudes under 1e-12 are pruned afterwards.
inline PureOpticalState apply_transform(const PureOpticalState& state, const ModeTransform& u) {
    const int m = state.mode_count();
    if (u.dim() != m) throw std::invalid_argument("transform dimension does not match state");
    u.require_unitary();

    PureOpticalState out(m, state.photon_cap());
    for (const auto& [occ, amp] : state.amplitudes()) {
        // Expand prod_i (sum_j u(j,i) x_j)^occ[i] as a polynomial in the x_j.
        std::map<OccupationVector, Complex> poly;
        poly[OccupationVector(m, 0)] = amp / std::sqrt(detail::occupation_factorial(occ));
        for (int i = 0; i < m; ++i) {
            for (int rep = 0; rep < occ[i]; ++rep) {
                std::map<OccupationVector, Complex> next;
                for (const auto& [mono, coef] : poly) {
                    for (int j = 0; j < m; ++j) {
                        const Complex z = u.at(j, i);
                        if (std::abs(z) < 1e-15) continue;
                        OccupationVector key = mono;
                        ++key[j];
                        next[key] += coef * z;
                    }
                }
                poly.swap(next);
            }
        }
        for (const auto& [mono, coef] : poly)
            out.add_amplitude(mono, coef * std::sqrt(detail::occupation_factorial(mono)));
    }
    out.prune();
    return out;
}

// Embeds the real rotation (cos t, sin t; -sin t, cos t) on two modes.
inline ModeTransform build_beamsplitter(double theta, ModeIndex a, ModeIndex b, int mode_count) {
    const int ma = flat_mode(a);
    const int mb = flat_mode(b);
    if (ma < 0 || mb < 0 || ma >= mode_count || mb >= mode_count)
        throw std::invalid_argument("beamsplitter mode out of range");
    if (ma == mb) throw std::invalid_argument("beamsplitter modes must be distinct");
    ModeTransform u(mode_count);
    u.at(ma, ma) = std::cos(theta);
    u.at(ma, mb) = std::sin(theta);
    u.at(mb, ma) = -std::sin(theta);
    u.at(mb, mb) = std::cos(theta);
    return u;
}

// Half-wave-plate style basis change on one port: a†_+ -> a†_H, a†_- -> a†_V,
// i.e. the Hadamard block on that port's (H, V) mode pair. Involutive.
inline ModeTransform build_waveplate_diag_to_hv(int port, int mode_count) {
    const int h = flat_mode({port, Polarization::H});
    const int v = flat_mode({port, Polarization::V});
    if (h < 0 || v >= mode_count) throw std::invalid_argument("waveplate port out of range");
    const double s = 1.0 / std::sqrt(2.0);
    ModeTransform u(mode_count);
    u.at(h, h) = s;
    u.at(h, v) = s;
    u.at(v, h) = s;
    u.at(v, v) = -s;
    return u;
}

// On-off detection statistics: probability of each click pattern (mode
// clicked iff its count is >= 1), grouped over the occupation support.
inline std::map<ClickPattern, double> click_distribution(const PureOpticalState& state,
                                                         const std::vector<int>& detector_modes) {
    if (!state.is_normalized())
        throw std::invalid_argument("click_distribution requires a normalized state");
    std::uint32_t detector_mask = 0;
    for (int m : detector_modes) {
        if (m < 0 || m >= state.mode_count())
            throw std::invalid_argument("detector mode out of range");
        detector_mask |= 1u << m;
    }
    std::map<ClickPattern, double> dist;
    for (const auto& [occ, amp] : state.amplitudes()) {
        ClickPattern pattern;
        for (int m = 0; m < state.mode_count(); ++m) {
            if (occ[m] >= 1) {
                if (!((detector_mask >> m) & 1u))
                    throw std::invalid_argument("state has support on an undetected mode");
                pattern.mask |= 1u << m;
            }
        }
        dist[pattern] += std::norm(amp);
    }
    return dist;
}

}  // namespace mpbell
