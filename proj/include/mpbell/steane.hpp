#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace mpbell {

// The [[7,1,3]] code in one CSS sector. Positions are bits 0..6 of a 7-bit
// word; the same 3x7 parity check serves the X and Z sectors (the classical
// Hamming [7,4] code is self-dual in the CSS sense: its dual is spanned by
// the three weight-4 rows below).
class SteaneCode {
public:
    static constexpr int kLength = 7;
    // Row r has ones at positions whose (j+1) has bit r set, so the syndrome
    // of a single error at position j is exactly j+1.
    static constexpr std::array<std::uint8_t, 3> kParityRows = {0x55, 0x66, 0x78};
    static constexpr std::uint8_t kLogicalSupport = 0x7f;  // weight-7 representative

    static int syndrome(std::uint8_t error) {
        int s = 0;
        for (int r = 0; r < 3; ++r)
            s |= (std::popcount(static_cast<unsigned>(error & kParityRows[r])) & 1) << r;
        return s;
    }

    // The 16 codewords of ker H. Even-weight codewords are stabilizer
    // elements; odd-weight ones act as the logical operator.
    static const std::array<std::uint8_t, 16>& codewords() {
        static const std::array<std::uint8_t, 16> words = [] {
            std::array<std::uint8_t, 16> w{};
            int count = 0;
            for (int e = 0; e < 128; ++e)
                if (syndrome(static_cast<std::uint8_t>(e)) == 0)
                    w[count++] = static_cast<std::uint8_t>(e);
            if (count != 16) throw std::logic_error("Hamming kernel must have 16 elements");
            return w;
        }();
        return words;
    }

    // Whether an in-kernel pattern flips the encoded qubit.
    static bool is_logical(std::uint8_t kernel_element) {
        return std::popcount(static_cast<unsigned>(kernel_element)) % 2 == 1;
    }
};

// Correction output of the erasure-aware decoder. `correction` has the
// requested syndrome; flips outside the erasure set are minimal.
struct SteaneDecodeResult {
    bool failure = false;     // ambiguous coset choice
    std::uint8_t correction = 0;
};

// Minimum-weight decoding with erasures: finds the error pattern consistent
// with the syndrome minimizing the number of flips outside the erasure set.
// Erased positions are free. When both logical cosets reach the same minimal
// outside-weight the choice is ambiguous and decoding fails (this happens
// exactly when the erasure geometry covers a logical operator). Guarantees
// 2t + e < 3: any single unlocated error, or any two erasures, decode
// exactly. Results are precomputed for all 8 x 128 inputs.
class SteaneDecoder {
public:
    SteaneDecoder() {
        for (int s = 0; s < 8; ++s) {
            for (int e = 0; e < 128; ++e) table_[index(s, e)] = solve(s, static_cast<std::uint8_t>(e));
        }
    }

    SteaneDecodeResult decode(int syndrome, std::uint8_t erasures) const {
        if (syndrome < 0 || syndrome > 7) throw std::invalid_argument("syndrome must use 3 bits");
        return table_[index(syndrome, erasures)];
    }

private:
    static std::size_t index(int s, int e) { return static_cast<std::size_t>(s) * 128 + e; }

    static SteaneDecodeResult solve(int s, std::uint8_t erasures) {
        const std::uint8_t e0 = s == 0 ? 0 : static_cast<std::uint8_t>(1u << (s - 1));
        int best_w[2] = {99, 99};          // per logical-coset class
        std::uint8_t best_p[2] = {0, 0};   // lexicographically smallest minimizer
        for (std::uint8_t k : SteaneCode::codewords()) {
            const std::uint8_t cand = e0 ^ k;
            const int cls = SteaneCode::is_logical(k) ? 1 : 0;
            const int w = std::popcount(static_cast<unsigned>(cand & ~erasures & 0x7f));
            if (w < best_w[cls] || (w == best_w[cls] && cand < best_p[cls])) {
                best_w[cls] = w;
                best_p[cls] = cand;
            }
        }
        SteaneDecodeResult r;
        if (best_w[0] == best_w[1]) {
            r.failure = true;
            return r;
        }
        r.correction = best_w[0] < best_w[1] ? best_p[0] : best_p[1];
        return r;
    }

    std::array<SteaneDecodeResult, 8 * 128> table_;
};

inline const SteaneDecoder& steane_decoder() {
    static const SteaneDecoder decoder;
    return decoder;
}

// Vector-of-bits convenience signature over the table-backed decoder.
inline std::optional<std::vector<bool>> decode_with_erasures(const std::vector<bool>& syndrome,
                                                             const std::vector<int>& erasures) {
    if (syndrome.size() != 3) throw std::invalid_argument("syndrome must have 3 bits");
    int s = 0;
    for (int i = 0; i < 3; ++i) s |= (syndrome[i] ? 1 : 0) << i;
    std::uint8_t mask = 0;
    for (int pos : erasures) {
        if (pos < 0 || pos >= SteaneCode::kLength)
            throw std::invalid_argument("erasure position out of range");
        mask |= static_cast<std::uint8_t>(1u << pos);
    }
    const SteaneDecodeResult r = steane_decoder().decode(s, mask);
    if (r.failure) return std::nullopt;
    std::vector<bool> correction(SteaneCode::kLength);
    for (int i = 0; i < SteaneCode::kLength; ++i) correction[i] = (r.correction >> i) & 1;
    return correction;
}

}  // namespace mpbell
