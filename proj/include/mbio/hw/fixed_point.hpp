/**
 * @file fixed_point.hpp
 * @brief Saturating fixed-point arithmetic and the word-width table of the
 *        hardware model.
 */
#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

namespace mbio::hw {

/// Word formats used by the streaming stages.
namespace q {
inline constexpr int kPixelFrac = 8;         ///< Q8.8 intermediate pixels
inline constexpr int kPixelBits = 16;
inline constexpr int kCordicFrac = 15;       ///< Q1.15 CORDIC operands
inline constexpr int kCordicAngleFrac = 16;  ///< CORDIC angles, radians
inline constexpr int kAccumulatorBits = 24;  ///< 8-bit filter path accumulators
inline constexpr int kWideAccumulatorBits = 32;  ///< Q8.8 filter path accumulators
inline constexpr int kWeightFrac = 8;        ///< Q8.8 filter weights
inline constexpr int kStatWeightFrac = 16;   ///< Gaussian weights of the statistics windows
inline constexpr int kAngleBits = 8;         ///< quantized orientation, 256 steps over pi
}  // namespace q

/// Largest / smallest value of a signed two's-complement word.
constexpr std::int64_t max_signed(int bits) { return (std::int64_t{1} << (bits - 1)) - 1; }
constexpr std::int64_t min_signed(int bits) { return -(std::int64_t{1} << (bits - 1)); }

constexpr std::int64_t saturate(std::int64_t v, int bits) {
    const std::int64_t hi = max_signed(bits);
    const std::int64_t lo = min_signed(bits);
    return v > hi ? hi : (v < lo ? lo : v);
}

/// Arithmetic shift right with round-half-away-from-zero.
constexpr std::int64_t round_shift(std::int64_t v, int shift) {
    if (shift <= 0) {
        return v << -shift;
    }
    const std::int64_t half = std::int64_t{1} << (shift - 1);
    return v >= 0 ? (v + half) >> shift : -((-v + half) >> shift);
}

/// Integer division rounded half away from zero; d must be non-zero.
constexpr std::int64_t round_div(std::int64_t n, std::int64_t d) {
    if (d < 0) {
        n = -n;
        d = -d;
    }
    return n >= 0 ? (n + d / 2) / d : -((-n + d / 2) / d);
}

/// floor(sqrt(v)) for v >= 0.
constexpr std::uint64_t isqrt(std::uint64_t v) {
    std::uint64_t r = 0;
    std::uint64_t bit = std::uint64_t{1} << 62;
    while (bit > v) {
        bit >>= 2;
    }
    while (bit != 0) {
        if (v >= r + bit) {
            v -= r + bit;
            r = (r >> 1) + bit;
        } else {
            r >>= 1;
        }
        bit >>= 2;
    }
    return r;
}

/// Signed fixed-point word with `Frac` fractional bits stored in `Bits` bits.
/// All arithmetic saturates at the word limits.
template <int Frac, int Bits>
class Fixed {
    static_assert(Bits > Frac && Bits <= 32);

public:
    static constexpr int frac_bits = Frac;
    static constexpr int word_bits = Bits;

    constexpr Fixed() = default;

    static constexpr Fixed from_raw(std::int64_t raw) { return Fixed(saturate(raw, Bits)); }
    static Fixed from_double(double v) {
        return from_raw(static_cast<std::int64_t>(std::llround(std::ldexp(v, Frac))));
    }
    static constexpr Fixed max() { return Fixed(max_signed(Bits)); }
    static constexpr Fixed min() { return Fixed(min_signed(Bits)); }

    constexpr std::int32_t raw() const { return static_cast<std::int32_t>(raw_); }
    double to_double() const { return std::ldexp(static_cast<double>(raw_), -Frac); }

    friend constexpr Fixed operator+(Fixed a, Fixed b) { return from_raw(a.raw_ + b.raw_); }
    friend constexpr Fixed operator-(Fixed a, Fixed b) { return from_raw(a.raw_ - b.raw_); }
    friend constexpr Fixed operator*(Fixed a, Fixed b) { return from_raw(round_shift(a.raw_ * b.raw_, Frac)); }
    friend constexpr Fixed operator-(Fixed a) { return from_raw(-a.raw_); }
    friend constexpr bool operator==(Fixed a, Fixed b) { return a.raw_ == b.raw_; }
    friend constexpr auto operator<=>(Fixed a, Fixed b) { return a.raw_ <=> b.raw_; }

private:
    constexpr explicit Fixed(std::int64_t raw) : raw_(raw) {}

    std::int64_t raw_ = 0;
};

using Q8_8 = Fixed<8, 16>;
using Q1_15 = Fixed<15, 16>;

/// Gaussian weights quantized to `frac` bits whose sum is exactly 2^frac
/// (the rounding residue goes to the centre tap).
std::vector<std::int32_t> quantized_gaussian(double sigma, int radius, int frac);

/// Same for an arbitrary non-negative real kernel that sums to 1.
std::vector<std::int32_t> quantize_kernel(const std::vector<double>& kernel, int frac);

}  // namespace mbio::hw
