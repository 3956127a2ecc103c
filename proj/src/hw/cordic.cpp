#include "mbio/hw/cordic.hpp"

#include <array>
#include <cmath>
#include <cstdlib>
#include <numbers>

#include "mbio/error.hpp"

namespace mbio::hw {

namespace {

constexpr int kMaxIterations = 30;
constexpr int kGuardBits = 14;   // extra resolution for the x/y registers
constexpr int kGainFrac = 30;    // K in Q2.30

struct Tables {
    std::array<std::int32_t, kMaxIterations> atan{};  // atan(2^-i) in angle units
    std::array<std::int64_t, kMaxIterations + 1> gain{};  // prod 1/sqrt(1 + 2^-2i) for first n steps
};

const Tables& tables() {
    static const Tables t = [] {
        Tables t;
        double k = 1.0;
        t.gain[0] = std::int64_t{1} << kGainFrac;
        for (int i = 0; i < kMaxIterations; ++i) {
            t.atan[i] = static_cast<std::int32_t>(std::llround(std::ldexp(std::atan(std::ldexp(1.0, -i)), q::kCordicAngleFrac)));
            k /= std::sqrt(1.0 + std::ldexp(1.0, -2 * i));
            t.gain[i + 1] = std::llround(std::ldexp(k, kGainFrac));
        }
        return t;
    }();
    return t;
}

std::int32_t angle_const(double radians) {
    return static_cast<std::int32_t>(std::llround(std::ldexp(radians, q::kCordicAngleFrac)));
}

}  // namespace

CordicPolar cordic_vectoring(std::int64_t x, std::int64_t y, int iterations) {
    if (iterations < 1 || iterations > kMaxIterations) {
        throw Error(ErrorCode::Contract, "CORDIC iterations must lie in [1, 30]");
    }
    if (x == 0 && y == 0) {
        return {};
    }
    // Normalize the operand to a 16-bit magnitude so small and large inputs
    // get the same number of significant bits; the shift is undone on r.
    int norm = 0;
    while (std::max(std::llabs(x), std::llabs(y)) >= (std::int64_t{1} << 16) << norm) {
        ++norm;
    }
    std::int64_t xs = norm > 0 ? round_shift(x, norm) : x;
    std::int64_t ys = norm > 0 ? round_shift(y, norm) : y;
    int up = 0;
    while (std::max(std::llabs(xs), std::llabs(ys)) < (std::int64_t{1} << 15)) {
        xs *= 2;
        ys *= 2;
        ++up;
    }
    xs <<= kGuardBits;
    ys <<= kGuardBits;

    // quadrant pre-rotation into the right half-plane
    std::int32_t z = 0;
    if (xs < 0) {
        const std::int64_t tx = xs;
        if (ys >= 0) {
            xs = ys;
            ys = -tx;
            z = angle_const(std::numbers::pi / 2);
        } else {
            xs = -ys;
            ys = tx;
            z = -angle_const(std::numbers::pi / 2);
        }
    }
    const Tables& t = tables();
    for (int i = 0; i < iterations; ++i) {
        const std::int64_t dx = ys >> i;
        const std::int64_t dy = xs >> i;
        if (ys >= 0) {
            xs += dx;
            ys -= dy;
            z += t.atan[i];
        } else {
            xs -= dx;
            ys += dy;
            z -= t.atan[i];
        }
    }
    // r = x * K, back to the input scale plus kCordicRadiusFrac bits
    const std::int64_t scaled = xs * t.gain[iterations];
    const int down = kGuardBits + kGainFrac + up - norm - kCordicRadiusFrac;
    return {round_shift(scaled, down), z};
}

CordicPolar cordic_polar(Q1_15 x, Q1_15 y, int iterations) { return cordic_vectoring(x.raw(), y.raw(), iterations); }

double cordic_angle_to_radians(std::int32_t theta) { return std::ldexp(static_cast<double>(theta), -q::kCordicAngleFrac); }

std::pair<double, double> cordic_offset_polar(double dx, double dy) {
    // pixel offsets carry 8 fractional bits in the alignment memory
    const auto xi = static_cast<std::int64_t>(std::llround(dx * 256.0));
    const auto yi = static_cast<std::int64_t>(std::llround(dy * 256.0));
    const CordicPolar p = cordic_vectoring(xi, yi);
    return {std::ldexp(static_cast<double>(p.r), -kCordicRadiusFrac) / 256.0, cordic_angle_to_radians(p.theta)};
}

}  // namespace mbio::hw
