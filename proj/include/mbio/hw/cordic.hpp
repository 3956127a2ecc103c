/**
 * @file cordic.hpp
 * @brief Vectoring-mode CORDIC for modulus and angle.
 */
#pragma once

#include <cstdint>
#include <utility>

#include "mbio/hw/fixed_point.hpp"

namespace mbio::hw {

inline constexpr int kCordicIterations = 16;
/// Extra fractional bits of the modulus relative to the operands.
inline constexpr int kCordicRadiusFrac = 16;

struct CordicPolar {
    std::int64_t r = 0;      ///< modulus in operand units with kCordicRadiusFrac extra fraction bits
    std::int32_t theta = 0;  ///< radians with q::kCordicAngleFrac fractional bits, in [-pi, pi]
};

/// Modulus and angle of (x, y) given as raw integers of any common scale
/// (|x|, |y| < 2^31). Gain-compensated; (0, 0) gives r = 0, theta = 0.
CordicPolar cordic_vectoring(std::int64_t x, std::int64_t y, int iterations = kCordicIterations);

/// Q1.15 operands; r has 15 + kCordicRadiusFrac fractional bits.
CordicPolar cordic_polar(Q1_15 x, Q1_15 y, int iterations = kCordicIterations);

double cordic_angle_to_radians(std::int32_t theta);

/// (r, theta) of a pixel offset, for the minutiae polar conversion.
std::pair<double, double> cordic_offset_polar(double dx, double dy);

}  // namespace mbio::hw
