/**
 * @file iris_code.hpp
 * @brief Local contrast enhancement of the unwrapped iris, bitplane slicing into
 *        an M x 6 code, majority-vote templates and masked Hamming distance.
 */
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mbio/image.hpp"
#include "mbio/iris_segment.hpp"
#include "mbio/score.hpp"

namespace mbio::iris {

inline constexpr int kPlanes = 6;
inline constexpr int kDefaultRotations = 8;

struct EnhanceParams {
    double sigma1 = 4.0;
    double sigma2 = 2.0;
    double contrast_floor = 1.0;

    void validate() const;
};

/// Enhanced rows 1..R' of the unwrapped iris (R' = limbic row).
struct EnhancedIris {
    GrayImage values;                 ///< width A, height R'
    std::vector<std::uint8_t> valid;  ///< R' x A
    int total_rows = 0;               ///< R of the unwrap; rows past R' are coded as invalid
    Backend provenance = Backend::Reference;
};

/// M = rows x columns samples flattened row-major. Sample i keeps plane k
/// (k = 1..6) in bit k - 1 of planes[i].
struct IrisCode {
    int rows = 0;
    int columns = 0;
    std::vector<std::uint8_t> planes;
    std::vector<std::uint8_t> mask;

    std::size_t size() const noexcept { return planes.size(); }
    int bit(std::size_t i, int plane) const { return (planes.at(i) >> (plane - 1)) & 1; }

    friend bool operator==(const IrisCode&, const IrisCode&) = default;
};

struct IrisScore {
    double hd = 0.0;
    std::size_t compared_bits = 0;
    int shift = 0;  ///< column rotation of the second code at the minimum
};

EnhancedIris enhance(const UnwrappedIris& unwrapped, const EnhanceParams& params = {});

/// Detail and contrast images of the two-phase enhancement over the given rows.
RealImage enhancement_detail(const RealImage& rows, double sigma1);
RealImage enhancement_contrast(const RealImage& detail, double sigma2);

IrisCode bitplane_slice(const EnhancedIris& enhanced);

/// Plane k of value v, k in 1..6.
constexpr int bitplane(std::uint8_t v, int k) { return (v >> k) & 1; }

IrisCode majority_template(std::span<const IrisCode> codes);

/// Cyclic column shift by k (positive moves samples to higher column indices).
IrisCode rotate(const IrisCode& code, int k);

/// Minimum masked Hamming distance over shifts -rotations..rotations of `b`.
/// Ties keep the smallest |shift|, negative first. Throws Incomparable when no
/// bit is jointly valid.
IrisScore hamming(const IrisCode& a, const IrisCode& b, int rotations = kDefaultRotations);

MatchScore to_match_score(const IrisScore& score);

}  // namespace mbio::iris
