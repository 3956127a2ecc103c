/**
 * @file fp_minutiae.hpp
 * @brief Skeletonization and crossing-number minutiae extraction.
 *
 * Binary images follow the acquisition convention: 0 is ridge, 1 is
 * background. Internally everything works on ridge = 1.
 */
#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "mbio/fp_enhance.hpp"
#include "mbio/image.hpp"

namespace mbio::fp {

enum class MinutiaKind : std::uint8_t {
    Termination = 0,
    Bifurcation = 1,
};

struct Minutia {
    int x = 0;
    int y = 0;
    double angle = 0.0;  ///< ridge orientation in [0, pi)
    MinutiaKind kind = MinutiaKind::Termination;

    friend bool operator==(const Minutia&, const Minutia&) = default;
};

struct MinutiaeSet {
    std::vector<Minutia> minutiae;
    int source_width = 0;
    int source_height = 0;

    std::size_t size() const noexcept { return minutiae.size(); }
    bool empty() const noexcept { return minutiae.empty(); }

    friend bool operator==(const MinutiaeSet&, const MinutiaeSet&) = default;
};

inline constexpr int kDefaultBorderMargin = 12;

/// Zhang-Suen thinning with topology-safe deletion, followed by removal of
/// redundant staircase pixels. Never adds ridge pixels.
GrayImage thin(const GrayImage& binary);

/// Neighbourhood bits of (x, y) in cyclic order N, NE, E, SE, S, SW, W, NW
/// (bit k set when neighbour k is ridge). Ridge is 0 in `binary`.
std::uint8_t neighbourhood_pattern(const GrayImage& binary, int x, int y);

/// Crossing number of an 8-neighbour pattern (bit layout of neighbourhood_pattern).
int crossing_number(std::uint8_t pattern);

/// Crossing number of skeleton pixel p; p must not lie on the outer frame.
int crossing_number(const GrayImage& skeleton, int x, int y);

/// True if deleting a ridge pixel with this neighbourhood keeps the local topology.
bool is_simple(std::uint8_t pattern);

MinutiaeSet extract_minutiae(const GrayImage& skeleton, const OrientationField& field,
                             int border_margin = kDefaultBorderMargin);

}  // namespace mbio::fp
