/**
 * @file iris_segment.hpp
 * @brief Pupil localization by region properties, polar unwrap about the pupil
 *        centre, and limbic boundary search on the unwrapped image.
 */
#pragma once

#include <optional>
#include <vector>

#include "mbio/image.hpp"

namespace mbio::iris {

struct PupilCircle {
    double cx = 0.0;
    double cy = 0.0;
    double radius = 0.0;
};

struct SegmentParams {
    double blur_sigma = 5.0;
    double min_area = 300.0;
    double max_area_fraction = 0.25;
    double max_eccentricity = 0.6;
    double outer_radius_multiple = 2.8;
    int radial_samples = 64;
    int angular_samples = 360;

    void validate() const;
};

struct RegionCandidate {
    int label = 0;
    double area = 0.0;  ///< filled area, px^2
    double eccentricity = 0.0;
    double cx = 0.0;
    double cy = 0.0;
    double equivalent_radius = 0.0;
    double mean_intensity = 0.0;  ///< of the original image inside the region
};

/// R x A raster of samples; row i (1-based radial index) is stored at y = i - 1.
struct UnwrappedIris {
    int radial_samples = 0;
    int angular_samples = 0;
    GrayImage values;                 ///< width A, height R
    std::vector<std::uint8_t> valid;  ///< 1 where the sample fell inside the eye image
    double radial_scale = 0.0;        ///< px per radial sample
    double inner_radius = 0.0;        ///< pupil radius the sweep starts from
    std::optional<int> limbic_row;    ///< in [1, R]
    bool limbic_fallback = false;     ///< set when no positive gradient was found
};

/// Binary mask (1 = foreground) of pixels darker than their Gaussian-weighted
/// neighbourhood.
GrayImage dark_residual_mask(const GrayImage& eye, double sigma);

/// 3x3 erosion then dilation with replicate borders.
GrayImage open3x3(const GrayImage& mask);

/// Opens the mask, labels 8-connected components, fills their holes and
/// measures them. Candidates are in label order.
std::vector<RegionCandidate> region_candidates(const GrayImage& eye, const GrayImage& mask);

/// Area/eccentricity filter then darkest-region choice. Throws PupilNotFound.
PupilCircle select_pupil(const GrayImage& eye, const GrayImage& mask, const SegmentParams& params);

PupilCircle detect_pupil(const GrayImage& eye, const SegmentParams& params = {});

/// Outer sweep radius: min(outer multiple x radius, distance to nearest edge).
double outer_radius(const GrayImage& eye, const PupilCircle& pupil, double outer_multiple);

UnwrappedIris unwrap(const GrayImage& eye, const PupilCircle& pupil, int radial_samples, int angular_samples,
                     double outer_multiple = 2.8);

/// Finds the iris/sclera transition; stores and returns the limbic row.
int find_limbic(UnwrappedIris& unwrapped);

}  // namespace mbio::iris
