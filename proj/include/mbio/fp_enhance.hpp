/**
 * @file fp_enhance.hpp
 * @brief Fingerprint local normalization, orientation field and oriented Gaussian filtering.
 *
 * Intensities are scaled to [0, 1] before the normalization so that the
 * noise-suppression parameter C is dimensionless. Every convolution uses
 * replicate-edge borders.
 */
#pragma once

#include <vector>

#include "mbio/image.hpp"

namespace mbio::fp {

struct FilterParams {
    double stats_sigma = 4.0;   ///< neighbourhood of the local mean/variance
    double sigma_x = 4.0;       ///< along-ridge scale of the oriented Gaussian
    double sigma_y = 1.5;       ///< across-ridge scale (isotropic pass)
    int window_length = 17;     ///< taps of the anisotropic line kernel
    double c = 0.3;             ///< noise-suppression strength
    double sigma_grad = 0.5;
    double sigma_cov = 1.0;
    double sigma_angle = 7.0;

    void validate() const;

    /// Standard deviation of the anisotropic pass: sqrt(sigma_x^2 - sigma_y^2).
    double sigma_theta() const;
};

struct LocalStats {
    RealImage mean;      ///< in [0, 1] intensity units
    RealImage variance;  ///< >= 0, in squared [0, 1] units
};

struct NormalizedImage {
    RealImage values;  ///< (I - mean) / std, already multiplied by mask
    RealImage mask;    ///< noise-suppression factor in [0, 1]
};

struct OrientationField {
    RealImage theta;      ///< ridge orientation in [0, pi)
    RealImage coherence;  ///< in [0, 1]; 0 where the gradient vanishes
};

/// Variance floor used in the division of the local normalization.
inline constexpr double kVarianceFloor = 1e-4;

LocalStats local_stats(const GrayImage& image, double neighbourhood_sigma);

/// M = 1 - exp(-variance / (2 C^2)).
double noise_suppression_factor(double variance, double c);

NormalizedImage normalize(const GrayImage& image, const FilterParams& params);

OrientationField estimate_orientation(const NormalizedImage& image, const FilterParams& params);

/// Isotropic pass kernel (sigma_y, half-width ceil(3 sigma_y)).
std::vector<double> isotropic_kernel(const FilterParams& params);

/// Anisotropic line kernel weights, window_length taps.
std::vector<double> anisotropic_kernel(const FilterParams& params);

/// Real-valued two-pass oriented filter output (zero-mean like its input).
RealImage oriented_filter_response(const NormalizedImage& image, const OrientationField& field,
                                   const FilterParams& params);

/// oriented_filter_response stretched to [0, 255].
GrayImage oriented_filter(const NormalizedImage& image, const OrientationField& field, const FilterParams& params);

/// 0 (ridge) where pixel < threshold, 1 (background) otherwise.
GrayImage binarize(const GrayImage& image, int threshold);

/// Sign test on a zero-mean response: 0 (ridge) where value < 0, else 1.
GrayImage binarize_sign(const RealImage& response);

}  // namespace mbio::fp
