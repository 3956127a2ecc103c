/**
 * @file filters.hpp
 * @brief Gaussian kernels and separable convolution used by the reference backend.
 */
#pragma once

#include <vector>

#include "mbio/image.hpp"

namespace mbio {

enum class Border {
    Replicate,
    Wrap,
};

/// Kernel half-width ceil(extent * sigma), at least 1.
int gaussian_radius(double sigma, double extent = 3.0);

/// Sampled Gaussian of the given radius, normalized to unit sum.
std::vector<double> gaussian_kernel(double sigma, int radius);

/// Sampled first derivative of a Gaussian in correlation form, normalized so that
/// sum(k[i] * i) == 1: a unit ramp correlates to slope +1.
std::vector<double> gaussian_derivative_kernel(double sigma, int radius);

/// Correlation with a horizontal then a vertical 1-D kernel (odd lengths).
RealImage convolve_separable(const RealImage& image, const std::vector<double>& kx, const std::vector<double>& ky,
                             Border border_x = Border::Replicate, Border border_y = Border::Replicate);

RealImage gaussian_blur(const RealImage& image, double sigma, Border border_x = Border::Replicate,
                        Border border_y = Border::Replicate);

/// Resolves an out-of-range coordinate under the given border rule.
inline int border_index(int i, int n, Border border) {
    if (border == Border::Wrap) {
        int m = i % n;
        return m < 0 ? m + n : m;
    }
    return i < 0 ? 0 : (i >= n ? n - 1 : i);
}

}  // namespace mbio
