#include "mbio/fp_enhance.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

#include "mbio/filters.hpp"

namespace mbio::fp {

void FilterParams::validate() const {
    if (!(stats_sigma > 0 && sigma_x > 0 && sigma_y > 0 && sigma_grad > 0 && sigma_cov > 0 && sigma_angle > 0)) {
        throw Error(ErrorCode::Config, "filter sigmas must be positive");
    }
    if (sigma_y >= sigma_x) {
        throw Error(ErrorCode::Config, "sigma_y must be smaller than sigma_x");
    }
    if (window_length < 1 || window_length % 2 == 0) {
        throw Error(ErrorCode::Config, "window_length must be odd");
    }
    if (!(c > 0 && c <= 1)) {
        throw Error(ErrorCode::Config, "C must lie in (0, 1]");
    }
}

double FilterParams::sigma_theta() const { return std::sqrt(sigma_x * sigma_x - sigma_y * sigma_y); }

LocalStats local_stats(const GrayImage& image, double neighbourhood_sigma) {
    if (!(neighbourhood_sigma > 0)) {
        throw Error(ErrorCode::Contract, "neighbourhood sigma must be positive");
    }
    const RealImage scaled = to_real(image, 1.0 / 255.0);
    RealImage squared = scaled;
    for (double& v : squared.data()) {
        v *= v;
    }
    LocalStats stats{gaussian_blur(scaled, neighbourhood_sigma), gaussian_blur(squared, neighbourhood_sigma)};
    for (std::size_t i = 0; i < scaled.size(); ++i) {
        const double m = stats.mean.data()[i];
        double& v = stats.variance.data()[i];
        v = std::max(0.0, v - m * m);
    }
    return stats;
}

double noise_suppression_factor(double variance, double c) {
    return 1.0 - std::exp(-variance / (2.0 * c * c));
}

NormalizedImage normalize(const GrayImage& image, const FilterParams& params) {
    params.validate();
    const LocalStats stats = local_stats(image, params.stats_sigma);
    NormalizedImage out{RealImage(image.width(), image.height()), RealImage(image.width(), image.height())};
    for (std::size_t i = 0; i < image.size(); ++i) {
        const double var = stats.variance.data()[i];
        const double m = noise_suppression_factor(var, params.c);
        const double g = (image.data()[i] / 255.0 - stats.mean.data()[i]) / std::sqrt(std::max(var, kVarianceFloor));
        out.mask.data()[i] = m;
        out.values.data()[i] = g * m;
    }
    return out;
}

OrientationField estimate_orientation(const NormalizedImage& image, const FilterParams& params) {
    params.validate();
    const RealImage& v = image.values;
    if (v.width() < 3 || v.height() < 3) {
        throw Error(ErrorCode::Dimension, "orientation needs at least a 3x3 image");
    }
    const int rg = gaussian_radius(params.sigma_grad);
    const auto deriv = gaussian_derivative_kernel(params.sigma_grad, rg);
    const auto smooth = gaussian_kernel(params.sigma_grad, rg);
    const RealImage gx = convolve_separable(v, deriv, smooth);
    const RealImage gy = convolve_separable(v, smooth, deriv);

    const int w = v.width();
    const int h = v.height();
    RealImage gxx(w, h), gxy(w, h), gyy(w, h);
    for (std::size_t i = 0; i < v.size(); ++i) {
        gxx.data()[i] = gx.data()[i] * gx.data()[i];
        gxy.data()[i] = gx.data()[i] * gy.data()[i];
        gyy.data()[i] = gy.data()[i] * gy.data()[i];
    }
    gxx = gaussian_blur(gxx, params.sigma_cov);
    gxy = gaussian_blur(gxy, params.sigma_cov);
    gyy = gaussian_blur(gyy, params.sigma_cov);

    // doubled-angle components
    RealImage cos2(w, h), sin2(w, h), energy(w, h);
    for (std::size_t i = 0; i < v.size(); ++i) {
        cos2.data()[i] = gxx.data()[i] - gyy.data()[i];
        sin2.data()[i] = 2.0 * gxy.data()[i];
        energy.data()[i] = gxx.data()[i] + gyy.data()[i];
    }
    cos2 = gaussian_blur(cos2, params.sigma_angle);
    sin2 = gaussian_blur(sin2, params.sigma_angle);
    energy = gaussian_blur(energy, params.sigma_angle);

    OrientationField field{RealImage(w, h), RealImage(w, h)};
    constexpr double pi = std::numbers::pi;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double a = cos2.data()[i];
        const double b = sin2.data()[i];
        const double mag = std::hypot(a, b);
        if (mag < 1e-12 || energy.data()[i] <= 0.0) {
            continue;  // flat: theta 0, coherence 0
        }
        double theta = pi / 2 + 0.5 * std::atan2(b, a);
        if (theta >= pi) {
            theta -= pi;
        }
        if (theta < 0) {
            theta += pi;
        }
        field.theta.data()[i] = theta;
        field.coherence.data()[i] = std::clamp(mag / energy.data()[i], 0.0, 1.0);
    }
    return field;
}

std::vector<double> isotropic_kernel(const FilterParams& params) {
    return gaussian_kernel(params.sigma_y, gaussian_radius(params.sigma_y));
}

std::vector<double> anisotropic_kernel(const FilterParams& params) {
    return gaussian_kernel(params.sigma_theta(), params.window_length / 2);
}

RealImage oriented_filter_response(const NormalizedImage& image, const OrientationField& field,
                                   const FilterParams& params) {
    params.validate();
    if (!field.theta.same_shape(image.values)) {
        throw Error(ErrorCode::Dimension, "orientation field does not match image");
    }
    const auto iso = isotropic_kernel(params);
    const RealImage pass1 = convolve_separable(image.values, iso, iso);

    const auto ani = anisotropic_kernel(params);
    const int half = params.window_length / 2;
    RealImage out(pass1.width(), pass1.height());
    for (int y = 0; y < pass1.height(); ++y) {
        for (int x = 0; x < pass1.width(); ++x) {
            const double theta = field.theta.at(x, y);
            const double c = std::cos(theta);
            const double s = std::sin(theta);
            double acc = 0.0;
            for (int t = -half; t <= half; ++t) {
                const int sx = x + static_cast<int>(std::lround(t * c));
                const int sy = y + static_cast<int>(std::lround(t * s));
                acc += ani[t + half] * pass1.clamped(sx, sy);
            }
            out.at(x, y) = acc;
        }
    }
    return out;
}

GrayImage oriented_filter(const NormalizedImage& image, const OrientationField& field, const FilterParams& params) {
    return rescale_to_gray(oriented_filter_response(image, field, params));
}

GrayImage binarize(const GrayImage& image, int threshold) {
    if (threshold < 0 || threshold > 255) {
        throw Error(ErrorCode::Contract, "threshold must lie in [0, 255]");
    }
    GrayImage out(image.width(), image.height());
    for (std::size_t i = 0; i < image.size(); ++i) {
        out.data()[i] = image.data()[i] < threshold ? 0 : 1;
    }
    return out;
}

GrayImage binarize_sign(const RealImage& response) {
    GrayImage out(response.width(), response.height());
    for (std::size_t i = 0; i < response.size(); ++i) {
        out.data()[i] = response.data()[i] < 0.0 ? 0 : 1;
    }
    return out;
}

}  // namespace mbio::fp
