#include "mbio/filters.hpp"

#include <cmath>
#include <numeric>

namespace mbio {

RealImage to_real(const GrayImage& image, double scale) {
    RealImage out(image.width(), image.height());
    for (std::size_t i = 0; i < image.size(); ++i) {
        out.data()[i] = image.data()[i] * scale;
    }
    return out;
}

GrayImage rescale_to_gray(const RealImage& image) {
    const auto [lo_it, hi_it] = std::minmax_element(image.data().begin(), image.data().end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    GrayImage out(image.width(), image.height(), 128);
    if (!(hi > lo)) {
        return out;
    }
    const double scale = 255.0 / (hi - lo);
    for (std::size_t i = 0; i < image.size(); ++i) {
        out.data()[i] = static_cast<std::uint8_t>(std::lround((image.data()[i] - lo) * scale));
    }
    return out;
}

int gaussian_radius(double sigma, double extent) {
    return std::max(1, static_cast<int>(std::ceil(extent * sigma - 1e-9)));
}

std::vector<double> gaussian_kernel(double sigma, int radius) {
    std::vector<double> k(2 * radius + 1);
    for (int i = -radius; i <= radius; ++i) {
        k[i + radius] = std::exp(-0.5 * i * i / (sigma * sigma));
    }
    const double sum = std::accumulate(k.begin(), k.end(), 0.0);
    for (double& v : k) {
        v /= sum;
    }
    return k;
}

std::vector<double> gaussian_derivative_kernel(double sigma, int radius) {
    std::vector<double> k(2 * radius + 1);
    double moment = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        const double v = i * std::exp(-0.5 * i * i / (sigma * sigma));
        k[i + radius] = v;
        moment += v * i;
    }
    for (double& v : k) {
        v /= moment;
    }
    return k;
}

RealImage convolve_separable(const RealImage& image, const std::vector<double>& kx, const std::vector<double>& ky,
                             Border border_x, Border border_y) {
    const int w = image.width();
    const int h = image.height();
    const int rx = static_cast<int>(kx.size() / 2);
    const int ry = static_cast<int>(ky.size() / 2);

    RealImage tmp(w, h);
    std::vector<int> xi(w + 2 * rx);
    for (int x = -rx; x < w + rx; ++x) {
        xi[x + rx] = border_index(x, w, border_x);
    }
    for (int y = 0; y < h; ++y) {
        const double* src = image.row(y);
        double* dst = tmp.row(y);
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int k = 0; k < static_cast<int>(kx.size()); ++k) {
                acc += kx[k] * src[xi[x + k]];
            }
            dst[x] = acc;
        }
    }

    RealImage out(w, h);
    for (int y = 0; y < h; ++y) {
        double* dst = out.row(y);
        for (int k = 0; k < static_cast<int>(ky.size()); ++k) {
            const double* src = tmp.row(border_index(y + k - ry, h, border_y));
            const double wk = ky[k];
            for (int x = 0; x < w; ++x) {
                dst[x] += wk * src[x];
            }
        }
    }
    return out;
}

RealImage gaussian_blur(const RealImage& image, double sigma, Border border_x, Border border_y) {
    const auto k = gaussian_kernel(sigma, gaussian_radius(sigma));
    return convolve_separable(image, k, k, border_x, border_y);
}

}  // namespace mbio
