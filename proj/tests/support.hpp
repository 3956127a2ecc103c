#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>

#include "mbio/image.hpp"

namespace testsupport {

inline constexpr double kPi = std::numbers::pi;

/// Sinusoidal ridges whose crests run along `theta`.
inline mbio::GrayImage ridges(int w, int h, double theta, double period, double amplitude = 100.0,
                              double offset = 128.0) {
    mbio::GrayImage img(w, h);
    const double nx = -std::sin(theta);
    const double ny = std::cos(theta);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double v = offset + amplitude * std::cos(2 * kPi * (x * nx + y * ny) / period);
            img.at(x, y) = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
        }
    }
    return img;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("mbio_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

/// Binary image with ridge = 0, background = 1.
inline mbio::GrayImage blank_binary(int w, int h) { return mbio::GrayImage(w, h, 1); }

/// Number of 8-connected components of ridge (= 0) pixels.
inline int ridge_components(const mbio::GrayImage& bin) {
    const int w = bin.width();
    const int h = bin.height();
    std::vector<int> label(static_cast<std::size_t>(w) * h, 0);
    int count = 0;
    std::vector<std::pair<int, int>> stack;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (bin.at(x, y) != 0 || label[y * w + x]) {
                continue;
            }
            ++count;
            stack.push_back({x, y});
            label[y * w + x] = count;
            while (!stack.empty()) {
                const auto [cx, cy] = stack.back();
                stack.pop_back();
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int nx = cx + dx;
                        const int ny = cy + dy;
                        if (nx >= 0 && ny >= 0 && nx < w && ny < h && bin.at(nx, ny) == 0 && !label[ny * w + nx]) {
                            label[ny * w + nx] = count;
                            stack.push_back({nx, ny});
                        }
                    }
                }
            }
        }
    }
    return count;
}

/// Union of random filled discs and thick strokes as a ridge (= 0) mask.
inline mbio::GrayImage random_blobs(std::mt19937_64& rng, int w, int h, int shapes) {
    mbio::GrayImage img = blank_binary(w, h);
    std::uniform_real_distribution<double> ux(0.0, w);
    std::uniform_real_distribution<double> uy(0.0, h);
    std::uniform_real_distribution<double> ur(2.0, 9.0);
    for (int s = 0; s < shapes; ++s) {
        const double cx = ux(rng);
        const double cy = uy(rng);
        const double r = ur(rng);
        const double ex = ux(rng);
        const double ey = uy(rng);
        const bool stroke = s % 2 == 1;
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                double d = 0.0;
                if (stroke) {
                    const double vx = ex - cx;
                    const double vy = ey - cy;
                    const double len2 = vx * vx + vy * vy;
                    const double t = len2 > 0 ? std::clamp(((x - cx) * vx + (y - cy) * vy) / len2, 0.0, 1.0) : 0.0;
                    d = std::hypot(x - cx - t * vx, y - cy - t * vy) * 3.0;
                } else {
                    d = std::hypot(x - cx, y - cy);
                }
                if (d <= r) {
                    img.at(x, y) = 0;
                }
            }
        }
    }
    return img;
}

}  // namespace testsupport
