#include "mbio/iris_segment.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mbio/filters.hpp"

namespace mbio::iris {

namespace {

constexpr int kDx8[8] = {1, 1, 0, -1, -1, -1, 0, 1};
constexpr int kDy8[8] = {0, 1, 1, 1, 0, -1, -1, -1};

GrayImage morph3x3(const GrayImage& in, bool erode) {
    GrayImage out(in.width(), in.height());
    for (int y = 0; y < in.height(); ++y) {
        for (int x = 0; x < in.width(); ++x) {
            std::uint8_t v = erode ? 1 : 0;
            for (int dy = -1; dy <= 1; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    const std::uint8_t s = in.clamped(x + dx, y + dy);
                    v = erode ? std::min(v, s) : std::max(v, s);
                }
            }
            out.at(x, y) = v;
        }
    }
    return out;
}

struct Component {
    int label;
    int x0, y0, x1, y1;
    std::vector<int> pixels;  // linear indices
};

std::vector<Component> label_components(const GrayImage& mask) {
    const int w = mask.width();
    const int h = mask.height();
    std::vector<int> labels(mask.size(), 0);
    std::vector<Component> comps;
    std::vector<int> stack;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const int start = y * w + x;
            if (mask.data()[start] == 0 || labels[start] != 0) {
                continue;
            }
            Component c{static_cast<int>(comps.size()) + 1, x, y, x, y, {}};
            labels[start] = c.label;
            stack.push_back(start);
            while (!stack.empty()) {
                const int i = stack.back();
                stack.pop_back();
                c.pixels.push_back(i);
                const int px = i % w;
                const int py = i / w;
                c.x0 = std::min(c.x0, px);
                c.x1 = std::max(c.x1, px);
                c.y0 = std::min(c.y0, py);
                c.y1 = std::max(c.y1, py);
                for (int k = 0; k < 8; ++k) {
                    const int nx = px + kDx8[k];
                    const int ny = py + kDy8[k];
                    if (nx < 0 || ny < 0 || nx >= w || ny >= h) {
                        continue;
                    }
                    const int j = ny * w + nx;
                    if (mask.data()[j] != 0 && labels[j] == 0) {
                        labels[j] = c.label;
                        stack.push_back(j);
                    }
                }
            }
            comps.push_back(std::move(c));
        }
    }
    return comps;
}

// Region properties of the component with its holes filled.
RegionCandidate measure_filled(const GrayImage& eye, const Component& c) {
    const int w = eye.width();
    const int bw = c.x1 - c.x0 + 3;
    const int bh = c.y1 - c.y0 + 3;
    // 0 = unknown, 1 = component, 2 = outside (reached from the padding)
    std::vector<std::uint8_t> grid(static_cast<std::size_t>(bw) * bh, 0);
    for (int i : c.pixels) {
        const int lx = i % w - c.x0 + 1;
        const int ly = i / w - c.y0 + 1;
        grid[ly * bw + lx] = 1;
    }
    std::vector<int> stack{0};
    grid[0] = 2;
    while (!stack.empty()) {
        const int i = stack.back();
        stack.pop_back();
        const int lx = i % bw;
        const int ly = i / bw;
        constexpr int dx4[4] = {1, -1, 0, 0};
        constexpr int dy4[4] = {0, 0, 1, -1};
        for (int k = 0; k < 4; ++k) {
            const int nx = lx + dx4[k];
            const int ny = ly + dy4[k];
            if (nx < 0 || ny < 0 || nx >= bw || ny >= bh) {
                continue;
            }
            const int j = ny * bw + nx;
            if (grid[j] == 0) {
                grid[j] = 2;
                stack.push_back(j);
            }
        }
    }

    double n = 0, sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0, si = 0;
    for (int ly = 1; ly < bh - 1; ++ly) {
        for (int lx = 1; lx < bw - 1; ++lx) {
            if (grid[ly * bw + lx] == 2) {
                continue;
            }
            const double x = lx - 1 + c.x0;
            const double y = ly - 1 + c.y0;
            n += 1;
            sx += x;
            sy += y;
            sxx += x * x;
            syy += y * y;
            sxy += x * y;
            si += eye.at(static_cast<int>(x), static_cast<int>(y));
        }
    }
    RegionCandidate r;
    r.label = c.label;
    r.area = n;
    r.cx = sx / n;
    r.cy = sy / n;
    // central moments with the uniform-pixel correction 1/12
    const double mu20 = sxx / n - r.cx * r.cx + 1.0 / 12.0;
    const double mu02 = syy / n - r.cy * r.cy + 1.0 / 12.0;
    const double mu11 = sxy / n - r.cx * r.cy;
    const double common = std::sqrt(0.25 * (mu20 - mu02) * (mu20 - mu02) + mu11 * mu11);
    const double l1 = 0.5 * (mu20 + mu02) + common;
    const double l2 = 0.5 * (mu20 + mu02) - common;
    r.eccentricity = l1 > 0 ? std::sqrt(std::clamp(1.0 - l2 / l1, 0.0, 1.0)) : 0.0;
    r.equivalent_radius = std::sqrt(n / std::numbers::pi);
    r.mean_intensity = si / n;
    return r;
}

}  // namespace

void SegmentParams::validate() const {
    if (!(blur_sigma > 0 && min_area >= 1 && max_area_fraction > 0 && max_area_fraction <= 1 &&
          max_eccentricity >= 0 && max_eccentricity <= 1 && outer_radius_multiple > 1)) {
        throw Error(ErrorCode::Config, "invalid iris segmentation parameters");
    }
    if (radial_samples < 8 || angular_samples < 8) {
        throw Error(ErrorCode::Config, "unwrap needs at least 8 radial and 8 angular samples");
    }
}

GrayImage dark_residual_mask(const GrayImage& eye, double sigma) {
    const RealImage original = to_real(eye);
    const RealImage blurred = gaussian_blur(original, sigma);
    GrayImage mask(eye.width(), eye.height());
    for (std::size_t i = 0; i < eye.size(); ++i) {
        // the tolerance absorbs rounding of the blur on perfectly flat areas
        mask.data()[i] = original.data()[i] - blurred.data()[i] < -1e-9 ? 1 : 0;
    }
    return mask;
}

GrayImage open3x3(const GrayImage& mask) { return morph3x3(morph3x3(mask, true), false); }

std::vector<RegionCandidate> region_candidates(const GrayImage& eye, const GrayImage& mask) {
    if (!eye.same_shape(mask)) {
        throw Error(ErrorCode::Dimension, "mask does not match eye image");
    }
    std::vector<RegionCandidate> out;
    for (const Component& c : label_components(open3x3(mask))) {
        out.push_back(measure_filled(eye, c));
    }
    return out;
}

PupilCircle select_pupil(const GrayImage& eye, const GrayImage& mask, const SegmentParams& params) {
    params.validate();
    const double max_area = params.max_area_fraction * eye.width() * eye.height();
    const RegionCandidate* best = nullptr;
    const auto candidates = region_candidates(eye, mask);
    for (const RegionCandidate& r : candidates) {
        if (r.area < params.min_area || r.area > max_area || r.eccentricity > params.max_eccentricity) {
            continue;
        }
        const double rad = r.equivalent_radius;
        if (r.cx - rad < 0 || r.cy - rad < 0 || r.cx + rad > eye.width() - 1 || r.cy + rad > eye.height() - 1) {
            continue;
        }
        if (best == nullptr || r.mean_intensity < best->mean_intensity) {
            best = &r;
        }
    }
    if (best == nullptr) {
        throw Error(ErrorCode::PupilNotFound, "no region passes the area/eccentricity filter");
    }
    return {best->cx, best->cy, best->equivalent_radius};
}

PupilCircle detect_pupil(const GrayImage& eye, const SegmentParams& params) {
    if (eye.width() < 64 || eye.height() < 64) {
        throw Error(ErrorCode::Dimension, "eye image must be at least 64x64");
    }
    return select_pupil(eye, dark_residual_mask(eye, params.blur_sigma), params);
}

double outer_radius(const GrayImage& eye, const PupilCircle& pupil, double outer_multiple) {
    const double edge = std::min({pupil.cx, pupil.cy, eye.width() - 1 - pupil.cx, eye.height() - 1 - pupil.cy});
    return std::min(outer_multiple * pupil.radius, edge);
}

UnwrappedIris unwrap(const GrayImage& eye, const PupilCircle& pupil, int radial_samples, int angular_samples,
                     double outer_multiple) {
    if (radial_samples < 1 || angular_samples < 1) {
        throw Error(ErrorCode::Contract, "unwrap needs positive sample counts");
    }
    if (!(pupil.radius > 0)) {
        throw Error(ErrorCode::Contract, "pupil radius must be positive");
    }
    const double rho_max = outer_radius(eye, pupil, outer_multiple);
    if (!(rho_max > pupil.radius)) {
        throw Error(ErrorCode::UnwrapFailed, "pupil touches the image edge");
    }
    UnwrappedIris out;
    out.radial_samples = radial_samples;
    out.angular_samples = angular_samples;
    out.values = GrayImage(angular_samples, radial_samples);
    out.valid.assign(out.values.size(), 0);
    out.radial_scale = (rho_max - pupil.radius) / radial_samples;
    out.inner_radius = pupil.radius;

    const int w = eye.width();
    const int h = eye.height();
    for (int j = 0; j < angular_samples; ++j) {
        const double alpha = j * (2.0 * std::numbers::pi / angular_samples);
        const double ca = std::cos(alpha);
        const double sa = std::sin(alpha);
        for (int i = 1; i <= radial_samples; ++i) {
            const double rho = pupil.radius + i * out.radial_scale;
            const double x = pupil.cx + rho * ca;
            const double y = pupil.cy + rho * sa;
            if (x < 0 || y < 0 || x > w - 1 || y > h - 1) {
                continue;
            }
            const int x0 = static_cast<int>(std::floor(x));
            const int y0 = static_cast<int>(std::floor(y));
            const int x1 = std::min(x0 + 1, w - 1);
            const int y1 = std::min(y0 + 1, h - 1);
            const double fx = x - x0;
            const double fy = y - y0;
            const double v = (1 - fx) * (1 - fy) * eye.at(x0, y0) + fx * (1 - fy) * eye.at(x1, y0) +
                             (1 - fx) * fy * eye.at(x0, y1) + fx * fy * eye.at(x1, y1);
            out.values.at(j, i - 1) = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
            out.valid[static_cast<std::size_t>(i - 1) * angular_samples + j] = 1;
        }
    }
    return out;
}

int find_limbic(UnwrappedIris& u) {
    const int r = u.radial_samples;
    const int a = u.angular_samples;
    if (r < 8) {
        throw Error(ErrorCode::Contract, "limbic search needs R >= 8");
    }
    // moving average of width 5 along the angle, over valid samples only
    RealImage smooth(a, r, 0.0);
    std::vector<std::uint8_t> ok(static_cast<std::size_t>(a) * r, 0);
    for (int y = 0; y < r; ++y) {
        for (int x = 0; x < a; ++x) {
            double sum = 0;
            int n = 0;
            for (int d = -2; d <= 2; ++d) {
                const int xx = border_index(x + d, a, Border::Wrap);
                if (u.valid[static_cast<std::size_t>(y) * a + xx]) {
                    sum += u.values.at(xx, y);
                    ++n;
                }
            }
            if (n > 0) {
                smooth.at(x, y) = sum / n;
                ok[static_cast<std::size_t>(y) * a + x] = 1;
            }
        }
    }
    int best_row = r;
    double best = 0.0;
    bool found = false;
    const int first = (r + 3) / 4;
    for (int i = first; i <= r - 1; ++i) {
        // rows i and i + 1 (1-based) are stored at y = i - 1 and y = i
        double sum = 0;
        int n = 0;
        for (int x = 0; x < a; ++x) {
            const std::size_t k0 = static_cast<std::size_t>(i - 1) * a + x;
            const std::size_t k1 = static_cast<std::size_t>(i) * a + x;
            if (ok[k0] && ok[k1]) {
                sum += smooth.at(x, i) - smooth.at(x, i - 1);
                ++n;
            }
        }
        if (n == 0) {
            continue;
        }
        const double g = sum / n;
        if (g > best) {
            best = g;
            best_row = i;
            found = true;
        }
    }
    u.limbic_row = found ? best_row : r;
    u.limbic_fallback = !found;
    return *u.limbic_row;
}

}  // namespace mbio::iris
