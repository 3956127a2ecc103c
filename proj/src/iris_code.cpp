#include "mbio/iris_code.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>

#include "mbio/filters.hpp"

namespace mbio::iris {

void EnhanceParams::validate() const {
    if (!(sigma1 > 0 && sigma2 > 0 && contrast_floor > 0)) {
        throw Error(ErrorCode::Config, "enhancement sigmas and contrast floor must be positive");
    }
}

RealImage enhancement_detail(const RealImage& rows, double sigma1) {
    const RealImage mean = gaussian_blur(rows, sigma1, Border::Wrap, Border::Replicate);
    RealImage detail(rows.width(), rows.height());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        detail.data()[i] = rows.data()[i] - mean.data()[i];
    }
    return detail;
}

RealImage enhancement_contrast(const RealImage& detail, double sigma2) {
    RealImage sq(detail.width(), detail.height());
    for (std::size_t i = 0; i < detail.size(); ++i) {
        sq.data()[i] = detail.data()[i] * detail.data()[i];
    }
    RealImage c = gaussian_blur(sq, sigma2, Border::Wrap, Border::Replicate);
    for (double& v : c.data()) {
        v = std::sqrt(std::max(v, 0.0));
    }
    return c;
}

EnhancedIris enhance(const UnwrappedIris& u, const EnhanceParams& params) {
    params.validate();
    if (!u.limbic_row) {
        throw Error(ErrorCode::Contract, "limbic row must be located before enhancement");
    }
    const int rows = *u.limbic_row;
    const int a = u.angular_samples;
    RealImage in(a, rows);
    for (int y = 0; y < rows; ++y) {
        for (int x = 0; x < a; ++x) {
            in.at(x, y) = u.values.at(x, y);
        }
    }
    const RealImage detail = enhancement_detail(in, params.sigma1);
    const RealImage contrast = enhancement_contrast(detail, params.sigma2);

    EnhancedIris out;
    out.values = GrayImage(a, rows);
    out.valid.assign(u.valid.begin(), u.valid.begin() + static_cast<std::ptrdiff_t>(rows) * a);
    out.total_rows = u.radial_samples;
    out.provenance = Backend::Reference;
    for (std::size_t i = 0; i < in.size(); ++i) {
        const double v = 128.0 + 128.0 * detail.data()[i] / std::max(contrast.data()[i], params.contrast_floor);
        out.values.data()[i] = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
    }
    return out;
}

IrisCode bitplane_slice(const EnhancedIris& e) {
    const int a = e.values.width();
    const int rows = e.values.height();
    const int total = std::max(e.total_rows, rows);
    IrisCode code;
    code.rows = total;
    code.columns = a;
    code.planes.assign(static_cast<std::size_t>(total) * a, 0);
    code.mask.assign(code.planes.size(), 0);
    for (std::size_t i = 0; i < e.values.size(); ++i) {
        // planes 1..6 are bits 1..6 of the value; shifting once puts them at 0..5
        code.planes[i] = static_cast<std::uint8_t>((e.values.data()[i] >> 1) & 0x3F);
        code.mask[i] = e.valid.empty() ? 1 : e.valid[i];
    }
    return code;
}

IrisCode majority_template(std::span<const IrisCode> codes) {
    if (codes.size() < 3 || codes.size() % 2 == 0) {
        throw Error(ErrorCode::Contract, "majority template needs an odd number (>= 3) of codes");
    }
    const IrisCode& first = codes.front();
    for (const IrisCode& c : codes) {
        if (c.size() != first.size() || c.columns != first.columns || c.rows != first.rows) {
            throw Error(ErrorCode::Dimension, "iris codes differ in size");
        }
    }
    const std::size_t half = codes.size() / 2;
    IrisCode out = first;
    for (std::size_t i = 0; i < first.size(); ++i) {
        std::uint8_t word = 0;
        for (int k = 0; k < kPlanes; ++k) {
            std::size_t ones = 0;
            for (const IrisCode& c : codes) {
                ones += (c.planes[i] >> k) & 1;
            }
            if (ones > half) {
                word |= static_cast<std::uint8_t>(1U << k);
            }
        }
        std::size_t valid = 0;
        for (const IrisCode& c : codes) {
            valid += c.mask[i] != 0;
        }
        out.planes[i] = word;
        out.mask[i] = valid > half ? 1 : 0;
    }
    return out;
}

IrisCode rotate(const IrisCode& code, int k) {
    IrisCode out = code;
    const int a = code.columns;
    if (a == 0) {
        return out;
    }
    for (int r = 0; r < code.rows; ++r) {
        for (int c = 0; c < a; ++c) {
            const std::size_t dst = static_cast<std::size_t>(r) * a + c;
            const std::size_t src = static_cast<std::size_t>(r) * a + border_index(c - k, a, Border::Wrap);
            out.planes[dst] = code.planes[src];
            out.mask[dst] = code.mask[src];
        }
    }
    return out;
}

namespace {

// Hamming numerator and N for b shifted by k columns, without materializing it.
std::pair<std::size_t, std::size_t> shifted_distance(const IrisCode& a, const IrisCode& b, int k) {
    const int cols = a.columns;
    std::size_t diff = 0;
    std::size_t n = 0;
    for (int r = 0; r < a.rows; ++r) {
        const std::size_t base = static_cast<std::size_t>(r) * cols;
        for (int c = 0; c < cols; ++c) {
            const std::size_t i = base + c;
            const std::size_t j = base + border_index(c - k, cols, Border::Wrap);
            if (a.mask[i] && b.mask[j]) {
                diff += std::popcount(static_cast<unsigned>((a.planes[i] ^ b.planes[j]) & 0x3F));
                n += kPlanes;
            }
        }
    }
    return {diff, n};
}

}  // namespace

IrisScore hamming(const IrisCode& a, const IrisCode& b, int rotations) {
    if (a.size() != b.size() || a.columns != b.columns || a.rows != b.rows) {
        throw Error(ErrorCode::Dimension, "iris codes differ in size");
    }
    if (rotations < 0) {
        throw Error(ErrorCode::Contract, "rotations must be >= 0");
    }
    bool any = false;
    IrisScore best{1.0, 0, 0};
    for (int m = 0; m <= rotations; ++m) {
        for (int side = 0; side < (m == 0 ? 1 : 2); ++side) {
            const int k = side == 0 ? -m : m;
            const auto [diff, n] = shifted_distance(a, b, k);
            if (n == 0) {
                continue;
            }
            const double hd = static_cast<double>(diff) / static_cast<double>(n);
            if (!any || hd < best.hd) {
                best = {hd, n, k};
                any = true;
            }
        }
    }
    if (!any) {
        throw Error(ErrorCode::Incomparable, "no jointly valid iris bits");
    }
    return best;
}

MatchScore to_match_score(const IrisScore& score) { return {score.hd, Polarity::Dissimilarity, Trait::Iris}; }

}  // namespace mbio::iris
