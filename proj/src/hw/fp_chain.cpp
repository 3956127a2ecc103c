#include "mbio/hw/fp_chain.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mbio/filters.hpp"
#include "mbio/hw/cordic.hpp"

namespace mbio::hw {

namespace {

constexpr int kGradFrac = 12;   // gradient kernels and the products derived from them
constexpr int kVarianceLutSize = 16385;

// Separable correlation of rows [y - r, y + r] around row y. The vertical pass
// is exact; `horizontal_shift` rounds the final sum.
template <typename RowT, typename Get>
Row64 separable_window(const LineBuffer<RowT>& lines, int y, int width, int channels,
                       const std::vector<std::int32_t>& kv, const std::vector<std::int32_t>& kh, Get get,
                       int vertical_shift, int horizontal_shift) {
    const int rv = static_cast<int>(kv.size() / 2);
    const int rh = static_cast<int>(kh.size() / 2);
    Row64 vert(static_cast<std::size_t>(width) * channels, 0);
    for (int v = -rv; v <= rv; ++v) {
        const RowT& src = lines.row(y + v);
        const std::int64_t w = kv[v + rv];
        for (int i = 0; i < width * channels; ++i) {
            vert[i] += w * get(src, i);
        }
    }
    if (vertical_shift > 0) {
        for (auto& v : vert) {
            v = round_shift(v, vertical_shift);
        }
    }
    Row64 out(vert.size(), 0);
    for (int x = 0; x < width; ++x) {
        for (int c = 0; c < channels; ++c) {
            std::int64_t acc = 0;
            for (int h = -rh; h <= rh; ++h) {
                const int sx = std::clamp(x + h, 0, width - 1);
                acc += static_cast<std::int64_t>(kh[h + rh]) * vert[static_cast<std::size_t>(sx) * channels + c];
            }
            out[static_cast<std::size_t>(x) * channels + c] = round_shift(acc, horizontal_shift);
        }
    }
    return out;
}

}  // namespace

// ---------------------------------------------------------------- normalize

NormalizeStage::NormalizeStage(const fp::FilterParams& params) {
    params.validate();
    weights_ = quantized_gaussian(params.stats_sigma, gaussian_radius(params.stats_sigma), q::kStatWeightFrac);
    // variance in pixel^2; the reference works on intensities scaled to [0, 1]
    const double scale = 2.0 * params.c * params.c * 255.0 * 255.0;
    suppression_lut_.resize(kVarianceLutSize);
    for (int v = 0; v < kVarianceLutSize; ++v) {
        suppression_lut_[v] = static_cast<std::int32_t>(std::lround(65536.0 * (1.0 - std::exp(-v / scale))));
    }
    variance_floor_q16_ = std::llround(fp::kVarianceFloor * 255.0 * 255.0 * 65536.0);
}

std::int32_t NormalizeStage::suppression(std::int64_t variance) const {
    return suppression_lut_[static_cast<std::size_t>(std::clamp<std::int64_t>(variance, 0, kVarianceLutSize - 1))];
}

Shape NormalizeStage::begin(Shape input) {
    shape_ = input;
    op_.reset(static_cast<int>(weights_.size() / 2), input.height,
              [this](const LineBuffer<Row>& lines, int y) { return compute(lines, y); });
    return input;
}

Row NormalizeStage::compute(const LineBuffer<Row>& lines, int y) const {
    const int w = shape_.width;
    // channel 0: pixel, channel 1: pixel^2; sums carry 32 fraction bits
    const Row64 sums = separable_window(
        lines, y, w, 2, weights_, weights_,
        [](const Row& r, int i) -> std::int64_t {
            const std::int64_t p = r[i / 2] & 0xFF;
            return (i % 2 == 0) ? p : p * p;
        },
        0, 0);
    const Row& centre = lines.row(y);
    Row out(static_cast<std::size_t>(w));
    for (int x = 0; x < w; ++x) {
        const std::int64_t mean = round_shift(sums[2 * x], 16);  // pixel, Q16
        const std::int64_t second = round_shift(sums[2 * x + 1], 16);
        const std::int64_t var = std::max<std::int64_t>(0, second - round_shift(mean * mean, 16));
        const auto std_q8 = static_cast<std::int64_t>(isqrt(static_cast<std::uint64_t>(std::max(var, variance_floor_q16_))));
        const std::int64_t diff = (static_cast<std::int64_t>(centre[x] & 0xFF) << 16) - mean;
        const std::int64_t g = round_div(diff, std_q8);  // Q8.8
        const std::int64_t m = suppression(round_shift(var, 16));
        out[x] = static_cast<Sample>(saturate(round_shift(g * m, 16), q::kPixelBits));
    }
    return out;
}

void NormalizeStage::push(Row&& row, const Emit& emit) { op_.push(std::move(row), emit); }

void NormalizeStage::finish(const Emit& emit) { op_.drain(emit); }

// -------------------------------------------------------------- orientation

OrientationStage::OrientationStage(const fp::FilterParams& params) {
    params.validate();
    const int rg = gaussian_radius(params.sigma_grad);
    const auto d = gaussian_derivative_kernel(params.sigma_grad, rg);
    deriv_.resize(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        deriv_[i] = static_cast<std::int32_t>(std::lround(std::ldexp(d[i], kGradFrac)));
    }
    smooth_ = quantized_gaussian(params.sigma_grad, rg, kGradFrac);
    cov_ = quantized_gaussian(params.sigma_cov, gaussian_radius(params.sigma_cov), kGradFrac);
    angle_ = quantized_gaussian(params.sigma_angle, gaussian_radius(params.sigma_angle), kGradFrac);
}

Shape OrientationStage::begin(Shape input) {
    shape_ = input;
    delay_.clear();
    const int w = input.width;
    gradient_.reset(static_cast<int>(deriv_.size() / 2), input.height, [this, w](const LineBuffer<Row>& lines, int y) {
        const auto value = [](const Row& r, int i) -> std::int64_t { return r[i]; };
        // gx: derivative across columns, gy: derivative across rows; frac 8 + 24 -> 12
        const Row64 gx = separable_window(lines, y, w, 1, smooth_, deriv_, value, 0, 8 + 2 * kGradFrac - kGradFrac);
        const Row64 gy = separable_window(lines, y, w, 1, deriv_, smooth_, value, 0, 8 + 2 * kGradFrac - kGradFrac);
        Row64 out(static_cast<std::size_t>(w) * 3);
        for (int x = 0; x < w; ++x) {
            out[3 * x] = round_shift(gx[x] * gx[x], kGradFrac);
            out[3 * x + 1] = round_shift(gx[x] * gy[x], kGradFrac);
            out[3 * x + 2] = round_shift(gy[x] * gy[x], kGradFrac);
        }
        return out;
    });
    covariance_.reset(static_cast<int>(cov_.size() / 2), input.height, [this, w](const LineBuffer<Row64>& lines, int y) {
        const Row64 s = separable_window(
            lines, y, w, 3, cov_, cov_, [](const Row64& r, int i) { return r[i]; }, 0, 2 * kGradFrac);
        Row64 out(static_cast<std::size_t>(w) * 2);
        for (int x = 0; x < w; ++x) {
            out[2 * x] = s[3 * x] - s[3 * x + 2];  // Gxx - Gyy
            out[2 * x + 1] = 2 * s[3 * x + 1];      // 2 Gxy
        }
        return out;
    });
    orientation_.reset(static_cast<int>(angle_.size() / 2), input.height, [this, w](const LineBuffer<Row64>& lines, int y) {
        const Row64 s = separable_window(
            lines, y, w, 2, angle_, angle_, [](const Row64& r, int i) { return r[i]; }, 0, 2 * kGradFrac);
        const std::int64_t half_pi = std::llround(std::ldexp(std::numbers::pi / 2, q::kCordicAngleFrac));
        const std::int64_t pi = std::llround(std::ldexp(std::numbers::pi, q::kCordicAngleFrac));
        Row out(static_cast<std::size_t>(w));
        for (int x = 0; x < w; ++x) {
            const std::int64_t a = s[2 * x];
            const std::int64_t b = s[2 * x + 1];
            int code = 0;
            if (a != 0 || b != 0) {
                const CordicPolar p = cordic_vectoring(a, b);
                const std::int64_t theta = half_pi + round_shift(p.theta, 1);
                code = static_cast<int>(((round_div(theta * kAngleSteps, pi) % kAngleSteps) + kAngleSteps) % kAngleSteps);
            }
            out[x] = code;
        }
        return out;
    });
    return input;
}

void OrientationStage::push(Row&& row, const Emit& emit) {
    delay_.push_back(row);
    const auto to_output = [&](Row&& codes) {
        Row values = std::move(delay_.front());
        delay_.pop_front();
        for (std::size_t x = 0; x < values.size(); ++x) {
            values[x] = pack(codes[x], values[x]);
        }
        emit(std::move(values));
    };
    const auto to_orientation = [&](Row64&& r) { orientation_.push(std::move(r), to_output); };
    const auto to_covariance = [&](Row64&& r) { covariance_.push(std::move(r), to_orientation); };
    gradient_.push(std::move(row), to_covariance);
}

void OrientationStage::finish(const Emit&) {
    if (!delay_.empty()) {
        throw Error(ErrorCode::StageFailure, "orientation stage ended with pending rows");
    }
}

// ------------------------------------------------------------ oriented filter

OrientedFilterStage::OrientedFilterStage(const fp::FilterParams& params)
    : iso_(quantize_kernel(fp::isotropic_kernel(params), q::kWeightFrac)),
      table_(params.sigma_theta(), params.window_length) {}

Shape OrientedFilterStage::begin(Shape input) {
    shape_ = input;
    const int w = input.width;
    isotropic_.reset(static_cast<int>(iso_.size() / 2), input.height, [this, w](const LineBuffer<Row>& lines, int y) {
        // vertical then horizontal, each rounded back to Q8.8
        const Row64 s = separable_window(
            lines, y, w, 1, iso_, iso_, [](const Row& r, int i) -> std::int64_t { return low16(r[i]); },
            q::kWeightFrac, q::kWeightFrac);
        const Row& centre = lines.row(y);
        Row out(static_cast<std::size_t>(w));
        for (int x = 0; x < w; ++x) {
            const auto v = static_cast<std::int32_t>(saturate(s[x], q::kPixelBits));
            out[x] = pack(high_byte(centre[x]), v);
        }
        return out;
    });
    line_.reset(table_.radius(), input.height, [this, w](const LineBuffer<Row>& lines, int y) {
        const Row& centre = lines.row(y);
        Row out(static_cast<std::size_t>(w));
        for (int x = 0; x < w; ++x) {
            const int code = high_byte(centre[x]);
            std::int64_t acc = 0;
            for (const LineTap& tap : table_.taps(code)) {
                const int sx = std::clamp(x + tap.dx, 0, w - 1);
                acc = saturate(acc + static_cast<std::int64_t>(tap.weight) * low16(lines.row(y + tap.dy)[sx]),
                               q::kWideAccumulatorBits);
            }
            out[x] = pack(code, static_cast<std::int32_t>(saturate(round_shift(acc, q::kWeightFrac), q::kPixelBits)));
        }
        return out;
    });
    return input;
}

void OrientedFilterStage::push(Row&& row, const Emit& emit) {
    const auto to_line = [&](Row&& r) { line_.push(std::move(r), emit); };
    isotropic_.push(std::move(row), to_line);
}

void OrientedFilterStage::finish(const Emit&) {}

// ----------------------------------------------------------------- binarize

void BinarizeStage::push(Row&& row, const Emit& emit) {
    for (Sample& s : row) {
        s = pack(high_byte(s), low16(s) < 0 ? 0 : 1);
    }
    emit(std::move(row));
}

// --------------------------------------------------------------------- thin

Shape ThinStage::begin(Shape input) {
    shape_ = input;
    frame_.clear();
    frame_.reserve(static_cast<std::size_t>(input.width) * input.height);
    return input;
}

void ThinStage::push(Row&& row, const Emit&) { frame_.insert(frame_.end(), row.begin(), row.end()); }

void ThinStage::finish(const Emit& emit) {
    GrayImage binary(shape_.width, shape_.height);
    for (std::size_t i = 0; i < frame_.size(); ++i) {
        binary.data()[i] = static_cast<std::uint8_t>(frame_[i] & 1);
    }
    const GrayImage skeleton = fp::thin(binary);
    for (int y = 0; y < shape_.height; ++y) {
        Row out(static_cast<std::size_t>(shape_.width));
        for (int x = 0; x < shape_.width; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * shape_.width + x;
            out[x] = pack(high_byte(frame_[i]), skeleton.data()[i]);
        }
        emit(std::move(out));
    }
}

std::vector<StagePtr> fingerprint_chain(const fp::FilterParams& params) {
    std::vector<StagePtr> chain;
    chain.push_back(std::make_unique<NormalizeStage>(params));
    chain.push_back(std::make_unique<OrientationStage>(params));
    chain.push_back(std::make_unique<OrientedFilterStage>(params));
    chain.push_back(std::make_unique<BinarizeStage>());
    chain.push_back(std::make_unique<ThinStage>());
    return chain;
}

HwFingerprint decode_fingerprint(const Frame& output) {
    const int w = output.shape.width;
    const int h = output.shape.height;
    HwFingerprint out{GrayImage(w, h), {RealImage(w, h), RealImage(w, h, 1.0)}};
    for (std::size_t i = 0; i < output.samples.size(); ++i) {
        out.skeleton.data()[i] = static_cast<std::uint8_t>(output.samples[i] & 1);
        out.field.theta.data()[i] = dequantize_orientation(high_byte(output.samples[i]));
    }
    return out;
}

}  // namespace mbio::hw
