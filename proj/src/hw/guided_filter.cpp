#include "mbio/hw/guided_filter.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace mbio::hw {

int quantize_orientation(double theta) {
    const long code = std::lround(theta * kAngleSteps / std::numbers::pi);
    return static_cast<int>(((code % kAngleSteps) + kAngleSteps) % kAngleSteps);
}

double dequantize_orientation(int code) { return code * std::numbers::pi / kAngleSteps; }

GuidedLineTable::GuidedLineTable(double sigma, int length) : length_(length) {
    if (length < 1 || length % 2 == 0 || !(sigma > 0)) {
        throw Error(ErrorCode::Config, "line filter needs an odd length and a positive sigma");
    }
    const int half = length / 2;
    taps_.resize(static_cast<std::size_t>(kAngleSteps) * length);
    for (int code = 0; code < kAngleSteps; ++code) {
        const double theta = dequantize_orientation(code);
        const double c = std::cos(theta);
        const double s = std::sin(theta);
        const bool horizontal = std::abs(s) <= std::abs(c);
        windows_[code] = horizontal ? LineWindow::Horizontal : LineWindow::Vertical;
        std::vector<double> w(length);
        for (int t = -half; t <= half; ++t) {
            LineTap& tap = taps_[static_cast<std::size_t>(code) * length + (t + half)];
            double dist = 0.0;
            if (horizontal) {
                tap.dx = t;
                tap.dy = static_cast<int>(std::lround(t * s / c));
                dist = t / c;
            } else {
                tap.dy = t;
                tap.dx = static_cast<int>(std::lround(t * c / s));
                dist = t / s;
            }
            w[t + half] = std::exp(-0.5 * dist * dist / (sigma * sigma));
        }
        double sum = 0.0;
        for (double v : w) {
            sum += v;
        }
        for (double& v : w) {
            v /= sum;
        }
        const auto q = quantize_kernel(w, q::kWeightFrac);
        for (int k = 0; k < length; ++k) {
            taps_[static_cast<std::size_t>(code) * length + k].weight = q[k];
        }
    }
}

std::span<const LineTap> GuidedLineTable::taps(int code) const {
    if (code < 0 || code >= kAngleSteps) {
        throw Error(ErrorCode::Contract, "orientation code out of range");
    }
    return {taps_.data() + static_cast<std::size_t>(code) * length_, static_cast<std::size_t>(length_)};
}

Shape GuidedLine8Stage::begin(Shape input) {
    shape_ = input;
    lines_.reset(table_.radius(), input.height);
    return input;
}

void GuidedLine8Stage::push(Row&& row, const Emit& emit) {
    lines_.push(std::move(row));
    drain(emit);
}

void GuidedLine8Stage::finish(const Emit& emit) { drain(emit); }

void GuidedLine8Stage::drain(const Emit& emit) {
    while (lines_.ready()) {
        const int y = lines_.next_row();
        const Row& centre = lines_.row(y);
        Row out(static_cast<std::size_t>(shape_.width));
        for (int x = 0; x < shape_.width; ++x) {
            std::int64_t acc = 0;
            for (const LineTap& tap : table_.taps(high_byte(centre[x]))) {
                const int sx = std::clamp(x + tap.dx, 0, shape_.width - 1);
                const int pixel = lines_.row(y + tap.dy)[sx] & 0xFF;
                acc = saturate(acc + static_cast<std::int64_t>(tap.weight) * pixel, q::kAccumulatorBits);
            }
            out[x] = static_cast<Sample>(std::clamp<std::int64_t>(round_shift(acc, q::kWeightFrac), 0, 255));
        }
        emit(std::move(out));
        lines_.advance();
    }
}

GrayImage guided_line_gaussian(const GrayImage& image, const GrayImage& codes, const GuidedLineTable& table) {
    if (!image.same_shape(codes)) {
        throw Error(ErrorCode::Dimension, "orientation codes do not match the image");
    }
    Frame in{{image.width(), image.height()}, {}};
    in.samples.resize(image.size());
    for (std::size_t i = 0; i < image.size(); ++i) {
        in.samples[i] = pack(codes.data()[i], image.data()[i]);
    }
    GuidedLine8Stage stage(table);
    Shape out_shape = stage.begin(in.shape);
    GrayImage out(out_shape.width, out_shape.height);
    int y = 0;
    const Emit emit = [&](Row&& row) {
        std::copy(row.begin(), row.end(), out.row(y));
        ++y;
    };
    for (int r = 0; r < in.shape.height; ++r) {
        stage.push(in.row(r), emit);
    }
    stage.finish(emit);
    return out;
}

}  // namespace mbio::hw
