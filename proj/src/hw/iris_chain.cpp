#include "mbio/hw/iris_chain.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mbio/filters.hpp"
#include "mbio/hw/fixed_point.hpp"
#include "mbio/hw/pipeline.hpp"

namespace mbio::hw {

namespace {

constexpr int kMaskWeightFrac = 16;
constexpr int kMatchedWeightFrac = 24;
constexpr int kGammaWeightFrac = 16;
constexpr int kTrigFrac = 30;
constexpr Sample kValidBit = 1 << 8;
constexpr Sample kInsideBit = 1 << 9;

__extension__ typedef __int128 Wide;

Wide round_shift_wide(Wide v, int shift) {
    const Wide half = Wide{1} << (shift - 1);
    return v >= 0 ? (v + half) >> shift : -((-v + half) >> shift);
}

}  // namespace

// ---------------------------------------------------------------- dark mask

DarkMaskStage::DarkMaskStage(double sigma)
    : weights_(quantized_gaussian(sigma, gaussian_radius(sigma), kMaskWeightFrac)) {}

Shape DarkMaskStage::begin(Shape input) {
    shape_ = input;
    const int w = input.width;
    op_.reset(static_cast<int>(weights_.size() / 2), input.height, [this, w](const LineBuffer<Row>& lines, int y) {
        const int r = static_cast<int>(weights_.size() / 2);
        std::vector<std::int64_t> vert(static_cast<std::size_t>(w), 0);
        for (int v = -r; v <= r; ++v) {
            const Row& src = lines.row(y + v);
            for (int x = 0; x < w; ++x) {
                vert[x] += static_cast<std::int64_t>(weights_[v + r]) * (src[x] & 0xFF);
            }
        }
        const Row& centre = lines.row(y);
        Row out(static_cast<std::size_t>(w));
        for (int x = 0; x < w; ++x) {
            std::int64_t blur = 0;  // 32 fraction bits, exact
            for (int h = -r; h <= r; ++h) {
                blur += static_cast<std::int64_t>(weights_[h + r]) * vert[std::clamp(x + h, 0, w - 1)];
            }
            const std::int64_t p = centre[x] & 0xFF;
            const bool dark = (p << (2 * kMaskWeightFrac)) - blur < 0;
            out[x] = static_cast<Sample>(p | (dark ? 1 << 8 : 0));
        }
        return out;
    });
    return input;
}

void DarkMaskStage::push(Row&& row, const Emit& emit) { op_.push(std::move(row), emit); }

void DarkMaskStage::finish(const Emit& emit) { op_.drain(emit); }

// ------------------------------------------------------------------- unwrap

UnwrapStage::UnwrapStage(const iris::SegmentParams& params) : params_(params) {
    params_.validate();
    const int a = params_.angular_samples;
    cos_q30_.resize(static_cast<std::size_t>(a));
    sin_q30_.resize(static_cast<std::size_t>(a));
    for (int j = 0; j < a; ++j) {
        const double alpha = j * (2.0 * std::numbers::pi / a);
        cos_q30_[j] = std::llround(std::ldexp(std::cos(alpha), kTrigFrac));
        sin_q30_[j] = std::llround(std::ldexp(std::sin(alpha), kTrigFrac));
    }
}

Shape UnwrapStage::begin(Shape input) {
    if (input.width < 64 || input.height < 64) {
        throw Error(ErrorCode::Dimension, "eye image must be at least 64x64");
    }
    shape_ = input;
    frame_.clear();
    pupil_.reset();
    limbic_ = 0;
    return {params_.angular_samples, params_.radial_samples};
}

void UnwrapStage::push(Row&& row, const Emit&) { frame_.insert(frame_.end(), row.begin(), row.end()); }

void UnwrapStage::finish(const Emit& emit) {
    const int w = shape_.width;
    const int h = shape_.height;
    GrayImage eye(w, h);
    GrayImage mask(w, h);
    for (std::size_t i = 0; i < frame_.size(); ++i) {
        eye.data()[i] = static_cast<std::uint8_t>(frame_[i] & 0xFF);
        mask.data()[i] = static_cast<std::uint8_t>((frame_[i] >> 8) & 1);
    }
    // region analysis and the limbic search are control logic shared with the
    // reference; the sampling datapath below is fixed point
    const iris::PupilCircle pupil = iris::select_pupil(eye, mask, params_);
    pupil_ = pupil;
    const double rho_max = iris::outer_radius(eye, pupil, params_.outer_radius_multiple);
    if (!(rho_max > pupil.radius)) {
        throw Error(ErrorCode::UnwrapFailed, "pupil touches the image edge");
    }
    const int rs = params_.radial_samples;
    const int as = params_.angular_samples;
    const std::int64_t cx = std::llround(pupil.cx * 65536.0);
    const std::int64_t cy = std::llround(pupil.cy * 65536.0);
    const std::int64_t r0 = std::llround(pupil.radius * 65536.0);
    const std::int64_t r1 = std::llround(rho_max * 65536.0);
    const std::int64_t xmax = static_cast<std::int64_t>(w - 1) << 16;
    const std::int64_t ymax = static_cast<std::int64_t>(h - 1) << 16;

    iris::UnwrappedIris u;
    u.radial_samples = rs;
    u.angular_samples = as;
    u.values = GrayImage(as, rs);
    u.valid.assign(u.values.size(), 0);
    u.radial_scale = (rho_max - pupil.radius) / rs;
    u.inner_radius = pupil.radius;
    for (int i = 1; i <= rs; ++i) {
        const std::int64_t rho = r0 + round_div((r1 - r0) * i, rs);
        for (int j = 0; j < as; ++j) {
            const std::int64_t x = cx + round_shift(rho * cos_q30_[j], kTrigFrac);
            const std::int64_t y = cy + round_shift(rho * sin_q30_[j], kTrigFrac);
            if (x < 0 || y < 0 || x > xmax || y > ymax) {
                continue;
            }
            const int x0 = static_cast<int>(x >> 16);
            const int y0 = static_cast<int>(y >> 16);
            const std::int64_t fx = x & 0xFFFF;
            const std::int64_t fy = y & 0xFFFF;
            const int x1 = std::min(x0 + 1, w - 1);
            const int y1 = std::min(y0 + 1, h - 1);
            const std::int64_t v = (65536 - fx) * (65536 - fy) * eye.at(x0, y0) + fx * (65536 - fy) * eye.at(x1, y0) +
                                   (65536 - fx) * fy * eye.at(x0, y1) + fx * fy * eye.at(x1, y1);
            u.values.at(j, i - 1) = static_cast<std::uint8_t>(std::clamp<std::int64_t>(round_shift(v, 32), 0, 255));
            u.valid[static_cast<std::size_t>(i - 1) * as + j] = 1;
        }
    }
    limbic_ = iris::find_limbic(u);
    for (int y = 0; y < rs; ++y) {
        Row out(static_cast<std::size_t>(as));
        for (int x = 0; x < as; ++x) {
            const std::size_t k = static_cast<std::size_t>(y) * as + x;
            out[x] = u.values.data()[k] | (u.valid[k] ? kValidBit : 0) | (y < limbic_ ? kInsideBit : 0);
        }
        emit(std::move(out));
    }
}

// ------------------------------------------------------------------ enhance

std::vector<std::int32_t> gamma_table(double gamma) {
    std::vector<std::int32_t> lut(256);
    for (int a = 0; a < 256; ++a) {
        lut[a] = static_cast<std::int32_t>(std::lround(255.0 * std::pow(a / 255.0, gamma)));
    }
    return lut;
}

IrisEnhanceStage::IrisEnhanceStage(IrisEnhanceMode mode, const iris::EnhanceParams& params)
    : mode_(mode), params_(params) {
    params_.validate();
    weight_frac_ = mode == IrisEnhanceMode::Matched ? kMatchedWeightFrac : kGammaWeightFrac;
    k1_ = quantized_gaussian(params.sigma1, gaussian_radius(params.sigma1), weight_frac_);
    k2_ = quantized_gaussian(params.sigma2, gaussian_radius(params.sigma2), weight_frac_);
    if (mode == IrisEnhanceMode::Gamma) {
        gamma_lut_ = gamma_table();
    }
}

Row64 IrisEnhanceStage::detail_row(const LineBuffer<Row>& lines, int y) const {
    const int w = shape_.width;
    const int r = static_cast<int>(k1_.size() / 2);
    std::vector<std::int64_t> vert(static_cast<std::size_t>(w), 0);
    for (int v = -r; v <= r; ++v) {
        const Row& src = lines.row(y + v);
        for (int x = 0; x < w; ++x) {
            vert[x] += static_cast<std::int64_t>(k1_[v + r]) * (src[x] & 0xFF);
        }
    }
    const Row& centre = lines.row(y);
    Row64 out(static_cast<std::size_t>(w));
    for (int x = 0; x < w; ++x) {
        std::int64_t blur = 0;
        for (int h = -r; h <= r; ++h) {
            blur += static_cast<std::int64_t>(k1_[h + r]) * vert[border_index(x + h, w, Border::Wrap)];
        }
        const std::int64_t p = centre[x] & 0xFF;
        if (mode_ == IrisEnhanceMode::Matched) {
            out[x] = round_shift((p << (2 * weight_frac_)) - blur, weight_frac_);  // Q24 detail
        } else {
            out[x] = p - round_shift(blur, 2 * weight_frac_);  // integer detail
        }
    }
    return out;
}

Row IrisEnhanceStage::output_row(const LineBuffer<Row64>& lines, int y) const {
    const int w = shape_.width;
    const int r = static_cast<int>(k2_.size() / 2);
    const Row64& centre = lines.row(y);
    Row out(static_cast<std::size_t>(w));
    if (mode_ == IrisEnhanceMode::Matched) {
        std::vector<Wide> vert(static_cast<std::size_t>(w), 0);
        for (int v = -r; v <= r; ++v) {
            const Row64& src = lines.row(y + v);
            for (int x = 0; x < w; ++x) {
                vert[x] += Wide{k2_[v + r]} * (Wide{src[x]} * src[x]);
            }
        }
        const auto floor = static_cast<std::int64_t>(std::llround(std::ldexp(params_.contrast_floor, weight_frac_)));
        for (int x = 0; x < w; ++x) {
            Wide acc = 0;
            for (int h = -r; h <= r; ++h) {
                acc += Wide{k2_[h + r]} * vert[border_index(x + h, w, Border::Wrap)];
            }
            // acc carries 2 x 24 (detail^2) + 2 x 24 (weights) fraction bits
            const auto var = static_cast<std::uint64_t>(round_shift_wide(acc, 2 * weight_frac_));
            const auto contrast = static_cast<std::int64_t>(isqrt(var));
            const std::int64_t q = round_div(128 * centre[x], std::max(contrast, floor));
            out[x] = static_cast<Sample>(std::clamp<std::int64_t>(128 + q, 0, 255));
        }
    } else {
        std::vector<std::int64_t> vert(static_cast<std::size_t>(w), 0);
        for (int v = -r; v <= r; ++v) {
            const Row64& src = lines.row(y + v);
            for (int x = 0; x < w; ++x) {
                vert[x] += static_cast<std::int64_t>(k2_[v + r]) * std::llabs(src[x]);
            }
        }
        for (int x = 0; x < w; ++x) {
            std::int64_t acc = 0;
            for (int h = -r; h <= r; ++h) {
                acc += static_cast<std::int64_t>(k2_[h + r]) * vert[border_index(x + h, w, Border::Wrap)];
            }
            const auto mean_abs = std::clamp<std::int64_t>(round_shift(acc, 2 * weight_frac_), 0, 255);
            const std::int64_t contrast =
                std::clamp<std::int64_t>(gamma_lut_[static_cast<std::size_t>(mean_abs)], kGammaContrastMin, kGammaContrastMax);
            out[x] = static_cast<Sample>(std::clamp<std::int64_t>(128 + (128 * centre[x]) / contrast, 0, 255));
        }
    }
    return out;
}

Shape IrisEnhanceStage::begin(Shape input) {
    shape_ = input;
    inside_rows_ = 0;
    closed_ = false;
    valid_.clear();
    detail_.reset(static_cast<int>(k1_.size() / 2), -1,
                  [this](const LineBuffer<Row>& lines, int y) { return detail_row(lines, y); });
    contrast_.reset(static_cast<int>(k2_.size() / 2), -1,
                    [this](const LineBuffer<Row64>& lines, int y) { return output_row(lines, y); });
    return input;
}

void IrisEnhanceStage::push(Row&& row, const Emit& emit) {
    const bool inside = !row.empty() && (row[0] & kInsideBit) != 0 && !closed_;
    if (inside) {
        ++inside_rows_;
        Row valid(row.size());
        for (std::size_t x = 0; x < row.size(); ++x) {
            valid[x] = row[x] & kValidBit;
        }
        valid_.push_back(std::move(valid));
        const auto to_output = [&](Row&& values) {
            Row v = std::move(valid_.front());
            valid_.pop_front();
            for (std::size_t x = 0; x < values.size(); ++x) {
                values[x] |= v[x];
            }
            emit(std::move(values));
        };
        const auto to_contrast = [&](Row64&& d) { contrast_.push(std::move(d), to_output); };
        detail_.push(std::move(row), to_contrast);
        return;
    }
    close_inside(emit);
    emit(Row(row.size(), 0));  // past the limbic boundary: invalid
}

void IrisEnhanceStage::finish(const Emit& emit) { close_inside(emit); }

void IrisEnhanceStage::close_inside(const Emit& emit) {
    if (closed_) {
        return;
    }
    closed_ = true;
    const auto to_output = [&](Row&& values) {
        Row v = std::move(valid_.front());
        valid_.pop_front();
        for (std::size_t x = 0; x < values.size(); ++x) {
            values[x] |= v[x];
        }
        emit(std::move(values));
    };
    const auto to_contrast = [&](Row64&& d) { contrast_.push(std::move(d), to_output); };
    detail_.set_height(inside_rows_);
    contrast_.set_height(inside_rows_);
    detail_.drain(to_contrast);
    contrast_.drain(to_output);
}

// ---------------------------------------------------------------- bitplanes

void BitplaneStage::push(Row&& row, const Emit& emit) {
    for (Sample& s : row) {
        s = ((s >> 1) & 0x3F) | ((s & kValidBit) ? 0x40 : 0);
    }
    emit(std::move(row));
}

IrisChain iris_chain(const iris::SegmentParams& segment, const iris::EnhanceParams& enhance, IrisEnhanceMode mode) {
    IrisChain chain;
    chain.stages.push_back(std::make_unique<DarkMaskStage>(segment.blur_sigma));
    auto unwrap = std::make_unique<UnwrapStage>(segment);
    chain.unwrap = unwrap.get();
    chain.stages.push_back(std::move(unwrap));
    chain.stages.push_back(std::make_unique<IrisEnhanceStage>(mode, enhance));
    chain.stages.push_back(std::make_unique<BitplaneStage>());
    return chain;
}

iris::IrisCode decode_iris(const Frame& output) {
    iris::IrisCode code;
    code.rows = output.shape.height;
    code.columns = output.shape.width;
    code.planes.resize(output.samples.size());
    code.mask.resize(output.samples.size());
    for (std::size_t i = 0; i < output.samples.size(); ++i) {
        code.planes[i] = static_cast<std::uint8_t>(output.samples[i] & 0x3F);
        code.mask[i] = static_cast<std::uint8_t>((output.samples[i] >> 6) & 1);
    }
    return code;
}

namespace {

GrayImage run_enhance(const GrayImage& rows, const iris::EnhanceParams& params, IrisEnhanceMode mode) {
    Frame in{{rows.width(), rows.height()}, {}};
    in.samples.resize(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        in.samples[i] = rows.data()[i] | kValidBit | kInsideBit;
    }
    IrisEnhanceStage stage(mode, params);
    const Frame out = run_sequential({&stage}, in).output;
    GrayImage img(rows.width(), rows.height());
    for (std::size_t i = 0; i < img.size(); ++i) {
        img.data()[i] = static_cast<std::uint8_t>(out.samples[i] & 0xFF);
    }
    return img;
}

}  // namespace

GrayImage fixed_enhance(const GrayImage& rows, const iris::EnhanceParams& params) {
    return run_enhance(rows, params, IrisEnhanceMode::Gamma);
}

GrayImage matched_enhance(const GrayImage& rows, const iris::EnhanceParams& params) {
    return run_enhance(rows, params, IrisEnhanceMode::Matched);
}

// --------------------------------------------------------------------- busy

void BusyStage::push(Row&& row, const Emit& emit) {
    for (Sample& s : row) {
        auto v = static_cast<std::uint32_t>(s);
        for (int k = 0; k < rounds_; ++k) {
            v ^= v << 13;
            v ^= v >> 17;
            v ^= v << 5;
            v += static_cast<std::uint32_t>(index_ + 1);
        }
        s = static_cast<Sample>(v & 0xFFFF);
    }
    emit(std::move(row));
}

}  // namespace mbio::hw
