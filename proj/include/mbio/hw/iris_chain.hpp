/**
 * @file iris_chain.hpp
 * @brief Fixed-point streaming iris chain:
 *        dark mask -> pupil + unwrap -> enhance -> bitplanes.
 *
 * Sample formats between stages:
 *   mask out      bit 8 dark-residual flag, bits 0..7 pixel
 *   unwrap out    bits 0..7 value, bit 8 valid, bit 9 inside the limbic row
 *   enhance out   bits 0..7 value, bit 8 valid
 *   bitplane out  bits 0..5 planes 1..6, bit 6 valid
 */
#pragma once

#include <optional>
#include <vector>

#include "mbio/hw/stream.hpp"
#include "mbio/iris_code.hpp"
#include "mbio/iris_segment.hpp"

namespace mbio::hw {

enum class IrisEnhanceMode {
    Matched,  ///< fixed-point form of the reference enhancement
    Gamma,    ///< power-law contrast LUT with clipped contrast (fixed_enhance)
};

inline constexpr int kGammaContrastMin = 50;
inline constexpr int kGammaContrastMax = 255;
inline constexpr double kGamma = 0.75;

class DarkMaskStage : public Stage {
public:
    explicit DarkMaskStage(double sigma);

    std::string name() const override { return "dark_mask"; }
    Shape begin(Shape input) override;
    void push(Row&& row, const Emit& emit) override;
    void finish(const Emit& emit) override;

private:
    std::vector<std::int32_t> weights_;  // Q16
    Shape shape_;
    WindowOp<Row, Row> op_;
};

/// Frame-buffered pupil localization and fixed-point polar unwrap.
class UnwrapStage : public Stage {
public:
    explicit UnwrapStage(const iris::SegmentParams& params);

    std::string name() const override { return "unwrap"; }
    Shape begin(Shape input) override;
    void push(Row&& row, const Emit& emit) override;
    void finish(const Emit& emit) override;

    const std::optional<iris::PupilCircle>& pupil() const { return pupil_; }
    int limbic_row() const { return limbic_; }

private:
    iris::SegmentParams params_;
    Shape shape_;
    std::vector<Sample> frame_;
    std::vector<std::int64_t> cos_q30_;
    std::vector<std::int64_t> sin_q30_;
    std::optional<iris::PupilCircle> pupil_;
    int limbic_ = 0;
};

class IrisEnhanceStage : public Stage {
public:
    IrisEnhanceStage(IrisEnhanceMode mode, const iris::EnhanceParams& params);

    std::string name() const override { return mode_ == IrisEnhanceMode::Matched ? "enhance" : "fixed_enhance"; }
    Shape begin(Shape input) override;
    void push(Row&& row, const Emit& emit) override;
    void finish(const Emit& emit) override;

private:
    void close_inside(const Emit& emit);
    Row64 detail_row(const LineBuffer<Row>& lines, int y) const;
    Row output_row(const LineBuffer<Row64>& lines, int y) const;

    IrisEnhanceMode mode_;
    iris::EnhanceParams params_;
    std::vector<std::int32_t> k1_;
    std::vector<std::int32_t> k2_;
    int weight_frac_ = 0;
    std::vector<std::int32_t> gamma_lut_;
    Shape shape_;
    int inside_rows_ = 0;
    bool closed_ = false;
    std::deque<Row> valid_;  // validity bits waiting for their output row
    WindowOp<Row, Row64> detail_;
    WindowOp<Row64, Row> contrast_;
};

class BitplaneStage : public Stage {
public:
    std::string name() const override { return "bitplane"; }
    Shape begin(Shape input) override { return input; }
    void push(Row&& row, const Emit& emit) override;
    void finish(const Emit&) override {}
};

/// Owns the stages; the unwrap stage is kept reachable for its pupil report.
struct IrisChain {
    std::vector<StagePtr> stages;
    UnwrapStage* unwrap = nullptr;
};

IrisChain iris_chain(const iris::SegmentParams& segment, const iris::EnhanceParams& enhance,
                     IrisEnhanceMode mode = IrisEnhanceMode::Matched);

iris::IrisCode decode_iris(const Frame& output);

/// Enhancement of an A x R' raster (all rows inside, all samples valid).
GrayImage fixed_enhance(const GrayImage& rows, const iris::EnhanceParams& params = {});
GrayImage matched_enhance(const GrayImage& rows, const iris::EnhanceParams& params = {});

/// 255 (a / 255)^gamma rounded, a = 0..255.
std::vector<std::int32_t> gamma_table(double gamma = kGamma);

/// Pointwise stage with a fixed amount of integer work per sample; used to
/// measure stage-level parallelism.
class BusyStage : public Stage {
public:
    BusyStage(int index, int rounds) : index_(index), rounds_(rounds) {}

    std::string name() const override { return "busy" + std::to_string(index_); }
    Shape begin(Shape input) override { return input; }
    void push(Row&& row, const Emit& emit) override;
    void finish(const Emit&) override {}

private:
    int index_;
    int rounds_;
};

}  // namespace mbio::hw
