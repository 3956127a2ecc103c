/**
 * @file fp_chain.hpp
 * @brief Fixed-point streaming fingerprint chain:
 *        normalize -> orient -> filter -> binarize -> thin.
 *
 * Sample formats between stages:
 *   normalize out   Q8.8 normalized intensity
 *   orient out      pack(orientation code, Q8.8 value)
 *   filter out      pack(orientation code, Q8.8 response)
 *   binarize/thin   pack(orientation code, bit) with 0 = ridge
 */
#pragma once

#include <array>
#include <memory>
#include <vector>

#include "mbio/fp_enhance.hpp"
#include "mbio/fp_minutiae.hpp"
#include "mbio/hw/guided_filter.hpp"
#include "mbio/hw/stream.hpp"

namespace mbio::hw {

class NormalizeStage : public Stage {
public:
    explicit NormalizeStage(const fp::FilterParams& params);

    std::string name() const override { return "normalize"; }
    Shape begin(Shape input) override;
    void push(Row&& row, const Emit& emit) override;
    void finish(const Emit& emit) override;

    /// Q16 noise-suppression factor for an integer variance (pixel^2 units).
    std::int32_t suppression(std::int64_t variance) const;

private:
    Row compute(const LineBuffer<Row>& lines, int y) const;

    std::vector<std::int32_t> weights_;  // Q16
    std::vector<std::int32_t> suppression_lut_;
    std::int64_t variance_floor_q16_ = 0;
    Shape shape_;
    WindowOp<Row, Row> op_;
};

class OrientationStage : public Stage {
public:
    explicit OrientationStage(const fp::FilterParams& params);

    std::string name() const override { return "orient"; }
    Shape begin(Shape input) override;
    void push(Row&& row, const Emit& emit) override;
    void finish(const Emit& emit) override;

private:
    std::vector<std::int32_t> deriv_;   // Q12
    std::vector<std::int32_t> smooth_;  // Q12
    std::vector<std::int32_t> cov_;     // Q12
    std::vector<std::int32_t> angle_;   // Q12
    Shape shape_;
    WindowOp<Row, Row64> gradient_;
    WindowOp<Row64, Row64> covariance_;
    WindowOp<Row64, Row> orientation_;
    std::deque<Row> delay_;
    const Emit* emit_ = nullptr;
};

class OrientedFilterStage : public Stage {
public:
    explicit OrientedFilterStage(const fp::FilterParams& params);

    std::string name() const override { return "filter"; }
    Shape begin(Shape input) override;
    void push(Row&& row, const Emit& emit) override;
    void finish(const Emit& emit) override;

    const GuidedLineTable& table() const { return table_; }

private:
    std::vector<std::int32_t> iso_;  // Q8.8
    GuidedLineTable table_;
    Shape shape_;
    WindowOp<Row, Row> isotropic_;
    WindowOp<Row, Row> line_;
};

class BinarizeStage : public Stage {
public:
    std::string name() const override { return "binarize"; }
    Shape begin(Shape input) override { return input; }
    void push(Row&& row, const Emit& emit) override;
    void finish(const Emit&) override {}
};

/// Frame-buffered: thinning needs the whole binary image.
class ThinStage : public Stage {
public:
    std::string name() const override { return "thin"; }
    Shape begin(Shape input) override;
    void push(Row&& row, const Emit& emit) override;
    void finish(const Emit& emit) override;

private:
    Shape shape_;
    std::vector<Sample> frame_;
};

std::vector<StagePtr> fingerprint_chain(const fp::FilterParams& params);

struct HwFingerprint {
    GrayImage skeleton;            ///< 0 = ridge
    fp::OrientationField field;    ///< dequantized orientation codes, coherence 1
};

/// Splits the chain output into skeleton and orientation.
HwFingerprint decode_fingerprint(const Frame& output);

}  // namespace mbio::hw
