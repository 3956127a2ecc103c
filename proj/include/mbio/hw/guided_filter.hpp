/**
 * @file guided_filter.hpp
 * @brief Orientation-guided 17-tap line Gaussian over a line-buffered window.
 *
 * Near-horizontal lines (|tan theta| <= 1) take one pixel per column of the
 * window (hwind), steeper lines one pixel per row (vwind). The tap offsets and
 * Q8.8 weights of every quantized angle are precomputed.
 */
#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "mbio/hw/fixed_point.hpp"
#include "mbio/hw/stream.hpp"
#include "mbio/image.hpp"

namespace mbio::hw {

inline constexpr int kAngleSteps = 1 << q::kAngleBits;

/// theta in radians -> 8-bit code, 256 steps over pi.
int quantize_orientation(double theta);
double dequantize_orientation(int code);

enum class LineWindow : std::uint8_t {
    Horizontal,  ///< hwind: one tap per column
    Vertical,    ///< vwind: one tap per row
};

struct LineTap {
    int dx = 0;
    int dy = 0;
    std::int32_t weight = 0;  ///< Q8.8
};

class GuidedLineTable {
public:
    /// `sigma` is the standard deviation along the line, `length` the (odd) tap count.
    explicit GuidedLineTable(double sigma, int length = 17);

    int length() const { return length_; }
    int radius() const { return length_ / 2; }
    std::span<const LineTap> taps(int code) const;
    LineWindow window(int code) const { return windows_.at(static_cast<std::size_t>(code)); }

private:
    int length_;
    std::vector<LineTap> taps_;
    std::array<LineWindow, kAngleSteps> windows_{};
};

/// 8-bit datapath: 24-bit saturating accumulator, result rounded to 8 bits.
/// `codes` holds the quantized orientation of every pixel.
GrayImage guided_line_gaussian(const GrayImage& image, const GrayImage& codes, const GuidedLineTable& table);

/// Stage form of guided_line_gaussian; input samples are pack(code, pixel).
class GuidedLine8Stage : public Stage {
public:
    explicit GuidedLine8Stage(const GuidedLineTable& table) : table_(table) {}

    std::string name() const override { return "guided_line"; }
    Shape begin(Shape input) override;
    void push(Row&& row, const Emit& emit) override;
    void finish(const Emit& emit) override;

private:
    void drain(const Emit& emit);

    const GuidedLineTable& table_;
    Shape shape_;
    LineBuffer<Row> lines_;
};

}  // namespace mbio::hw
