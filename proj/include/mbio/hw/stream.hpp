/**
 * @file stream.hpp
 * @brief Row-streaming stage interface and the line buffer that gives a stage
 *        its vertical neighbourhood.
 */
#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "mbio/error.hpp"
#include "mbio/image.hpp"

namespace mbio::hw {

using Sample = std::int32_t;
using Row = std::vector<Sample>;

struct Shape {
    int width = 0;
    int height = 0;

    friend bool operator==(const Shape&, const Shape&) = default;
};

/// A whole image worth of samples, row-major.
struct Frame {
    Shape shape;
    std::vector<Sample> samples;

    Row row(int y) const;
    friend bool operator==(const Frame&, const Frame&) = default;
};

Frame frame_from_gray(const GrayImage& image);

using Emit = std::function<void(Row&&)>;

/// One processing element. A stage sees its input one row at a time and may
/// emit output rows whenever it has enough context.
class Stage {
public:
    virtual ~Stage() = default;

    virtual std::string name() const = 0;

    /// Resets per-frame state and returns the output shape.
    virtual Shape begin(Shape input) = 0;

    virtual void push(Row&& row, const Emit& emit) = 0;

    /// End of the input frame: emit everything still pending.
    virtual void finish(const Emit& emit) = 0;
};

using StagePtr = std::unique_ptr<Stage>;

/// Last rows needed by a vertical window of the given radius. Rows outside
/// the frame are replicated from the nearest edge row. The frame height may be
/// unknown at first and announced later with set_height().
template <typename R>
class LineBuffer {
public:
    void reset(int radius, int height = -1) {
        radius_ = radius;
        height_ = height;
        received_ = 0;
        next_ = 0;
        base_ = 0;
        rows_.clear();
    }

    void push(R&& row) {
        rows_.push_back(std::move(row));
        ++received_;
    }

    void set_height(int height) { height_ = height; }
    int height() const { return height_; }
    int received() const { return received_; }

    /// True when output row next_row() has its whole window available.
    bool ready() const {
        if (height_ >= 0 && next_ >= height_) {
            return false;
        }
        const int need = next_ + radius_ + 1;
        return received_ >= need || (height_ >= 0 && received_ >= height_ && next_ < height_);
    }

    int next_row() const { return next_; }

    /// Row y with replicate borders; y must lie inside the buffered window.
    const R& row(int y) const {
        if (y < 0) {
            y = 0;
        }
        const int last = (height_ >= 0 ? height_ : received_) - 1;
        if (y > last) {
            y = last;
        }
        if (y < base_ || y >= base_ + static_cast<int>(rows_.size())) {
            throw Error(ErrorCode::Contract, "line buffer access outside the buffered window");
        }
        return rows_[static_cast<std::size_t>(y - base_)];
    }

    /// Marks next_row() as produced and drops rows no later window needs.
    void advance() {
        ++next_;
        while (base_ < next_ - radius_ && !rows_.empty() && base_ < received_ - 1) {
            rows_.pop_front();
            ++base_;
        }
    }

    std::size_t buffered() const { return rows_.size(); }

private:
    int radius_ = 0;
    int height_ = -1;
    int received_ = 0;
    int next_ = 0;
    int base_ = 0;
    std::deque<R> rows_;
};

/// A line buffer plus the function computing one output row from it. Used to
/// chain several window operators inside one stage.
template <typename In, typename Out>
class WindowOp {
public:
    using Compute = std::function<Out(const LineBuffer<In>& lines, int y)>;

    void reset(int radius, int height, Compute compute) {
        lines_.reset(radius, height);
        compute_ = std::move(compute);
    }

    template <typename Sink>
    void push(In&& row, Sink&& sink) {
        lines_.push(std::move(row));
        drain(sink);
    }

    template <typename Sink>
    void drain(Sink&& sink) {
        while (lines_.ready()) {
            sink(compute_(lines_, lines_.next_row()));
            lines_.advance();
        }
    }

    void set_height(int height) { lines_.set_height(height); }
    const LineBuffer<In>& lines() const { return lines_; }

private:
    LineBuffer<In> lines_;
    Compute compute_;
};

using Row64 = std::vector<std::int64_t>;

/// Sign-extends the low 16 bits of a packed sample.
constexpr std::int32_t low16(Sample s) { return static_cast<std::int16_t>(static_cast<std::uint16_t>(s & 0xFFFF)); }
constexpr int high_byte(Sample s) { return (s >> 16) & 0xFF; }
constexpr Sample pack(int high, std::int32_t low) { return (high << 16) | (low & 0xFFFF); }

}  // namespace mbio::hw
