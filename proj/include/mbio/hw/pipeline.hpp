/**
 * @file pipeline.hpp
 * @brief Sequential and stage-parallel execution of a chain of stages.
 *
 * In pipelined mode every stage runs on its own thread; neighbours exchange
 * rows over bounded blocking queues, so a stage starts as soon as its
 * upstream neighbour has produced enough rows.
 */
#pragma once

#include <condition_variable>
#include <cstddef>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "mbio/hw/stream.hpp"

namespace mbio::hw {

inline constexpr std::size_t kQueueRows = 2;

struct StageReport {
    std::string name;
    std::int64_t latency_samples = 0;  ///< input samples consumed before the first output sample
    double throughput = 0.0;           ///< output samples per input sample
    double busy_seconds = 0.0;         ///< time spent inside the stage
    std::int64_t samples_in = 0;
    std::int64_t samples_out = 0;
};

struct PipelineRun {
    Frame output;
    std::vector<StageReport> stages;
    double wall_seconds = 0.0;
};

/// Stage by stage: each stage consumes the complete output of the previous one.
PipelineRun run_sequential(const std::vector<Stage*>& stages, const Frame& input);

/// One thread per stage, queues of kQueueRows rows between neighbours.
PipelineRun run_pipelined(const std::vector<Stage*>& stages, const Frame& input,
                          std::size_t queue_rows = kQueueRows);

std::vector<Stage*> raw_stages(const std::vector<StagePtr>& stages);

/// Blocking single-producer single-consumer queue with end-of-stream.
template <typename T>
class BoundedQueue {
public:
    explicit BoundedQueue(std::size_t capacity) : capacity_(capacity) {}

    /// Returns false if the queue was aborted.
    bool push(T value) {
        std::unique_lock lock(mutex_);
        not_full_.wait(lock, [&] { return items_.size() < capacity_ || aborted_; });
        if (aborted_) {
            return false;
        }
        items_.push_back(std::move(value));
        not_empty_.notify_one();
        return true;
    }

    /// Empty optional at end of stream or after abort.
    std::optional<T> pop() {
        std::unique_lock lock(mutex_);
        not_empty_.wait(lock, [&] { return !items_.empty() || closed_ || aborted_; });
        if (aborted_ || items_.empty()) {
            return std::nullopt;
        }
        T value = std::move(items_.front());
        items_.pop_front();
        not_full_.notify_one();
        return value;
    }

    void close() {
        std::lock_guard lock(mutex_);
        closed_ = true;
        not_empty_.notify_all();
    }

    void abort() {
        std::lock_guard lock(mutex_);
        aborted_ = true;
        not_empty_.notify_all();
        not_full_.notify_all();
    }

private:
    std::size_t capacity_;
    std::deque<T> items_;
    bool closed_ = false;
    bool aborted_ = false;
    std::mutex mutex_;
    std::condition_variable not_empty_;
    std::condition_variable not_full_;
};

}  // namespace mbio::hw
