#include "mbio/hw/pipeline.hpp"

#include <chrono>
#include <exception>
#include <thread>

namespace mbio::hw {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// Per-stage bookkeeping shared by both execution modes.
struct Meter {
    StageReport report;
    Shape in;
    Shape out;
    std::int64_t rows_out = 0;
    bool first = true;

    void on_input(const Row& row) {
        if (static_cast<int>(row.size()) != in.width) {
            throw Error(ErrorCode::StageFailure, "input row width does not match the announced shape");
        }
        report.samples_in += static_cast<std::int64_t>(row.size());
    }

    void on_output(const Row& row) {
        if (static_cast<int>(row.size()) != out.width) {
            throw Error(ErrorCode::StageFailure, "output row width does not match the announced shape");
        }
        if (first) {
            // row-granular: whole input rows that preceded the row which
            // released the first output
            report.latency_samples = std::max<std::int64_t>(0, report.samples_in - in.width);
            first = false;
        }
        report.samples_out += static_cast<std::int64_t>(row.size());
        ++rows_out;
    }

    void close() {
        if (rows_out != out.height) {
            throw Error(ErrorCode::StageFailure, "stage emitted " + std::to_string(rows_out) + " rows, expected " +
                                                     std::to_string(out.height));
        }
        report.throughput = report.samples_in > 0 ? static_cast<double>(report.samples_out) / report.samples_in : 0.0;
    }
};

[[noreturn]] void rethrow_with_stage(const std::string& stage, std::exception_ptr e) {
    try {
        std::rethrow_exception(e);
    } catch (const Error& err) {
        throw Error(err.code(), "stage " + stage + ": " + err.what());
    } catch (const std::exception& ex) {
        throw Error(ErrorCode::StageFailure, "stage " + stage + ": " + ex.what());
    }
}

std::vector<Meter> prepare(const std::vector<Stage*>& stages, Shape input) {
    std::vector<Meter> meters(stages.size());
    Shape cur = input;
    for (std::size_t i = 0; i < stages.size(); ++i) {
        meters[i].report.name = stages[i]->name();
        meters[i].in = cur;
        try {
            cur = stages[i]->begin(cur);
        } catch (...) {
            rethrow_with_stage(meters[i].report.name, std::current_exception());
        }
        meters[i].out = cur;
    }
    return meters;
}

}  // namespace

Row Frame::row(int y) const {
    const auto first = samples.begin() + static_cast<std::ptrdiff_t>(y) * shape.width;
    return Row(first, first + shape.width);
}

Frame frame_from_gray(const GrayImage& image) {
    Frame f{{image.width(), image.height()}, {}};
    f.samples.assign(image.data().begin(), image.data().end());
    return f;
}

std::vector<Stage*> raw_stages(const std::vector<StagePtr>& stages) {
    std::vector<Stage*> out;
    for (const auto& s : stages) {
        out.push_back(s.get());
    }
    return out;
}

PipelineRun run_sequential(const std::vector<Stage*>& stages, const Frame& input) {
    const auto t0 = Clock::now();
    std::vector<Meter> meters = prepare(stages, input.shape);
    Frame cur = input;
    for (std::size_t i = 0; i < stages.size(); ++i) {
        Meter& m = meters[i];
        Frame next{m.out, {}};
        next.samples.reserve(static_cast<std::size_t>(m.out.width) * m.out.height);
        const Emit emit = [&](Row&& row) {
            m.on_output(row);
            next.samples.insert(next.samples.end(), row.begin(), row.end());
        };
        const auto ts = Clock::now();
        try {
            for (int y = 0; y < cur.shape.height; ++y) {
                Row row = cur.row(y);
                m.on_input(row);
                stages[i]->push(std::move(row), emit);
            }
            stages[i]->finish(emit);
            m.close();
        } catch (...) {
            rethrow_with_stage(m.report.name, std::current_exception());
        }
        m.report.busy_seconds = seconds_since(ts);
        cur = std::move(next);
    }
    PipelineRun run;
    run.output = std::move(cur);
    for (Meter& m : meters) {
        run.stages.push_back(m.report);
    }
    run.wall_seconds = seconds_since(t0);
    return run;
}

PipelineRun run_pipelined(const std::vector<Stage*>& stages, const Frame& input, std::size_t queue_rows) {
    if (queue_rows < 1) {
        throw Error(ErrorCode::Contract, "queues need room for at least one row");
    }
    const auto t0 = Clock::now();
    std::vector<Meter> meters = prepare(stages, input.shape);
    const std::size_t n = stages.size();
    std::vector<std::unique_ptr<BoundedQueue<Row>>> queues;
    for (std::size_t i = 0; i <= n; ++i) {
        queues.push_back(std::make_unique<BoundedQueue<Row>>(queue_rows));
    }
    // the first failure is the cause; later ones are aborted neighbours
    std::mutex error_mutex;
    std::exception_ptr first_error;
    std::size_t failed_stage = 0;
    auto abort_all = [&] {
        for (auto& q : queues) {
            q->abort();
        }
    };

    std::vector<std::thread> threads;
    threads.emplace_back([&] {
        for (int y = 0; y < input.shape.height; ++y) {
            if (!queues[0]->push(input.row(y))) {
                return;
            }
        }
        queues[0]->close();
    });
    for (std::size_t i = 0; i < n; ++i) {
        threads.emplace_back([&, i] {
            Meter& m = meters[i];
            BoundedQueue<Row>& out = *queues[i + 1];
            double blocked = 0.0;
            const Emit emit = [&](Row&& row) {
                m.on_output(row);
                const auto tb = Clock::now();
                if (!out.push(std::move(row))) {
                    throw Error(ErrorCode::StageFailure, "pipeline aborted");
                }
                blocked += seconds_since(tb);
            };
            double busy = 0.0;
            try {
                while (auto row = queues[i]->pop()) {
                    m.on_input(*row);
                    const auto ts = Clock::now();
                    stages[i]->push(std::move(*row), emit);
                    busy += seconds_since(ts);
                }
                const auto ts = Clock::now();
                stages[i]->finish(emit);
                busy += seconds_since(ts);
                m.close();
                out.close();
            } catch (...) {
                {
                    std::lock_guard lock(error_mutex);
                    if (!first_error) {
                        first_error = std::current_exception();
                        failed_stage = i;
                    }
                }
                abort_all();
            }
            m.report.busy_seconds = std::max(0.0, busy - blocked);
        });
    }

    PipelineRun run;
    run.output.shape = n > 0 ? meters.back().out : input.shape;
    while (auto row = queues[n]->pop()) {
        run.output.samples.insert(run.output.samples.end(), row->begin(), row->end());
    }
    for (auto& t : threads) {
        t.join();
    }
    if (first_error) {
        rethrow_with_stage(meters[failed_stage].report.name, first_error);
    }
    if (n == 0) {
        run.output = input;
    }
    for (Meter& m : meters) {
        run.stages.push_back(m.report);
    }
    run.wall_seconds = seconds_since(t0);
    return run;
}

}  // namespace mbio::hw
