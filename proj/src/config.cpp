#include "mbio/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>

namespace mbio {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double to_double(std::string_view key, std::string_view v) {
    double out = 0.0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc{} || res.ptr != v.data() + v.size() || !std::isfinite(out)) {
        throw Error(ErrorCode::Config, std::string(key) + ": not a number: '" + std::string(v) + "'");
    }
    return out;
}

int to_int(std::string_view key, std::string_view v) {
    int out = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc{} || res.ptr != v.data() + v.size()) {
        throw Error(ErrorCode::Config, std::string(key) + ": not an integer: '" + std::string(v) + "'");
    }
    return out;
}

bool to_bool(std::string_view key, std::string_view v) {
    if (v == "true" || v == "1" || v == "yes") {
        return true;
    }
    if (v == "false" || v == "0" || v == "no") {
        return false;
    }
    throw Error(ErrorCode::Config, std::string(key) + ": expected true or false");
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

struct Entry {
    std::function<void(RunConfig&, std::string_view key, std::string_view value)> set;
    std::function<std::string(const RunConfig&)> get;
};

#define MBIO_REAL(name, field)                                                                            \
    {                                                                                                     \
        name, {                                                                                           \
            [](RunConfig& c, std::string_view k, std::string_view v) { c.field = to_double(k, v); },      \
                [](const RunConfig& c) { return fmt(c.field); }                                           \
        }                                                                                                 \
    }
#define MBIO_INT(name, field)                                                                             \
    {                                                                                                     \
        name, {                                                                                           \
            [](RunConfig& c, std::string_view k, std::string_view v) { c.field = to_int(k, v); },         \
                [](const RunConfig& c) { return std::to_string(c.field); }                                \
        }                                                                                                 \
    }
#define MBIO_DEGREES(name, field)                                                                         \
    {                                                                                                     \
        name, {                                                                                           \
            [](RunConfig& c, std::string_view k, std::string_view v) { c.field = to_double(k, v) * kDeg; }, \
                [](const RunConfig& c) { return fmt(c.field / kDeg); }                                    \
        }                                                                                                 \
    }

const std::vector<std::pair<std::string, Entry>>& table() {
    static const std::vector<std::pair<std::string, Entry>> entries = {
        MBIO_REAL("fp_enhance.stats_sigma", pipeline.filter.stats_sigma),
        MBIO_REAL("fp_enhance.sigma_x", pipeline.filter.sigma_x),
        MBIO_REAL("fp_enhance.sigma_y", pipeline.filter.sigma_y),
        MBIO_INT("fp_enhance.window_length", pipeline.filter.window_length),
        MBIO_REAL("fp_enhance.c", pipeline.filter.c),
        MBIO_REAL("fp_enhance.sigma_grad", pipeline.filter.sigma_grad),
        MBIO_REAL("fp_enhance.sigma_cov", pipeline.filter.sigma_cov),
        MBIO_REAL("fp_enhance.sigma_angle", pipeline.filter.sigma_angle),
        MBIO_INT("fp_minutiae.border_margin", pipeline.border_margin),
        MBIO_REAL("fp_match.delta_r", pipeline.tolerances.delta_r),
        MBIO_DEGREES("fp_match.delta_theta_deg", pipeline.tolerances.delta_theta),
        MBIO_DEGREES("fp_match.delta_o_deg", pipeline.tolerances.delta_o),
        MBIO_REAL("fp_match.growth_per_100px", pipeline.tolerances.growth_per_100px),
        MBIO_REAL("fp_match.neighbourhood_radius", pipeline.alignment.neighbourhood_radius),
        MBIO_INT("fp_match.sectors", pipeline.alignment.sectors),
        {"fp_match.hypotheses",
         {[](RunConfig& c, std::string_view k, std::string_view v) {
              const int n = to_int(k, v);
              if (n < 1) {
                  throw Error(ErrorCode::Config, "fp_match.hypotheses must be >= 1");
              }
              c.pipeline.alignment.hypotheses = static_cast<std::size_t>(n);
          },
          [](const RunConfig& c) { return std::to_string(c.pipeline.alignment.hypotheses); }}},
        MBIO_REAL("iris_segment.blur_sigma", pipeline.segment.blur_sigma),
        MBIO_REAL("iris_segment.min_area", pipeline.segment.min_area),
        MBIO_REAL("iris_segment.max_area_fraction", pipeline.segment.max_area_fraction),
        MBIO_REAL("iris_segment.max_eccentricity", pipeline.segment.max_eccentricity),
        MBIO_REAL("iris_segment.outer_radius_multiple", pipeline.segment.outer_radius_multiple),
        MBIO_INT("iris_segment.radial_samples", pipeline.segment.radial_samples),
        MBIO_INT("iris_segment.angular_samples", pipeline.segment.angular_samples),
        MBIO_REAL("iris_code.sigma1", pipeline.enhance.sigma1),
        MBIO_REAL("iris_code.sigma2", pipeline.enhance.sigma2),
        MBIO_REAL("iris_code.contrast_floor", pipeline.enhance.contrast_floor),
        MBIO_INT("iris_code.rotations", pipeline.rotations),
        MBIO_REAL("fusion.w_fp", pipeline.fusion.w_fp),
        MBIO_REAL("fusion.w_iris", pipeline.fusion.w_iris),
        MBIO_REAL("fusion.threshold", pipeline.fusion.threshold),
        {"fusion.normalization",
         {[](RunConfig& c, std::string_view, std::string_view v) {
              if (v == "none") {
                  c.pipeline.fusion.normalization = fusion::Normalization::None;
              } else if (v == "min-max") {
                  c.pipeline.fusion.normalization = fusion::Normalization::MinMax;
              } else {
                  throw Error(ErrorCode::Config, "fusion.normalization must be none or min-max");
              }
          },
          [](const RunConfig& c) {
              return std::string(c.pipeline.fusion.normalization == fusion::Normalization::None ? "none" : "min-max");
          }}},
        MBIO_REAL("fusion.fp_lo", pipeline.fusion.fp_bounds.lo),
        MBIO_REAL("fusion.fp_hi", pipeline.fusion.fp_bounds.hi),
        MBIO_REAL("fusion.iris_lo", pipeline.fusion.iris_bounds.lo),
        MBIO_REAL("fusion.iris_hi", pipeline.fusion.iris_bounds.hi),
        {"fusion.calibrate",
         {[](RunConfig& c, std::string_view k, std::string_view v) { c.calibrate = to_bool(k, v); },
          [](const RunConfig& c) { return std::string(c.calibrate ? "true" : "false"); }}},
        {"hwmodel.iris_enhance",
         {[](RunConfig& c, std::string_view, std::string_view v) {
              if (v == "matched") {
                  c.pipeline.hw_iris_enhance = hw::IrisEnhanceMode::Matched;
              } else if (v == "gamma") {
                  c.pipeline.hw_iris_enhance = hw::IrisEnhanceMode::Gamma;
              } else {
                  throw Error(ErrorCode::Config, "hwmodel.iris_enhance must be matched or gamma");
              }
          },
          [](const RunConfig& c) {
              return std::string(c.pipeline.hw_iris_enhance == hw::IrisEnhanceMode::Matched ? "matched" : "gamma");
          }}},
        {"hwmodel.pipelined",
         {[](RunConfig& c, std::string_view k, std::string_view v) { c.pipeline.hw_pipelined = to_bool(k, v); },
          [](const RunConfig& c) { return std::string(c.pipeline.hw_pipelined ? "true" : "false"); }}},
        {"cli.backend",
         {[](RunConfig& c, std::string_view, std::string_view v) { c.pipeline.backend = parse_backend(v); },
          [](const RunConfig& c) { return std::string(backend_name(c.pipeline.backend)); }}},
        {"cli.dataset_root",
         {[](RunConfig& c, std::string_view, std::string_view v) { c.dataset_root = std::string(v); },
          [](const RunConfig& c) { return c.dataset_root.string(); }}},
    };
    return entries;
}

#undef MBIO_REAL
#undef MBIO_INT
#undef MBIO_DEGREES

}  // namespace

Backend parse_backend(std::string_view name) {
    if (name == "reference") {
        return Backend::Reference;
    }
    if (name == "hardware-model") {
        return Backend::HardwareModel;
    }
    throw Error(ErrorCode::Config, "backend must be reference or hardware-model");
}

std::string_view backend_name(Backend backend) {
    return backend == Backend::Reference ? "reference" : "hardware-model";
}

void apply_setting(RunConfig& config, std::string_view key, std::string_view value) {
    for (const auto& [name, entry] : table()) {
        if (name == key) {
            entry.set(config, key, value);
            return;
        }
    }
    throw Error(ErrorCode::Config, "unknown configuration key: " + std::string(key));
}

RunConfig parse_config(std::string_view text, RunConfig base) {
    int line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw Error(ErrorCode::Config, "line " + std::to_string(line_no) + ": expected 'module.key = value'");
        }
        try {
            apply_setting(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        } catch (const Error& e) {
            throw Error(ErrorCode::Config, "line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    base.pipeline.filter.validate();
    base.pipeline.tolerances.validate();
    base.pipeline.segment.validate();
    base.pipeline.enhance.validate();
    base.pipeline.fusion.validate();
    if (base.pipeline.rotations < 0) {
        throw Error(ErrorCode::Config, "iris_code.rotations must be >= 0");
    }
    return base;
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::MissingFile, "cannot read config file: " + path.string());
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), std::move(base));
}

std::vector<std::string> config_keys() {
    std::vector<std::string> keys;
    for (const auto& [name, entry] : table()) {
        keys.push_back(name);
    }
    return keys;
}

std::string dump_config(const RunConfig& config) {
    std::string out;
    for (const auto& [name, entry] : table()) {
        out += name + " = " + entry.get(config) + "\n";
    }
    return out;
}

}  // namespace mbio
