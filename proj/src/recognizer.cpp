#include "mbio/recognizer.hpp"

#include "mbio/hw/cordic.hpp"
#include "mbio/hw/fp_chain.hpp"

namespace mbio {

namespace {

// Runs one reference step, tagging its failures with the step name.
template <typename F>
auto stage(const char* name, F&& step) {
    try {
        return step();
    } catch (const Error& e) {
        throw Error(e.code(), std::string("stage ") + name + ": " + e.what());
    }
}

}  // namespace

FingerprintStages reference_fingerprint(const GrayImage& image, const PipelineConfig& config) {
    FingerprintStages s;
    s.normalized = stage("normalize", [&] { return fp::normalize(image, config.filter); });
    s.field = stage("orientation", [&] { return fp::estimate_orientation(s.normalized, config.filter); });
    s.response = stage("filter", [&] { return fp::oriented_filter_response(s.normalized, s.field, config.filter); });
    s.binary = fp::binarize_sign(s.response);
    s.skeleton = stage("thin", [&] { return fp::thin(s.binary); });
    s.minutiae = stage("minutiae", [&] { return fp::extract_minutiae(s.skeleton, s.field, config.border_margin); });
    return s;
}

IrisStages reference_iris(const GrayImage& eye, const PipelineConfig& config) {
    IrisStages s;
    config.segment.validate();
    if (eye.width() < 64 || eye.height() < 64) {
        throw Error(ErrorCode::Dimension, "eye image must be at least 64x64");
    }
    s.mask = iris::dark_residual_mask(eye, config.segment.blur_sigma);
    s.pupil = stage("segment", [&] { return iris::select_pupil(eye, s.mask, config.segment); });
    s.unwrapped = stage("unwrap", [&] {
        iris::UnwrappedIris u = iris::unwrap(eye, s.pupil, config.segment.radial_samples,
                                             config.segment.angular_samples, config.segment.outer_radius_multiple);
        iris::find_limbic(u);
        return u;
    });
    s.enhanced = stage("enhance", [&] { return iris::enhance(s.unwrapped, config.enhance); });
    s.code = iris::bitplane_slice(s.enhanced);
    return s;
}

hw::PipelineRun run_chain(const std::vector<hw::StagePtr>& stages, const hw::Frame& input, bool pipelined) {
    const auto raw = hw::raw_stages(stages);
    return pipelined ? hw::run_pipelined(raw, input) : hw::run_sequential(raw, input);
}

fp::MinutiaeSet hw_fingerprint(const GrayImage& image, const PipelineConfig& config,
                               std::vector<hw::StageReport>* reports) {
    const auto chain = hw::fingerprint_chain(config.filter);
    hw::PipelineRun run = run_chain(chain, hw::frame_from_gray(image), config.hw_pipelined);
    if (reports) {
        reports->insert(reports->end(), run.stages.begin(), run.stages.end());
    }
    const hw::HwFingerprint f = hw::decode_fingerprint(run.output);
    return fp::extract_minutiae(f.skeleton, f.field, config.border_margin);
}

iris::IrisCode hw_iris(const GrayImage& eye, const PipelineConfig& config, std::vector<hw::StageReport>* reports) {
    const hw::IrisChain chain = hw::iris_chain(config.segment, config.enhance, config.hw_iris_enhance);
    hw::PipelineRun run = run_chain(chain.stages, hw::frame_from_gray(eye), config.hw_pipelined);
    if (reports) {
        reports->insert(reports->end(), run.stages.begin(), run.stages.end());
    }
    return hw::decode_iris(run.output);
}

fp::MinutiaeSet extract_fingerprint(const GrayImage& image, const PipelineConfig& config,
                                    std::vector<hw::StageReport>* reports) {
    if (config.backend == Backend::HardwareModel) {
        return hw_fingerprint(image, config, reports);
    }
    return reference_fingerprint(image, config).minutiae;
}

iris::IrisCode extract_iris(const GrayImage& eye, const PipelineConfig& config,
                            std::vector<hw::StageReport>* reports) {
    if (config.backend == Backend::HardwareModel) {
        return hw_iris(eye, config, reports);
    }
    return reference_iris(eye, config).code;
}

MatchScore compare_fingerprints(const fp::MinutiaeSet& probe, const fp::MinutiaeSet& templ,
                                const PipelineConfig& config) {
    const fp::PolarConverter polar =
        config.backend == Backend::HardwareModel ? fp::PolarConverter(hw::cordic_offset_polar) : fp::library_polar;
    return fp::match_fingerprint(probe, templ, config.tolerances, config.alignment, polar);
}

MatchScore compare_irises(const iris::IrisCode& probe, const iris::IrisCode& templ, const PipelineConfig& config) {
    return iris::to_match_score(iris::hamming(probe, templ, config.rotations));
}

}  // namespace mbio
