/**
 * @file recognizer.hpp
 * @brief Feature extraction and comparison for both traits, dispatched on the
 *        selected backend.
 */
#pragma once

#include <vector>

#include "mbio/fp_enhance.hpp"
#include "mbio/fp_match.hpp"
#include "mbio/fp_minutiae.hpp"
#include "mbio/fusion.hpp"
#include "mbio/hw/iris_chain.hpp"
#include "mbio/hw/pipeline.hpp"
#include "mbio/iris_code.hpp"
#include "mbio/iris_segment.hpp"
#include "mbio/score.hpp"

namespace mbio {

struct PipelineConfig {
    Backend backend = Backend::Reference;
    fp::FilterParams filter;
    int border_margin = fp::kDefaultBorderMargin;
    fp::ElasticTolerances tolerances;
    fp::AlignmentParams alignment;
    iris::SegmentParams segment;
    iris::EnhanceParams enhance;
    int rotations = iris::kDefaultRotations;
    fusion::FusionParams fusion;
    hw::IrisEnhanceMode hw_iris_enhance = hw::IrisEnhanceMode::Matched;
    bool hw_pipelined = false;  ///< stage threads instead of stage-by-stage execution
};

/// Reference fingerprint intermediates, kept for debug dumps.
struct FingerprintStages {
    fp::NormalizedImage normalized;
    fp::OrientationField field;
    RealImage response;
    GrayImage binary;
    GrayImage skeleton;
    fp::MinutiaeSet minutiae;
};

struct IrisStages {
    GrayImage mask;
    iris::PupilCircle pupil;
    iris::UnwrappedIris unwrapped;
    iris::EnhancedIris enhanced;
    iris::IrisCode code;
};

FingerprintStages reference_fingerprint(const GrayImage& image, const PipelineConfig& config);
IrisStages reference_iris(const GrayImage& eye, const PipelineConfig& config);

/// Runs a hardware-model chain in the configured execution mode.
hw::PipelineRun run_chain(const std::vector<hw::StagePtr>& stages, const hw::Frame& input, bool pipelined);

fp::MinutiaeSet hw_fingerprint(const GrayImage& image, const PipelineConfig& config,
                               std::vector<hw::StageReport>* reports = nullptr);
iris::IrisCode hw_iris(const GrayImage& eye, const PipelineConfig& config,
                       std::vector<hw::StageReport>* reports = nullptr);

/// Backend dispatch.
fp::MinutiaeSet extract_fingerprint(const GrayImage& image, const PipelineConfig& config,
                                    std::vector<hw::StageReport>* reports = nullptr);
iris::IrisCode extract_iris(const GrayImage& eye, const PipelineConfig& config,
                            std::vector<hw::StageReport>* reports = nullptr);

MatchScore compare_fingerprints(const fp::MinutiaeSet& probe, const fp::MinutiaeSet& templ,
                                const PipelineConfig& config);
MatchScore compare_irises(const iris::IrisCode& probe, const iris::IrisCode& templ, const PipelineConfig& config);

}  // namespace mbio
