/**
 * @file harness.hpp
 * @brief Enrollment, verification, dataset evaluation and backend equivalence.
 *
 * Trial protocol: fp_1 and iris_1..3 enroll a subject. Probe pair k (k >= 1)
 * is fp_{k+1} with iris_{k+3}. Genuine trials score each probe against its own
 * template; impostor trials score it against every other subject's template.
 */
#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mbio/config.hpp"
#include "mbio/imgio.hpp"

namespace mbio::harness {

inline constexpr int kEnrollIrises = 3;
inline constexpr int kSweepPoints = 201;

io::TemplateRecord enroll(const io::SubjectEntry& subject, const PipelineConfig& config);

/// Probe features; a trait that failed to extract carries its error text.
struct ProbeFeatures {
    std::optional<fp::MinutiaeSet> fingerprint;
    std::optional<iris::IrisCode> iris;
    std::string fingerprint_error;
    std::string iris_error;
};

ProbeFeatures extract_probe(const std::filesystem::path& fp_path, const std::filesystem::path& iris_path,
                            const PipelineConfig& config);

struct TraitOutcome {
    std::optional<MatchScore> score;
    std::string error;  ///< non-empty when the trait failed

    bool failed() const noexcept { return !score.has_value(); }
    /// Similarity in [0, 1]; 0 for a failed trait.
    double similarity() const;
};

struct VerifyOutcome {
    fusion::FusedDecision decision;
    TraitOutcome fingerprint;
    TraitOutcome iris;

    bool warning() const noexcept { return fingerprint.failed() || iris.failed(); }
};

VerifyOutcome score_probe(const ProbeFeatures& probe, const io::TemplateRecord& templ, const PipelineConfig& config);

VerifyOutcome verify(const std::filesystem::path& fp_path, const std::filesystem::path& iris_path,
                     const io::TemplateRecord& templ, const PipelineConfig& config);

struct EvalResult {
    std::vector<double> thresholds;
    std::vector<double> far;
    std::vector<double> frr;
    double eer = 0.0;
    double eer_threshold = 0.0;
    std::vector<double> genuine;
    std::vector<double> impostor;
};

/// FAR(t) = share of impostors with score >= t, FRR(t) = share of genuines
/// below t, over `points` thresholds evenly spanning [0, 1]. The EER is
/// linearly interpolated where FAR - FRR changes sign.
EvalResult evaluate_scores(std::vector<double> genuine, std::vector<double> impostor, int points = kSweepPoints);

struct Trial {
    std::string probe_subject;
    int probe_index = 0;  ///< k of the probe pair
    std::string template_subject;
    bool genuine = false;
    VerifyOutcome outcome;
};

struct Evaluation {
    EvalResult fingerprint;
    EvalResult iris;
    EvalResult fused;
    std::vector<Trial> trials;
    fusion::FusionParams fusion;  ///< as used, including calibrated bounds
    double seconds = 0.0;
};

/// Probe pairs available to a subject under the trial protocol.
int probe_pairs(const io::SubjectEntry& subject);

Evaluation evaluate(const io::DatasetIndex& dataset, const RunConfig& config);

/// Writes decisions.jsonl, roc.csv, summary.json and histogram.svg into `dir`.
void write_evaluation(const Evaluation& evaluation, const std::filesystem::path& dir);

/// Symmetric Hausdorff distance between minutia positions. Two empty sets are
/// at distance 0; an empty set is infinitely far from a non-empty one.
double hausdorff(const fp::MinutiaeSet& a, const fp::MinutiaeSet& b);

/// Share of differing bits over samples valid in either code; a sample valid
/// in only one code counts all its planes as differing.
double bit_disagreement(const iris::IrisCode& a, const iris::IrisCode& b);

struct EquivItem {
    std::filesystem::path path;
    Trait trait = Trait::Fingerprint;
    double distance = 0.0;  ///< Hausdorff px, or bit disagreement
    std::size_t reference_count = 0;
    std::size_t hardware_count = 0;
    bool pipelined_equal = false;
    std::string error;
};

struct EquivReport {
    std::vector<EquivItem> items;
    double max_hausdorff = 0.0;
    double max_disagreement = 0.0;
    bool all_pipelined_equal = true;
    std::vector<hw::StageReport> stages;  ///< from the first fingerprint and iris runs
};

/// Compares both backends on one image.
EquivItem compare_fingerprint_backends(const GrayImage& image, const PipelineConfig& config,
                                       std::vector<hw::StageReport>* reports = nullptr);
EquivItem compare_iris_backends(const GrayImage& eye, const PipelineConfig& config,
                                std::vector<hw::StageReport>* reports = nullptr);

/// Every image of the dataset, or the first `limit` per trait when limit > 0.
EquivReport equivalence(const io::DatasetIndex& dataset, const PipelineConfig& config, int limit = 0);

/// Writes per-stage debug images of one fingerprint or eye image.
std::vector<std::filesystem::path> dump_fingerprint_stages(const GrayImage& image, const PipelineConfig& config,
                                                           const std::filesystem::path& dir);
std::vector<std::filesystem::path> dump_iris_stages(const GrayImage& eye, const PipelineConfig& config,
                                                    const std::filesystem::path& dir);

}  // namespace mbio::harness
