#include "mbio/fusion.hpp"

#include <algorithm>
#include <cmath>

#include "mbio/error.hpp"

namespace mbio::fusion {

void FusionParams::validate() const {
    if (!(w_fp >= 0 && w_iris >= 0 && std::abs(w_fp + w_iris - 1.0) <= 1e-9)) {
        throw Error(ErrorCode::Config, "fusion weights must be non-negative and sum to 1");
    }
    if (!(threshold >= 0 && threshold <= 1)) {
        throw Error(ErrorCode::Config, "fusion threshold must lie in [0, 1]");
    }
    if (normalization == Normalization::MinMax && (!(fp_bounds.hi > fp_bounds.lo) || !(iris_bounds.hi > iris_bounds.lo))) {
        throw Error(ErrorCode::Calibration, "calibration bounds need hi > lo");
    }
}

double to_similarity(const MatchScore& score) {
    const double v = std::clamp(score.value, 0.0, 1.0);
    return score.polarity == Polarity::Similarity ? v : 1.0 - v;
}

double min_max_normalize(double s, double lo, double hi) {
    if (!(hi > lo)) {
        throw Error(ErrorCode::Calibration, "calibration bounds need hi > lo");
    }
    return std::clamp((s - lo) / (hi - lo), 0.0, 1.0);
}

std::vector<double> min_max_normalize(const std::vector<double>& scores, double lo, double hi) {
    std::vector<double> out;
    out.reserve(scores.size());
    for (double s : scores) {
        out.push_back(min_max_normalize(s, lo, hi));
    }
    return out;
}

FusedDecision fuse(const std::optional<MatchScore>& fp, const std::optional<MatchScore>& iris,
                   const FusionParams& params) {
    params.validate();
    const auto component = [&](const std::optional<MatchScore>& score, const Bounds& bounds) {
        if (!score) {
            return 0.0;
        }
        const double s = to_similarity(*score);
        return params.normalization == Normalization::MinMax ? min_max_normalize(s, bounds.lo, bounds.hi) : s;
    };
    FusedDecision d;
    d.fp_component = component(fp, params.fp_bounds);
    d.iris_component = component(iris, params.iris_bounds);
    d.fused_score = std::clamp(params.w_fp * d.fp_component + params.w_iris * d.iris_component, 0.0, 1.0);
    d.accept = d.fused_score >= params.threshold;
    return d;
}

FusedDecision fuse(const MatchScore& fp, const MatchScore& iris, const FusionParams& params) {
    return fuse(std::optional<MatchScore>(fp), std::optional<MatchScore>(iris), params);
}

}  // namespace mbio::fusion
