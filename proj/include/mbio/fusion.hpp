/**
 * @file fusion.hpp
 * @brief Weighted sum-rule fusion of the fingerprint and iris scores.
 */
#pragma once

#include <optional>
#include <vector>

#include "mbio/score.hpp"

namespace mbio::fusion {

enum class Normalization {
    None,
    MinMax,
};

/// Similarity range of one trait, mapped onto [0, 1] by min-max normalization.
struct Bounds {
    double lo = 0.0;
    double hi = 1.0;
};

struct FusionParams {
    double w_fp = 0.4;
    double w_iris = 0.6;
    double threshold = 0.5;
    Normalization normalization = Normalization::None;
    Bounds fp_bounds;
    Bounds iris_bounds;

    void validate() const;
};

struct FusedDecision {
    double fused_score = 0.0;
    bool accept = false;
    double fp_component = 0.0;    ///< similarity after normalization
    double iris_component = 0.0;
};

/// Similarity in [0, 1]; dissimilarities are mapped to 1 - value.
double to_similarity(const MatchScore& score);

double min_max_normalize(double s, double lo, double hi);
std::vector<double> min_max_normalize(const std::vector<double>& scores, double lo, double hi);

FusedDecision fuse(const MatchScore& fp, const MatchScore& iris, const FusionParams& params = {});

/// A missing trait contributes a component of 0.
FusedDecision fuse(const std::optional<MatchScore>& fp, const std::optional<MatchScore>& iris,
                   const FusionParams& params = {});

}  // namespace mbio::fusion
