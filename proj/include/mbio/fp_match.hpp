/**
 * @file fp_match.hpp
 * @brief Minutiae pre-alignment and adaptive elastic matching in polar coordinates.
 *
 * Matching runs in three steps: a reference pair is chosen by comparing local
 * neighbour constellations, both sets are re-expressed as (r, theta, o)
 * triplets relative to their reference minutia, and the triplets are paired
 * greedily under tolerances that widen with radial distance.
 */
#pragma once

#include <cstddef>
#include <functional>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include "mbio/fp_minutiae.hpp"
#include "mbio/score.hpp"

namespace mbio::fp {

struct PolarMinutia {
    double r = 0.0;      ///< radial distance, px
    double theta = 0.0;  ///< radial angle in [-pi, pi]
    double o = 0.0;      ///< relative orientation in [0, pi)
};

/// Transform taking the template frame onto the input frame about the reference pair.
struct AlignmentHypothesis {
    std::size_t input_index = 0;
    std::size_t template_index = 0;
    double dx = 0.0;  ///< input minus template position, px
    double dy = 0.0;
    double dtheta = 0.0;  ///< input minus template rotation, radians in (-pi, pi]
    double similarity = 0.0;  ///< constellation similarity in [0, 1]
};

struct ElasticTolerances {
    double delta_r = 8.0;
    double delta_theta = 8.0 * std::numbers::pi / 180.0;
    double delta_o = 15.0 * std::numbers::pi / 180.0;
    double growth_per_100px = 0.5;

    void validate() const;
};

struct AlignmentParams {
    double neighbourhood_radius = 50.0;
    int sectors = 8;
    std::size_t hypotheses = 3;
};

enum class AlignmentSide {
    Input,
    Template,
};

/// Computes (r, theta) for an offset; swapped for CORDIC in the hardware model.
using PolarConverter = std::function<std::pair<double, double>(double dx, double dy)>;

std::pair<double, double> library_polar(double dx, double dy);

/// All same-kind reference pairs ranked by constellation similarity (best first),
/// ties broken by smallest (template index, input index). Returns at most `count`.
std::vector<AlignmentHypothesis> rank_alignments(const MinutiaeSet& input, const MinutiaeSet& templ,
                                                 std::size_t count, const AlignmentParams& params = {});

AlignmentHypothesis find_best_pair(const MinutiaeSet& input, const MinutiaeSet& templ,
                                   const AlignmentParams& params = {});

std::vector<PolarMinutia> to_polar(const MinutiaeSet& set, const AlignmentHypothesis& hyp, AlignmentSide side,
                                   const PolarConverter& polar = library_polar);

/// Greedy one-to-one pairing; score = matched / max(|input|, |template|).
MatchScore elastic_match(std::span<const PolarMinutia> input, std::span<const PolarMinutia> templ,
                         const ElasticTolerances& tol);

/// Number of pairs elastic_match would accept (exposed for tests).
std::size_t elastic_match_count(std::span<const PolarMinutia> input, std::span<const PolarMinutia> templ,
                                const ElasticTolerances& tol);

MatchScore match_fingerprint(const MinutiaeSet& input, const MinutiaeSet& templ, const ElasticTolerances& tol,
                             const AlignmentParams& params = {}, const PolarConverter& polar = library_polar);

/// Wraps an angle into (-pi, pi].
double wrap_pi(double angle);

/// Distance between two pi-periodic orientations, in [0, pi/2].
double orientation_distance(double a, double b);

}  // namespace mbio::fp
