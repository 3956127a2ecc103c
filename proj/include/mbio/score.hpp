/**
 * @file score.hpp
 * @brief Per-trait match score exchanged between the matchers and fusion, and
 *        the backend tag shared by both processing paths.
 */
#pragma once

namespace mbio {

enum class Backend {
    Reference,
    HardwareModel,
};

enum class Trait {
    Fingerprint,
    Iris,
};

enum class Polarity {
    Similarity,
    Dissimilarity,
};

struct MatchScore {
    double value = 0.0;  ///< in [0, 1]
    Polarity polarity = Polarity::Similarity;
    Trait trait = Trait::Fingerprint;
};

}  // namespace mbio
