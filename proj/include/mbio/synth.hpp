/**
 * @file synth.hpp
 * @brief Synthetic multimodal subjects: fingerprint impressions rendered from a
 *        ridge phase field with planted minutiae, and eye captures with a
 *        subject-specific iris texture.
 */
#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <vector>

#include "mbio/image.hpp"

namespace mbio::synth {

struct Spiral {
    double x = 0.0;
    double y = 0.0;
    int charge = 1;  ///< +1 or -1
};

/// Ridge phase = 2 pi / period * (along-axis distance + bend) + sum of spiral terms.
struct FingerMaster {
    double angle = 0.0;
    double period = 9.0;
    double bend_amplitude = 0.0;
    double bend_length = 200.0;
    double bend_phase = 0.0;
    double cx = 0.0;
    double cy = 0.0;
    std::vector<Spiral> spirals;
};

struct Impression {
    double rotation = 0.0;  ///< radians
    double dx = 0.0;
    double dy = 0.0;
    double distortion = 0.0;  ///< px amplitude of a smooth warp
    double distortion_phase = 0.0;
    double noise = 10.0;
    double contrast = 90.0;
};

struct IrisBlob {
    double rho = 0.0;    ///< normalized radius in [0, 1]
    double angle = 0.0;  ///< radians
    double size = 0.05;
    double amplitude = 0.0;
};

struct IrisWave {
    double radial_frequency = 1.0;
    int angular_frequency = 1;
    double phase = 0.0;
    double amplitude = 0.0;
};

struct EyeMaster {
    double pupil_radius = 25.0;
    double limbus_ratio = 2.2;  ///< limbus radius / pupil radius
    double iris_level = 110.0;
    std::vector<IrisWave> waves;
    std::vector<IrisBlob> blobs;
};

struct Capture {
    double cx = 120.0;
    double cy = 120.0;
    double rotation = 0.0;  ///< radians
    double dilation = 1.0;
    double gain = 1.0;
    double noise = 3.0;
};

FingerMaster random_finger(std::mt19937_64& rng, int size);
Impression random_impression(std::mt19937_64& rng, bool first);
GrayImage render_fingerprint(const FingerMaster& master, const Impression& imp, int size, std::mt19937_64& rng);

EyeMaster random_eye(std::mt19937_64& rng);
Capture random_capture(std::mt19937_64& rng, int size, bool first);
GrayImage render_eye(const EyeMaster& master, const Capture& capture, int size, std::mt19937_64& rng);

struct DatasetSpec {
    int subjects = 10;
    int fingerprints = 3;  ///< per subject; the first enrolls
    int irises = 5;        ///< per subject; the first three enroll
    std::uint64_t seed = 1;
    int fingerprint_size = 256;
    int eye_size = 240;
};

/// Writes `<root>/sNN/fp_<k>.pgm` and `iris_<k>.pgm`.
void write_dataset(const std::filesystem::path& root, const DatasetSpec& spec);

}  // namespace mbio::synth
