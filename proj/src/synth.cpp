#include "mbio/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "mbio/imgio.hpp"

namespace mbio::synth {

namespace {

constexpr double kPi = std::numbers::pi;

double uniform(std::mt19937_64& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

std::uint8_t to_pixel(double v) { return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L)); }

}  // namespace

FingerMaster random_finger(std::mt19937_64& rng, int size) {
    FingerMaster m;
    m.angle = uniform(rng, 0.0, kPi);
    m.period = uniform(rng, 8.5, 10.0);
    m.bend_amplitude = uniform(rng, 6.0, 18.0);
    m.bend_length = uniform(rng, 150.0, 260.0);
    m.bend_phase = uniform(rng, 0.0, 2 * kPi);
    m.cx = size / 2.0;
    m.cy = size / 2.0;
    const int count = std::uniform_int_distribution<int>(18, 26)(rng);
    const double margin = 24.0;
    const double min_sep = 2.6 * m.period;
    for (int tries = 0; static_cast<int>(m.spirals.size()) < count && tries < 5000; ++tries) {
        Spiral s{uniform(rng, margin, size - margin), uniform(rng, margin, size - margin),
                 std::bernoulli_distribution(0.5)(rng) ? 1 : -1};
        bool ok = true;
        for (const Spiral& o : m.spirals) {
            if (std::hypot(o.x - s.x, o.y - s.y) < min_sep) {
                ok = false;
                break;
            }
        }
        if (ok) {
            m.spirals.push_back(s);
        }
    }
    return m;
}

Impression random_impression(std::mt19937_64& rng, bool first) {
    Impression imp;
    imp.rotation = uniform(rng, -8.0, 8.0) * kPi / 180.0;
    imp.dx = uniform(rng, -8.0, 8.0);
    imp.dy = uniform(rng, -8.0, 8.0);
    imp.distortion = first ? 0.0 : uniform(rng, 0.5, 2.0);
    imp.distortion_phase = uniform(rng, 0.0, 2 * kPi);
    imp.noise = uniform(rng, 8.0, 14.0);
    imp.contrast = uniform(rng, 75.0, 100.0);
    return imp;
}

GrayImage render_fingerprint(const FingerMaster& m, const Impression& imp, int size, std::mt19937_64& rng) {
    GrayImage out(size, size);
    std::normal_distribution<double> noise(0.0, imp.noise);
    const double c = std::cos(-imp.rotation);
    const double s = std::sin(-imp.rotation);
    const double ca = std::cos(m.angle);
    const double sa = std::sin(m.angle);
    for (int y = 0; y < size; ++y) {
        for (int x = 0; x < size; ++x) {
            // impression pixel -> master coordinates
            double px = x - m.cx - imp.dx;
            double py = y - m.cy - imp.dy;
            double mx = c * px - s * py + m.cx;
            double my = s * px + c * py + m.cy;
            mx += imp.distortion * std::sin(2 * kPi * my / 180.0 + imp.distortion_phase);
            my += imp.distortion * std::sin(2 * kPi * mx / 200.0 + 0.7 * imp.distortion_phase);

            const double u = (mx - m.cx) * ca + (my - m.cy) * sa;
            const double v = -(mx - m.cx) * sa + (my - m.cy) * ca;
            double phase = 2 * kPi / m.period * (u + m.bend_amplitude * std::sin(2 * kPi * v / m.bend_length + m.bend_phase));
            for (const Spiral& sp : m.spirals) {
                phase += sp.charge * std::atan2(my - sp.y, mx - sp.x);
            }
            out.at(x, y) = to_pixel(128.0 + imp.contrast * std::cos(phase) + noise(rng));
        }
    }
    return out;
}

EyeMaster random_eye(std::mt19937_64& rng) {
    EyeMaster m;
    m.pupil_radius = uniform(rng, 22.0, 28.0);
    m.limbus_ratio = uniform(rng, 2.0, 2.35);
    m.iris_level = uniform(rng, 95.0, 125.0);
    const int waves = 14;
    for (int k = 0; k < waves; ++k) {
        m.waves.push_back({uniform(rng, 0.5, 5.0), std::uniform_int_distribution<int>(3, 36)(rng),
                           uniform(rng, 0.0, 2 * kPi), uniform(rng, 4.0, 12.0)});
    }
    const int blobs = 40;
    for (int k = 0; k < blobs; ++k) {
        m.blobs.push_back({uniform(rng, 0.05, 0.95), uniform(rng, 0.0, 2 * kPi), uniform(rng, 0.03, 0.09),
                           uniform(rng, -35.0, 35.0)});
    }
    return m;
}

Capture random_capture(std::mt19937_64& rng, int size, bool first) {
    Capture c;
    c.cx = size / 2.0 + uniform(rng, -8.0, 8.0);
    c.cy = size / 2.0 + uniform(rng, -8.0, 8.0);
    c.rotation = (first ? 0.0 : uniform(rng, -4.0, 4.0)) * kPi / 180.0;
    c.dilation = uniform(rng, 0.96, 1.04);
    c.gain = uniform(rng, 0.94, 1.06);
    c.noise = uniform(rng, 2.0, 4.0);
    return c;
}

constexpr double kPupillaryZone = 0.12;
constexpr double kCollarette = 25.0;

GrayImage render_eye(const EyeMaster& m, const Capture& cap, int size, std::mt19937_64& rng) {
    GrayImage out(size, size);
    std::normal_distribution<double> noise(0.0, cap.noise);
    const double rp = m.pupil_radius * cap.dilation;
    const double rl = m.pupil_radius * m.limbus_ratio;
    constexpr double pupil_level = 22.0;
    constexpr double sclera_level = 205.0;
    for (int y = 0; y < size; ++y) {
        for (int x = 0; x < size; ++x) {
            const double dx = x - cap.cx;
            const double dy = y - cap.cy;
            const double rho = std::hypot(dx, dy);
            const double a = std::atan2(dy, dx) - cap.rotation;
            double v;
            if (rho <= rp) {
                v = pupil_level;
            } else {
                const double rn = std::clamp((rho - rp) / (rl - rp), 0.0, 1.0);
                double t = 0.0;
                for (const IrisWave& w : m.waves) {
                    t += w.amplitude * std::cos(2 * kPi * w.radial_frequency * rn + w.angular_frequency * a + w.phase);
                }
                for (const IrisBlob& b : m.blobs) {
                    double da = std::remainder(a - b.angle, 2 * kPi);
                    const double dr = rn - b.rho;
                    // angular distance measured in normalized-radius units at mid radius
                    da *= 0.5 * (1.0 + m.limbus_ratio) / (m.limbus_ratio - 1.0);
                    t += b.amplitude * std::exp(-0.5 * (dr * dr + da * da) / (b.size * b.size));
                }
                // smooth, brighter pupillary zone keeps the pupil boundary clean
                const double zone = std::clamp((rn - kPupillaryZone) / kPupillaryZone, 0.0, 1.0);
                t = m.iris_level + kCollarette * (1.0 - zone) + zone * t;
                // soft limbus
                const double blend = std::clamp((rho - rl) / 2.0 + 0.5, 0.0, 1.0);
                v = (1.0 - blend) * t + blend * sclera_level;
                // soft pupil edge
                const double inner = std::clamp(rho - rp, 0.0, 1.0);
                v = inner * v + (1.0 - inner) * pupil_level;
            }
            out.at(x, y) = to_pixel(v * cap.gain + noise(rng));
        }
    }
    return out;
}

void write_dataset(const std::filesystem::path& root, const DatasetSpec& spec) {
    if (spec.subjects < 1 || spec.fingerprints < 1 || spec.irises < 1) {
        throw Error(ErrorCode::Contract, "dataset needs at least one subject and one image per trait");
    }
    std::filesystem::create_directories(root);
    std::mt19937_64 rng(spec.seed);
    for (int s = 0; s < spec.subjects; ++s) {
        char id[16];
        std::snprintf(id, sizeof id, "s%02d", s + 1);
        const auto dir = root / id;
        std::filesystem::create_directories(dir);
        const FingerMaster finger = random_finger(rng, spec.fingerprint_size);
        const EyeMaster eye = random_eye(rng);
        for (int k = 1; k <= spec.fingerprints; ++k) {
            const Impression imp = random_impression(rng, k == 1);
            io::save_gray(render_fingerprint(finger, imp, spec.fingerprint_size, rng),
                          dir / ("fp_" + std::to_string(k) + ".pgm"));
        }
        for (int k = 1; k <= spec.irises; ++k) {
            const Capture cap = random_capture(rng, spec.eye_size, k == 1);
            io::save_gray(render_eye(eye, cap, spec.eye_size, rng), dir / ("iris_" + std::to_string(k) + ".pgm"));
        }
    }
}

}  // namespace mbio::synth
