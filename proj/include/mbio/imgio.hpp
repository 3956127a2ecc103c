/**
 * @file imgio.hpp
 * @brief PGM/PNG loading, PGM saving, dataset directory scan and the binary
 *        template format.
 *
 * Template layout (little-endian):
 *   "MBIO" | version u16 | id length u16 | id bytes
 *   | minutiae count u16 | source width u16 | source height u16
 *   | per minutia: x u16, y u16, angle centidegrees u16, kind u8
 *   | iris samples M u32 | angular columns u16
 *   | per sample one byte: bits 0..5 planes 1..6, bit 6 validity
 *   | CRC-32 of everything before it, u32
 */
#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mbio/fp_minutiae.hpp"
#include "mbio/image.hpp"
#include "mbio/iris_code.hpp"

namespace mbio::io {

inline constexpr std::uint16_t kTemplateVersion = 1;

/// Reads 8-bit binary PGM (P5, maxval 255) or PNG. Colour PNG is reduced to
/// BT.601 luminance rounded half up.
GrayImage load_gray(const std::filesystem::path& path);

/// Writes a binary P5 PGM.
void save_gray(const GrayImage& image, const std::filesystem::path& path);

GrayImage decode_pgm(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> encode_pgm(const GrayImage& image);

/// (299 r + 587 g + 114 b + 500) / 1000 in integers.
constexpr std::uint8_t luminance(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    return static_cast<std::uint8_t>((299U * r + 587U * g + 114U * b + 500U) / 1000U);
}

struct SubjectEntry {
    std::string id;
    std::vector<std::filesystem::path> fingerprints;  ///< fp_<k>, ordered by k
    std::vector<std::filesystem::path> irises;        ///< iris_<k>, ordered by k
};

struct DatasetIndex {
    std::filesystem::path root;
    std::vector<SubjectEntry> subjects;  ///< ordered by id

    const SubjectEntry& subject(const std::string& id) const;
};

/// Scans `<root>/<subject>/fp_<k>.{pgm,png}` and `iris_<k>.{pgm,png}`.
DatasetIndex scan_dataset(const std::filesystem::path& root);

struct TemplateRecord {
    std::string subject_id;
    fp::MinutiaeSet fingerprint;
    iris::IrisCode iris;
    /// Not serialized; read_template fills it from the file time.
    std::chrono::system_clock::time_point created_at{};

    friend bool operator==(const TemplateRecord& a, const TemplateRecord& b) {
        return a.subject_id == b.subject_id && a.fingerprint == b.fingerprint && a.iris == b.iris;
    }
};

/// Angle as stored in a template (centidegree resolution).
double quantize_angle(double radians);

std::vector<std::uint8_t> encode_template(const TemplateRecord& record);
TemplateRecord decode_template(const std::vector<std::uint8_t>& bytes);

void write_template(const TemplateRecord& record, const std::filesystem::path& path);
TemplateRecord read_template(const std::filesystem::path& path);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes);

}  // namespace mbio::io
