#include "mbio/imgio.hpp"

#include <png.h>
#include <zlib.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <optional>
#include <regex>

namespace mbio::io {

namespace fs = std::filesystem;

namespace {

bool is_png(const std::vector<std::uint8_t>& bytes) {
    static constexpr std::uint8_t sig[8] = {0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A};
    return bytes.size() >= 8 && std::memcmp(bytes.data(), sig, 8) == 0;
}

GrayImage decode_png(const std::vector<std::uint8_t>& bytes) {
    png_image image;
    std::memset(&image, 0, sizeof image);
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
        throw Error(ErrorCode::UnsupportedFormat, std::string("png: ") + image.message);
    }
    if (image.width == 0 || image.height == 0) {
        png_image_free(&image);
        throw Error(ErrorCode::ZeroDimension, "png has zero width or height");
    }
    // RGB(A) then our own luminance rule; gray inputs come back as r = g = b.
    image.format = PNG_FORMAT_RGBA;
    std::vector<std::uint8_t> rgba(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, rgba.data(), 0, nullptr)) {
        const std::string msg = image.message;
        png_image_free(&image);
        throw Error(ErrorCode::UnsupportedFormat, "png: " + msg);
    }
    GrayImage out(static_cast<int>(image.width), static_cast<int>(image.height));
    for (std::size_t i = 0; i < out.size(); ++i) {
        out.data()[i] = luminance(rgba[4 * i], rgba[4 * i + 1], rgba[4 * i + 2]);
    }
    return out;
}

class Writer {
public:
    void u8(std::uint8_t v) { bytes.push_back(v); }
    void u16(std::uint16_t v) {
        u8(static_cast<std::uint8_t>(v & 0xFF));
        u8(static_cast<std::uint8_t>(v >> 8));
    }
    void u32(std::uint32_t v) {
        u16(static_cast<std::uint16_t>(v & 0xFFFF));
        u16(static_cast<std::uint16_t>(v >> 16));
    }
    void raw(const void* p, std::size_t n) {
        const auto* b = static_cast<const std::uint8_t*>(p);
        bytes.insert(bytes.end(), b, b + n);
    }

    std::vector<std::uint8_t> bytes;
};

class Reader {
public:
    Reader(const std::uint8_t* data, std::size_t size) : data_(data), size_(size) {}

    std::uint8_t u8() {
        need(1);
        return data_[pos_++];
    }
    std::uint16_t u16() {
        const std::uint16_t lo = u8();
        return static_cast<std::uint16_t>(lo | (u8() << 8));
    }
    std::uint32_t u32() {
        const std::uint32_t lo = u16();
        return lo | (static_cast<std::uint32_t>(u16()) << 16);
    }
    std::string str(std::size_t n) {
        need(n);
        std::string s(reinterpret_cast<const char*>(data_ + pos_), n);
        pos_ += n;
        return s;
    }
    std::size_t remaining() const { return size_ - pos_; }

private:
    void need(std::size_t n) const {
        if (size_ - pos_ < n) {
            throw Error(ErrorCode::Truncated, "template file is truncated");
        }
    }

    const std::uint8_t* data_;
    std::size_t size_;
    std::size_t pos_ = 0;
};

std::uint16_t checked_u16(long v, const char* what) {
    if (v < 0 || v > 0xFFFF) {
        throw Error(ErrorCode::Contract, std::string(what) + " does not fit the template format");
    }
    return static_cast<std::uint16_t>(v);
}

std::uint32_t crc32_of(const std::uint8_t* p, std::size_t n) {
    return static_cast<std::uint32_t>(::crc32(::crc32(0L, Z_NULL, 0), p, static_cast<uInt>(n)));
}

std::uint16_t angle_to_centidegrees(double radians) {
    double deg = radians * 180.0 / std::numbers::pi;
    deg = std::fmod(deg, 360.0);
    if (deg < 0) {
        deg += 360.0;
    }
    long cd = std::lround(deg * 100.0);
    if (cd >= 36000) {
        cd -= 36000;
    }
    return static_cast<std::uint16_t>(cd);
}

double centidegrees_to_angle(std::uint16_t cd) { return cd * std::numbers::pi / 18000.0; }

}  // namespace

std::vector<std::uint8_t> read_file(const fs::path& path) {
    std::error_code ec;
    if (!fs::is_regular_file(path, ec)) {
        throw Error(ErrorCode::MissingFile, "no such file: " + path.string());
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::Io, "cannot open " + path.string());
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const fs::path& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(ErrorCode::Io, "cannot write " + path.string());
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw Error(ErrorCode::Io, "write failed: " + path.string());
    }
}

GrayImage decode_pgm(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') {
        throw Error(ErrorCode::UnsupportedFormat, "not a binary PGM (P5)");
    }
    std::size_t pos = 2;
    auto next_number = [&]() -> long {
        while (pos < bytes.size()) {
            if (bytes[pos] == '#') {
                while (pos < bytes.size() && bytes[pos] != '\n') {
                    ++pos;
                }
            } else if (std::isspace(bytes[pos])) {
                ++pos;
            } else {
                break;
            }
        }
        long v = 0;
        const auto* first = reinterpret_cast<const char*>(bytes.data() + pos);
        const auto* last = reinterpret_cast<const char*>(bytes.data() + bytes.size());
        const auto res = std::from_chars(first, last, v);
        if (res.ec != std::errc{} || res.ptr == first) {
            throw Error(ErrorCode::UnsupportedFormat, "malformed PGM header");
        }
        pos += static_cast<std::size_t>(res.ptr - first);
        return v;
    };
    const long w = next_number();
    const long h = next_number();
    const long maxval = next_number();
    if (w <= 0 || h <= 0) {
        throw Error(ErrorCode::ZeroDimension, "PGM has zero width or height");
    }
    if (maxval != 255) {
        throw Error(ErrorCode::UnsupportedFormat, "only 8-bit PGM (maxval 255) is supported");
    }
    if (pos >= bytes.size() || !std::isspace(bytes[pos])) {
        throw Error(ErrorCode::UnsupportedFormat, "malformed PGM header");
    }
    ++pos;  // single whitespace before the raster
    const std::size_t n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
    if (bytes.size() - pos < n) {
        throw Error(ErrorCode::Truncated, "PGM raster is truncated");
    }
    return GrayImage(static_cast<int>(w), static_cast<int>(h),
                     std::vector<std::uint8_t>(bytes.begin() + static_cast<std::ptrdiff_t>(pos),
                                               bytes.begin() + static_cast<std::ptrdiff_t>(pos + n)));
}

std::vector<std::uint8_t> encode_pgm(const GrayImage& image) {
    const std::string header = "P5\n" + std::to_string(image.width()) + " " + std::to_string(image.height()) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.insert(out.end(), image.data().begin(), image.data().end());
    return out;
}

GrayImage load_gray(const fs::path& path) {
    const auto bytes = read_file(path);
    if (is_png(bytes)) {
        return decode_png(bytes);
    }
    if (bytes.size() >= 2 && bytes[0] == 'P') {
        return decode_pgm(bytes);
    }
    throw Error(ErrorCode::UnsupportedFormat, "unsupported image format: " + path.string());
}

void save_gray(const GrayImage& image, const fs::path& path) { write_file(path, encode_pgm(image)); }

const SubjectEntry& DatasetIndex::subject(const std::string& id) const {
    for (const SubjectEntry& s : subjects) {
        if (s.id == id) {
            return s;
        }
    }
    throw Error(ErrorCode::MissingFile, "unknown subject: " + id);
}

DatasetIndex scan_dataset(const fs::path& root) {
    std::error_code ec;
    if (!fs::is_directory(root, ec)) {
        throw Error(ErrorCode::MissingFile, "dataset root is not a directory: " + root.string());
    }
    static const std::regex name_re(R"((fp|iris)_(\d+)\.(pgm|png))", std::regex::icase);
    DatasetIndex index;
    index.root = root;
    for (const auto& dir : fs::directory_iterator(root)) {
        if (!dir.is_directory()) {
            continue;
        }
        std::vector<std::pair<long, fs::path>> fps;
        std::vector<std::pair<long, fs::path>> irises;
        for (const auto& f : fs::directory_iterator(dir.path())) {
            std::smatch m;
            const std::string name = f.path().filename().string();
            if (!f.is_regular_file() || !std::regex_match(name, m, name_re)) {
                continue;
            }
            const long k = std::stol(m[2].str());
            (m[1].str().size() == 2 ? fps : irises).emplace_back(k, f.path());
        }
        if (fps.empty() && irises.empty()) {
            continue;
        }
        std::sort(fps.begin(), fps.end());
        std::sort(irises.begin(), irises.end());
        SubjectEntry s;
        s.id = dir.path().filename().string();
        for (auto& [k, p] : fps) {
            s.fingerprints.push_back(p);
        }
        for (auto& [k, p] : irises) {
            s.irises.push_back(p);
        }
        index.subjects.push_back(std::move(s));
    }
    std::sort(index.subjects.begin(), index.subjects.end(),
              [](const SubjectEntry& a, const SubjectEntry& b) { return a.id < b.id; });
    return index;
}

double quantize_angle(double radians) { return centidegrees_to_angle(angle_to_centidegrees(radians)); }

std::vector<std::uint8_t> encode_template(const TemplateRecord& r) {
    if (r.iris.columns <= 0 || r.iris.size() == 0) {
        throw Error(ErrorCode::Contract, "template needs an iris code");
    }
    if (r.iris.size() % static_cast<std::size_t>(r.iris.columns) != 0 || r.iris.mask.size() != r.iris.size()) {
        throw Error(ErrorCode::Contract, "iris code shape is inconsistent");
    }
    Writer w;
    w.raw("MBIO", 4);
    w.u16(kTemplateVersion);
    w.u16(checked_u16(static_cast<long>(r.subject_id.size()), "subject id"));
    w.raw(r.subject_id.data(), r.subject_id.size());

    w.u16(checked_u16(static_cast<long>(r.fingerprint.size()), "minutiae count"));
    w.u16(checked_u16(r.fingerprint.source_width, "source width"));
    w.u16(checked_u16(r.fingerprint.source_height, "source height"));
    for (const fp::Minutia& m : r.fingerprint.minutiae) {
        w.u16(checked_u16(m.x, "minutia x"));
        w.u16(checked_u16(m.y, "minutia y"));
        w.u16(angle_to_centidegrees(m.angle));
        w.u8(static_cast<std::uint8_t>(m.kind));
    }

    w.u32(static_cast<std::uint32_t>(r.iris.size()));
    w.u16(checked_u16(r.iris.columns, "iris columns"));
    for (std::size_t i = 0; i < r.iris.size(); ++i) {
        w.u8(static_cast<std::uint8_t>((r.iris.planes[i] & 0x3F) | (r.iris.mask[i] ? 0x40 : 0)));
    }
    w.u32(crc32_of(w.bytes.data(), w.bytes.size()));
    return std::move(w.bytes);
}

namespace {

TemplateRecord parse_template(const std::vector<std::uint8_t>& bytes) {
    Reader head(bytes.data(), bytes.size());
    if (head.str(4) != "MBIO") {
        throw Error(ErrorCode::UnsupportedFormat, "not a template file");
    }
    const std::uint16_t version = head.u16();
    if (version != kTemplateVersion) {
        throw Error(ErrorCode::VersionMismatch, "template version " + std::to_string(version) + " is not supported");
    }
    if (bytes.size() < 10) {
        throw Error(ErrorCode::Truncated, "template file is truncated");
    }
    Reader r(bytes.data(), bytes.size() - 4);
    r.str(6);

    TemplateRecord rec;
    rec.subject_id = r.str(r.u16());
    const std::uint16_t count = r.u16();
    rec.fingerprint.source_width = r.u16();
    rec.fingerprint.source_height = r.u16();
    for (std::uint16_t i = 0; i < count; ++i) {
        fp::Minutia m;
        m.x = r.u16();
        m.y = r.u16();
        m.angle = centidegrees_to_angle(r.u16());
        const std::uint8_t kind = r.u8();
        if (kind > 1) {
            throw Error(ErrorCode::UnsupportedFormat, "unknown minutia type");
        }
        m.kind = static_cast<fp::MinutiaKind>(kind);
        rec.fingerprint.minutiae.push_back(m);
    }
    const std::uint32_t samples = r.u32();
    const std::uint16_t columns = r.u16();
    if (columns == 0 || samples % columns != 0) {
        throw Error(ErrorCode::UnsupportedFormat, "iris code shape is inconsistent");
    }
    if (r.remaining() < samples) {
        throw Error(ErrorCode::Truncated, "template file is truncated");
    }
    rec.iris.columns = columns;
    rec.iris.rows = static_cast<int>(samples / columns);
    rec.iris.planes.resize(samples);
    rec.iris.mask.resize(samples);
    for (std::uint32_t i = 0; i < samples; ++i) {
        const std::uint8_t b = r.u8();
        rec.iris.planes[i] = b & 0x3F;
        rec.iris.mask[i] = (b >> 6) & 1;
    }
    if (r.remaining() != 0) {
        throw Error(ErrorCode::UnsupportedFormat, "trailing bytes before checksum");
    }
    return rec;
}

bool checksum_ok(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < 4) {
        return false;
    }
    Reader tail(bytes.data() + bytes.size() - 4, 4);
    return tail.u32() == crc32_of(bytes.data(), bytes.size() - 4);
}

}  // namespace

TemplateRecord decode_template(const std::vector<std::uint8_t>& bytes) {
    TemplateRecord rec;
    try {
        rec = parse_template(bytes);
    } catch (const Error& e) {
        // a corrupted payload can look structurally wrong; report it as corruption
        if (e.code() != ErrorCode::Truncated && e.code() != ErrorCode::VersionMismatch && !checksum_ok(bytes)) {
            throw Error(ErrorCode::ChecksumFailure, "template checksum mismatch");
        }
        throw;
    }
    if (!checksum_ok(bytes)) {
        throw Error(ErrorCode::ChecksumFailure, "template checksum mismatch");
    }
    return rec;
}

void write_template(const TemplateRecord& record, const fs::path& path) { write_file(path, encode_template(record)); }

TemplateRecord read_template(const fs::path& path) {
    TemplateRecord rec = decode_template(read_file(path));
    std::error_code ec;
    const auto ftime = fs::last_write_time(path, ec);
    if (!ec) {
        rec.created_at = std::chrono::time_point_cast<std::chrono::system_clock::duration>(
            std::chrono::file_clock::to_sys(ftime));
    }
    return rec;
}

}  // namespace mbio::io
