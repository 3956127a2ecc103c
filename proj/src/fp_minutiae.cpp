#include "mbio/fp_minutiae.hpp"

#include <bit>
#include <cstdlib>

namespace mbio::fp {

namespace {

// Ring order N, NE, E, SE, S, SW, W, NW.
constexpr std::array<int, 8> kDx = {0, 1, 1, 1, 0, -1, -1, -1};
constexpr std::array<int, 8> kDy = {-1, -1, 0, 1, 1, 1, 0, -1};

constexpr bool bit(std::uint8_t p, int k) { return (p >> k) & 1U; }

// Counts components among the ring positions selected by `members`, where two
// positions are adjacent under 8- or 4-connectivity of their offsets.
int ring_components(std::uint8_t members, bool eight, std::uint8_t must_touch) {
    int count = 0;
    std::uint8_t seen = 0;
    for (int s = 0; s < 8; ++s) {
        if (!bit(members, s) || bit(seen, s)) {
            continue;
        }
        std::uint8_t comp = 0;
        std::array<int, 8> stack{};
        int top = 0;
        stack[top++] = s;
        seen |= static_cast<std::uint8_t>(1U << s);
        while (top > 0) {
            const int a = stack[--top];
            comp |= static_cast<std::uint8_t>(1U << a);
            for (int b = 0; b < 8; ++b) {
                if (!bit(members, b) || bit(seen, b)) {
                    continue;
                }
                const int ddx = std::abs(kDx[a] - kDx[b]);
                const int ddy = std::abs(kDy[a] - kDy[b]);
                const bool adjacent = eight ? (ddx <= 1 && ddy <= 1) : (ddx + ddy == 1);
                if (adjacent) {
                    seen |= static_cast<std::uint8_t>(1U << b);
                    stack[top++] = b;
                }
            }
        }
        if ((comp & must_touch) != 0) {
            ++count;
        }
    }
    return count;
}

std::array<bool, 256> build_simple_table() {
    std::array<bool, 256> table{};
    constexpr std::uint8_t four_neighbours = 0b01010101;  // N, E, S, W
    for (int p = 0; p < 256; ++p) {
        const auto fg = static_cast<std::uint8_t>(p);
        const auto bg = static_cast<std::uint8_t>(~p);
        const int t8 = ring_components(fg, true, 0xFF);
        const int t4 = ring_components(bg, false, four_neighbours);
        table[p] = (t8 == 1 && t4 == 1);
    }
    return table;
}

const std::array<bool, 256>& simple_table() {
    static const std::array<bool, 256> table = build_simple_table();
    return table;
}

// ridge = 1 working copy with a one-pixel background frame around it
struct Work {
    int w;
    int h;
    std::vector<std::uint8_t> px;

    explicit Work(const GrayImage& binary) : w(binary.width() + 2), h(binary.height() + 2), px(w * h, 0) {
        for (int y = 0; y < binary.height(); ++y) {
            for (int x = 0; x < binary.width(); ++x) {
                px[(y + 1) * w + (x + 1)] = binary.at(x, y) == 0 ? 1 : 0;
            }
        }
    }

    std::uint8_t pattern(int i) const {
        std::uint8_t p = 0;
        for (int k = 0; k < 8; ++k) {
            if (px[i + kDy[k] * w + kDx[k]]) {
                p |= static_cast<std::uint8_t>(1U << k);
            }
        }
        return p;
    }

    GrayImage to_image() const {
        GrayImage out(w - 2, h - 2);
        for (int y = 0; y < h - 2; ++y) {
            for (int x = 0; x < w - 2; ++x) {
                out.at(x, y) = px[(y + 1) * w + (x + 1)] ? 0 : 1;
            }
        }
        return out;
    }
};

int transitions(std::uint8_t p) {
    int a = 0;
    for (int k = 0; k < 8; ++k) {
        if (!bit(p, k) && bit(p, (k + 1) % 8)) {
            ++a;
        }
    }
    return a;
}

bool deletable(std::uint8_t p) { return std::popcount(p) >= 2 && simple_table()[p]; }

bool zhang_suen_candidate(std::uint8_t p, int subpass) {
    const int b = std::popcount(p);
    if (b < 2 || b > 6 || transitions(p) != 1) {
        return false;
    }
    const bool n = bit(p, 0), e = bit(p, 2), s = bit(p, 4), w = bit(p, 6);
    if (subpass == 0) {
        return !(n && e && s) && !(e && s && w);
    }
    return !(n && e && w) && !(n && s && w);
}

}  // namespace

bool is_simple(std::uint8_t pattern) { return simple_table()[pattern]; }

int crossing_number(std::uint8_t pattern) {
    int sum = 0;
    for (int k = 0; k < 8; ++k) {
        sum += std::abs(static_cast<int>(bit(pattern, k)) - static_cast<int>(bit(pattern, (k + 1) % 8)));
    }
    return sum / 2;
}

std::uint8_t neighbourhood_pattern(const GrayImage& binary, int x, int y) {
    std::uint8_t p = 0;
    for (int k = 0; k < 8; ++k) {
        const int nx = x + kDx[k];
        const int ny = y + kDy[k];
        if (binary.contains(nx, ny) && binary.at(nx, ny) == 0) {
            p |= static_cast<std::uint8_t>(1U << k);
        }
    }
    return p;
}

int crossing_number(const GrayImage& skeleton, int x, int y) {
    if (x < 1 || y < 1 || x >= skeleton.width() - 1 || y >= skeleton.height() - 1) {
        throw Error(ErrorCode::FrameOutsideImage, "crossing number is undefined on the image frame");
    }
    return crossing_number(neighbourhood_pattern(skeleton, x, y));
}

GrayImage thin(const GrayImage& binary) {
    Work img(binary);
    std::vector<int> marked;
    bool changed = true;
    while (changed) {
        changed = false;
        for (int subpass = 0; subpass < 2; ++subpass) {
            marked.clear();
            for (int y = 1; y < img.h - 1; ++y) {
                for (int x = 1; x < img.w - 1; ++x) {
                    const int i = y * img.w + x;
                    if (img.px[i] && zhang_suen_candidate(img.pattern(i), subpass)) {
                        marked.push_back(i);
                    }
                }
            }
            // Parallel marking, sequential commit: a marked pixel is removed only
            // if it is still simple given the deletions already made.
            for (int i : marked) {
                if (deletable(img.pattern(i))) {
                    img.px[i] = 0;
                    changed = true;
                }
            }
        }
    }

    // staircase cleanup: drop remaining simple non-end pixels
    changed = true;
    while (changed) {
        changed = false;
        for (int y = 1; y < img.h - 1; ++y) {
            for (int x = 1; x < img.w - 1; ++x) {
                const int i = y * img.w + x;
                if (img.px[i] && deletable(img.pattern(i))) {
                    img.px[i] = 0;
                    changed = true;
                }
            }
        }
    }
    return img.to_image();
}

MinutiaeSet extract_minutiae(const GrayImage& skeleton, const OrientationField& field, int border_margin) {
    if (!field.theta.same_shape(skeleton)) {
        throw Error(ErrorCode::Dimension, "orientation field does not match skeleton");
    }
    if (border_margin < 0) {
        throw Error(ErrorCode::Contract, "border margin must be >= 0");
    }
    MinutiaeSet set;
    set.source_width = skeleton.width();
    set.source_height = skeleton.height();

    constexpr std::array<std::array<int, 2>, 4> rays = {{{1, 0}, {-1, 0}, {0, -1}, {0, 1}}};
    for (int y = 1; y < skeleton.height() - 1; ++y) {
        for (int x = 1; x < skeleton.width() - 1; ++x) {
            if (skeleton.at(x, y) != 0) {
                continue;
            }
            const int cn = crossing_number(neighbourhood_pattern(skeleton, x, y));
            if (cn != 1 && cn != 3) {
                continue;
            }
            bool edge_artifact = false;
            for (const auto& ray : rays) {
                for (int k = 1; k <= border_margin; ++k) {
                    const int px = x + k * ray[0];
                    const int py = y + k * ray[1];
                    if (!skeleton.contains(px, py)) {
                        edge_artifact = true;
                        break;
                    }
                    if (skeleton.at(px, py) == 0) {
                        break;
                    }
                }
                if (edge_artifact) {
                    break;
                }
            }
            if (edge_artifact) {
                continue;
            }
            set.minutiae.push_back(
                {x, y, field.theta.at(x, y), cn == 1 ? MinutiaKind::Termination : MinutiaKind::Bifurcation});
        }
    }
    return set;
}

}  // namespace mbio::fp
