#include "mbio/fp_match.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

namespace mbio::fp {

namespace {

constexpr double kPi = std::numbers::pi;

using Descriptor = std::vector<int>;

std::vector<Descriptor> constellations(const MinutiaeSet& set, const AlignmentParams& params) {
    const double r2 = params.neighbourhood_radius * params.neighbourhood_radius;
    const double sector_width = 2.0 * kPi / params.sectors;
    std::vector<Descriptor> out(set.size(), Descriptor(params.sectors, 0));
    for (std::size_t i = 0; i < set.size(); ++i) {
        const Minutia& m = set.minutiae[i];
        for (std::size_t j = 0; j < set.size(); ++j) {
            if (i == j) {
                continue;
            }
            const double dx = set.minutiae[j].x - m.x;
            const double dy = set.minutiae[j].y - m.y;
            if (dx * dx + dy * dy > r2) {
                continue;
            }
            double rel = std::atan2(dy, dx) - m.angle;
            rel = std::fmod(rel, 2.0 * kPi);
            if (rel < 0) {
                rel += 2.0 * kPi;
            }
            const int sector = std::min(params.sectors - 1, static_cast<int>(rel / sector_width));
            ++out[i][sector];
        }
    }
    return out;
}

// Histogram intersection of two sector descriptors, `shift` rotating the first.
double descriptor_similarity(const Descriptor& a, const Descriptor& b, int shift) {
    const int n = static_cast<int>(a.size());
    int common = 0;
    int total_a = 0;
    int total_b = 0;
    for (int k = 0; k < n; ++k) {
        common += std::min(a[(k + shift) % n], b[k]);
        total_a += a[k];
        total_b += b[k];
    }
    if (total_a + total_b == 0) {
        return 0.0;
    }
    return 2.0 * common / (total_a + total_b);
}

}  // namespace

void ElasticTolerances::validate() const {
    if (!(delta_r > 0 && delta_theta > 0 && delta_o > 0 && growth_per_100px > 0)) {
        throw Error(ErrorCode::Config, "elastic tolerances must be strictly positive");
    }
}

double wrap_pi(double angle) {
    angle = std::fmod(angle, 2.0 * kPi);
    if (angle <= -kPi) {
        angle += 2.0 * kPi;
    } else if (angle > kPi) {
        angle -= 2.0 * kPi;
    }
    return angle;
}

double orientation_distance(double a, double b) {
    double d = std::fmod(std::abs(a - b), kPi);
    return std::min(d, kPi - d);
}

std::pair<double, double> library_polar(double dx, double dy) {
    if (dx == 0.0 && dy == 0.0) {
        return {0.0, 0.0};
    }
    return {std::hypot(dx, dy), std::atan2(dy, dx)};
}

std::vector<AlignmentHypothesis> rank_alignments(const MinutiaeSet& input, const MinutiaeSet& templ,
                                                 std::size_t count, const AlignmentParams& params) {
    if (input.empty() || templ.empty()) {
        throw Error(ErrorCode::NoAlignment, "cannot align an empty minutiae set");
    }
    const auto din = constellations(input, params);
    const auto dtm = constellations(templ, params);
    const int flip = params.sectors / 2;  // orientation is pi-periodic: the other half-turn

    std::vector<AlignmentHypothesis> all;
    for (std::size_t t = 0; t < templ.size(); ++t) {
        for (std::size_t i = 0; i < input.size(); ++i) {
            const Minutia& mi = input.minutiae[i];
            const Minutia& mt = templ.minutiae[t];
            if (mi.kind != mt.kind) {
                continue;
            }
            const double direct = descriptor_similarity(din[i], dtm[t], 0);
            const double flipped = descriptor_similarity(din[i], dtm[t], flip);
            const bool use_flip = flipped > direct;
            AlignmentHypothesis h;
            h.input_index = i;
            h.template_index = t;
            h.dx = mi.x - mt.x;
            h.dy = mi.y - mt.y;
            h.dtheta = wrap_pi(mi.angle - mt.angle + (use_flip ? kPi : 0.0));
            h.similarity = std::max(direct, flipped);
            all.push_back(h);
        }
    }
    if (all.empty()) {
        throw Error(ErrorCode::NoAlignment, "no same-kind minutiae pair");
    }
    std::stable_sort(all.begin(), all.end(), [](const AlignmentHypothesis& a, const AlignmentHypothesis& b) {
        if (a.similarity != b.similarity) {
            return a.similarity > b.similarity;
        }
        return std::tie(a.template_index, a.input_index) < std::tie(b.template_index, b.input_index);
    });
    if (all.size() > count) {
        all.resize(count);
    }
    return all;
}

AlignmentHypothesis find_best_pair(const MinutiaeSet& input, const MinutiaeSet& templ, const AlignmentParams& params) {
    return rank_alignments(input, templ, 1, params).front();
}

std::vector<PolarMinutia> to_polar(const MinutiaeSet& set, const AlignmentHypothesis& hyp, AlignmentSide side,
                                   const PolarConverter& polar) {
    const std::size_t ref_index = side == AlignmentSide::Input ? hyp.input_index : hyp.template_index;
    if (ref_index >= set.size()) {
        throw Error(ErrorCode::Contract, "alignment index out of range");
    }
    const Minutia& ref = set.minutiae[ref_index];
    const double rotation = side == AlignmentSide::Input ? hyp.dtheta : 0.0;

    std::vector<PolarMinutia> out;
    out.reserve(set.size());
    for (const Minutia& m : set.minutiae) {
        const double dx = m.x - ref.x;
        const double dy = m.y - ref.y;
        PolarMinutia p;
        if (dx != 0.0 || dy != 0.0) {
            const auto [r, theta] = polar(dx, dy);
            p.r = r;
            p.theta = wrap_pi(theta - rotation);
        }
        double o = std::fmod(m.angle - rotation, kPi);
        if (o < 0) {
            o += kPi;
        }
        p.o = o >= kPi ? 0.0 : o;
        out.push_back(p);
    }
    return out;
}

std::size_t elastic_match_count(std::span<const PolarMinutia> input, std::span<const PolarMinutia> templ,
                                const ElasticTolerances& tol) {
    struct Candidate {
        double residual;
        std::size_t t;
        std::size_t i;
    };
    std::vector<Candidate> candidates;
    for (std::size_t t = 0; t < templ.size(); ++t) {
        const double s = 1.0 + tol.growth_per_100px * (templ[t].r / 100.0);
        const double max_r = tol.delta_r * s;
        const double max_theta = tol.delta_theta * s;
        for (std::size_t i = 0; i < input.size(); ++i) {
            const double dr = std::abs(input[i].r - templ[t].r);
            const double dtheta = std::abs(wrap_pi(input[i].theta - templ[t].theta));
            const double dorient = orientation_distance(input[i].o, templ[t].o);
            if (dr <= max_r && dtheta <= max_theta && dorient <= tol.delta_o) {
                candidates.push_back({dr / max_r + dtheta / max_theta + dorient / tol.delta_o, t, i});
            }
        }
    }
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
        return std::tie(a.residual, a.t, a.i) < std::tie(b.residual, b.t, b.i);
    });
    std::vector<bool> used_in(input.size(), false);
    std::vector<bool> used_tm(templ.size(), false);
    std::size_t matched = 0;
    for (const Candidate& c : candidates) {
        if (!used_in[c.i] && !used_tm[c.t]) {
            used_in[c.i] = true;
            used_tm[c.t] = true;
            ++matched;
        }
    }
    return matched;
}

MatchScore elastic_match(std::span<const PolarMinutia> input, std::span<const PolarMinutia> templ,
                         const ElasticTolerances& tol) {
    MatchScore score{0.0, Polarity::Similarity, Trait::Fingerprint};
    if (input.empty() || templ.empty()) {
        return score;
    }
    const std::size_t matched = elastic_match_count(input, templ, tol);
    score.value = std::clamp(static_cast<double>(matched) / std::max(input.size(), templ.size()), 0.0, 1.0);
    return score;
}

MatchScore match_fingerprint(const MinutiaeSet& input, const MinutiaeSet& templ, const ElasticTolerances& tol,
                             const AlignmentParams& params, const PolarConverter& polar) {
    tol.validate();
    MatchScore best{0.0, Polarity::Similarity, Trait::Fingerprint};
    if (input.empty() || templ.empty()) {
        return best;
    }
    std::vector<AlignmentHypothesis> hyps;
    try {
        hyps = rank_alignments(input, templ, params.hypotheses, params);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::NoAlignment) {
            return best;
        }
        throw;
    }
    const auto by_theta = [](const PolarMinutia& a, const PolarMinutia& b) { return a.theta < b.theta; };
    for (const AlignmentHypothesis& h : hyps) {
        auto pin = to_polar(input, h, AlignmentSide::Input, polar);
        auto ptm = to_polar(templ, h, AlignmentSide::Template, polar);
        std::sort(pin.begin(), pin.end(), by_theta);
        std::sort(ptm.begin(), ptm.end(), by_theta);
        const MatchScore s = elastic_match(pin, ptm, tol);
        best.value = std::max(best.value, s.value);
    }
    return best;
}

}  // namespace mbio::fp
