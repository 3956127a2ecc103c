#include "mbio/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>

#include "mbio/hw/fp_chain.hpp"
#include "mbio/report.hpp"

namespace mbio::harness {

namespace fs = std::filesystem;

namespace {

std::string describe(const fs::path& path, const std::exception& e) {
    return path.filename().string() + ": " + e.what();
}

[[noreturn]] void rethrow_for(const fs::path& path, const Error& e) {
    throw Error(e.code(), describe(path, e));
}

fp::MinutiaeSet quantized(fp::MinutiaeSet set) {
    for (auto& m : set.minutiae) {
        m.angle = io::quantize_angle(m.angle);
    }
    return set;
}

iris::IrisCode iris_from(const fs::path& path, const PipelineConfig& config) {
    try {
        return extract_iris(io::load_gray(path), config);
    } catch (const Error& e) {
        rethrow_for(path, e);
    }
}

fp::MinutiaeSet fingerprint_from(const fs::path& path, const PipelineConfig& config) {
    try {
        return quantized(extract_fingerprint(io::load_gray(path), config));
    } catch (const Error& e) {
        rethrow_for(path, e);
    }
}

struct Enrolled {
    io::TemplateRecord record;
    std::vector<iris::IrisCode> codes;
};

Enrolled enroll_with_codes(const io::SubjectEntry& subject, const PipelineConfig& config) {
    if (subject.fingerprints.empty() || subject.irises.size() < static_cast<std::size_t>(kEnrollIrises)) {
        throw Error(ErrorCode::InsufficientSamples,
                    "subject " + subject.id + " needs 1 fingerprint and " + std::to_string(kEnrollIrises) +
                        " iris images, has " + std::to_string(subject.fingerprints.size()) + " and " +
                        std::to_string(subject.irises.size()));
    }
    Enrolled out;
    out.record.subject_id = subject.id;
    out.record.fingerprint = fingerprint_from(subject.fingerprints.front(), config);
    for (int k = 0; k < kEnrollIrises; ++k) {
        out.codes.push_back(iris_from(subject.irises[k], config));
    }
    out.record.iris = iris::majority_template(out.codes);
    out.record.created_at = std::chrono::system_clock::now();
    return out;
}

}  // namespace

io::TemplateRecord enroll(const io::SubjectEntry& subject, const PipelineConfig& config) {
    return enroll_with_codes(subject, config).record;
}

ProbeFeatures extract_probe(const fs::path& fp_path, const fs::path& iris_path, const PipelineConfig& config) {
    ProbeFeatures p;
    try {
        p.fingerprint = fingerprint_from(fp_path, config);
    } catch (const Error& e) {
        p.fingerprint_error = e.what();
    }
    try {
        p.iris = iris_from(iris_path, config);
    } catch (const Error& e) {
        p.iris_error = e.what();
    }
    return p;
}

double TraitOutcome::similarity() const { return score ? fusion::to_similarity(*score) : 0.0; }

VerifyOutcome score_probe(const ProbeFeatures& probe, const io::TemplateRecord& templ, const PipelineConfig& config) {
    VerifyOutcome out;
    if (probe.fingerprint) {
        try {
            out.fingerprint.score = compare_fingerprints(*probe.fingerprint, templ.fingerprint, config);
        } catch (const Error& e) {
            out.fingerprint.error = std::string("match: ") + e.what();
        }
    } else {
        out.fingerprint.error = probe.fingerprint_error;
    }
    if (probe.iris) {
        try {
            out.iris.score = compare_irises(*probe.iris, templ.iris, config);
        } catch (const Error& e) {
            out.iris.error = std::string("match: ") + e.what();
        }
    } else {
        out.iris.error = probe.iris_error;
    }
    out.decision = fusion::fuse(out.fingerprint.score, out.iris.score, config.fusion);
    return out;
}

VerifyOutcome verify(const fs::path& fp_path, const fs::path& iris_path, const io::TemplateRecord& templ,
                     const PipelineConfig& config) {
    return score_probe(extract_probe(fp_path, iris_path, config), templ, config);
}

EvalResult evaluate_scores(std::vector<double> genuine, std::vector<double> impostor, int points) {
    if (points < 2) {
        throw Error(ErrorCode::Contract, "threshold sweep needs at least 2 points");
    }
    if (genuine.empty() || impostor.empty()) {
        throw Error(ErrorCode::InsufficientSamples, "evaluation needs genuine and impostor scores");
    }
    EvalResult r;
    std::sort(genuine.begin(), genuine.end());
    std::sort(impostor.begin(), impostor.end());
    const double ng = static_cast<double>(genuine.size());
    const double ni = static_cast<double>(impostor.size());
    for (int i = 0; i < points; ++i) {
        const double t = static_cast<double>(i) / (points - 1);
        const auto imp_below = std::lower_bound(impostor.begin(), impostor.end(), t) - impostor.begin();
        const auto gen_below = std::lower_bound(genuine.begin(), genuine.end(), t) - genuine.begin();
        r.thresholds.push_back(t);
        r.far.push_back((ni - static_cast<double>(imp_below)) / ni);
        r.frr.push_back(static_cast<double>(gen_below) / ng);
    }

    // FAR - FRR is nonincreasing in t; interpolate at its first non-positive value.
    std::size_t best = 0;
    for (std::size_t i = 0; i < r.thresholds.size(); ++i) {
        const double d = r.far[i] - r.frr[i];
        if (std::abs(d) < std::abs(r.far[best] - r.frr[best])) {
            best = i;
        }
        if (d <= 0.0) {
            if (i == 0 || d == 0.0) {
                r.eer = 0.5 * (r.far[i] + r.frr[i]);
                r.eer_threshold = r.thresholds[i];
            } else {
                const double d0 = r.far[i - 1] - r.frr[i - 1];
                const double a = d0 / (d0 - d);
                const double far = r.far[i - 1] + a * (r.far[i] - r.far[i - 1]);
                const double frr = r.frr[i - 1] + a * (r.frr[i] - r.frr[i - 1]);
                r.eer = 0.5 * (far + frr);
                r.eer_threshold = r.thresholds[i - 1] + a * (r.thresholds[i] - r.thresholds[i - 1]);
            }
            r.genuine = std::move(genuine);
            r.impostor = std::move(impostor);
            return r;
        }
    }
    r.eer = 0.5 * (r.far[best] + r.frr[best]);
    r.eer_threshold = r.thresholds[best];
    r.genuine = std::move(genuine);
    r.impostor = std::move(impostor);
    return r;
}

int probe_pairs(const io::SubjectEntry& subject) {
    const int fps = static_cast<int>(subject.fingerprints.size()) - 1;
    const int irises = static_cast<int>(subject.irises.size()) - kEnrollIrises;
    return std::max(0, std::min(fps, irises));
}

Evaluation evaluate(const io::DatasetIndex& dataset, const RunConfig& run) {
    const auto start = std::chrono::steady_clock::now();
    if (dataset.subjects.size() < 2) {
        throw Error(ErrorCode::DatasetTooSmall, "evaluation needs at least 2 subjects");
    }
    for (const auto& s : dataset.subjects) {
        if (probe_pairs(s) < 1) {
            throw Error(ErrorCode::InsufficientSamples,
                        "subject " + s.id + " has no held-out probe pair (needs 2 fingerprints and 4 irises)");
        }
    }
    PipelineConfig config = run.pipeline;

    std::vector<Enrolled> enrolled;
    for (const auto& s : dataset.subjects) {
        enrolled.push_back(enroll_with_codes(s, config));
    }

    if (run.calibrate) {
        // Bounds from enrollment data only: impostor minima between templates,
        // genuine maxima from the enrollment iris codes.
        double fp_lo = 1.0;
        double iris_lo = 1.0;
        double iris_hi = 0.0;
        for (std::size_t a = 0; a < enrolled.size(); ++a) {
            for (std::size_t b = 0; b < enrolled.size(); ++b) {
                if (a == b) {
                    for (const auto& c : enrolled[a].codes) {
                        iris_hi = std::max(iris_hi, fusion::to_similarity(
                                                        compare_irises(c, enrolled[a].record.iris, config)));
                    }
                    continue;
                }
                fp_lo = std::min(fp_lo, fusion::to_similarity(compare_fingerprints(
                                            enrolled[a].record.fingerprint, enrolled[b].record.fingerprint, config)));
                iris_lo = std::min(iris_lo, fusion::to_similarity(
                                                compare_irises(enrolled[a].codes.front(), enrolled[b].record.iris, config)));
            }
        }
        config.fusion.normalization = fusion::Normalization::MinMax;
        config.fusion.fp_bounds = {fp_lo, 1.0};
        config.fusion.iris_bounds = {iris_lo, std::max(iris_hi, iris_lo + 1e-6)};
        config.fusion.validate();
    }

    Evaluation ev;
    ev.fusion = config.fusion;
    std::vector<double> gen_fp, imp_fp, gen_iris, imp_iris, gen_fused, imp_fused;
    for (const auto& subject : dataset.subjects) {
        for (int k = 1; k <= probe_pairs(subject); ++k) {
            const ProbeFeatures probe =
                extract_probe(subject.fingerprints[k], subject.irises[kEnrollIrises + k - 1], config);
            for (const auto& e : enrolled) {
                Trial t;
                t.probe_subject = subject.id;
                t.probe_index = k;
                t.template_subject = e.record.subject_id;
                t.genuine = t.template_subject == t.probe_subject;
                t.outcome = score_probe(probe, e.record, config);
                (t.genuine ? gen_fp : imp_fp).push_back(t.outcome.fingerprint.similarity());
                (t.genuine ? gen_iris : imp_iris).push_back(t.outcome.iris.similarity());
                (t.genuine ? gen_fused : imp_fused).push_back(t.outcome.decision.fused_score);
                ev.trials.push_back(std::move(t));
            }
        }
    }
    ev.fingerprint = evaluate_scores(std::move(gen_fp), std::move(imp_fp));
    ev.iris = evaluate_scores(std::move(gen_iris), std::move(imp_iris));
    ev.fused = evaluate_scores(std::move(gen_fused), std::move(imp_fused));
    ev.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return ev;
}

namespace {

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) {
        throw Error(ErrorCode::Io, "cannot write " + path.string());
    }
}

std::string histogram_svg(const Evaluation& ev) {
    constexpr int kBins = 20;
    constexpr int kPanelW = 300;
    constexpr int kPanelH = 180;
    constexpr int kPad = 30;
    const std::pair<const char*, const EvalResult*> panels[] = {
        {"fingerprint", &ev.fingerprint}, {"iris", &ev.iris}, {"fused", &ev.fused}};

    std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(3 * (kPanelW + kPad) + kPad) +
                      "\" height=\"" + std::to_string(kPanelH + 3 * kPad) + "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    int px = kPad;
    for (const auto& [title, r] : panels) {
        const auto bins = [&](const std::vector<double>& scores) {
            std::vector<double> h(kBins, 0.0);
            for (double s : scores) {
                h[std::clamp(static_cast<int>(s * kBins), 0, kBins - 1)] += 1.0 / static_cast<double>(scores.size());
            }
            return h;
        };
        const auto g = bins(r->genuine);
        const auto im = bins(r->impostor);
        double peak = 1e-9;
        for (int b = 0; b < kBins; ++b) {
            peak = std::max({peak, g[b], im[b]});
        }
        const double bw = static_cast<double>(kPanelW) / kBins;
        const int base = kPad + kPanelH;
        svg += "<text x=\"" + std::to_string(px) + "\" y=\"" + std::to_string(kPad - 10) + "\">" + title +
               " (EER " + std::to_string(r->eer).substr(0, 6) + ")</text>\n";
        svg += "<rect x=\"" + std::to_string(px) + "\" y=\"" + std::to_string(kPad) + "\" width=\"" +
               std::to_string(kPanelW) + "\" height=\"" + std::to_string(kPanelH) +
               "\" fill=\"none\" stroke=\"#888\"/>\n";
        for (int b = 0; b < kBins; ++b) {
            const double x = px + b * bw;
            const double hi = im[b] / peak * kPanelH;
            const double hg = g[b] / peak * kPanelH;
            svg += "<rect x=\"" + std::to_string(x) + "\" y=\"" + std::to_string(base - hi) + "\" width=\"" +
                   std::to_string(bw) + "\" height=\"" + std::to_string(hi) + "\" fill=\"#d62728\" fill-opacity=\"0.5\"/>\n";
            svg += "<rect x=\"" + std::to_string(x) + "\" y=\"" + std::to_string(base - hg) + "\" width=\"" +
                   std::to_string(bw) + "\" height=\"" + std::to_string(hg) + "\" fill=\"#1f77b4\" fill-opacity=\"0.5\"/>\n";
        }
        svg += "<text x=\"" + std::to_string(px) + "\" y=\"" + std::to_string(base + 15) + "\">0</text>\n";
        svg += "<text x=\"" + std::to_string(px + kPanelW - 8) + "\" y=\"" + std::to_string(base + 15) + "\">1</text>\n";
        px += kPanelW + kPad;
    }
    svg += "<text x=\"" + std::to_string(kPad) + "\" y=\"" + std::to_string(kPanelH + 3 * kPad - 5) +
           "\"><tspan fill=\"#1f77b4\">genuine</tspan> / <tspan fill=\"#d62728\">impostor</tspan></text>\n</svg>\n";
    return svg;
}

}  // namespace

void write_evaluation(const Evaluation& ev, const fs::path& dir) {
    fs::create_directories(dir);
    std::string lines;
    for (const Trial& t : ev.trials) {
        nlohmann::json j = report::to_json(t.outcome);
        j["probe_subject"] = t.probe_subject;
        j["probe_index"] = t.probe_index;
        j["template_subject"] = t.template_subject;
        j["genuine"] = t.genuine;
        lines += j.dump() + "\n";
    }
    write_text(dir / "decisions.jsonl", lines);

    std::string csv = "threshold,far_fp,frr_fp,far_iris,frr_iris,far_fused,frr_fused\n";
    for (std::size_t i = 0; i < ev.fused.thresholds.size(); ++i) {
        char row[160];
        std::snprintf(row, sizeof row, "%.3f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f\n", ev.fused.thresholds[i],
                      ev.fingerprint.far[i], ev.fingerprint.frr[i], ev.iris.far[i], ev.iris.frr[i], ev.fused.far[i],
                      ev.fused.frr[i]);
        csv += row;
    }
    write_text(dir / "roc.csv", csv);
    write_text(dir / "summary.json", report::summary(ev).dump(2) + "\n");
    write_text(dir / "histogram.svg", histogram_svg(ev));
}

double hausdorff(const fp::MinutiaeSet& a, const fp::MinutiaeSet& b) {
    if (a.empty() && b.empty()) {
        return 0.0;
    }
    if (a.empty() || b.empty()) {
        return std::numeric_limits<double>::infinity();
    }
    const auto directed = [](const fp::MinutiaeSet& from, const fp::MinutiaeSet& to) {
        double worst = 0.0;
        for (const auto& p : from.minutiae) {
            double nearest = std::numeric_limits<double>::infinity();
            for (const auto& q : to.minutiae) {
                nearest = std::min(nearest, std::hypot(p.x - q.x, p.y - q.y));
            }
            worst = std::max(worst, nearest);
        }
        return worst;
    };
    return std::max(directed(a, b), directed(b, a));
}

double bit_disagreement(const iris::IrisCode& a, const iris::IrisCode& b) {
    if (a.size() != b.size() || a.rows != b.rows || a.columns != b.columns) {
        throw Error(ErrorCode::Dimension, "iris codes differ in size");
    }
    std::size_t differ = 0;
    std::size_t total = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!a.mask[i] && !b.mask[i]) {
            continue;
        }
        total += iris::kPlanes;
        if (a.mask[i] && b.mask[i]) {
            for (int k = 0; k < iris::kPlanes; ++k) {
                differ += ((a.planes[i] ^ b.planes[i]) >> k) & 1;
            }
        } else {
            differ += iris::kPlanes;
        }
    }
    return total == 0 ? 0.0 : static_cast<double>(differ) / static_cast<double>(total);
}

EquivItem compare_fingerprint_backends(const GrayImage& image, const PipelineConfig& config,
                                       std::vector<hw::StageReport>* reports) {
    EquivItem item;
    item.trait = Trait::Fingerprint;
    const fp::MinutiaeSet ref = reference_fingerprint(image, config).minutiae;
    const hw::Frame input = hw::frame_from_gray(image);
    const auto seq_chain = hw::fingerprint_chain(config.filter);
    const auto par_chain = hw::fingerprint_chain(config.filter);
    const hw::PipelineRun seq = run_chain(seq_chain, input, false);
    const hw::PipelineRun par = run_chain(par_chain, input, true);
    if (reports) {
        reports->insert(reports->end(), seq.stages.begin(), seq.stages.end());
    }
    const hw::HwFingerprint f = hw::decode_fingerprint(seq.output);
    const fp::MinutiaeSet hw_set = fp::extract_minutiae(f.skeleton, f.field, config.border_margin);
    item.distance = hausdorff(ref, hw_set);
    item.reference_count = ref.size();
    item.hardware_count = hw_set.size();
    item.pipelined_equal = seq.output == par.output;
    return item;
}

EquivItem compare_iris_backends(const GrayImage& eye, const PipelineConfig& config,
                                std::vector<hw::StageReport>* reports) {
    EquivItem item;
    item.trait = Trait::Iris;
    const iris::IrisCode ref = reference_iris(eye, config).code;
    const hw::Frame input = hw::frame_from_gray(eye);
    const hw::IrisChain seq_chain = hw::iris_chain(config.segment, config.enhance, config.hw_iris_enhance);
    const hw::IrisChain par_chain = hw::iris_chain(config.segment, config.enhance, config.hw_iris_enhance);
    const hw::PipelineRun seq = run_chain(seq_chain.stages, input, false);
    const hw::PipelineRun par = run_chain(par_chain.stages, input, true);
    if (reports) {
        reports->insert(reports->end(), seq.stages.begin(), seq.stages.end());
    }
    const iris::IrisCode hw_code = hw::decode_iris(seq.output);
    item.distance = bit_disagreement(ref, hw_code);
    item.reference_count = ref.size();
    item.hardware_count = hw_code.size();
    item.pipelined_equal = seq.output == par.output;
    return item;
}

EquivReport equivalence(const io::DatasetIndex& dataset, const PipelineConfig& config, int limit) {
    EquivReport report;
    std::vector<fs::path> fps;
    std::vector<fs::path> eyes;
    for (const auto& s : dataset.subjects) {
        fps.insert(fps.end(), s.fingerprints.begin(), s.fingerprints.end());
        eyes.insert(eyes.end(), s.irises.begin(), s.irises.end());
    }
    if (limit > 0) {
        fps.resize(std::min<std::size_t>(fps.size(), limit));
        eyes.resize(std::min<std::size_t>(eyes.size(), limit));
    }
    const auto record = [&](EquivItem item) {
        if (item.error.empty()) {
            double& worst = item.trait == Trait::Fingerprint ? report.max_hausdorff : report.max_disagreement;
            worst = std::max(worst, item.distance);
            report.all_pipelined_equal = report.all_pipelined_equal && item.pipelined_equal;
        }
        report.items.push_back(std::move(item));
    };
    for (std::size_t i = 0; i < fps.size(); ++i) {
        EquivItem item;
        try {
            item = compare_fingerprint_backends(io::load_gray(fps[i]), config, i == 0 ? &report.stages : nullptr);
        } catch (const Error& e) {
            item.trait = Trait::Fingerprint;
            item.error = e.what();
        }
        item.path = fps[i];
        record(std::move(item));
    }
    for (std::size_t i = 0; i < eyes.size(); ++i) {
        EquivItem item;
        try {
            item = compare_iris_backends(io::load_gray(eyes[i]), config, i == 0 ? &report.stages : nullptr);
        } catch (const Error& e) {
            item.trait = Trait::Iris;
            item.error = e.what();
        }
        item.path = eyes[i];
        record(std::move(item));
    }
    return report;
}

namespace {

GrayImage scaled(const RealImage& img, double scale, double offset) {
    GrayImage out(img.width(), img.height());
    for (std::size_t i = 0; i < img.size(); ++i) {
        out.data()[i] = static_cast<std::uint8_t>(std::clamp(std::lround(offset + scale * img.data()[i]), 0L, 255L));
    }
    return out;
}

GrayImage binary_view(const GrayImage& bin, int one_value) {
    GrayImage out(bin.width(), bin.height());
    for (std::size_t i = 0; i < bin.size(); ++i) {
        out.data()[i] = static_cast<std::uint8_t>(bin.data()[i] ? one_value : 255 - one_value);
    }
    return out;
}

void mark(GrayImage& img, int cx, int cy, std::uint8_t value) {
    for (int dy = -2; dy <= 2; ++dy) {
        for (int dx = -2; dx <= 2; ++dx) {
            const int x = cx + dx;
            const int y = cy + dy;
            if (x >= 0 && y >= 0 && x < img.width() && y < img.height() && (std::abs(dx) == 2 || std::abs(dy) == 2)) {
                img.at(x, y) = value;
            }
        }
    }
}

fs::path save_into(const fs::path& dir, const std::string& name, const GrayImage& img) {
    const fs::path p = dir / (name + ".pgm");
    io::save_gray(img, p);
    return p;
}

}  // namespace

std::vector<fs::path> dump_fingerprint_stages(const GrayImage& image, const PipelineConfig& config,
                                              const fs::path& dir) {
    fs::create_directories(dir);
    const FingerprintStages s = reference_fingerprint(image, config);
    std::vector<fs::path> out;
    out.push_back(save_into(dir, "fp_0_input", image));
    out.push_back(save_into(dir, "fp_1_normalized", scaled(s.normalized.values, 40.0, 128.0)));
    out.push_back(save_into(dir, "fp_2_mask", scaled(s.normalized.mask, 255.0, 0.0)));
    out.push_back(save_into(dir, "fp_3_orientation", scaled(s.field.theta, 255.0 / std::numbers::pi, 0.0)));
    out.push_back(save_into(dir, "fp_4_coherence", scaled(s.field.coherence, 255.0, 0.0)));
    out.push_back(save_into(dir, "fp_5_response", scaled(s.response, 40.0, 128.0)));
    out.push_back(save_into(dir, "fp_6_binary", binary_view(s.binary, 255)));
    out.push_back(save_into(dir, "fp_7_skeleton", binary_view(s.skeleton, 255)));
    GrayImage overlay = image;
    for (const auto& m : s.minutiae.minutiae) {
        mark(overlay, m.x, m.y, m.kind == fp::MinutiaKind::Termination ? 255 : 0);
    }
    out.push_back(save_into(dir, "fp_8_minutiae", overlay));
    return out;
}

std::vector<fs::path> dump_iris_stages(const GrayImage& eye, const PipelineConfig& config, const fs::path& dir) {
    fs::create_directories(dir);
    const IrisStages s = reference_iris(eye, config);
    std::vector<fs::path> out;
    out.push_back(save_into(dir, "iris_0_input", eye));
    out.push_back(save_into(dir, "iris_1_dark_mask", binary_view(s.mask, 0)));
    GrayImage overlay = eye;
    for (int a = 0; a < 720; ++a) {
        const double t = a * std::numbers::pi / 360.0;
        for (const double r : {s.pupil.radius, s.unwrapped.inner_radius + *s.unwrapped.limbic_row * s.unwrapped.radial_scale}) {
            const int x = static_cast<int>(std::lround(s.pupil.cx + r * std::cos(t)));
            const int y = static_cast<int>(std::lround(s.pupil.cy + r * std::sin(t)));
            if (x >= 0 && y >= 0 && x < eye.width() && y < eye.height()) {
                overlay.at(x, y) = 255;
            }
        }
    }
    out.push_back(save_into(dir, "iris_2_boundaries", overlay));
    out.push_back(save_into(dir, "iris_3_unwrapped", s.unwrapped.values));
    out.push_back(save_into(dir, "iris_4_enhanced", s.enhanced.values));
    for (int k = 1; k <= iris::kPlanes; ++k) {
        GrayImage plane(s.code.columns, s.code.rows);
        for (std::size_t i = 0; i < s.code.size(); ++i) {
            plane.data()[i] = static_cast<std::uint8_t>(s.code.mask[i] ? s.code.bit(i, k) * 255 : 128);
        }
        out.push_back(save_into(dir, "iris_5_plane" + std::to_string(k), plane));
    }
    return out;
}

}  // namespace mbio::harness
