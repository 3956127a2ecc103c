#include "mbio/report.hpp"

#include <algorithm>
#include <cmath>

namespace mbio::report {

using nlohmann::json;

namespace {

json trait_json(const harness::TraitOutcome& t) {
    json j;
    j["failed"] = t.failed();
    j["similarity"] = t.similarity();
    if (t.score) {
        j["raw"] = t.score->value;
        j["polarity"] = t.score->polarity == Polarity::Similarity ? "similarity" : "dissimilarity";
    }
    if (!t.error.empty()) {
        j["error"] = t.error;
    }
    return j;
}

// Operating point at a threshold, read off the sweep.
std::pair<double, double> at_threshold(const harness::EvalResult& r, double t) {
    if (r.thresholds.empty()) {
        return {0.0, 0.0};
    }
    const auto it = std::lower_bound(r.thresholds.begin(), r.thresholds.end(), t - 1e-12);
    const std::size_t i = std::min<std::size_t>(it - r.thresholds.begin(), r.thresholds.size() - 1);
    return {r.far[i], r.frr[i]};
}

}  // namespace

json to_json(const harness::VerifyOutcome& o) {
    json j;
    j["fused_score"] = o.decision.fused_score;
    j["accept"] = o.decision.accept;
    j["fp_component"] = o.decision.fp_component;
    j["iris_component"] = o.decision.iris_component;
    j["warning"] = o.warning();
    j["fingerprint"] = trait_json(o.fingerprint);
    j["iris"] = trait_json(o.iris);
    return j;
}

json to_json(const hw::StageReport& s) {
    return {{"name", s.name},
            {"latency_samples", s.latency_samples},
            {"throughput", s.throughput},
            {"busy_seconds", s.busy_seconds},
            {"samples_in", s.samples_in},
            {"samples_out", s.samples_out}};
}

json to_json(const std::vector<hw::StageReport>& stages) {
    json arr = json::array();
    for (const auto& s : stages) {
        arr.push_back(to_json(s));
    }
    return arr;
}

json to_json(const harness::EvalResult& r, double threshold, bool full) {
    const auto [far, frr] = at_threshold(r, threshold);
    json j{{"eer", r.eer},
           {"eer_threshold", r.eer_threshold},
           {"threshold", threshold},
           {"far", far},
           {"frr", frr},
           {"genuine_trials", r.genuine.size()},
           {"impostor_trials", r.impostor.size()}};
    if (full) {
        j["thresholds"] = r.thresholds;
        j["far_curve"] = r.far;
        j["frr_curve"] = r.frr;
        j["genuine"] = r.genuine;
        j["impostor"] = r.impostor;
    }
    return j;
}

json to_json(const harness::EquivReport& r) {
    json items = json::array();
    for (const auto& it : r.items) {
        json j{{"path", it.path.string()},
               {"trait", it.trait == Trait::Fingerprint ? "fingerprint" : "iris"},
               {"reference_count", it.reference_count},
               {"hardware_count", it.hardware_count},
               {"pipelined_equal", it.pipelined_equal}};
        j[it.trait == Trait::Fingerprint ? "hausdorff_px" : "bit_disagreement"] =
            std::isfinite(it.distance) ? json(it.distance) : json("inf");
        if (!it.error.empty()) {
            j["error"] = it.error;
        }
        items.push_back(std::move(j));
    }
    return {{"max_hausdorff_px", std::isfinite(r.max_hausdorff) ? json(r.max_hausdorff) : json("inf")},
            {"max_bit_disagreement", r.max_disagreement},
            {"pipelined_equal", r.all_pipelined_equal},
            {"items", items},
            {"stages", to_json(r.stages)}};
}

json summary(const harness::Evaluation& e) {
    const double t = e.fusion.threshold;
    return {{"fingerprint", to_json(e.fingerprint, t)},
            {"iris", to_json(e.iris, t)},
            {"fused", to_json(e.fused, t)},
            {"fusion",
             {{"w_fp", e.fusion.w_fp},
              {"w_iris", e.fusion.w_iris},
              {"threshold", e.fusion.threshold},
              {"normalization", e.fusion.normalization == fusion::Normalization::None ? "none" : "min-max"},
              {"fp_bounds", {e.fusion.fp_bounds.lo, e.fusion.fp_bounds.hi}},
              {"iris_bounds", {e.fusion.iris_bounds.lo, e.fusion.iris_bounds.hi}}}},
            {"trials", e.trials.size()},
            {"seconds", e.seconds}};
}

}  // namespace mbio::report
