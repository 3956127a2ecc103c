#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "mbio/config.hpp"
#include "mbio/harness.hpp"
#include "mbio/report.hpp"
#include "mbio/synth.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitPipeline = 3;

struct Common {
    std::string backend;
    std::string config;
    std::string dataset;
    std::string out;
    std::string report;
    std::vector<std::string> overrides;
};

mbio::RunConfig resolve(const Common& c) {
    mbio::RunConfig run;
    if (!c.config.empty()) {
        run = mbio::load_config(c.config);
    }
    std::string text;
    for (const auto& kv : c.overrides) {
        text += kv + "\n";
    }
    run = mbio::parse_config(text, run);
    if (!c.backend.empty()) {
        run.pipeline.backend = mbio::parse_backend(c.backend);
    }
    if (!c.dataset.empty()) {
        run.dataset_root = c.dataset;
    }
    return run;
}

mbio::io::DatasetIndex dataset_of(const mbio::RunConfig& run) {
    if (run.dataset_root.empty()) {
        throw mbio::Error(mbio::ErrorCode::Config, "no dataset: pass --dataset or set cli.dataset_root");
    }
    return mbio::io::scan_dataset(run.dataset_root);
}

void emit(const nlohmann::json& j, const std::string& report_path) {
    std::cout << j.dump(2) << "\n";
    if (!report_path.empty()) {
        std::FILE* f = std::fopen(report_path.c_str(), "wb");
        if (!f) {
            throw mbio::Error(mbio::ErrorCode::Io, "cannot write " + report_path);
        }
        const std::string text = j.dump(2) + "\n";
        std::fwrite(text.data(), 1, text.size(), f);
        std::fclose(f);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multimodal fingerprint + iris recognition with a reference and a hardware-model backend"};
    app.require_subcommand(1);

    Common common;
    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--backend", common.backend, "reference or hardware-model")
            ->check(CLI::IsMember({"reference", "hardware-model"}));
        sub->add_option("--config", common.config, "module.key = value file")->check(CLI::ExistingFile);
        sub->add_option("--set", common.overrides, "extra module.key=value setting (repeatable)");
    };

    auto* enroll = app.add_subcommand("enroll", "build and store templates");
    add_common(enroll);
    std::string subject;
    enroll->add_option("--dataset", common.dataset, "dataset root");
    enroll->add_option("--subject", subject, "enroll only this subject");
    enroll->add_option("--out", common.out, "template directory")->required();

    auto* verify = app.add_subcommand("verify", "score one probe pair against a template");
    add_common(verify);
    std::string probe_fp, probe_iris, template_path;
    verify->add_option("--fp", probe_fp, "probe fingerprint image")->required();
    verify->add_option("--iris", probe_iris, "probe eye image")->required();
    verify->add_option("--template", template_path, "template file")->required();
    verify->add_option("--report", common.report, "also write the decision JSON here");

    auto* evaluate = app.add_subcommand("evaluate", "FAR/FRR/EER over a dataset");
    add_common(evaluate);
    evaluate->add_option("--dataset", common.dataset, "dataset root");
    evaluate->add_option("--out", common.out, "artifact directory (decisions, ROC, summary, histogram)");
    evaluate->add_option("--report", common.report, "also write the summary JSON here");

    auto* segment = app.add_subcommand("segment", "dump per-stage debug images");
    add_common(segment);
    std::string image;
    std::string trait = "iris";
    segment->add_option("--image", image, "input image")->required()->check(CLI::ExistingFile);
    segment->add_option("--trait", trait, "fp or iris")->check(CLI::IsMember({"fp", "iris"}));
    segment->add_option("--out", common.out, "output directory")->required();

    auto* equiv = app.add_subcommand("equiv", "compare the reference and hardware-model backends");
    add_common(equiv);
    int limit = 0;
    equiv->add_option("--dataset", common.dataset, "dataset root");
    equiv->add_option("--limit", limit, "images per trait (0 = all)");
    equiv->add_option("--report", common.report, "also write the report JSON here");

    auto* synth = app.add_subcommand("synth", "generate a synthetic multimodal dataset");
    mbio::synth::DatasetSpec spec;
    synth->add_option("--out", common.out, "dataset root")->required();
    synth->add_option("--subjects", spec.subjects, "subject count")->check(CLI::Range(1, 99));
    synth->add_option("--fingerprints", spec.fingerprints, "impressions per subject")->check(CLI::Range(1, 50));
    synth->add_option("--irises", spec.irises, "eye captures per subject")->check(CLI::Range(1, 50));
    synth->add_option("--seed", spec.seed, "generator seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (synth->parsed()) {
            mbio::synth::write_dataset(common.out, spec);
            emit({{"dataset", common.out}, {"subjects", spec.subjects}, {"seed", spec.seed}}, "");
            return kExitOk;
        }
        const mbio::RunConfig run = resolve(common);
        const auto& pipeline = run.pipeline;

        if (enroll->parsed()) {
            const auto index = dataset_of(run);
            fs::create_directories(common.out);
            nlohmann::json written = nlohmann::json::array();
            for (const auto& s : index.subjects) {
                if (!subject.empty() && s.id != subject) {
                    continue;
                }
                const auto record = mbio::harness::enroll(s, pipeline);
                const fs::path path = fs::path(common.out) / (s.id + ".tpl");
                mbio::io::write_template(record, path);
                written.push_back({{"subject", s.id},
                                   {"path", path.string()},
                                   {"minutiae", record.fingerprint.size()},
                                   {"iris_samples", record.iris.size()}});
            }
            if (!subject.empty() && written.empty()) {
                throw mbio::Error(mbio::ErrorCode::MissingFile, "unknown subject: " + subject);
            }
            emit(written, common.report);
        } else if (verify->parsed()) {
            const auto record = mbio::io::read_template(template_path);
            const auto outcome = mbio::harness::verify(probe_fp, probe_iris, record, pipeline);
            nlohmann::json j = mbio::report::to_json(outcome);
            j["template_subject"] = record.subject_id;
            j["backend"] = std::string(mbio::backend_name(pipeline.backend));
            emit(j, common.report);
        } else if (evaluate->parsed()) {
            const auto ev = mbio::harness::evaluate(dataset_of(run), run);
            if (!common.out.empty()) {
                mbio::harness::write_evaluation(ev, common.out);
            }
            nlohmann::json j = mbio::report::summary(ev);
            j["backend"] = std::string(mbio::backend_name(pipeline.backend));
            emit(j, common.report);
        } else if (segment->parsed()) {
            const auto img = mbio::io::load_gray(image);
            const auto files = trait == "fp" ? mbio::harness::dump_fingerprint_stages(img, pipeline, common.out)
                                             : mbio::harness::dump_iris_stages(img, pipeline, common.out);
            nlohmann::json j = nlohmann::json::array();
            for (const auto& f : files) {
                j.push_back(f.string());
            }
            emit(j, "");
        } else if (equiv->parsed()) {
            const auto rep = mbio::harness::equivalence(dataset_of(run), pipeline, limit);
            emit(mbio::report::to_json(rep), common.report);
        }
    } catch (const mbio::Error& e) {
        std::cerr << "error [" << mbio::to_string(e.code()) << "]: " << e.what() << "\n";
        return mbio::is_pipeline_error(e.code()) ? kExitPipeline : kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitOk;
}
