#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "qoi/assessor.hpp"
#include "qoi/classifier.hpp"
#include "qoi/config.hpp"
#include "qoi/error.hpp"
#include "qoi/indicator_model.hpp"
#include "qoi/synth.hpp"
#include "qoi/text.hpp"
#include "qoi/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Exit contract: 0 success, 1 internal, 2 input/usage, 3 model/train.
int exit_code_for(qoi::ErrorCode code) {
    switch (code) {
        case qoi::ErrorCode::train_error:
        case qoi::ErrorCode::singular_covariance:
        case qoi::ErrorCode::degenerate_centroids:
            return 3;
        default:
            return 2;
    }
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) qoi::raise(qoi::ErrorCode::io_error, "cannot open input file: " + path);
    return in;
}

std::ofstream open_output(const fs::path& path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path);
    if (!out) qoi::raise(qoi::ErrorCode::io_error, "cannot open output file: " + path.string());
    return out;
}

qoi::AssessorConfig load_config_or_defaults(const std::string& path) {
    qoi::AssessorConfig config = qoi::AssessorConfig::defaults();
    if (!path.empty()) {
        std::ifstream in = open_input(path);
        config = qoi::load_config(in);
    }
    qoi::apply_env_overrides(config);
    return config;
}

void write_manifest(const fs::path& out_dir, const std::string& command, std::uint64_t seed,
                    const std::map<std::string, std::string>& inputs,
                    const std::vector<std::string>& outputs) {
    json j;
    j["command"] = command;
    j["version"] = qoi::kVersion;
    j["seed"] = seed;
    j["inputs"] = json::object();
    for (const auto& [key, value] : inputs) j["inputs"][key] = value;
    j["outputs"] = outputs;
    std::ofstream out = open_output(out_dir / "manifest.json");
    out << j.dump(2) << '\n';
}

// Deterministic stratified split: per class, shuffle then keep the first
// keep_fraction (always >= 2 so the kept part stays trainable; the held-out
// part may be empty for tiny classes).
struct Split {
    std::vector<qoi::LabeledSample> kept;
    std::vector<qoi::LabeledSample> held;
};

Split stratified_split(const qoi::ReferenceDataset& reference, double keep_fraction,
                       qoi::Rng& rng) {
    Split split;
    for (const std::string& label : reference.label_set.names()) {
        std::vector<std::size_t> indices;
        for (std::size_t i = 0; i < reference.samples.size(); ++i) {
            if (reference.samples[i].declared_label == label) indices.push_back(i);
        }
        for (std::size_t i = indices.size(); i > 1; --i)
            std::swap(indices[i - 1], indices[rng.next_index(i)]);
        auto keep = static_cast<std::size_t>(keep_fraction * static_cast<double>(indices.size()));
        keep = std::max<std::size_t>(keep, 2);
        keep = std::min(keep, indices.size());
        for (std::size_t i = 0; i < indices.size(); ++i) {
            const auto& sample = reference.samples[indices[i]];
            (i < keep ? split.kept : split.held).push_back(sample);
        }
    }
    return split;
}

int cmd_train(const std::string& reference_path, const std::string& config_path,
              const std::string& out_path, std::uint64_t seed) {
    std::ifstream in = open_input(reference_path);
    qoi::ReferenceDataset reference = qoi::load_reference(in);
    qoi::AssessorConfig config = load_config_or_defaults(config_path);

    // 90/10 holdout accuracy as a sanity check before the final full fit.
    qoi::Rng rng(qoi::derive_seed(seed, "holdout"));
    Split split = stratified_split(reference, 0.9, rng);
    if (!split.held.empty()) {
        qoi::ClassModel probe = qoi::train(qoi::build_reference(split.kept), config.mode, config.ridge);
        std::size_t hits = 0;
        for (const auto& sample : split.held) {
            if (qoi::fold_case(qoi::predict(probe, sample.features).label) ==
                qoi::fold_case(sample.declared_label))
                ++hits;
        }
        double accuracy = static_cast<double>(hits) / static_cast<double>(split.held.size());
        std::cout << "holdout accuracy: " << qoi::format_double(accuracy) << " ("
                  << hits << "/" << split.held.size() << ")\n";
    } else {
        std::cout << "holdout accuracy: n/a (classes too small to hold out)\n";
    }

    qoi::ClassModel model = qoi::train(reference, config.mode, config.ridge);
    if (config.mode == qoi::ClassifierMode::lda) {
        std::cout << "analytic misclassification rate: "
                  << qoi::format_double(qoi::misclassification_rate_analytic(model)) << '\n';
    }
    std::ofstream out = open_output(out_path);
    qoi::save_model(out, model);
    std::cout << "model written: " << out_path << " (" << model.num_classes() << " classes, d="
              << model.dimension() << ")\n";
    return 0;
}

int cmd_assess(const std::string& reference_path, const std::string& model_path,
               const std::string& batches_path, const std::string& config_path,
               const std::string& out_dir_arg, std::uint64_t seed, int assessors_override) {
    qoi::AssessorConfig config = load_config_or_defaults(config_path);
    if (assessors_override > 0) config.assessors = assessors_override;
    config.validate();

    std::ifstream batches_in = open_input(batches_path);
    std::vector<qoi::IndicatorBatch> batches = qoi::parse_samples(batches_in);
    if (batches.empty())
        qoi::raise(qoi::ErrorCode::empty_batch, "assess: no sample records in " + batches_path);

    std::vector<qoi::ScoreReport> reports;
    if (!model_path.empty()) {
        if (config.assessors > 1)
            qoi::raise(qoi::ErrorCode::usage_error,
                       "multiple assessors need --reference (each trains its own model)");
        std::ifstream model_in = open_input(model_path);
        qoi::ClassModel model = qoi::load_model(model_in);
        reports = qoi::assess_with_model(model, batches, config);
    } else {
        std::ifstream reference_in = open_input(reference_path);
        qoi::ReferenceDataset reference = qoi::load_reference(reference_in);
        if (config.assessors == 1) {
            reports = qoi::assess_community(reference, batches, config);
        } else {
            // Each assessor trains on its own 90% stratified view of the
            // reference, then verdicts are combined by majority vote.
            std::vector<std::vector<qoi::ScoreReport>> per_assessor;
            for (int a = 0; a < config.assessors; ++a) {
                qoi::Rng rng(qoi::derive_seed(seed, "assessor/" + std::to_string(a)));
                Split split = stratified_split(reference, 0.9, rng);
                qoi::ClassModel model =
                    qoi::train(qoi::build_reference(split.kept), config.mode, config.ridge);
                per_assessor.push_back(qoi::assess_with_model(model, batches, config));
            }
            reports = qoi::majority_vote(per_assessor);
            qoi::apply_flags(reports, config.thresholds);
        }
    }

    const fs::path out_dir(out_dir_arg);
    {
        std::ofstream out = open_output(out_dir / "report.csv");
        qoi::write_report_csv(out, reports);
    }
    {
        std::ofstream out = open_output(out_dir / "breakdown.csv");
        qoi::write_breakdown_csv(out, reports);
    }
    std::map<std::string, std::string> inputs = {{"batches", batches_path},
                                                 {"config", config_path.empty() ? "defaults" : config_path}};
    if (!model_path.empty()) inputs["model"] = model_path;
    if (!reference_path.empty()) inputs["reference"] = reference_path;
    write_manifest(out_dir, "assess", seed, inputs, {"report.csv", "breakdown.csv"});

    std::size_t flagged = 0;
    for (const auto& report : reports) flagged += report.free_rider ? 1 : 0;
    std::cout << "assessed " << reports.size() << " contributors (" << flagged
              << " flagged), report: " << (out_dir / "report.csv").string() << '\n';
    return 0;
}

int cmd_simulate(const std::string& scenario_path, std::uint64_t seed, const std::string& out_dir_arg) {
    qoi::Scenario scenario;
    if (scenario_path.empty()) {
        scenario = qoi::default_scenario();
    } else {
        std::ifstream in = open_input(scenario_path);
        scenario = qoi::load_scenario(in);
    }
    qoi::Community community = qoi::gen_community(scenario, seed);

    const fs::path out_dir(out_dir_arg);
    {
        std::ofstream out = open_output(out_dir / "reference.jsonl");
        qoi::write_reference(out, community.reference);
    }
    {
        std::ofstream out = open_output(out_dir / "batches.jsonl");
        qoi::write_samples(out, community.batches);
    }
    {
        // Assessment config wired to this world: per-family relevance weights
        // from the category tiers, everything else at defaults.
        qoi::AssessorConfig config = qoi::AssessorConfig::defaults();
        config.relevance = qoi::derive_relevance_weights(scenario.world);
        std::ofstream out = open_output(out_dir / "config.json");
        qoi::save_config(out, config);
    }
    {
        std::ofstream out = open_output(out_dir / "scenario.json");
        qoi::save_scenario(out, scenario);
    }
    write_manifest(out_dir, "simulate", seed,
                   {{"scenario", scenario_path.empty() ? "builtin-default" : scenario_path}},
                   {"reference.jsonl", "batches.jsonl", "config.json", "scenario.json"});

    std::size_t total = 0;
    for (const auto& batch : community.batches) total += batch.samples.size();
    std::cout << "reference: " << community.reference.total() << " samples, "
              << community.reference.label_set.size() << " classes\n"
              << "batches: " << community.batches.size() << " contributors, " << total
              << " samples\n"
              << "files written to " << out_dir.string() << '\n';
    return 0;
}

int cmd_mc_validate(const std::string& model_path, std::uint64_t trials, std::uint64_t seed) {
    if (trials == 0) qoi::raise(qoi::ErrorCode::usage_error, "--trials must be >= 1");
    std::ifstream in = open_input(model_path);
    qoi::ClassModel model = qoi::load_model(in);
    double analytic = qoi::misclassification_rate_analytic(model);
    qoi::EmpiricalRate empirical = qoi::misclassification_rate_empirical(model, trials, seed);
    double gap = std::abs(analytic - empirical.rate);
    std::cout << "classes: " << model.num_classes() << ", dimension: " << model.dimension()
              << ", trials: " << trials << '\n'
              << "analytic  P(e): " << qoi::format_double(analytic) << '\n'
              << "empirical P(e): " << qoi::format_double(empirical.rate)
              << " (std error " << qoi::format_double(empirical.std_error) << ")\n"
              << "|gap|: " << qoi::format_double(gap);
    if (empirical.std_error > 0.0)
        std::cout << " (" << qoi::format_double(gap / empirical.std_error) << " std errors)";
    std::cout << '\n';
    return 0;
}

// Minimal CSV reader for our own report files (quotes only around fields
// that need them, as written by csv_field).
std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                field.push_back('"');
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                field.push_back(c);
            }
        } else if (c == '"' && field.empty()) {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else {
            field.push_back(c);
        }
    }
    fields.push_back(std::move(field));
    return fields;
}

int cmd_report(const std::string& in_path, const std::string& mode, const std::string& out_path) {
    std::ifstream in = open_input(in_path);
    std::string header;
    if (!std::getline(in, header))
        qoi::raise(qoi::ErrorCode::usage_error, "report: empty input: " + in_path);
    std::vector<std::string> columns = split_csv_line(header);
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < columns.size(); ++i) index[columns[i]] = i;
    for (const char* required : {"contributor_id", "C", "R", "U", "N", "QoI", "volume"}) {
        if (index.find(required) == index.end())
            qoi::raise(qoi::ErrorCode::usage_error,
                       std::string("report: input is missing column '") + required + "'");
    }

    std::ostringstream body;
    std::size_t rows = 0;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> fields = split_csv_line(line);
        if (fields.size() < columns.size())
            qoi::raise(qoi::ErrorCode::parse_error, "report: short row: " + line);
        if (fields[index["QoI"]].empty()) continue;  // unscored contributor
        body << qoi::csv_field(fields[index["contributor_id"]]);
        if (mode == "qoi-vs-volume") {
            body << ',' << fields[index["QoI"]] << ',' << fields[index["volume"]];
        } else {
            body << ',' << fields[index["C"]] << ',' << fields[index["R"]] << ','
                 << fields[index["U"]] << ',' << fields[index["N"]];
        }
        body << '\n';
        ++rows;
    }
    if (rows == 0) qoi::raise(qoi::ErrorCode::usage_error, "report: no scored rows in " + in_path);

    std::string header_out = mode == "qoi-vs-volume" ? "contributor_id,QoI,volume"
                                                     : "contributor_id,C,R,U,N";
    if (out_path.empty()) {
        std::cout << header_out << '\n' << body.str();
    } else {
        std::ofstream out = open_output(out_path);
        out << header_out << '\n' << body.str();
        std::cout << "comparison written: " << out_path << " (" << rows << " rows)\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"qoi: quality-of-indicators scoring for threat-intel sharing communities"};
    app.set_version_flag("--version", std::string(qoi::kVersion));
    app.require_subcommand(1);

    std::string reference_path, model_path, batches_path, config_path, scenario_path;
    std::string out_path, in_path, mode = "qoi-vs-volume";
    std::uint64_t seed = 1;
    std::uint64_t trials = 100000;
    int assessors = 0;

    CLI::App* train = app.add_subcommand("train", "Train a classifier from a reference dataset");
    train->add_option("--reference", reference_path, "Reference dataset (JSONL)")->required();
    train->add_option("--config", config_path, "Assessor config (JSON)");
    train->add_option("--out", out_path, "Output model path (JSON)")->required();
    train->add_option("--seed", seed, "Seed for the holdout split");

    CLI::App* assess = app.add_subcommand("assess", "Score a community of contributor batches");
    assess->add_option("--reference", reference_path, "Reference dataset (JSONL)");
    assess->add_option("--model", model_path, "Pre-trained model (JSON)");
    assess->add_option("--batches", batches_path, "Contributor submissions (JSONL)")->required();
    assess->add_option("--config", config_path, "Assessor config (JSON)");
    assess->add_option("--out", out_path, "Output directory")->required();
    assess->add_option("--seed", seed, "Seed for per-assessor reference views");
    assess->add_option("--assessors", assessors, "Override the configured assessor count");

    CLI::App* simulate = app.add_subcommand("simulate", "Generate a synthetic community");
    simulate->add_option("--scenario", scenario_path, "Scenario file (JSON; omit for the default)");
    simulate->add_option("--seed", seed, "Master seed");
    simulate->add_option("--out", out_path, "Output directory")->required();

    CLI::App* mc = app.add_subcommand("mc-validate",
                                      "Compare analytic vs Monte Carlo misclassification rates");
    mc->add_option("--model", model_path, "Trained model (JSON)")->required();
    mc->add_option("--trials", trials, "Monte Carlo trials");
    mc->add_option("--seed", seed, "Sampling seed");

    CLI::App* report = app.add_subcommand("report", "Reshape a report CSV for comparison");
    report->add_option("--in", in_path, "Input report.csv")->required();
    report->add_option("--mode", mode, "qoi-vs-volume | per-metric")
        ->check(CLI::IsMember({"qoi-vs-volume", "per-metric"}));
    report->add_option("--out", out_path, "Output CSV (stdout when omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (train->parsed()) return cmd_train(reference_path, config_path, out_path, seed);
        if (assess->parsed()) {
            if (reference_path.empty() == model_path.empty())
                qoi::raise(qoi::ErrorCode::usage_error,
                           "assess needs exactly one of --reference or --model");
            return cmd_assess(reference_path, model_path, batches_path, config_path, out_path,
                              seed, assessors);
        }
        if (simulate->parsed()) return cmd_simulate(scenario_path, seed, out_path);
        if (mc->parsed()) return cmd_mc_validate(model_path, trials, seed);
        if (report->parsed()) return cmd_report(in_path, mode, out_path);
    } catch (const qoi::QoiError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
