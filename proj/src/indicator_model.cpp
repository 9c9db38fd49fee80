#include "qoi/indicator_model.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <utility>

#include <nlohmann/json.hpp>

#include "qoi/error.hpp"
#include "qoi/text.hpp"

namespace qoi {

namespace {

using nlohmann::json;

std::string canonical_serialization(std::span<const double> features) {
    std::string out;
    out.reserve(features.size() * 12);
    for (std::size_t i = 0; i < features.size(); ++i) {
        if (!std::isfinite(features[i])) {
            raise(ErrorCode::non_finite_feature,
                  "feature " + std::to_string(i) + " is not finite");
        }
        if (i) out += '\x1f';
        out += format_double(features[i]);
    }
    return out;
}

SampleKey sha256(std::string_view data) {
    SampleKey key;
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), key.digest.data(), &len, EVP_sha256(), nullptr) != 1 ||
        len != key.digest.size()) {
        raise(ErrorCode::io_error, "SHA-256 digest failed");
    }
    return key;
}

[[noreturn]] void line_error(std::size_t line_no, const std::string& what) {
    raise(ErrorCode::parse_error, "line " + std::to_string(line_no) + ": " + what);
}

std::string require_string(const json& record, const char* field, std::size_t line_no) {
    auto it = record.find(field);
    if (it == record.end() || !it->is_string()) {
        line_error(line_no, std::string("missing or non-string field '") + field + "'");
    }
    return it->get<std::string>();
}

void append_record(std::ostream& stream, const IndicatorBatch& batch, const LabeledSample& sample) {
    stream << "{\"contributor_id\":" << json(batch.contributor_id).dump()
           << ",\"sample_id\":" << json(sample.sample_id).dump()
           << ",\"label\":" << json(sample.declared_label).dump()
           << ",\"label_string\":" << json(sample.label_string).dump()
           << ",\"features\":[";
    for (std::size_t i = 0; i < sample.features.size(); ++i) {
        if (i) stream << ',';
        stream << format_double(sample.features[i]);
    }
    stream << "]}\n";
}

}  // namespace

std::string SampleKey::hex() const {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(digest.size() * 2);
    for (unsigned char b : digest) {
        out += digits[b >> 4];
        out += digits[b & 0xf];
    }
    return out;
}

SampleKey derive_key(std::span<const double> features) {
    return sha256(canonical_serialization(features));
}

LabeledSample make_sample(std::vector<double> features, std::string declared_label,
                          std::string label_string, std::string sample_id) {
    LabeledSample sample;
    sample.key = derive_key(features);
    sample.features = std::move(features);
    sample.declared_label = std::move(declared_label);
    sample.label_string = label_string.empty() ? sample.declared_label : std::move(label_string);
    sample.sample_id = sample_id.empty() ? sample.key.hex() : std::move(sample_id);
    return sample;
}

LabelSet::LabelSet(std::vector<std::string> labels) : labels_(std::move(labels)) {
    if (labels_.empty()) raise(ErrorCode::config_error, "label set must not be empty");
    folded_.reserve(labels_.size());
    std::set<std::string> seen;
    for (const auto& label : labels_) {
        auto folded = fold_case(label);
        if (!seen.insert(folded).second) {
            raise(ErrorCode::config_error, "duplicate label '" + label + "' in label set");
        }
        folded_.push_back(std::move(folded));
    }
}

std::optional<std::size_t> LabelSet::index_of(std::string_view label) const {
    const auto folded = fold_case(label);
    for (std::size_t i = 0; i < folded_.size(); ++i) {
        if (folded_[i] == folded) return i;
    }
    return std::nullopt;
}

std::vector<IndicatorBatch> parse_samples(std::istream& stream) {
    std::vector<IndicatorBatch> batches;
    std::map<std::string, std::size_t> batch_index;
    std::size_t line_no = 0;
    std::size_t dimension = 0;
    std::string line;

    while (std::getline(stream, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;

        const json record = json::parse(line, nullptr, false);
        if (record.is_discarded() || !record.is_object()) {
            line_error(line_no, "invalid JSON record");
        }

        const auto contributor_id = require_string(record, "contributor_id", line_no);
        if (contributor_id.empty()) line_error(line_no, "contributor_id must not be empty");
        const auto label = require_string(record, "label", line_no);

        auto features_it = record.find("features");
        if (features_it == record.end() || !features_it->is_array() || features_it->empty()) {
            line_error(line_no, "missing or empty 'features' array");
        }
        std::vector<double> features;
        features.reserve(features_it->size());
        for (const auto& value : *features_it) {
            if (!value.is_number()) line_error(line_no, "non-numeric feature value");
            features.push_back(value.get<double>());
        }
        if (dimension == 0) {
            dimension = features.size();
        } else if (features.size() != dimension) {
            line_error(line_no, "feature dimension " + std::to_string(features.size()) +
                                    " does not match dimension " + std::to_string(dimension) +
                                    " of earlier records");
        }

        std::string label_string;
        if (auto it = record.find("label_string"); it != record.end()) {
            if (!it->is_string()) line_error(line_no, "label_string must be a string");
            label_string = it->get<std::string>();
        }
        std::string sample_id;
        if (auto it = record.find("sample_id"); it != record.end()) {
            if (!it->is_string()) line_error(line_no, "sample_id must be a string");
            sample_id = it->get<std::string>();
        }

        LabeledSample sample;
        try {
            sample = make_sample(std::move(features), label, label_string, sample_id);
        } catch (const QoiError& err) {
            line_error(line_no, err.what());
        }

        auto [it, inserted] = batch_index.try_emplace(contributor_id, batches.size());
        if (inserted) batches.push_back(IndicatorBatch{contributor_id, {}});
        batches[it->second].samples.push_back(std::move(sample));
    }
    return batches;
}

void write_samples(std::ostream& stream, std::span<const IndicatorBatch> batches) {
    for (const auto& batch : batches) {
        for (const auto& sample : batch.samples) {
            append_record(stream, batch, sample);
        }
    }
}

ReferenceDataset build_reference(std::vector<LabeledSample> samples) {
    if (samples.empty()) raise(ErrorCode::parse_error, "reference dataset is empty");

    std::vector<std::string> labels;
    std::map<std::string, std::size_t> index;
    for (const auto& sample : samples) {
        const auto folded = fold_case(sample.declared_label);
        if (index.try_emplace(folded, labels.size()).second) {
            labels.push_back(sample.declared_label);
        }
    }

    ReferenceDataset reference;
    reference.label_set = LabelSet(labels);
    reference.class_counts.assign(labels.size(), 0);
    for (const auto& sample : samples) {
        reference.class_counts[index.at(fold_case(sample.declared_label))] += 1;
    }
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (reference.class_counts[i] < 2) {
            raise(ErrorCode::train_error,
                  "class '" + labels[i] + "' has fewer than 2 reference samples");
        }
    }
    reference.samples = std::move(samples);
    return reference;
}

ReferenceDataset load_reference(std::istream& stream) {
    auto batches = parse_samples(stream);
    std::vector<LabeledSample> samples;
    for (auto& batch : batches) {
        for (auto& sample : batch.samples) samples.push_back(std::move(sample));
    }
    return build_reference(std::move(samples));
}

void write_reference(std::ostream& stream, const ReferenceDataset& reference) {
    IndicatorBatch batch{"reference", reference.samples};
    const IndicatorBatch view[] = {batch};
    write_samples(stream, view);
}

ValidatedBatch validate_batch(const IndicatorBatch& batch, std::size_t model_dim,
                              const LabelSet* known_labels) {
    if (batch.contributor_id.empty()) {
        raise(ErrorCode::parse_error, "contributor_id must not be empty");
    }
    if (batch.samples.empty()) {
        raise(ErrorCode::empty_batch, "batch from '" + batch.contributor_id + "' is empty");
    }

    ValidatedBatch result;
    result.batch.contributor_id = batch.contributor_id;
    result.batch.samples.reserve(batch.samples.size());

    std::set<SampleKey> seen;
    std::map<std::string, std::size_t> unknown_labels;
    for (const auto& sample : batch.samples) {
        if (sample.features.size() != model_dim) {
            raise(ErrorCode::dimension_mismatch,
                  "sample '" + sample.sample_id + "' has dimension " +
                      std::to_string(sample.features.size()) + ", model expects " +
                      std::to_string(model_dim));
        }
        for (double v : sample.features) {
            if (!std::isfinite(v)) {
                raise(ErrorCode::non_finite_feature,
                      "sample '" + sample.sample_id + "' has a non-finite feature");
            }
        }
        if (known_labels && !known_labels->index_of(sample.declared_label)) {
            unknown_labels[sample.declared_label] += 1;
        }
        if (!seen.insert(sample.key).second) {
            result.duplicates_removed += 1;
            continue;
        }
        result.batch.samples.push_back(sample);
    }

    if (result.duplicates_removed > 0) {
        result.warnings.push_back("collapsed " + std::to_string(result.duplicates_removed) +
                                  " duplicate sample(s) in batch '" + batch.contributor_id + "'");
    }
    for (const auto& [label, count] : unknown_labels) {
        result.warnings.push_back("label '" + label + "' (" + std::to_string(count) +
                                  " sample(s)) is outside the reference label set and scores zero weight");
    }
    return result;
}

void write_batch_csv(std::ostream& stream, const IndicatorBatch& batch) {
    stream << "contributor_id,sample_key,label";
    for (std::size_t i = 0; i < batch.dimension(); ++i) stream << ",f" << i;
    stream << '\n';
    for (const auto& sample : batch.samples) {
        stream << csv_field(batch.contributor_id) << ',' << sample.key.hex() << ','
               << csv_field(sample.declared_label);
        for (double v : sample.features) stream << ',' << format_double(v);
        stream << '\n';
    }
}

}  // namespace qoi
