#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qoi {

// Content-derived sample identity: SHA-256 over the canonical serialization
// of the feature vector (shortest round-trip decimals joined by a unit
// separator). Labels are deliberately excluded, so a relabeled copy of an
// existing sample maps to the same key.
struct SampleKey {
    std::array<unsigned char, 32> digest{};

    std::string hex() const;
    friend auto operator<=>(const SampleKey&, const SampleKey&) = default;
};

struct LabeledSample {
    SampleKey key;
    std::string sample_id;         // record-provided id, or key.hex() when absent
    std::vector<double> features;
    std::string declared_label;
    std::string label_string;      // raw vendor label text; defaults to declared_label
};

// One contributor's submission set.
struct IndicatorBatch {
    std::string contributor_id;
    std::vector<LabeledSample> samples;

    std::size_t size() const { return samples.size(); }
    std::size_t dimension() const { return samples.empty() ? 0 : samples.front().features.size(); }
};

// Ordered set of distinct class labels. Indices are stable for the lifetime
// of the set; lookups are case-folded.
class LabelSet {
public:
    LabelSet() = default;
    explicit LabelSet(std::vector<std::string> labels);

    std::size_t size() const { return labels_.size(); }
    const std::string& name(std::size_t index) const { return labels_.at(index); }
    const std::vector<std::string>& names() const { return labels_; }
    std::optional<std::size_t> index_of(std::string_view label) const;

private:
    std::vector<std::string> labels_;
    std::vector<std::string> folded_;
};

// Vetted golden samples used for training and benchmarking. Every declared
// label is a member of label_set and every class holds at least 2 samples.
struct ReferenceDataset {
    LabelSet label_set;
    std::vector<LabeledSample> samples;
    std::vector<std::size_t> class_counts;

    std::size_t total() const { return samples.size(); }
    std::size_t dimension() const { return samples.empty() ? 0 : samples.front().features.size(); }
};

SampleKey derive_key(std::span<const double> features);

// Builds a sample with its derived key. Empty label_string falls back to the
// declared label; empty sample_id falls back to the key digest.
LabeledSample make_sample(std::vector<double> features, std::string declared_label,
                          std::string label_string = {}, std::string sample_id = {});

// Line-delimited JSON records. Required fields: contributor_id, label,
// features; optional: sample_id, label_string. Records are grouped by
// contributor in first-appearance order; sample order is preserved.
std::vector<IndicatorBatch> parse_samples(std::istream& stream);
void write_samples(std::ostream& stream, std::span<const IndicatorBatch> batches);

// Label set is taken from the samples in first-appearance order.
ReferenceDataset build_reference(std::vector<LabeledSample> samples);
ReferenceDataset load_reference(std::istream& stream);
void write_reference(std::ostream& stream, const ReferenceDataset& reference);

struct ValidatedBatch {
    IndicatorBatch batch;                // intra-batch duplicate keys collapsed
    std::vector<std::string> warnings;
    std::size_t duplicates_removed = 0;
};

// Rejects empty batches, feature-dimension mismatches against the model and
// non-finite features. Labels outside the known set are accepted with a
// warning (they carry zero relevance weight downstream). Duplicate keys are
// collapsed to the first occurrence and counted in the warnings.
ValidatedBatch validate_batch(const IndicatorBatch& batch, std::size_t model_dim,
                              const LabelSet* known_labels = nullptr);

// Header: contributor_id,sample_key,label,f0..f{d-1}
void write_batch_csv(std::ostream& stream, const IndicatorBatch& batch);

}  // namespace qoi
