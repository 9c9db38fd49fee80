#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qoi/classifier.hpp"
#include "qoi/indicator_model.hpp"

namespace qoi {

enum class RelevanceMode { paper_exact, mean_weight };
enum class RelevanceGating { all_samples, correct_only };

const char* to_string(RelevanceMode mode);
const char* to_string(RelevanceGating gating);
RelevanceMode relevance_mode_from(std::string_view name);
RelevanceGating relevance_gating_from(std::string_view name);

// Per-label interest weights. Labels missing from the map (or outside the
// reference set entirely) carry weight 0.
struct RelevanceWeights {
    std::map<std::string, double> weights;  // keys stored case-folded
    RelevanceMode mode = RelevanceMode::paper_exact;
    RelevanceGating gating = RelevanceGating::correct_only;

    double weight_for(std::string_view label) const;
    double total_weight() const;  // sum over the configured label weights
    double max_weight() const;
    void validate() const;        // at least one positive weight, all finite and non-negative
};

// Label-string specificity classes. A string is matched against the rules in
// order (first keyword hit wins) and falls back to fallback_type; the default
// table checks incomplete keywords before generic ones.
struct UtilityWeights {
    struct Rule {
        std::string type;
        std::vector<std::string> keywords;
    };
    std::vector<Rule> rules;
    std::map<std::string, double> type_weights;
    std::string fallback_type = "complete";

    double weight_for_type(const std::string& type) const;
    double max_weight() const;
    void validate() const;

    static UtilityWeights defaults();
};

// Normalized component weights for the aggregate score.
struct QoIWeights {
    double correctness = 0.4;
    double relevance = 0.3;
    double utility = 0.2;
    double uniqueness = 0.1;

    void validate() const;  // non-negative, summing to 1 within 1e-9
};

struct CorrectnessResult {
    double value = 0.0;                    // fraction of label matches in [0, 1]
    std::vector<std::uint8_t> flags;
    std::vector<std::string> predicted;
};

struct RelevanceResult {
    double value = 0.0;       // aggregate under the configured mode
    double normalized = 0.0;  // mean-weight view in [0, 1], used for QoI aggregation
    std::vector<double> sample_weights;
};

struct UtilityResult {
    double value = 0.0;       // mean sample weight
    double normalized = 0.0;  // value / max type weight
    std::vector<std::string> types;
    std::vector<double> sample_weights;
};

struct UniquenessResult {
    double value = 0.0;  // fraction of keys seen in no other batch
    std::vector<std::uint8_t> flags;
};

// Fraction of samples whose predicted label matches the declared label
// (case-folded exact comparison).
CorrectnessResult correctness(const IndicatorBatch& batch, const ClassModel& model);

// paper_exact divides the summed sample weights by the total of the
// configured label weights (can exceed 1 when the batch is larger than the
// label set); mean_weight divides by k * max weight. With correct_only
// gating, samples flagged incorrect contribute zero weight.
RelevanceResult relevance(const IndicatorBatch& batch, const RelevanceWeights& weights,
                          const std::vector<std::uint8_t>* correctness_flags = nullptr);

std::string classify_label_string(std::string_view label_string, const UtilityWeights& weights);

UtilityResult utility(const IndicatorBatch& batch, const UtilityWeights& weights);

// Distinct-batch occurrence count per sample key, for community-wide
// uniqueness scoring without rebuilding the index per contributor.
std::map<SampleKey, std::size_t> batch_occurrences(std::span<const IndicatorBatch> batches);

UniquenessResult uniqueness(std::span<const IndicatorBatch> batches, std::size_t index);
UniquenessResult uniqueness_with_index(const std::map<SampleKey, std::size_t>& occurrences,
                                       const IndicatorBatch& batch);

// k_i / max_j k_j over the community.
double volume_score(std::span<const IndicatorBatch> batches, std::size_t index);

// Weighted sum of the four components under normalized weights.
double aggregate_qoi(double correctness_value, double relevance_value, double utility_value,
                     double uniqueness_value, const QoIWeights& weights);

// Per-sample view of all four metrics for one contributor.
struct MetricBreakdown {
    std::vector<std::string> sample_keys;
    std::vector<std::string> sample_labels;
    std::vector<std::string> predicted_labels;
    std::vector<std::string> utility_types;
    std::vector<std::uint8_t> correct_flags;
    std::vector<std::uint8_t> unique_flags;
    std::vector<double> relevance_weights;
    std::vector<double> utility_weights;
    double correctness = 0.0;
    double relevance = 0.0;
    double utility = 0.0;
    double uniqueness = 0.0;
};

}  // namespace qoi
