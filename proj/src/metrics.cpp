#include "qoi/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "qoi/error.hpp"
#include "qoi/text.hpp"

namespace qoi {

const char* to_string(RelevanceMode mode) {
    return mode == RelevanceMode::paper_exact ? "paper_exact" : "mean_weight";
}

const char* to_string(RelevanceGating gating) {
    return gating == RelevanceGating::all_samples ? "all_samples" : "correct_only";
}

RelevanceMode relevance_mode_from(std::string_view name) {
    if (name == "paper_exact") return RelevanceMode::paper_exact;
    if (name == "mean_weight") return RelevanceMode::mean_weight;
    raise(ErrorCode::config_error, "unknown relevance mode: " + std::string(name));
}

RelevanceGating relevance_gating_from(std::string_view name) {
    if (name == "all_samples") return RelevanceGating::all_samples;
    if (name == "correct_only") return RelevanceGating::correct_only;
    raise(ErrorCode::config_error, "unknown relevance gating: " + std::string(name));
}

double RelevanceWeights::weight_for(std::string_view label) const {
    auto it = weights.find(fold_case(label));
    return it == weights.end() ? 0.0 : it->second;
}

double RelevanceWeights::total_weight() const {
    double total = 0.0;
    for (const auto& [label, w] : weights) total += w;
    return total;
}

double RelevanceWeights::max_weight() const {
    double best = 0.0;
    for (const auto& [label, w] : weights) best = std::max(best, w);
    return best;
}

void RelevanceWeights::validate() const {
    if (weights.empty())
        raise(ErrorCode::config_error, "relevance weights: no labels configured");
    for (const auto& [label, w] : weights) {
        if (!std::isfinite(w) || w < 0.0)
            raise(ErrorCode::config_error, "relevance weight for '" + label + "' must be finite and >= 0");
    }
    if (max_weight() <= 0.0)
        raise(ErrorCode::config_error, "relevance weights: at least one label needs positive weight");
}

double UtilityWeights::weight_for_type(const std::string& type) const {
    auto it = type_weights.find(type);
    if (it == type_weights.end())
        raise(ErrorCode::config_error, "utility weights: no weight for type '" + type + "'");
    return it->second;
}

double UtilityWeights::max_weight() const {
    double best = 0.0;
    for (const auto& [type, w] : type_weights) best = std::max(best, w);
    return best;
}

void UtilityWeights::validate() const {
    if (type_weights.empty())
        raise(ErrorCode::config_error, "utility weights: no types configured");
    for (const auto& [type, w] : type_weights) {
        if (!std::isfinite(w) || w < 0.0)
            raise(ErrorCode::config_error, "utility weight for '" + type + "' must be finite and >= 0");
    }
    if (max_weight() <= 0.0)
        raise(ErrorCode::config_error, "utility weights: at least one type needs positive weight");
    if (type_weights.find(fallback_type) == type_weights.end())
        raise(ErrorCode::config_error, "utility weights: fallback type '" + fallback_type + "' has no weight");
    for (const auto& rule : rules) {
        if (type_weights.find(rule.type) == type_weights.end())
            raise(ErrorCode::config_error, "utility weights: rule type '" + rule.type + "' has no weight");
    }
}

UtilityWeights UtilityWeights::defaults() {
    UtilityWeights w;
    // Incomplete markers are checked before generic ones so that a string
    // like "suspicious worm" counts as incomplete.
    w.rules = {
        {"incomplete", {"suspicious", "malware", "unclassified"}},
        {"generic", {"generic", "worm", "trojan", "start", "run"}},
    };
    w.type_weights = {{"complete", 5.0}, {"generic", 2.0}, {"incomplete", 1.0}};
    w.fallback_type = "complete";
    return w;
}

void QoIWeights::validate() const {
    const double parts[] = {correctness, relevance, utility, uniqueness};
    double total = 0.0;
    for (double w : parts) {
        if (!std::isfinite(w) || w < 0.0)
            raise(ErrorCode::config_error, "qoi weights must be finite and >= 0");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-9)
        raise(ErrorCode::config_error, "qoi weights must sum to 1, got " + format_double(total));
}

CorrectnessResult correctness(const IndicatorBatch& batch, const ClassModel& model) {
    if (batch.samples.empty())
        raise(ErrorCode::empty_batch, "correctness: batch '" + batch.contributor_id + "' is empty");
    CorrectnessResult result;
    result.flags.reserve(batch.samples.size());
    result.predicted.reserve(batch.samples.size());
    std::size_t hits = 0;
    for (const auto& sample : batch.samples) {
        Prediction pred = predict(model, sample.features);
        bool hit = fold_case(pred.label) == fold_case(sample.declared_label);
        result.flags.push_back(hit ? 1 : 0);
        result.predicted.push_back(pred.label);
        if (hit) ++hits;
    }
    result.value = static_cast<double>(hits) / static_cast<double>(batch.samples.size());
    return result;
}

RelevanceResult relevance(const IndicatorBatch& batch, const RelevanceWeights& weights,
                          const std::vector<std::uint8_t>* correctness_flags) {
    if (batch.samples.empty())
        raise(ErrorCode::empty_batch, "relevance: batch '" + batch.contributor_id + "' is empty");
    weights.validate();
    const bool gate = weights.gating == RelevanceGating::correct_only;
    if (gate && correctness_flags == nullptr)
        raise(ErrorCode::missing_flags, "relevance: correct_only gating needs correctness flags");
    if (gate && correctness_flags->size() != batch.samples.size())
        raise(ErrorCode::missing_flags, "relevance: correctness flags do not match batch size");

    RelevanceResult result;
    result.sample_weights.reserve(batch.samples.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < batch.samples.size(); ++i) {
        double w = weights.weight_for(batch.samples[i].declared_label);
        if (gate && !(*correctness_flags)[i]) w = 0.0;
        result.sample_weights.push_back(w);
        sum += w;
    }
    const double k = static_cast<double>(batch.samples.size());
    result.normalized = sum / (k * weights.max_weight());
    result.value = weights.mode == RelevanceMode::paper_exact ? sum / weights.total_weight()
                                                              : result.normalized;
    return result;
}

std::string classify_label_string(std::string_view label_string, const UtilityWeights& weights) {
    const std::string folded = fold_case(label_string);
    for (const auto& rule : weights.rules) {
        for (const auto& keyword : rule.keywords) {
            if (folded.find(fold_case(keyword)) != std::string::npos) return rule.type;
        }
    }
    return weights.fallback_type;
}

UtilityResult utility(const IndicatorBatch& batch, const UtilityWeights& weights) {
    if (batch.samples.empty())
        raise(ErrorCode::empty_batch, "utility: batch '" + batch.contributor_id + "' is empty");
    weights.validate();
    UtilityResult result;
    result.types.reserve(batch.samples.size());
    result.sample_weights.reserve(batch.samples.size());
    double sum = 0.0;
    for (const auto& sample : batch.samples) {
        // An absent label string is the least informative submission possible.
        std::string type = sample.label_string.empty()
                               ? "incomplete"
                               : classify_label_string(sample.label_string, weights);
        double w = weights.weight_for_type(type);
        result.types.push_back(std::move(type));
        result.sample_weights.push_back(w);
        sum += w;
    }
    result.value = sum / static_cast<double>(batch.samples.size());
    result.normalized = result.value / weights.max_weight();
    return result;
}

std::map<SampleKey, std::size_t> batch_occurrences(std::span<const IndicatorBatch> batches) {
    std::map<SampleKey, std::size_t> occurrences;
    for (const auto& batch : batches) {
        // Count each key once per batch: duplicates within one contributor's
        // batch must not make the sample look shared.
        std::map<SampleKey, bool> seen;
        for (const auto& sample : batch.samples) {
            if (seen.emplace(sample.key, true).second) ++occurrences[sample.key];
        }
    }
    return occurrences;
}

UniquenessResult uniqueness_with_index(const std::map<SampleKey, std::size_t>& occurrences,
                                       const IndicatorBatch& batch) {
    if (batch.samples.empty())
        raise(ErrorCode::empty_batch, "uniqueness: batch '" + batch.contributor_id + "' is empty");
    UniquenessResult result;
    result.flags.reserve(batch.samples.size());
    std::size_t unique_count = 0;
    for (const auto& sample : batch.samples) {
        auto it = occurrences.find(sample.key);
        if (it == occurrences.end())
            raise(ErrorCode::missing_flags,
                  "uniqueness: sample key not present in the occurrence index");
        bool unique = it->second == 1;
        result.flags.push_back(unique ? 1 : 0);
        if (unique) ++unique_count;
    }
    result.value = static_cast<double>(unique_count) / static_cast<double>(batch.samples.size());
    return result;
}

UniquenessResult uniqueness(std::span<const IndicatorBatch> batches, std::size_t index) {
    if (index >= batches.size())
        raise(ErrorCode::usage_error, "uniqueness: batch index out of range");
    return uniqueness_with_index(batch_occurrences(batches), batches[index]);
}

double volume_score(std::span<const IndicatorBatch> batches, std::size_t index) {
    if (index >= batches.size())
        raise(ErrorCode::usage_error, "volume: batch index out of range");
    std::size_t max_k = 0;
    for (const auto& batch : batches) max_k = std::max(max_k, batch.samples.size());
    if (max_k == 0)
        raise(ErrorCode::empty_batch, "volume: every batch in the community is empty");
    return static_cast<double>(batches[index].samples.size()) / static_cast<double>(max_k);
}

double aggregate_qoi(double correctness_value, double relevance_value, double utility_value,
                     double uniqueness_value, const QoIWeights& weights) {
    weights.validate();
    const double parts[] = {correctness_value, relevance_value, utility_value, uniqueness_value};
    for (double v : parts) {
        if (!std::isfinite(v) || v < 0.0 || v > 1.0)
            raise(ErrorCode::usage_error, "qoi components must lie in [0, 1]");
    }
    return weights.correctness * correctness_value + weights.relevance * relevance_value +
           weights.utility * utility_value + weights.uniqueness * uniqueness_value;
}

}  // namespace qoi
