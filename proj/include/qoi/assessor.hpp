#pragma once

#include <cstddef>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "qoi/classifier.hpp"
#include "qoi/indicator_model.hpp"
#include "qoi/metrics.hpp"

namespace qoi {

// A contributor is flagged as a free-riding candidate when its volume
// percentile is at least volume_percentile AND its QoI percentile is at most
// qoi_percentile. Percentile = fraction of contributors strictly below, x100.
struct FreeRiderThresholds {
    double volume_percentile = 50.0;
    double qoi_percentile = 25.0;

    void validate() const;
};

struct AssessorConfig {
    ClassifierMode mode = ClassifierMode::lda;
    double ridge = 1e-6;
    RelevanceWeights relevance;
    UtilityWeights utility;
    QoIWeights qoi;
    FreeRiderThresholds thresholds;
    int assessors = 1;  // must stay odd so majority votes are well-defined

    void validate() const;
    static AssessorConfig defaults();
};

// relevance/utility carry the configured-mode values (paper_exact relevance
// may exceed 1); the *_normalized views are the [0, 1] variants that feed the
// QoI aggregate.
struct ScoreReport {
    std::string contributor_id;
    std::size_t k = 0;  // deduped sample count
    double correctness = 0.0;
    double relevance = 0.0;
    double utility = 0.0;
    double uniqueness = 0.0;
    double relevance_normalized = 0.0;
    double utility_normalized = 0.0;
    double qoi = 0.0;
    double volume = 0.0;
    int rank_qoi = 0;    // 1 = best; 0 when the batch could not be scored
    int rank_volume = 0;
    bool free_rider = false;
    std::string error;  // non-empty when this batch failed validation/scoring
    std::vector<std::string> warnings;
    MetricBreakdown breakdown;

    bool ok() const { return error.empty(); }
};

// Fraction of values strictly below `value`, x100. Ties do not count as below,
// so a uniform community sits at percentile 0 for everyone.
double percentile_below(std::span<const double> values, double value);

// Score every batch against an already-trained model. Per-batch failures are
// recorded in that contributor's report instead of aborting the run; reports
// come back sorted by contributor id with ranks and flags assigned.
std::vector<ScoreReport> assess_with_model(const ClassModel& model,
                                           std::span<const IndicatorBatch> batches,
                                           const AssessorConfig& config);

// Train one model from the reference, then assess. Training failures propagate.
std::vector<ScoreReport> assess_community(const ReferenceDataset& reference,
                                          std::span<const IndicatorBatch> batches,
                                          const AssessorConfig& config);

// Dense ranks over the scorable reports: descending score, ties broken by
// ascending contributor id. Unscorable reports keep rank 0.
void assign_ranks(std::vector<ScoreReport>& reports);
void apply_flags(std::vector<ScoreReport>& reports, const FreeRiderThresholds& thresholds);
void rank_and_flag(std::vector<ScoreReport>& reports, const FreeRiderThresholds& thresholds);

// Combine A assessors' verdicts: median for every numeric score, majority for
// the free-rider flag. Ranks are recomputed from the consensus scores; flags
// are not (they are the vote itself).
std::vector<ScoreReport> majority_vote(std::span<const std::vector<ScoreReport>> per_assessor);

void write_report_csv(std::ostream& out, std::span<const ScoreReport> reports);
void write_breakdown_csv(std::ostream& out, std::span<const ScoreReport> reports);

}  // namespace qoi
