#include "qoi/assessor.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "qoi/error.hpp"
#include "qoi/text.hpp"

namespace qoi {

void FreeRiderThresholds::validate() const {
    for (double p : {volume_percentile, qoi_percentile}) {
        if (!std::isfinite(p) || p < 0.0 || p > 100.0)
            raise(ErrorCode::config_error, "free-rider percentiles must lie in [0, 100]");
    }
}

void AssessorConfig::validate() const {
    if (!std::isfinite(ridge) || ridge < 0.0)
        raise(ErrorCode::config_error, "ridge must be finite and >= 0");
    if (assessors < 1 || assessors % 2 == 0)
        raise(ErrorCode::config_error, "assessor count must be odd and >= 1, got " +
                                           std::to_string(assessors));
    relevance.validate();
    utility.validate();
    qoi.validate();
    thresholds.validate();
}

AssessorConfig AssessorConfig::defaults() {
    AssessorConfig config;
    config.relevance.weights = {{"targeted", 5.0}, {"trojan", 3.0}, {"ddos", 1.0}};
    config.utility = UtilityWeights::defaults();
    return config;
}

double percentile_below(std::span<const double> values, double value) {
    if (values.empty()) raise(ErrorCode::usage_error, "percentile over an empty value list");
    std::size_t below = 0;
    for (double v : values) {
        if (v < value) ++below;
    }
    return 100.0 * static_cast<double>(below) / static_cast<double>(values.size());
}

namespace {

ScoreReport score_batch(const ClassModel& model, const IndicatorBatch& batch,
                        const std::map<SampleKey, std::size_t>& occurrences,
                        const AssessorConfig& config) {
    ScoreReport report;
    report.contributor_id = batch.contributor_id;
    report.k = batch.samples.size();

    CorrectnessResult c = correctness(batch, model);
    RelevanceResult r = relevance(batch, config.relevance, &c.flags);
    UtilityResult u = utility(batch, config.utility);
    UniquenessResult n = uniqueness_with_index(occurrences, batch);

    report.correctness = c.value;
    report.relevance = r.value;
    report.relevance_normalized = r.normalized;
    report.utility = u.value;
    report.utility_normalized = u.normalized;
    report.uniqueness = n.value;
    report.qoi = aggregate_qoi(c.value, r.normalized, u.normalized, n.value, config.qoi);

    report.breakdown.correctness = c.value;
    report.breakdown.relevance = r.value;
    report.breakdown.utility = u.value;
    report.breakdown.uniqueness = n.value;
    report.breakdown.correct_flags = std::move(c.flags);
    report.breakdown.predicted_labels = std::move(c.predicted);
    report.breakdown.relevance_weights = std::move(r.sample_weights);
    report.breakdown.utility_types = std::move(u.types);
    report.breakdown.utility_weights = std::move(u.sample_weights);
    report.breakdown.unique_flags = std::move(n.flags);
    report.breakdown.sample_keys.reserve(batch.samples.size());
    report.breakdown.sample_labels.reserve(batch.samples.size());
    for (const auto& sample : batch.samples) {
        report.breakdown.sample_keys.push_back(sample.key.hex());
        report.breakdown.sample_labels.push_back(sample.declared_label);
    }
    return report;
}

}  // namespace

std::vector<ScoreReport> assess_with_model(const ClassModel& model,
                                           std::span<const IndicatorBatch> batches,
                                           const AssessorConfig& config) {
    config.validate();
    if (batches.empty())
        raise(ErrorCode::empty_batch, "assess: no batches submitted");

    // Validate (and dedupe) every batch up front; failures become per-report
    // errors rather than aborting the whole community run.
    std::vector<ScoreReport> reports(batches.size());
    std::vector<IndicatorBatch> accepted(batches.size());
    for (std::size_t i = 0; i < batches.size(); ++i) {
        reports[i].contributor_id = batches[i].contributor_id;
        reports[i].k = batches[i].samples.size();
        try {
            ValidatedBatch validated =
                validate_batch(batches[i], model.dimension(), &model.label_set);
            reports[i].warnings = std::move(validated.warnings);
            reports[i].k = validated.batch.samples.size();
            accepted[i] = std::move(validated.batch);
        } catch (const QoiError& err) {
            reports[i].error = err.what();
        }
    }

    std::vector<IndicatorBatch> scorable;
    for (const auto& batch : accepted) {
        if (!batch.samples.empty()) scorable.push_back(batch);
    }
    if (scorable.empty())
        raise(ErrorCode::empty_batch, "assess: every submitted batch failed validation");

    // Shared community state: key occurrences for uniqueness, max deduped
    // count for the volume baseline.
    std::map<SampleKey, std::size_t> occurrences = batch_occurrences(scorable);
    std::size_t max_k = 0;
    for (const auto& batch : scorable) max_k = std::max(max_k, batch.samples.size());

    for (std::size_t i = 0; i < batches.size(); ++i) {
        if (!reports[i].ok()) continue;
        try {
            std::vector<std::string> warnings = std::move(reports[i].warnings);
            reports[i] = score_batch(model, accepted[i], occurrences, config);
            reports[i].warnings = std::move(warnings);
            reports[i].volume =
                static_cast<double>(reports[i].k) / static_cast<double>(max_k);
        } catch (const QoiError& err) {
            reports[i].error = err.what();
        }
    }

    std::sort(reports.begin(), reports.end(), [](const ScoreReport& a, const ScoreReport& b) {
        return a.contributor_id < b.contributor_id;
    });
    rank_and_flag(reports, config.thresholds);
    return reports;
}

std::vector<ScoreReport> assess_community(const ReferenceDataset& reference,
                                          std::span<const IndicatorBatch> batches,
                                          const AssessorConfig& config) {
    config.validate();
    ClassModel model = train(reference, config.mode, config.ridge);
    return assess_with_model(model, batches, config);
}

namespace {

template <typename Score>
void rank_by(std::vector<ScoreReport>& reports, Score score, int ScoreReport::* rank_field) {
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < reports.size(); ++i) {
        if (reports[i].ok()) order.push_back(i);
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        double sa = score(reports[a]);
        double sb = score(reports[b]);
        if (sa != sb) return sa > sb;
        return reports[a].contributor_id < reports[b].contributor_id;
    });
    for (std::size_t pos = 0; pos < order.size(); ++pos)
        reports[order[pos]].*rank_field = static_cast<int>(pos) + 1;
}

}  // namespace

void assign_ranks(std::vector<ScoreReport>& reports) {
    rank_by(reports, [](const ScoreReport& r) { return r.qoi; }, &ScoreReport::rank_qoi);
    rank_by(reports, [](const ScoreReport& r) { return r.volume; }, &ScoreReport::rank_volume);
}

void apply_flags(std::vector<ScoreReport>& reports, const FreeRiderThresholds& thresholds) {
    thresholds.validate();
    std::vector<double> volumes;
    std::vector<double> qois;
    for (const auto& report : reports) {
        if (!report.ok()) continue;
        volumes.push_back(report.volume);
        qois.push_back(report.qoi);
    }
    for (auto& report : reports) {
        if (!report.ok()) {
            report.free_rider = false;
            continue;
        }
        report.free_rider = percentile_below(volumes, report.volume) >= thresholds.volume_percentile &&
                            percentile_below(qois, report.qoi) <= thresholds.qoi_percentile;
    }
}

void rank_and_flag(std::vector<ScoreReport>& reports, const FreeRiderThresholds& thresholds) {
    if (reports.empty()) raise(ErrorCode::usage_error, "rank_and_flag: empty report list");
    assign_ranks(reports);
    apply_flags(reports, thresholds);
}

namespace {

double median(std::vector<double> values) {
    // Caller guarantees an odd count, so the middle element is exact.
    std::sort(values.begin(), values.end());
    return values[values.size() / 2];
}

}  // namespace

std::vector<ScoreReport> majority_vote(std::span<const std::vector<ScoreReport>> per_assessor) {
    if (per_assessor.empty() || per_assessor.size() % 2 == 0)
        raise(ErrorCode::usage_error, "majority_vote: assessor count must be odd and >= 1");
    const std::size_t a = per_assessor.size();
    if (a == 1) return per_assessor[0];

    // All assessors must have scored the same contributor set; reports arrive
    // sorted by contributor id from assess_with_model.
    std::vector<std::string> ids;
    for (const auto& report : per_assessor[0]) ids.push_back(report.contributor_id);
    for (std::size_t j = 1; j < a; ++j) {
        if (per_assessor[j].size() != ids.size())
            raise(ErrorCode::mismatched_reports, "majority_vote: report counts differ");
        for (std::size_t i = 0; i < ids.size(); ++i) {
            if (per_assessor[j][i].contributor_id != ids[i])
                raise(ErrorCode::mismatched_reports,
                      "majority_vote: contributor sets differ at '" + ids[i] + "'");
        }
    }

    std::vector<ScoreReport> consensus;
    consensus.reserve(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) {
        // Per-sample breakdowns are assessor-specific (each assessor may hold a
        // different model); the consensus keeps the first assessor's view.
        ScoreReport report = per_assessor[0][i];
        std::size_t errored = 0;
        std::size_t flagged = 0;
        std::vector<double> c, r, rn, u, un, n, q, v;
        for (std::size_t j = 0; j < a; ++j) {
            const ScoreReport& in = per_assessor[j][i];
            if (!in.ok()) {
                ++errored;
                continue;
            }
            if (in.free_rider) ++flagged;
            c.push_back(in.correctness);
            r.push_back(in.relevance);
            rn.push_back(in.relevance_normalized);
            u.push_back(in.utility);
            un.push_back(in.utility_normalized);
            n.push_back(in.uniqueness);
            q.push_back(in.qoi);
            v.push_back(in.volume);
        }
        if (errored > 0) {
            // Validation is model-independent, so an error for one assessor is
            // an error for all of them; keep the recorded message.
            consensus.push_back(std::move(report));
            continue;
        }
        report.correctness = median(std::move(c));
        report.relevance = median(std::move(r));
        report.relevance_normalized = median(std::move(rn));
        report.utility = median(std::move(u));
        report.utility_normalized = median(std::move(un));
        report.uniqueness = median(std::move(n));
        report.qoi = median(std::move(q));
        report.volume = median(std::move(v));
        report.free_rider = 2 * flagged > a;
        consensus.push_back(std::move(report));
    }
    assign_ranks(consensus);
    return consensus;
}

void write_report_csv(std::ostream& out, std::span<const ScoreReport> reports) {
    out << "contributor_id,k,C,R,U,N,QoI,volume,rank_qoi,rank_volume,free_rider\n";
    for (const auto& report : reports) {
        out << csv_field(report.contributor_id) << ',' << report.k << ',';
        if (report.ok()) {
            out << format_double(report.correctness) << ',' << format_double(report.relevance)
                << ',' << format_double(report.utility) << ',' << format_double(report.uniqueness)
                << ',' << format_double(report.qoi) << ',' << format_double(report.volume) << ','
                << report.rank_qoi << ',' << report.rank_volume << ','
                << (report.free_rider ? "true" : "false");
        } else {
            // Unscorable contributors keep their row (the community roster must
            // stay complete) with empty score fields.
            out << ",,,,,,,,";
        }
        out << '\n';
    }
}

void write_breakdown_csv(std::ostream& out, std::span<const ScoreReport> reports) {
    out << "contributor_id,sample_key,label,predicted,correct,relevance_weight,"
           "utility_type,utility_weight,unique\n";
    for (const auto& report : reports) {
        if (!report.ok()) continue;
        const MetricBreakdown& b = report.breakdown;
        for (std::size_t i = 0; i < b.sample_keys.size(); ++i) {
            out << csv_field(report.contributor_id) << ',' << b.sample_keys[i] << ','
                << csv_field(b.sample_labels[i]) << ',' << csv_field(b.predicted_labels[i]) << ','
                << int(b.correct_flags[i]) << ',' << format_double(b.relevance_weights[i]) << ','
                << b.utility_types[i] << ',' << format_double(b.utility_weights[i]) << ','
                << int(b.unique_flags[i]) << '\n';
        }
    }
}

}  // namespace qoi
