// Acceptance gate for the QoI engine. Each numbered check prints exactly one
// PASS/FAIL line (with its runtime); the process exit code is the number of
// failing checks, so a zero exit means the gate is green.
//
// Expected values marked "frozen" were computed with an independent
// high-precision oracle (mpmath: normal CDFs and quadrature) and pinned here
// as decimal literals.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qoi/assessor.hpp"
#include "qoi/classifier.hpp"
#include "qoi/indicator_model.hpp"
#include "qoi/metrics.hpp"
#include "qoi/rng.hpp"
#include "qoi/synth.hpp"

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Gate {
    int failures = 0;

    void run(int number, const std::string& title, double limit_seconds,
             const std::function<bool(std::ostringstream&)>& body) {
        std::ostringstream detail;
        bool ok = false;
        const auto start = std::chrono::steady_clock::now();
        try {
            ok = body(detail);
        } catch (const std::exception& e) {
            detail << "  - unexpected exception: " << e.what() << '\n';
        }
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (limit_seconds > 0.0 && elapsed >= limit_seconds) {
            ok = false;
            detail << "  - runtime " << elapsed << "s exceeds the " << limit_seconds
                   << "s budget\n";
        }
        std::cout << (ok ? "PASS" : "FAIL") << "  " << number << ". " << title << "  ["
                  << elapsed << "s]\n";
        if (!ok) {
            std::cout << detail.str();
            ++failures;
        }
    }
};

bool expect(std::ostringstream& detail, bool condition, const std::string& message) {
    if (!condition) detail << "  - " << message << '\n';
    return condition;
}

std::string fmt(double value) {
    std::ostringstream out;
    out.precision(17);
    out << value;
    return out.str();
}

// Two Gaussian classes a Euclidean distance `separation` apart under the
// identity covariance.
qoi::ClassModel two_class_model(std::size_t dimension, double separation,
                                std::vector<double> priors) {
    Eigen::MatrixXd centroids = Eigen::MatrixXd::Zero(2, static_cast<Eigen::Index>(dimension));
    // Spread the offset across all coordinates so nothing is axis-aligned.
    const double component = separation / std::sqrt(static_cast<double>(dimension));
    for (Eigen::Index c = 0; c < centroids.cols(); ++c) centroids(1, c) = component;
    return qoi::make_model(qoi::LabelSet({"left", "right"}), centroids,
                           Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(dimension),
                                                     static_cast<Eigen::Index>(dimension)),
                           std::move(priors), qoi::ClassifierMode::lda);
}

// Plain Gauss-Jordan inverse over flat doubles: deliberately shares nothing
// with the Eigen-based factorization inside the library.
std::vector<double> invert_dense(std::vector<double> a, std::size_t d) {
    std::vector<double> inv(d * d, 0.0);
    for (std::size_t i = 0; i < d; ++i) inv[i * d + i] = 1.0;
    for (std::size_t col = 0; col < d; ++col) {
        std::size_t pivot = col;
        for (std::size_t row = col + 1; row < d; ++row) {
            if (std::abs(a[row * d + col]) > std::abs(a[pivot * d + col])) pivot = row;
        }
        for (std::size_t j = 0; j < d; ++j) {
            std::swap(a[pivot * d + j], a[col * d + j]);
            std::swap(inv[pivot * d + j], inv[col * d + j]);
        }
        const double scale = a[col * d + col];
        for (std::size_t j = 0; j < d; ++j) {
            a[col * d + j] /= scale;
            inv[col * d + j] /= scale;
        }
        for (std::size_t row = 0; row < d; ++row) {
            if (row == col) continue;
            const double factor = a[row * d + col];
            if (factor == 0.0) continue;
            for (std::size_t j = 0; j < d; ++j) {
                a[row * d + j] -= factor * a[col * d + j];
                inv[row * d + j] -= factor * inv[col * d + j];
            }
        }
    }
    return inv;
}

// Brute-force discriminant argmin with explicit loops; ties go to the lowest
// class index via strict less-than, the same contract predict() promises.
std::size_t brute_force_class(const qoi::ClassModel& model, const std::vector<double>& x) {
    const std::size_t d = model.dimension();
    std::vector<double> cov(d * d);
    for (std::size_t r = 0; r < d; ++r) {
        for (std::size_t c = 0; c < d; ++c) {
            cov[r * d + c] = model.covariance(static_cast<Eigen::Index>(r),
                                              static_cast<Eigen::Index>(c));
        }
    }
    const std::vector<double> precision = invert_dense(std::move(cov), d);

    std::size_t best = 0;
    double best_score = kInf;
    for (std::size_t i = 0; i < model.num_classes(); ++i) {
        std::vector<double> diff(d);
        for (std::size_t c = 0; c < d; ++c) {
            diff[c] = x[c] - model.centroids(static_cast<Eigen::Index>(i),
                                             static_cast<Eigen::Index>(c));
        }
        double quad = 0.0;
        for (std::size_t r = 0; r < d; ++r) {
            for (std::size_t c = 0; c < d; ++c) quad += diff[r] * precision[r * d + c] * diff[c];
        }
        const double score = quad - 2.0 * std::log(model.priors[i]);
        if (score < best_score) {
            best_score = score;
            best = i;
        }
    }
    return best;
}

// Random SPD-covariance model with lambda classes in d dimensions.
qoi::ClassModel random_model(std::size_t lambda, std::size_t d, qoi::Rng& rng) {
    Eigen::MatrixXd centroids(static_cast<Eigen::Index>(lambda), static_cast<Eigen::Index>(d));
    for (Eigen::Index r = 0; r < centroids.rows(); ++r) {
        for (Eigen::Index c = 0; c < centroids.cols(); ++c) {
            centroids(r, c) = 4.0 * rng.next_normal();
        }
    }
    Eigen::MatrixXd a(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (Eigen::Index r = 0; r < a.rows(); ++r) {
        for (Eigen::Index c = 0; c < a.cols(); ++c) a(r, c) = rng.next_normal();
    }
    Eigen::MatrixXd covariance =
        a * a.transpose() +
        0.5 * Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));

    std::vector<double> priors(lambda);
    double total = 0.0;
    for (double& p : priors) {
        p = 0.1 + rng.next_uniform();
        total += p;
    }
    for (double& p : priors) p /= total;

    std::vector<std::string> labels;
    for (std::size_t i = 0; i < lambda; ++i) labels.push_back("class-" + std::to_string(i));
    return qoi::make_model(qoi::LabelSet(labels), std::move(centroids), std::move(covariance),
                           std::move(priors), qoi::ClassifierMode::lda);
}

// One-dimensional two-class reference: class "a" near 0, class "b" near 10.
qoi::ReferenceDataset toy_reference() {
    std::vector<qoi::LabeledSample> samples;
    for (double x : {-0.5, 0.0, 0.5}) samples.push_back(qoi::make_sample({x}, "a"));
    for (double x : {9.5, 10.0, 10.5}) samples.push_back(qoi::make_sample({x}, "b"));
    return qoi::build_reference(std::move(samples));
}

qoi::AssessorConfig scenario_config(const qoi::Scenario& scenario) {
    qoi::AssessorConfig config = qoi::AssessorConfig::defaults();
    config.relevance = qoi::derive_relevance_weights(scenario.world);
    return config;
}

const qoi::ScoreReport& report_for(const std::vector<qoi::ScoreReport>& reports,
                                   const std::string& id) {
    for (const auto& report : reports) {
        if (report.contributor_id == id) return report;
    }
    throw std::runtime_error("no report for " + id);
}

bool check_analytic_two_class(std::ostringstream& detail) {
    // Separation 2, equal priors: the closed form collapses to 1 - Phi(1).
    const qoi::ClassModel model = two_class_model(4, 2.0, {0.5, 0.5});
    const double analytic = qoi::misclassification_rate_analytic(model);
    const double frozen = 0.15865525393145705;  // 1 - Phi(1)
    bool ok = expect(detail, std::abs(analytic - frozen) <= 1e-12,
                     "analytic rate " + fmt(analytic) + " != frozen " + fmt(frozen));
    const qoi::EmpiricalRate emp = qoi::misclassification_rate_empirical(model, 100000, 20260814);
    ok &= expect(detail, std::abs(emp.rate - analytic) <= 0.005,
                 "empirical rate " + fmt(emp.rate) + " is more than 0.005 from analytic " +
                     fmt(analytic));
    return ok;
}

bool check_analytic_priors_and_three_class(std::ostringstream& detail) {
    // Same geometry, priors (0.2, 0.8).
    const qoi::ClassModel skewed = two_class_model(4, 2.0, {0.2, 0.8});
    const double analytic = qoi::misclassification_rate_analytic(skewed);
    const double frozen = 0.11206652245619629;
    bool ok = expect(detail, std::abs(analytic - frozen) <= 1e-12,
                     "unequal-prior analytic " + fmt(analytic) + " != frozen " + fmt(frozen));
    const qoi::EmpiricalRate emp = qoi::misclassification_rate_empirical(skewed, 100000, 7);
    ok &= expect(detail,
                 std::abs(analytic - emp.rate) <= 3.0 * emp.std_error,
                 "unequal-prior gap " + fmt(std::abs(analytic - emp.rate)) + " exceeds 3 x " +
                     fmt(emp.std_error));

    // Three collinear classes at 0, 2 and 10 on the first axis: the rate is a
    // pairwise-min approximation, so the empirical comparison gets a wider
    // +/- 0.02 budget.
    Eigen::MatrixXd centroids = Eigen::MatrixXd::Zero(3, 3);
    centroids(1, 0) = 2.0;
    centroids(2, 0) = 10.0;
    const qoi::ClassModel trio = qoi::make_model(
        qoi::LabelSet({"near", "mid", "far"}), centroids, Eigen::MatrixXd::Identity(3, 3),
        {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}, qoi::ClassifierMode::lda);
    const double trio_analytic = qoi::misclassification_rate_analytic(trio);
    const double trio_frozen = 0.10578072636824907;
    ok &= expect(detail, std::abs(trio_analytic - trio_frozen) <= 1e-12,
                 "three-class analytic " + fmt(trio_analytic) + " != frozen " + fmt(trio_frozen));
    const qoi::EmpiricalRate trio_emp = qoi::misclassification_rate_empirical(trio, 100000, 11);
    ok &= expect(detail, std::abs(trio_analytic - trio_emp.rate) <= 0.02,
                 "three-class gap " + fmt(std::abs(trio_analytic - trio_emp.rate)) +
                     " exceeds 0.02");
    return ok;
}

bool check_predictor_oracle(std::ostringstream& detail) {
    qoi::Rng rng(4242);
    bool ok = true;
    for (int round = 0; round < 200; ++round) {
        const std::size_t lambda = 2 + rng.next_index(4);  // 2..5 classes
        const std::size_t d = 1 + rng.next_index(8);       // 1..8 dimensions
        const qoi::ClassModel model = random_model(lambda, d, rng);
        std::vector<double> x(d);
        for (double& v : x) v = 6.0 * rng.next_normal();
        const std::size_t expected = brute_force_class(model, x);
        const qoi::Prediction got = qoi::predict(model, x);
        if (got.class_index != expected) {
            ok = expect(detail, false,
                        "round " + std::to_string(round) + ": predict chose class " +
                            std::to_string(got.class_index) + ", brute force chose " +
                            std::to_string(expected));
        }
    }

    // Constructed exact ties must resolve to the lowest class index in both
    // implementations.
    Eigen::MatrixXd pair(2, 2);
    pair << -1.0, 0.0, 1.0, 0.0;
    const qoi::ClassModel mirrored =
        qoi::make_model(qoi::LabelSet({"minus", "plus"}), pair, Eigen::MatrixXd::Identity(2, 2),
                        {0.5, 0.5}, qoi::ClassifierMode::lda);
    const std::vector<double> midpoint = {0.0, 0.0};
    ok &= expect(detail, qoi::predict(mirrored, midpoint).class_index == 0,
                 "two-way tie did not resolve to class 0");
    ok &= expect(detail, brute_force_class(mirrored, midpoint) == 0,
                 "two-way tie: brute force did not resolve to class 0");

    Eigen::MatrixXd triple = Eigen::MatrixXd::Identity(3, 3);  // unit vectors e0, e1, e2
    const qoi::ClassModel corner = qoi::make_model(
        qoi::LabelSet({"e0", "e1", "e2"}), triple, Eigen::MatrixXd::Identity(3, 3),
        {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}, qoi::ClassifierMode::lda);
    const std::vector<double> origin = {0.0, 0.0, 0.0};
    ok &= expect(detail, qoi::predict(corner, origin).class_index == 0,
                 "three-way tie did not resolve to class 0");
    ok &= expect(detail, brute_force_class(corner, origin) == 0,
                 "three-way tie: brute force did not resolve to class 0");
    return ok;
}

bool check_metric_fixtures(std::ostringstream& detail) {
    bool ok = true;

    // Correctness: three of four samples declared as the predicted class.
    const qoi::ClassModel model = qoi::train(toy_reference(), qoi::ClassifierMode::lda, 0.0);
    qoi::IndicatorBatch batch{"fixture",
                              {qoi::make_sample({0.1}, "a"), qoi::make_sample({0.2}, "a"),
                               qoi::make_sample({9.9}, "b"), qoi::make_sample({9.8}, "a")}};
    const qoi::CorrectnessResult c = qoi::correctness(batch, model);
    ok &= expect(detail, std::abs(c.value - 0.75) <= 1e-12,
                 "correctness " + fmt(c.value) + " != 0.75");

    // Relevance: one sample per interest tier, weights 5/3/1, exact mode.
    qoi::RelevanceWeights relevance_weights;
    relevance_weights.weights = {{"targeted", 5.0}, {"trojan", 3.0}, {"ddos", 1.0}};
    relevance_weights.mode = qoi::RelevanceMode::paper_exact;
    relevance_weights.gating = qoi::RelevanceGating::all_samples;
    qoi::IndicatorBatch tiers{"fixture",
                              {qoi::make_sample({1.0}, "targeted"), qoi::make_sample({2.0}, "trojan"),
                               qoi::make_sample({3.0}, "ddos")}};
    const qoi::RelevanceResult r = qoi::relevance(tiers, relevance_weights);
    ok &= expect(detail, std::abs(r.value - 1.0) <= 1e-12, "relevance " + fmt(r.value) + " != 1");

    // Utility: one label string per specificity class, weights 5/2/1.
    qoi::IndicatorBatch strings{"fixture",
                                {qoi::make_sample({1.0}, "avzhan", "win32.avzhan.a"),
                                 qoi::make_sample({2.0}, "avzhan", "trojan.win32.gen"),
                                 qoi::make_sample({3.0}, "avzhan", "unclassified.malware")}};
    const qoi::UtilityResult u = qoi::utility(strings, qoi::UtilityWeights::defaults());
    ok &= expect(detail, std::abs(u.value - 8.0 / 3.0) <= 1e-12,
                 "utility " + fmt(u.value) + " != 8/3");

    // Aggregate: (0.8, 0.5, 0.6, 1.0) under weights (0.4, 0.3, 0.2, 0.1).
    const double q = qoi::aggregate_qoi(0.8, 0.5, 0.6, 1.0, qoi::QoIWeights{});
    ok &= expect(detail, std::abs(q - 0.69) <= 1e-12, "aggregate " + fmt(q) + " != 0.69");
    return ok;
}

bool check_free_rider_inversion(std::ostringstream& detail) {
    const qoi::Scenario scenario = qoi::default_scenario();
    const qoi::AssessorConfig config = scenario_config(scenario);
    bool ok = true;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const qoi::Community community = qoi::gen_community(scenario, seed);
        const std::vector<qoi::ScoreReport> reports =
            qoi::assess_community(community.reference, community.batches, config);
        std::vector<double> qois;
        for (const auto& report : reports) qois.push_back(report.qoi);

        const std::string tag = "seed " + std::to_string(seed) + ": ";
        const qoi::ScoreReport& spammer = report_for(reports, "spammer-01");
        const qoi::ScoreReport& altruist = report_for(reports, "altruist-01");
        ok &= expect(detail, spammer.rank_volume == 1,
                     tag + "spammer rank_volume " + std::to_string(spammer.rank_volume));
        const double spammer_pct = qoi::percentile_below(qois, spammer.qoi);
        ok &= expect(detail, spammer_pct <= 25.0,
                     tag + "spammer QoI percentile " + fmt(spammer_pct) + " above 25");
        ok &= expect(detail, spammer.free_rider, tag + "spammer not flagged");
        const double altruist_pct = qoi::percentile_below(qois, altruist.qoi);
        ok &= expect(detail, altruist_pct >= 75.0,
                     tag + "altruist QoI percentile " + fmt(altruist_pct) + " below 75");
        ok &= expect(detail, altruist.volume <= 0.2,
                     tag + "altruist volume " + fmt(altruist.volume) + " above 0.2");
    }
    return ok;
}

bool check_relevance_gating(std::ostringstream& detail) {
    const qoi::ClassModel model = qoi::train(toy_reference(), qoi::ClassifierMode::lda, 0.0);
    // Every declared label is the other class, so every correctness flag drops.
    qoi::IndicatorBatch mislabeled{
        "fixture", {qoi::make_sample({0.1}, "b"), qoi::make_sample({0.3}, "b"),
                    qoi::make_sample({9.7}, "a"), qoi::make_sample({9.9}, "a")}};
    const qoi::CorrectnessResult c = qoi::correctness(mislabeled, model);
    bool ok = expect(detail, c.value == 0.0, "correctness is not zero");

    qoi::RelevanceWeights weights;
    weights.weights = {{"a", 5.0}, {"b", 3.0}};
    weights.gating = qoi::RelevanceGating::correct_only;
    const qoi::RelevanceResult r = qoi::relevance(mislabeled, weights, &c.flags);
    ok &= expect(detail, r.value == 0.0, "gated relevance " + fmt(r.value) + " != exact 0");
    ok &= expect(detail, r.normalized == 0.0, "gated normalized relevance is not exact 0");
    return ok;
}

bool check_class_mix(std::ostringstream& detail) {
    const qoi::WorldSpec world = qoi::default_world();
    const std::vector<std::size_t> counts = qoi::gen_class_mix(world, 10000, 424242);
    std::map<qoi::FamilyCategory, double> share;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        share[world.families[i].category] += static_cast<double>(counts[i]) / 10000.0;
    }
    bool ok = expect(detail, std::abs(share[qoi::FamilyCategory::ddos] - 0.54) <= 0.02,
                     "ddos share " + fmt(share[qoi::FamilyCategory::ddos]));
    ok &= expect(detail, std::abs(share[qoi::FamilyCategory::trojan] - 0.21) <= 0.02,
                 "trojan share " + fmt(share[qoi::FamilyCategory::trojan]));
    ok &= expect(detail, std::abs(share[qoi::FamilyCategory::targeted] - 0.25) <= 0.02,
                 "targeted share " + fmt(share[qoi::FamilyCategory::targeted]));
    return ok;
}

bool reports_equal(const qoi::ScoreReport& a, const qoi::ScoreReport& b) {
    return a.contributor_id == b.contributor_id && a.k == b.k &&
           std::abs(a.correctness - b.correctness) <= 1e-12 &&
           std::abs(a.relevance - b.relevance) <= 1e-12 &&
           std::abs(a.utility - b.utility) <= 1e-12 &&
           std::abs(a.uniqueness - b.uniqueness) <= 1e-12 &&
           std::abs(a.qoi - b.qoi) <= 1e-12 && std::abs(a.volume - b.volume) <= 1e-12 &&
           a.rank_qoi == b.rank_qoi && a.rank_volume == b.rank_volume &&
           a.free_rider == b.free_rider;
}

bool check_invariants(std::ostringstream& detail) {
    bool ok = true;
    const qoi::Scenario scenario = qoi::default_scenario();
    const qoi::AssessorConfig config = scenario_config(scenario);

    // Bounds on every scored quantity, over a few full communities.
    for (std::uint64_t seed : {101, 202, 303}) {
        const qoi::Community community = qoi::gen_community(scenario, seed);
        for (const auto& report :
             qoi::assess_community(community.reference, community.batches, config)) {
            for (double v : {report.correctness, report.relevance_normalized,
                             report.utility_normalized, report.uniqueness, report.qoi,
                             report.volume}) {
                ok &= expect(detail, v >= 0.0 && v <= 1.0,
                             "bounds: " + report.contributor_id + " value " + fmt(v) +
                                 " outside [0, 1] (seed " + std::to_string(seed) + ")");
            }
        }
    }

    // Permutation and dedupe invariance: reordering a batch, or re-appending
    // duplicates of its own samples, must not move any score.
    {
        const qoi::Community community = qoi::gen_community(scenario, 55);
        const std::vector<qoi::ScoreReport> base =
            qoi::assess_community(community.reference, community.batches, config);

        qoi::Community permuted = community;
        std::reverse(permuted.batches[0].samples.begin(), permuted.batches[0].samples.end());
        const std::vector<qoi::ScoreReport> after_permute =
            qoi::assess_community(permuted.reference, permuted.batches, config);

        qoi::Community padded = community;
        auto& samples = padded.batches[0].samples;
        const std::vector<qoi::LabeledSample> head(samples.begin(), samples.begin() + 5);
        samples.insert(samples.end(), head.begin(), head.end());
        const std::vector<qoi::ScoreReport> after_dupes =
            qoi::assess_community(padded.reference, padded.batches, config);

        for (std::size_t i = 0; i < base.size(); ++i) {
            ok &= expect(detail, reports_equal(base[i], after_permute[i]),
                         "permutation moved scores for " + base[i].contributor_id);
            ok &= expect(detail, reports_equal(base[i], after_dupes[i]),
                         "duplicates moved scores for " + base[i].contributor_id);
        }
    }

    // Prior-scaling invariance: the predicted class equals the argmax of
    // c * pi_i * N(x; mu_i, Sigma) for any positive c.
    {
        qoi::Rng rng(909);
        for (int round = 0; round < 40; ++round) {
            const qoi::ClassModel model = random_model(2 + rng.next_index(3), 3, rng);
            std::vector<double> x(3);
            Eigen::VectorXd xv(3);
            for (int c = 0; c < 3; ++c) xv(c) = x[c] = 5.0 * rng.next_normal();
            for (double scale : {1.0, 7.3, 1e-3}) {
                std::size_t best = 0;
                double best_score = -kInf;
                for (std::size_t i = 0; i < model.num_classes(); ++i) {
                    const Eigen::VectorXd mu = model.centroids.row(static_cast<Eigen::Index>(i))
                                                   .transpose();
                    const double log_density = std::log(scale * model.priors[i]) -
                                               0.5 * qoi::mahalanobis_sq(xv, mu, model.precision);
                    if (log_density > best_score) {
                        best_score = log_density;
                        best = i;
                    }
                }
                ok &= expect(detail, qoi::predict(model, x).class_index == best,
                             "prior scaling " + fmt(scale) + " changed the argmax (round " +
                                 std::to_string(round) + ")");
            }
        }
    }

    // euclidean == lda whenever the covariance is the identity and the priors
    // are flat.
    {
        qoi::Rng rng(808);
        for (int round = 0; round < 25; ++round) {
            const std::size_t lambda = 2 + rng.next_index(4);
            const std::size_t d = 1 + rng.next_index(6);
            Eigen::MatrixXd centroids(static_cast<Eigen::Index>(lambda),
                                      static_cast<Eigen::Index>(d));
            for (Eigen::Index r = 0; r < centroids.rows(); ++r) {
                for (Eigen::Index c = 0; c < centroids.cols(); ++c) {
                    centroids(r, c) = 5.0 * rng.next_normal();
                }
            }
            std::vector<std::string> labels;
            for (std::size_t i = 0; i < lambda; ++i) labels.push_back("c" + std::to_string(i));
            const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(
                static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
            const std::vector<double> flat(lambda, 1.0 / static_cast<double>(lambda));
            const qoi::ClassModel plain = qoi::make_model(
                qoi::LabelSet(labels), centroids, identity, flat, qoi::ClassifierMode::euclidean);
            const qoi::ClassModel gaussian = qoi::make_model(
                qoi::LabelSet(labels), centroids, identity, flat, qoi::ClassifierMode::lda);
            for (int probe = 0; probe < 20; ++probe) {
                std::vector<double> x(d);
                for (double& v : x) v = 6.0 * rng.next_normal();
                ok &= expect(detail,
                             qoi::predict(plain, x).class_index ==
                                 qoi::predict(gaussian, x).class_index,
                             "euclidean and lda disagree under identity covariance");
            }
        }
    }

    // The analytic error rate falls strictly as the centroids separate.
    {
        double previous = kInf;
        for (double separation : {1.0, 2.0, 4.0, 8.0}) {
            const double rate =
                qoi::misclassification_rate_analytic(two_class_model(3, separation, {0.5, 0.5}));
            ok &= expect(detail, rate < previous,
                         "analytic rate did not fall at separation " + fmt(separation));
            previous = rate;
        }
    }

    // Majority vote: identity on a single assessor, medians across three.
    {
        auto stub = [](const std::string& id, double qoi_score, double volume, bool flagged) {
            qoi::ScoreReport report;
            report.contributor_id = id;
            report.k = 10;
            report.qoi = qoi_score;
            report.volume = volume;
            report.free_rider = flagged;
            return report;
        };
        std::vector<qoi::ScoreReport> solo = {stub("x", 0.4, 0.3, false),
                                              stub("y", 0.8, 0.1, false)};
        qoi::assign_ranks(solo);
        const std::vector<std::vector<qoi::ScoreReport>> one = {solo};
        const std::vector<qoi::ScoreReport> echoed = qoi::majority_vote(one);
        for (std::size_t i = 0; i < solo.size(); ++i) {
            ok &= expect(detail, reports_equal(solo[i], echoed[i]),
                         "single-assessor vote changed " + solo[i].contributor_id);
        }

        const std::vector<std::vector<qoi::ScoreReport>> three = {
            {stub("x", 0.2, 0.5, true)}, {stub("x", 0.9, 0.1, true)}, {stub("x", 0.3, 0.2, false)}};
        const std::vector<qoi::ScoreReport> voted = qoi::majority_vote(three);
        ok &= expect(detail, std::abs(voted[0].qoi - 0.3) <= 1e-12,
                     "median QoI " + fmt(voted[0].qoi) + " != 0.3");
        ok &= expect(detail, std::abs(voted[0].volume - 0.2) <= 1e-12,
                     "median volume " + fmt(voted[0].volume) + " != 0.2");
        ok &= expect(detail, voted[0].free_rider, "2-of-3 flag vote did not carry");
    }

    // Fixed seed, byte-identical artifacts: generation and report serialization.
    {
        auto render = [&]() {
            const qoi::Community community = qoi::gen_community(scenario, 77);
            std::ostringstream out;
            qoi::write_samples(out, community.batches);
            qoi::write_reference(out, community.reference);
            qoi::write_report_csv(
                out, qoi::assess_community(community.reference, community.batches, config));
            return out.str();
        };
        const std::string first = render();
        const std::string second = render();
        ok &= expect(detail, first == second, "re-run with the same seed changed output bytes");
    }
    return ok;
}

}  // namespace

int main() {
    Gate gate;
    gate.run(1, "two-class analytic error rate matches the frozen closed form and Monte Carlo",
             10.0, check_analytic_two_class);
    gate.run(2, "analytic error holds under unequal priors and a three-class geometry", 30.0,
             check_analytic_priors_and_three_class);
    gate.run(3, "predictor matches an independent brute-force discriminant on 200 random cases",
             5.0, check_predictor_oracle);
    gate.run(4, "metric arithmetic fixtures (correctness, relevance, utility, aggregate)", 0.0,
             check_metric_fixtures);
    gate.run(5, "volume/QoI inversion flags the spammer for 20 consecutive seeds", 30.0,
             check_free_rider_inversion);
    gate.run(6, "correct-only gating zeroes relevance for a fully mislabeled batch", 0.0,
             check_relevance_gating);
    gate.run(7, "class-mix generator reproduces the 54/21/25 category split at 10k samples", 0.0,
             check_class_mix);
    gate.run(8, "invariant suite (bounds, permutation/dedupe, priors, modes, voting, reruns)",
             0.0, check_invariants);

    if (gate.failures == 0) {
        std::cout << "acceptance: all 8 criteria passed\n";
    } else {
        std::cout << "acceptance: " << gate.failures << " criteria FAILED\n";
    }
    return gate.failures;
}
