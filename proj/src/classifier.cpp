#include "qoi/classifier.hpp"

#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <utility>

#include <nlohmann/json.hpp>

#include "qoi/error.hpp"

namespace qoi {

namespace {

using nlohmann::json;

double standard_normal_cdf(double x) {
    // Phi(x) = erfc(-x / sqrt(2)) / 2; std::erfc is accurate to a few ulp,
    // far below the 1e-7 budget.
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

Eigen::MatrixXd matrix_from_json(const json& rows, const char* what) {
    if (!rows.is_array() || rows.empty()) {
        raise(ErrorCode::parse_error, std::string("model field '") + what + "' must be a non-empty array");
    }
    const std::size_t cols = rows.front().size();
    Eigen::MatrixXd m(rows.size(), cols);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (!rows[i].is_array() || rows[i].size() != cols) {
            raise(ErrorCode::parse_error, std::string("ragged rows in model field '") + what + "'");
        }
        for (std::size_t j = 0; j < cols; ++j) m(i, j) = rows[i][j].get<double>();
    }
    return m;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

const char* to_string(ClassifierMode mode) {
    return mode == ClassifierMode::euclidean ? "euclidean" : "lda";
}

ClassifierMode classifier_mode_from(std::string_view name) {
    if (name == "euclidean") return ClassifierMode::euclidean;
    if (name == "lda") return ClassifierMode::lda;
    raise(ErrorCode::config_error, "unknown classifier mode '" + std::string(name) + "'");
}

ClassModel make_model(LabelSet label_set, Eigen::MatrixXd centroids, Eigen::MatrixXd covariance,
                      std::vector<double> priors, ClassifierMode mode, double ridge) {
    const std::size_t classes = label_set.size();
    const auto d = centroids.cols();
    if (static_cast<std::size_t>(centroids.rows()) != classes) {
        raise(ErrorCode::config_error, "centroid count does not match label count");
    }
    if (priors.size() != classes) {
        raise(ErrorCode::config_error, "prior count does not match label count");
    }
    if (covariance.rows() != d || covariance.cols() != d) {
        raise(ErrorCode::dimension_mismatch, "covariance shape does not match feature dimension");
    }

    double prior_sum = 0.0;
    for (double p : priors) {
        if (!(p >= 0.0) || !std::isfinite(p)) {
            raise(ErrorCode::config_error, "priors must be finite and non-negative");
        }
        prior_sum += p;
    }
    if (std::abs(prior_sum - 1.0) > 1e-12) {
        raise(ErrorCode::config_error, "priors must sum to 1");
    }
    if ((covariance - covariance.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
        raise(ErrorCode::config_error, "covariance must be symmetric");
    }

    ClassModel model;
    model.label_set = std::move(label_set);
    model.centroids = std::move(centroids);
    model.covariance = std::move(covariance);
    model.priors = std::move(priors);
    model.mode = mode;
    model.ridge = ridge;

    Eigen::LLT<Eigen::MatrixXd> llt(model.covariance);
    if (llt.info() != Eigen::Success) {
        raise(ErrorCode::singular_covariance, "covariance is not positive-definite");
    }
    model.chol_lower = llt.matrixL();
    model.precision = llt.solve(Eigen::MatrixXd::Identity(d, d));

    const double residual =
        (model.precision * model.covariance - Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff();
    if (!(residual <= 1e-8)) {
        raise(ErrorCode::singular_covariance,
              "covariance is too ill-conditioned (inverse residual " + std::to_string(residual) + ")");
    }
    return model;
}

ClassModel train(const ReferenceDataset& reference, ClassifierMode mode, double ridge) {
    const std::size_t classes = reference.label_set.size();
    const std::size_t d = reference.dimension();
    const std::size_t r = reference.total();
    if (!(ridge >= 0.0)) raise(ErrorCode::config_error, "ridge must be non-negative");
    for (std::size_t c = 0; c < classes; ++c) {
        if (reference.class_counts[c] < 2) {
            raise(ErrorCode::train_error,
                  "class '" + reference.label_set.name(c) + "' has fewer than 2 samples");
        }
    }
    if (mode == ClassifierMode::lda && r <= classes) {
        raise(ErrorCode::train_error,
              "pooled covariance needs more samples than classes (" + std::to_string(r) + " <= " +
                  std::to_string(classes) + ")");
    }

    Eigen::MatrixXd centroids = Eigen::MatrixXd::Zero(classes, d);
    std::vector<double> priors(classes, 0.0);
    for (const auto& sample : reference.samples) {
        const auto c = reference.label_set.index_of(sample.declared_label);
        if (!c) raise(ErrorCode::train_error, "reference label outside the label set");
        for (std::size_t j = 0; j < d; ++j) centroids(*c, j) += sample.features[j];
        priors[*c] += 1.0;
    }
    for (std::size_t c = 0; c < classes; ++c) {
        centroids.row(c) /= priors[c];
        priors[c] /= static_cast<double>(r);
    }

    Eigen::MatrixXd covariance;
    if (mode == ClassifierMode::euclidean) {
        covariance = Eigen::MatrixXd::Identity(d, d);
    } else {
        Eigen::MatrixXd scatter = Eigen::MatrixXd::Zero(d, d);
        for (const auto& sample : reference.samples) {
            const auto c = *reference.label_set.index_of(sample.declared_label);
            Eigen::VectorXd dev(d);
            for (std::size_t j = 0; j < d; ++j) dev(j) = sample.features[j] - centroids(c, j);
            scatter.noalias() += dev * dev.transpose();
        }
        covariance = scatter / static_cast<double>(r - classes);
        if (ridge > 0.0) {
            double scale = covariance.trace() / static_cast<double>(d);
            if (!(scale > 0.0)) scale = 1.0;  // zero scatter: fall back to an absolute ridge
            covariance += ridge * scale * Eigen::MatrixXd::Identity(d, d);
        }
    }

    return make_model(reference.label_set, std::move(centroids), std::move(covariance),
                      std::move(priors), mode, ridge);
}

double mahalanobis_sq(const Eigen::VectorXd& x, const Eigen::VectorXd& mu,
                      const Eigen::MatrixXd& precision) {
    if (x.size() != mu.size() || precision.rows() != x.size() || precision.cols() != x.size()) {
        raise(ErrorCode::dimension_mismatch, "mahalanobis_sq operands disagree on dimension");
    }
    const Eigen::VectorXd diff = x - mu;
    return diff.dot(precision * diff);
}

Prediction predict(const ClassModel& model, std::span<const double> features) {
    const std::size_t d = model.dimension();
    if (features.size() != d) {
        raise(ErrorCode::dimension_mismatch,
              "sample has dimension " + std::to_string(features.size()) + ", model expects " +
                  std::to_string(d));
    }
    Eigen::VectorXd x(d);
    for (std::size_t j = 0; j < d; ++j) {
        if (!std::isfinite(features[j])) {
            raise(ErrorCode::non_finite_feature, "sample feature is not finite");
        }
        x(j) = features[j];
    }

    Prediction prediction;
    prediction.scores.resize(model.num_classes());
    for (std::size_t c = 0; c < model.num_classes(); ++c) {
        const Eigen::VectorXd mu = model.centroids.row(c).transpose();
        if (model.mode == ClassifierMode::euclidean) {
            prediction.scores[c] = (x - mu).squaredNorm();
        } else {
            prediction.scores[c] = mahalanobis_sq(x, mu, model.precision) - 2.0 * std::log(model.priors[c]);
        }
    }

    std::size_t best = 0;
    for (std::size_t c = 1; c < prediction.scores.size(); ++c) {
        if (prediction.scores[c] < prediction.scores[best]) best = c;
    }
    prediction.class_index = best;
    prediction.label = model.label_set.name(best);
    return prediction;
}

double misclassification_rate_analytic(const ClassModel& model) {
    if (model.mode != ClassifierMode::lda) {
        raise(ErrorCode::usage_error, "analytic rate is defined for lda-mode models");
    }
    const std::size_t classes = model.num_classes();
    if (classes < 2) return 0.0;

    double total = 0.0;
    for (std::size_t j = 0; j < classes; ++j) {
        double nearest = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < classes; ++i) {
            if (i == j) continue;
            const Eigen::VectorXd mu_j = model.centroids.row(j).transpose();
            const Eigen::VectorXd mu_i = model.centroids.row(i).transpose();
            const double dist_sq = mahalanobis_sq(mu_j, mu_i, model.precision);
            if (!(dist_sq > 0.0)) {
                raise(ErrorCode::degenerate_centroids,
                      "classes '" + model.label_set.name(j) + "' and '" + model.label_set.name(i) +
                          "' have coincident centroids");
            }
            const double dist = std::sqrt(dist_sq);
            const double boundary = (dist_sq + 2.0 * std::log(model.priors[j] / model.priors[i])) / (2.0 * dist);
            nearest = std::min(nearest, boundary);
        }
        total += (1.0 - standard_normal_cdf(nearest)) * model.priors[j];
    }
    return total;
}

EmpiricalRate misclassification_rate_empirical(const ClassModel& model, std::uint64_t trials,
                                               std::uint64_t seed) {
    if (trials < 1) raise(ErrorCode::usage_error, "trials must be at least 1");

    Rng rng(seed);
    std::uint64_t wrong = 0;
    std::vector<double> cumulative(model.num_classes());
    double acc = 0.0;
    for (std::size_t c = 0; c < model.num_classes(); ++c) {
        acc += model.priors[c];
        cumulative[c] = acc;
    }

    std::vector<double> features(model.dimension());
    for (std::uint64_t t = 0; t < trials; ++t) {
        const double u = rng.next_uniform();
        std::size_t cls = model.num_classes() - 1;
        for (std::size_t c = 0; c < cumulative.size(); ++c) {
            if (u < cumulative[c]) {
                cls = c;
                break;
            }
        }
        const Eigen::VectorXd x = sample_from_model(model, cls, rng);
        for (std::size_t j = 0; j < features.size(); ++j) features[j] = x(j);
        if (predict(model, features).class_index != cls) ++wrong;
    }

    EmpiricalRate result;
    result.trials = trials;
    result.rate = static_cast<double>(wrong) / static_cast<double>(trials);
    result.std_error = std::sqrt(result.rate * (1.0 - result.rate) / static_cast<double>(trials));
    return result;
}

Eigen::VectorXd sample_from_model(const ClassModel& model, std::size_t class_index, Rng& rng) {
    if (class_index >= model.num_classes()) {
        raise(ErrorCode::usage_error, "class index out of range");
    }
    const std::size_t d = model.dimension();
    Eigen::VectorXd z(d);
    for (std::size_t j = 0; j < d; ++j) z(j) = rng.next_normal();
    return model.centroids.row(class_index).transpose() + model.chol_lower * z;
}

void save_model(std::ostream& stream, const ClassModel& model) {
    json doc;
    doc["mode"] = to_string(model.mode);
    doc["ridge"] = model.ridge;
    doc["labels"] = model.label_set.names();
    doc["centroids"] = matrix_to_json(model.centroids);
    doc["covariance"] = matrix_to_json(model.covariance);
    doc["priors"] = model.priors;
    stream << doc.dump(2) << '\n';
}

ClassModel load_model(std::istream& stream) {
    const json doc = json::parse(stream, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
        raise(ErrorCode::parse_error, "model file is not a JSON object");
    }
    for (const char* field : {"mode", "labels", "centroids", "covariance", "priors"}) {
        if (!doc.contains(field)) {
            raise(ErrorCode::parse_error, std::string("model file is missing field '") + field + "'");
        }
    }
    LabelSet labels(doc["labels"].get<std::vector<std::string>>());
    return make_model(std::move(labels), matrix_from_json(doc["centroids"], "centroids"),
                      matrix_from_json(doc["covariance"], "covariance"),
                      doc["priors"].get<std::vector<double>>(),
                      classifier_mode_from(doc["mode"].get<std::string>()),
                      doc.value("ridge", 0.0));
}

}  // namespace qoi
