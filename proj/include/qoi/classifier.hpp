#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qoi/indicator_model.hpp"
#include "qoi/rng.hpp"

namespace qoi {

enum class ClassifierMode { euclidean, lda };

const char* to_string(ClassifierMode mode);
ClassifierMode classifier_mode_from(std::string_view name);

// Shared-covariance Gaussian class model. Each class is summarized by its
// centroid; lda mode scores samples by squared Mahalanobis distance minus a
// log-prior term, euclidean mode by plain squared distance with the identity
// covariance and priors ignored.
struct ClassModel {
    LabelSet label_set;
    Eigen::MatrixXd centroids;    // one row per class
    Eigen::MatrixXd covariance;   // d x d, positive-definite after regularization
    Eigen::MatrixXd precision;    // cached inverse of covariance
    Eigen::MatrixXd chol_lower;   // Cholesky factor of covariance, used for sampling
    std::vector<double> priors;
    ClassifierMode mode = ClassifierMode::lda;
    double ridge = 0.0;

    std::size_t num_classes() const { return priors.size(); }
    std::size_t dimension() const { return static_cast<std::size_t>(centroids.cols()); }
};

struct Prediction {
    std::size_t class_index;      // argmin of the scores; ties go to the lowest index
    std::string label;
    std::vector<double> scores;   // per-class discriminant, lower means closer
};

// Validates the model invariants (priors sum to 1, covariance symmetric and
// invertible) and fills the cached factorizations.
ClassModel make_model(LabelSet label_set, Eigen::MatrixXd centroids, Eigen::MatrixXd covariance,
                      std::vector<double> priors, ClassifierMode mode, double ridge = 0.0);

// Centroids are per-class means, priors are class frequencies, and the
// covariance is the pooled within-class scatter with divisor (r - lambda),
// regularized by adding ridge * (trace/d) * I (an absolute ridge * I when the
// scatter is exactly zero). euclidean mode stores the identity covariance.
ClassModel train(const ReferenceDataset& reference, ClassifierMode mode = ClassifierMode::lda,
                 double ridge = 1e-6);

// (x - mu)^T precision (x - mu)
double mahalanobis_sq(const Eigen::VectorXd& x, const Eigen::VectorXd& mu,
                      const Eigen::MatrixXd& precision);

Prediction predict(const ClassModel& model, std::span<const double> features);

// Prior-weighted error probability from the pairwise centroid distances:
// per class, the nearest decision boundary is at
// (d_ij^2 + 2 log(pi_j / pi_i)) / (2 d_ij) Mahalanobis units, and the mass
// beyond it under the class Gaussian is 1 - Phi of that. Exact for two
// classes; for three or more it ignores simultaneous-error events.
double misclassification_rate_analytic(const ClassModel& model);

struct EmpiricalRate {
    double rate = 0.0;
    double std_error = 0.0;
    std::uint64_t trials = 0;
};

// Monte Carlo estimate: draw a class from the priors, a sample from its
// Gaussian, and count prediction mismatches. Deterministic given the seed.
EmpiricalRate misclassification_rate_empirical(const ClassModel& model, std::uint64_t trials,
                                               std::uint64_t seed);

// mu_i + L z with L the Cholesky factor of the covariance.
Eigen::VectorXd sample_from_model(const ClassModel& model, std::size_t class_index, Rng& rng);

// Single-record JSON export; stored decimals survive a round-trip bit-exactly.
void save_model(std::ostream& stream, const ClassModel& model);
ClassModel load_model(std::istream& stream);

}  // namespace qoi
