#pragma once

#include "stockcast/ml/tree.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace stockcast::data {
struct FeatureMatrix;
}

namespace stockcast::ml {

struct Dataset {
    Eigen::MatrixXd features;  ///< n x p
    Eigen::VectorXd targets;   ///< length n; {0, 1} for classification
    std::vector<std::string> feature_names;

    [[nodiscard]] std::size_t rows() const { return static_cast<std::size_t>(features.rows()); }
    [[nodiscard]] std::size_t cols() const { return static_cast<std::size_t>(features.cols()); }
};

[[nodiscard]] Dataset to_dataset(const data::FeatureMatrix& matrix);

enum class ModelKind { Ols, Knn, Tree, RandomForest, GradientBoost, GaussianNb, Logistic };
enum class Task { Regression, Classification };

[[nodiscard]] std::string to_string(ModelKind kind);
[[nodiscard]] std::optional<ModelKind> parse_model_kind(std::string_view text);
[[nodiscard]] std::string to_string(Task task);

struct Hyperparameters {
    std::size_t knn_k = 5;
    int tree_max_depth = 8;
    std::size_t min_samples_leaf = 1;
    std::size_t n_trees = 100;
    std::size_t max_features = 0;  ///< 0: sqrt(p) for forests, all p for single trees
    std::size_t boost_rounds = 100;
    double learning_rate = 0.1;
    int boost_max_depth = 3;
    std::size_t logistic_iterations = 500;
    double logistic_rate = 0.1;
    double logistic_tolerance = 1e-9;
    double nb_variance_floor = 1e-9;
    bool ridge_fallback = true;
    double ridge_lambda = 1e-8;  ///< relative to the mean diagonal of the Gram matrix
    unsigned threads = 1;        ///< forest trees fitted in parallel; output is unaffected

    friend bool operator==(const Hyperparameters&, const Hyperparameters&) = default;
};

/// Only the members that belong to `kind` are populated.
struct FittedModel {
    ModelKind kind = ModelKind::Ols;
    Task task = Task::Regression;
    Hyperparameters hyperparameters;
    std::uint64_t seed = 0;
    std::size_t n_features = 0;
    std::size_t n_train = 0;
    std::vector<std::string> feature_names;

    std::vector<double> coefficients;  ///< ols: intercept first; logistic: bias first
    std::vector<double> feature_mean;  ///< knn and logistic z-scoring
    std::vector<double> feature_scale;
    Eigen::MatrixXd train_features;    ///< knn store, already z-scored
    std::vector<double> train_targets;
    std::vector<Tree> trees;
    double base_score = 0.0;           ///< boosting: mean or log-odds
    std::vector<double> class_prior;   ///< gaussian nb: P(0), P(1)
    std::vector<std::vector<double>> class_mean;
    std::vector<std::vector<double>> class_variance;
};

/// ols, knn, tree, random_forest, gradient_boost.
[[nodiscard]] FittedModel fit_regressor(const Dataset& data, ModelKind kind,
                                        const Hyperparameters& hp = {}, std::uint64_t seed = 42);

/// knn, tree, random_forest, gradient_boost, gaussian_nb, logistic.
[[nodiscard]] FittedModel fit_classifier(const Dataset& data, ModelKind kind,
                                         const Hyperparameters& hp = {}, std::uint64_t seed = 42);

[[nodiscard]] Eigen::VectorXd predict_regressor(const FittedModel& model,
                                                const Eigen::MatrixXd& features);

/// Class-1 probability per row.
[[nodiscard]] Eigen::VectorXd predict_scores(const FittedModel& model,
                                             const Eigen::MatrixXd& features);

/// Scores thresholded at 0.5 (a score of exactly 0.5 is class 1).
[[nodiscard]] std::vector<int> predict_labels(const FittedModel& model,
                                              const Eigen::MatrixXd& features);

}  // namespace stockcast::ml
