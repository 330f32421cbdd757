#include "stockcast/ml/model.hpp"

#include "stockcast/data/series.hpp"
#include "stockcast/error.hpp"
#include "stockcast/random.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numbers>
#include <numeric>
#include <thread>

namespace stockcast::ml {

namespace {

constexpr std::pair<ModelKind, const char*> kKindNames[] = {
    {ModelKind::Ols, "ols"},
    {ModelKind::Knn, "knn"},
    {ModelKind::Tree, "tree"},
    {ModelKind::RandomForest, "random_forest"},
    {ModelKind::GradientBoost, "gradient_boost"},
    {ModelKind::GaussianNb, "gaussian_nb"},
    {ModelKind::Logistic, "logistic"},
};

double sigmoid(double z) {
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

void check_dataset(const Dataset& data) {
    if (data.features.rows() == 0 || data.features.cols() == 0) {
        throw Error(ErrorKind::Data, "dataset is empty");
    }
    if (data.targets.size() != data.features.rows()) {
        throw Error(ErrorKind::Shape, "dataset has " + std::to_string(data.features.rows()) +
                                          " rows but " + std::to_string(data.targets.size()) +
                                          " targets");
    }
    if (!data.features.allFinite() || !data.targets.allFinite()) {
        throw Error(ErrorKind::Data, "dataset contains non-finite values");
    }
}

void check_binary(const Dataset& data) {
    std::size_t ones = 0;
    for (Eigen::Index i = 0; i < data.targets.size(); ++i) {
        const double v = data.targets(i);
        if (v != 0.0 && v != 1.0) {
            throw Error(ErrorKind::Label, "classification labels must be 0 or 1, got " +
                                              std::to_string(v) + " at row " + std::to_string(i));
        }
        ones += v == 1.0 ? 1 : 0;
    }
    if (ones == 0 || ones == data.rows()) {
        throw Error(ErrorKind::Label, "classification needs both classes present");
    }
}

void check_width(const FittedModel& model, const Eigen::MatrixXd& features) {
    if (static_cast<std::size_t>(features.cols()) != model.n_features) {
        throw Error(ErrorKind::Shape, "model expects " + std::to_string(model.n_features) +
                                          " features, got " + std::to_string(features.cols()));
    }
}

// Population moments so that duplicating the training set changes nothing.
void fit_scaler(const Eigen::MatrixXd& x, FittedModel& model) {
    const auto p = static_cast<std::size_t>(x.cols());
    model.feature_mean.assign(p, 0.0);
    model.feature_scale.assign(p, 1.0);
    for (std::size_t j = 0; j < p; ++j) {
        const auto col = x.col(static_cast<Eigen::Index>(j));
        const double mean = col.mean();
        const double var = (col.array() - mean).square().mean();
        model.feature_mean[j] = mean;
        model.feature_scale[j] = var > 0.0 ? std::sqrt(var) : 1.0;
    }
}

Eigen::MatrixXd apply_scaler(const FittedModel& model, const Eigen::MatrixXd& x) {
    Eigen::MatrixXd z = x;
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        const auto ju = static_cast<std::size_t>(j);
        z.col(j) = (z.col(j).array() - model.feature_mean[ju]) / model.feature_scale[ju];
    }
    return z;
}

std::vector<double> to_vector(const Eigen::VectorXd& v) {
    return {v.data(), v.data() + v.size()};
}

void fit_ols(const Dataset& data, FittedModel& model) {
    const auto n = data.features.rows();
    const auto p = data.features.cols();
    if (n <= p + 1) {
        throw Error(ErrorKind::InsufficientData, "ols needs more rows (" + std::to_string(n) +
                                                     ") than coefficients (" +
                                                     std::to_string(p + 1) + ")");
    }
    Eigen::MatrixXd x(n, p + 1);
    x.col(0).setOnes();
    x.rightCols(p) = data.features;
    Eigen::MatrixXd gram = x.transpose() * x;
    const Eigen::VectorXd rhs = x.transpose() * data.targets;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
    const bool singular = ldlt.info() != Eigen::Success || !(ldlt.rcond() > 1e-13) ||
                          !ldlt.isPositive();
    if (singular) {
        if (!model.hyperparameters.ridge_fallback) {
            throw Error(ErrorKind::Numeric, "ols normal equations are singular");
        }
        // The intercept is left unpenalised.
        const double lambda = model.hyperparameters.ridge_lambda * gram.diagonal().mean();
        gram.diagonal().tail(p).array() += std::max(lambda, 1e-300);
        ldlt.compute(gram);
        if (ldlt.info() != Eigen::Success) {
            throw Error(ErrorKind::Numeric, "ols ridge system is singular");
        }
    }
    model.coefficients = to_vector(ldlt.solve(rhs));
}

void fit_knn(const Dataset& data, FittedModel& model) {
    const std::size_t k = model.hyperparameters.knn_k;
    if (k == 0 || k > data.rows()) {
        throw Error(ErrorKind::Parameter, "knn k must lie in [1, " + std::to_string(data.rows()) +
                                              "], got " + std::to_string(k));
    }
    fit_scaler(data.features, model);
    model.train_features = apply_scaler(model, data.features);
    model.train_targets = to_vector(data.targets);
}

Eigen::VectorXd predict_knn(const FittedModel& model, const Eigen::MatrixXd& features) {
    const Eigen::MatrixXd z = apply_scaler(model, features);
    const auto n = static_cast<std::size_t>(model.train_features.rows());
    const std::size_t k = model.hyperparameters.knn_k;
    Eigen::VectorXd out(z.rows());
    std::vector<std::pair<double, std::size_t>> dist(n);
    for (Eigen::Index q = 0; q < z.rows(); ++q) {
        for (std::size_t i = 0; i < n; ++i) {
            dist[i] = {(model.train_features.row(static_cast<Eigen::Index>(i)) - z.row(q))
                           .squaredNorm(),
                       i};
        }
        // Pair ordering breaks distance ties by the lower training index.
        std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
        double sum = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            sum += model.train_targets[dist[j].second];
        }
        out(q) = sum / static_cast<double>(k);
    }
    return out;
}

std::vector<std::size_t> all_rows(std::size_t n) {
    std::vector<std::size_t> rows(n);
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    return rows;
}

LeafValue mean_leaf(std::span<const double> y) {
    return [y](std::span<const std::size_t> rows) {
        double sum = 0.0;
        for (std::size_t r : rows) sum += y[r];
        return sum / static_cast<double>(rows.size());
    };
}

void fit_tree(const Dataset& data, FittedModel& model) {
    const auto y = to_vector(data.targets);
    const auto& hp = model.hyperparameters;
    const TreeParams params{hp.tree_max_depth, hp.min_samples_leaf, hp.max_features,
                            model.task == Task::Classification ? SplitCriterion::Gini
                                                               : SplitCriterion::Variance};
    std::mt19937_64 rng(splitmix64(model.seed));
    model.trees = {build_tree(data.features, y, all_rows(data.rows()), params, mean_leaf(y), &rng)};
}

void fit_forest(const Dataset& data, FittedModel& model) {
    const auto& hp = model.hyperparameters;
    if (hp.n_trees == 0) {
        throw Error(ErrorKind::Parameter, "random forest needs at least one tree");
    }
    const auto y = to_vector(data.targets);
    const std::size_t n = data.rows();
    const std::size_t p = data.cols();
    const std::size_t max_features =
        hp.max_features != 0
            ? hp.max_features
            : std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(p))));
    const TreeParams params{hp.tree_max_depth, hp.min_samples_leaf, max_features,
                            model.task == Task::Classification ? SplitCriterion::Gini
                                                               : SplitCriterion::Variance};
    const auto leaf = mean_leaf(y);
    model.trees.assign(hp.n_trees, Tree{});

    // Each tree owns a stream seeded from (seed, tree index), so the fitted
    // forest does not depend on how trees are scheduled.
    auto fit_one = [&](std::size_t t) {
        std::mt19937_64 rng(splitmix64(model.seed + t));
        std::vector<std::size_t> rows(n);
        for (auto& r : rows) r = static_cast<std::size_t>(uniform_index(rng, n));
        model.trees[t] = build_tree(data.features, y, std::move(rows), params, leaf, &rng);
    };
    const unsigned workers = std::max(1u, std::min<unsigned>(hp.threads, static_cast<unsigned>(hp.n_trees)));
    if (workers == 1) {
        for (std::size_t t = 0; t < hp.n_trees; ++t) fit_one(t);
        return;
    }
    std::vector<std::exception_ptr> errors(workers);
    {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t t = w; t < hp.n_trees; t += workers) fit_one(t);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

// Squared loss for regression, log-loss with Newton leaf values for
// classification. Trees are always grown on the residuals by variance.
void fit_boost(const Dataset& data, FittedModel& model) {
    const auto& hp = model.hyperparameters;
    if (!(hp.learning_rate > 0.0)) {
        throw Error(ErrorKind::Parameter, "boosting learning rate must be positive");
    }
    const std::size_t n = data.rows();
    const auto y = to_vector(data.targets);
    const bool classify = model.task == Task::Classification;
    const double mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
    model.base_score = classify ? std::log(mean / (1.0 - mean)) : mean;
    std::vector<double> f(n, model.base_score);
    std::vector<double> residual(n);
    std::vector<double> hessian(n, 1.0);
    const TreeParams params{hp.boost_max_depth, hp.min_samples_leaf, 0, SplitCriterion::Variance};
    const auto rows = all_rows(n);
    LeafValue leaf = [&](std::span<const std::size_t> idx) {
        double g = 0.0;
        double h = 0.0;
        for (std::size_t r : idx) {
            g += residual[r];
            h += hessian[r];
        }
        return h > 1e-12 ? g / h : 0.0;
    };
    model.trees.clear();
    for (std::size_t round = 0; round < hp.boost_rounds; ++round) {
        for (std::size_t i = 0; i < n; ++i) {
            if (classify) {
                const double prob = sigmoid(f[i]);
                residual[i] = y[i] - prob;
                hessian[i] = prob * (1.0 - prob);
            } else {
                residual[i] = y[i] - f[i];
            }
        }
        auto tree = build_tree(data.features, residual, rows, params, leaf, nullptr);
        for (std::size_t i = 0; i < n; ++i) {
            f[i] += hp.learning_rate * tree.predict(data.features.row(static_cast<Eigen::Index>(i)));
        }
        model.trees.push_back(std::move(tree));
    }
}

double boost_raw(const FittedModel& model, const Eigen::Ref<const Eigen::RowVectorXd>& x) {
    double f = model.base_score;
    for (const auto& tree : model.trees) {
        f += model.hyperparameters.learning_rate * tree.predict(x);
    }
    return f;
}

double tree_mean(const FittedModel& model, const Eigen::Ref<const Eigen::RowVectorXd>& x) {
    double sum = 0.0;
    for (const auto& tree : model.trees) sum += tree.predict(x);
    return sum / static_cast<double>(model.trees.size());
}

void fit_gaussian_nb(const Dataset& data, FittedModel& model) {
    const std::size_t p = data.cols();
    model.class_prior.assign(2, 0.0);
    model.class_mean.assign(2, std::vector<double>(p, 0.0));
    model.class_variance.assign(2, std::vector<double>(p, 0.0));
    std::vector<double> count(2, 0.0);
    for (Eigen::Index i = 0; i < data.features.rows(); ++i) {
        const auto c = static_cast<std::size_t>(data.targets(i));
        count[c] += 1.0;
        for (std::size_t j = 0; j < p; ++j) {
            model.class_mean[c][j] += data.features(i, static_cast<Eigen::Index>(j));
        }
    }
    for (std::size_t c = 0; c < 2; ++c) {
        for (double& m : model.class_mean[c]) m /= count[c];
        model.class_prior[c] = count[c] / static_cast<double>(data.rows());
    }
    for (Eigen::Index i = 0; i < data.features.rows(); ++i) {
        const auto c = static_cast<std::size_t>(data.targets(i));
        for (std::size_t j = 0; j < p; ++j) {
            const double d = data.features(i, static_cast<Eigen::Index>(j)) - model.class_mean[c][j];
            model.class_variance[c][j] += d * d;
        }
    }
    for (std::size_t c = 0; c < 2; ++c) {
        for (double& v : model.class_variance[c]) {
            v = std::max(v / count[c], model.hyperparameters.nb_variance_floor);
        }
    }
}

double nb_score(const FittedModel& model, const Eigen::Ref<const Eigen::RowVectorXd>& x) {
    double log_joint[2];
    for (std::size_t c = 0; c < 2; ++c) {
        double s = std::log(model.class_prior[c]);
        for (std::size_t j = 0; j < model.n_features; ++j) {
            const double var = model.class_variance[c][j];
            const double d = x(static_cast<Eigen::Index>(j)) - model.class_mean[c][j];
            s -= 0.5 * (std::log(2.0 * std::numbers::pi * var) + d * d / var);
        }
        log_joint[c] = s;
    }
    return sigmoid(log_joint[1] - log_joint[0]);
}

void fit_logistic(const Dataset& data, FittedModel& model) {
    const auto& hp = model.hyperparameters;
    fit_scaler(data.features, model);
    const Eigen::MatrixXd z = apply_scaler(model, data.features);
    const auto n = static_cast<double>(data.rows());
    const auto p = z.cols();
    double bias = 0.0;
    Eigen::VectorXd w = Eigen::VectorXd::Zero(p);
    for (std::size_t it = 0; it < hp.logistic_iterations; ++it) {
        Eigen::VectorXd err(z.rows());
        for (Eigen::Index i = 0; i < z.rows(); ++i) {
            err(i) = sigmoid(bias + z.row(i).dot(w)) - data.targets(i);
        }
        const double grad_b = err.sum() / n;
        const Eigen::VectorXd grad_w = z.transpose() * err / n;
        bias -= hp.logistic_rate * grad_b;
        w -= hp.logistic_rate * grad_w;
        if (std::max(std::abs(grad_b), grad_w.cwiseAbs().maxCoeff()) < hp.logistic_tolerance) {
            break;
        }
    }
    model.coefficients.assign(1, bias);
    model.coefficients.insert(model.coefficients.end(), w.data(), w.data() + w.size());
}

FittedModel prepare(const Dataset& data, ModelKind kind, Task task, const Hyperparameters& hp,
                    std::uint64_t seed) {
    check_dataset(data);
    FittedModel model;
    model.kind = kind;
    model.task = task;
    model.hyperparameters = hp;
    model.seed = seed;
    model.n_features = data.cols();
    model.n_train = data.rows();
    model.feature_names = data.feature_names;
    if (!model.feature_names.empty() && model.feature_names.size() != model.n_features) {
        throw Error(ErrorKind::Shape, "feature_names does not match the feature count");
    }
    return model;
}

}  // namespace

std::string to_string(ModelKind kind) {
    for (const auto& [k, name] : kKindNames) {
        if (k == kind) return name;
    }
    return "unknown";
}

std::optional<ModelKind> parse_model_kind(std::string_view text) {
    for (const auto& [k, name] : kKindNames) {
        if (text == name) return k;
    }
    return std::nullopt;
}

std::string to_string(Task task) {
    return task == Task::Regression ? "regression" : "classification";
}

Dataset to_dataset(const data::FeatureMatrix& matrix) {
    Dataset out;
    const auto n = static_cast<Eigen::Index>(matrix.rows.size());
    const auto p = static_cast<Eigen::Index>(matrix.feature_names.size());
    out.features.resize(n, p);
    out.targets.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& row = matrix.rows[static_cast<std::size_t>(i)];
        if (static_cast<Eigen::Index>(row.size()) != p) {
            throw Error(ErrorKind::Shape, "feature row " + std::to_string(i) + " has " +
                                              std::to_string(row.size()) + " values, expected " +
                                              std::to_string(p));
        }
        for (Eigen::Index j = 0; j < p; ++j) out.features(i, j) = row[static_cast<std::size_t>(j)];
        out.targets(i) = matrix.labels.at(static_cast<std::size_t>(i));
    }
    out.feature_names = matrix.feature_names;
    return out;
}

FittedModel fit_regressor(const Dataset& data, ModelKind kind, const Hyperparameters& hp,
                          std::uint64_t seed) {
    auto model = prepare(data, kind, Task::Regression, hp, seed);
    if (data.rows() < 2) {
        throw Error(ErrorKind::InsufficientData, "regression needs at least 2 rows");
    }
    switch (kind) {
        case ModelKind::Ols: fit_ols(data, model); break;
        case ModelKind::Knn: fit_knn(data, model); break;
        case ModelKind::Tree: fit_tree(data, model); break;
        case ModelKind::RandomForest: fit_forest(data, model); break;
        case ModelKind::GradientBoost: fit_boost(data, model); break;
        default:
            throw Error(ErrorKind::Parameter, to_string(kind) + " is not a regression model");
    }
    return model;
}

FittedModel fit_classifier(const Dataset& data, ModelKind kind, const Hyperparameters& hp,
                           std::uint64_t seed) {
    auto model = prepare(data, kind, Task::Classification, hp, seed);
    if (data.rows() < 4) {
        throw Error(ErrorKind::InsufficientData, "classification needs at least 4 rows");
    }
    check_binary(data);
    switch (kind) {
        case ModelKind::Knn: fit_knn(data, model); break;
        case ModelKind::Tree: fit_tree(data, model); break;
        case ModelKind::RandomForest: fit_forest(data, model); break;
        case ModelKind::GradientBoost: fit_boost(data, model); break;
        case ModelKind::GaussianNb: fit_gaussian_nb(data, model); break;
        case ModelKind::Logistic: fit_logistic(data, model); break;
        default:
            throw Error(ErrorKind::Parameter, to_string(kind) + " is not a classification model");
    }
    return model;
}

Eigen::VectorXd predict_regressor(const FittedModel& model, const Eigen::MatrixXd& features) {
    if (model.task != Task::Regression) {
        throw Error(ErrorKind::Parameter, "predict_regressor called on a classification model");
    }
    check_width(model, features);
    Eigen::VectorXd out(features.rows());
    switch (model.kind) {
        case ModelKind::Ols: {
            const Eigen::Map<const Eigen::VectorXd> beta(model.coefficients.data(),
                                                         static_cast<Eigen::Index>(model.coefficients.size()));
            out = (features * beta.tail(beta.size() - 1)).array() + beta(0);
            return out;
        }
        case ModelKind::Knn: return predict_knn(model, features);
        case ModelKind::Tree:
        case ModelKind::RandomForest:
            for (Eigen::Index i = 0; i < features.rows(); ++i) out(i) = tree_mean(model, features.row(i));
            return out;
        case ModelKind::GradientBoost:
            for (Eigen::Index i = 0; i < features.rows(); ++i) out(i) = boost_raw(model, features.row(i));
            return out;
        default:
            throw Error(ErrorKind::Parameter, "model kind cannot regress");
    }
}

Eigen::VectorXd predict_scores(const FittedModel& model, const Eigen::MatrixXd& features) {
    if (model.task != Task::Classification) {
        throw Error(ErrorKind::Parameter, "predict_scores called on a regression model");
    }
    check_width(model, features);
    Eigen::VectorXd out(features.rows());
    switch (model.kind) {
        case ModelKind::Knn: return predict_knn(model, features);
        case ModelKind::Tree:
        case ModelKind::RandomForest:
            for (Eigen::Index i = 0; i < features.rows(); ++i) out(i) = tree_mean(model, features.row(i));
            return out;
        case ModelKind::GradientBoost:
            for (Eigen::Index i = 0; i < features.rows(); ++i) out(i) = sigmoid(boost_raw(model, features.row(i)));
            return out;
        case ModelKind::GaussianNb:
            for (Eigen::Index i = 0; i < features.rows(); ++i) out(i) = nb_score(model, features.row(i));
            return out;
        case ModelKind::Logistic: {
            const Eigen::MatrixXd z = apply_scaler(model, features);
            const Eigen::Map<const Eigen::VectorXd> w(model.coefficients.data() + 1,
                                                      static_cast<Eigen::Index>(model.n_features));
            for (Eigen::Index i = 0; i < z.rows(); ++i) {
                out(i) = sigmoid(model.coefficients[0] + z.row(i).dot(w));
            }
            return out;
        }
        default:
            throw Error(ErrorKind::Parameter, "model kind cannot classify");
    }
}

std::vector<int> predict_labels(const FittedModel& model, const Eigen::MatrixXd& features) {
    const auto scores = predict_scores(model, features);
    std::vector<int> out(static_cast<std::size_t>(scores.size()));
    for (Eigen::Index i = 0; i < scores.size(); ++i) {
        out[static_cast<std::size_t>(i)] = scores(i) >= 0.5 ? 1 : 0;
    }
    return out;
}

}  // namespace stockcast::ml
