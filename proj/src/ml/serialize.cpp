#include "stockcast/ml/serialize.hpp"

#include "stockcast/error.hpp"

#include <nlohmann/json.hpp>

namespace stockcast::ml {

namespace {

nlohmann::json tree_json(const Tree& tree) {
    auto nodes = nlohmann::json::array();
    for (const auto& n : tree.nodes) {
        nodes.push_back({n.feature, n.threshold, n.left, n.right, n.value});
    }
    return nodes;
}

Tree tree_from(const nlohmann::json& j) {
    Tree tree;
    for (const auto& n : j) {
        tree.nodes.push_back({n.at(0).get<int>(), n.at(1).get<double>(), n.at(2).get<int>(),
                              n.at(3).get<int>(), n.at(4).get<double>()});
    }
    // Children must point forward so prediction always terminates.
    for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
        const auto& n = tree.nodes[i];
        if (n.is_leaf()) continue;
        const auto size = static_cast<int>(tree.nodes.size());
        if (n.left <= static_cast<int>(i) || n.right <= static_cast<int>(i) || n.left >= size ||
            n.right >= size) {
            throw Error(ErrorKind::Data, "model json: malformed tree node " + std::to_string(i));
        }
    }
    return tree;
}

nlohmann::json hyper_json(const Hyperparameters& hp) {
    return {{"knn_k", hp.knn_k},
            {"tree_max_depth", hp.tree_max_depth},
            {"min_samples_leaf", hp.min_samples_leaf},
            {"n_trees", hp.n_trees},
            {"max_features", hp.max_features},
            {"boost_rounds", hp.boost_rounds},
            {"learning_rate", hp.learning_rate},
            {"boost_max_depth", hp.boost_max_depth},
            {"logistic_iterations", hp.logistic_iterations},
            {"logistic_rate", hp.logistic_rate},
            {"logistic_tolerance", hp.logistic_tolerance},
            {"nb_variance_floor", hp.nb_variance_floor},
            {"ridge_fallback", hp.ridge_fallback},
            {"ridge_lambda", hp.ridge_lambda}};
}

Hyperparameters hyper_from(const nlohmann::json& j) {
    Hyperparameters hp;
    j.at("knn_k").get_to(hp.knn_k);
    j.at("tree_max_depth").get_to(hp.tree_max_depth);
    j.at("min_samples_leaf").get_to(hp.min_samples_leaf);
    j.at("n_trees").get_to(hp.n_trees);
    j.at("max_features").get_to(hp.max_features);
    j.at("boost_rounds").get_to(hp.boost_rounds);
    j.at("learning_rate").get_to(hp.learning_rate);
    j.at("boost_max_depth").get_to(hp.boost_max_depth);
    j.at("logistic_iterations").get_to(hp.logistic_iterations);
    j.at("logistic_rate").get_to(hp.logistic_rate);
    j.at("logistic_tolerance").get_to(hp.logistic_tolerance);
    j.at("nb_variance_floor").get_to(hp.nb_variance_floor);
    j.at("ridge_fallback").get_to(hp.ridge_fallback);
    j.at("ridge_lambda").get_to(hp.ridge_lambda);
    return hp;
}

}  // namespace

void to_json(nlohmann::json& j, const FittedModel& model) {
    nlohmann::json params;
    params["coefficients"] = model.coefficients;
    params["feature_mean"] = model.feature_mean;
    params["feature_scale"] = model.feature_scale;
    auto rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < model.train_features.rows(); ++i) {
        const Eigen::RowVectorXd r = model.train_features.row(i);
        rows.push_back(std::vector<double>(r.data(), r.data() + r.size()));
    }
    params["train_features"] = rows;
    params["train_targets"] = model.train_targets;
    auto trees = nlohmann::json::array();
    for (const auto& t : model.trees) trees.push_back(tree_json(t));
    params["trees"] = trees;
    params["base_score"] = model.base_score;
    params["class_prior"] = model.class_prior;
    params["class_mean"] = model.class_mean;
    params["class_variance"] = model.class_variance;

    j = nlohmann::json{{"kind", to_string(model.kind)},
                       {"task", to_string(model.task)},
                       {"seed", model.seed},
                       {"n_features", model.n_features},
                       {"n_train", model.n_train},
                       {"feature_names", model.feature_names},
                       {"hyperparameters", hyper_json(model.hyperparameters)},
                       {"parameters", params}};
}

void from_json(const nlohmann::json& j, FittedModel& model) {
    try {
        const auto kind = parse_model_kind(j.at("kind").get<std::string>());
        if (!kind) {
            throw Error(ErrorKind::Data, "model json: unknown kind " + j.at("kind").dump());
        }
        model = FittedModel{};
        model.kind = *kind;
        const auto task = j.at("task").get<std::string>();
        if (task != "regression" && task != "classification") {
            throw Error(ErrorKind::Data, "model json: unknown task " + task);
        }
        model.task = task == "regression" ? Task::Regression : Task::Classification;
        j.at("seed").get_to(model.seed);
        j.at("n_features").get_to(model.n_features);
        j.at("n_train").get_to(model.n_train);
        j.at("feature_names").get_to(model.feature_names);
        model.hyperparameters = hyper_from(j.at("hyperparameters"));
        const auto& p = j.at("parameters");
        p.at("coefficients").get_to(model.coefficients);
        p.at("feature_mean").get_to(model.feature_mean);
        p.at("feature_scale").get_to(model.feature_scale);
        const auto rows = p.at("train_features").get<std::vector<std::vector<double>>>();
        model.train_features.resize(static_cast<Eigen::Index>(rows.size()),
                                    static_cast<Eigen::Index>(rows.empty() ? 0 : model.n_features));
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != model.n_features) {
                throw Error(ErrorKind::Data, "model json: train_features row width mismatch");
            }
            for (std::size_t k = 0; k < rows[i].size(); ++k) {
                model.train_features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
            }
        }
        p.at("train_targets").get_to(model.train_targets);
        for (const auto& t : p.at("trees")) model.trees.push_back(tree_from(t));
        p.at("base_score").get_to(model.base_score);
        p.at("class_prior").get_to(model.class_prior);
        p.at("class_mean").get_to(model.class_mean);
        p.at("class_variance").get_to(model.class_variance);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::Data, std::string("model json: ") + e.what());
    }
    validate_model(model);
}

void validate_model(const FittedModel& model) {
    const std::size_t p = model.n_features;
    bool ok = true;
    switch (model.kind) {
        case ModelKind::Ols:
        case ModelKind::Logistic:
            ok = model.coefficients.size() == p + 1;
            if (model.kind == ModelKind::Logistic) {
                ok = ok && model.feature_mean.size() == p && model.feature_scale.size() == p;
            }
            break;
        case ModelKind::Knn:
            ok = model.feature_mean.size() == p && model.feature_scale.size() == p &&
                 static_cast<std::size_t>(model.train_features.rows()) == model.train_targets.size() &&
                 model.hyperparameters.knn_k >= 1 &&
                 model.hyperparameters.knn_k <= model.train_targets.size();
            break;
        case ModelKind::Tree:
        case ModelKind::RandomForest:
            ok = !model.trees.empty();
            [[fallthrough]];
        case ModelKind::GradientBoost:
            for (const auto& t : model.trees) {
                ok = ok && !t.nodes.empty();
                for (const auto& n : t.nodes) {
                    ok = ok && (n.is_leaf() || static_cast<std::size_t>(n.feature) < p);
                }
            }
            break;
        case ModelKind::GaussianNb:
            ok = model.class_prior.size() == 2 && model.class_mean.size() == 2 &&
                 model.class_variance.size() == 2 && model.class_mean[0].size() == p &&
                 model.class_mean[1].size() == p && model.class_variance[0].size() == p &&
                 model.class_variance[1].size() == p;
            break;
    }
    if (!ok) {
        throw Error(ErrorKind::Data, "model json: parameters do not match kind " +
                                         to_string(model.kind) + " with " + std::to_string(p) +
                                         " features");
    }
}

}  // namespace stockcast::ml
