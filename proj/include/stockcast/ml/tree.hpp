#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

namespace stockcast::ml {

/// Leaf when feature < 0. Children index into the owning Tree.
struct TreeNode {
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;

    [[nodiscard]] bool is_leaf() const { return feature < 0; }
    friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

/// Nodes in creation order, root first. x[feature] <= threshold goes left.
struct Tree {
    std::vector<TreeNode> nodes;

    [[nodiscard]] double predict(const Eigen::Ref<const Eigen::RowVectorXd>& x) const;
    [[nodiscard]] int depth() const;
    friend bool operator==(const Tree&, const Tree&) = default;
};

enum class SplitCriterion { Variance, Gini };

struct TreeParams {
    int max_depth = 8;
    std::size_t min_samples_leaf = 1;
    std::size_t max_features = 0;  ///< features tried per node; 0 means all
    SplitCriterion criterion = SplitCriterion::Variance;
};

/// Leaf value from the targets of the rows reaching it.
using LeafValue = std::function<double(std::span<const std::size_t> rows)>;

/// Greedy CART on the given rows (repeats allowed, as in a bootstrap sample).
/// A split must strictly improve on the best gain so far; ties keep the
/// earlier feature and the smaller threshold. Thresholds sit midway between
/// consecutive distinct values. `rng` drives per-node feature subsampling
/// and may be null when max_features is 0.
[[nodiscard]] Tree build_tree(const Eigen::MatrixXd& x, std::span<const double> y,
                              std::vector<std::size_t> rows, const TreeParams& params,
                              const LeafValue& leaf_value, std::mt19937_64* rng);

}  // namespace stockcast::ml
