#include "stockcast/ml/tree.hpp"

#include "stockcast/random.hpp"

#include <algorithm>
#include <numeric>

namespace stockcast::ml {

double Tree::predict(const Eigen::Ref<const Eigen::RowVectorXd>& x) const {
    std::size_t i = 0;
    while (!nodes[i].is_leaf()) {
        const auto& n = nodes[i];
        i = static_cast<std::size_t>(x(n.feature) <= n.threshold ? n.left : n.right);
    }
    return nodes[i].value;
}

int Tree::depth() const {
    std::vector<int> d(nodes.size(), 0);
    int deepest = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (!nodes[i].is_leaf()) {
            d[static_cast<std::size_t>(nodes[i].left)] = d[i] + 1;
            d[static_cast<std::size_t>(nodes[i].right)] = d[i] + 1;
        }
        deepest = std::max(deepest, d[i]);
    }
    return deepest;
}

namespace {

struct Split {
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
    std::size_t left_count = 0;
};

// Impurity scaled by count: SSE for variance, n * Gini for binary labels.
double impurity(SplitCriterion c, double n, double sum, double sum_sq) {
    if (n <= 0.0) return 0.0;
    if (c == SplitCriterion::Variance) {
        return std::max(0.0, sum_sq - sum * sum / n);
    }
    const double p = sum / n;
    return n * 2.0 * p * (1.0 - p);
}

class Builder {
public:
    Builder(const Eigen::MatrixXd& x, std::span<const double> y, const TreeParams& params,
            const LeafValue& leaf_value, std::mt19937_64* rng)
        : x_(x), y_(y), params_(params), leaf_value_(leaf_value), rng_(rng) {
        features_.resize(static_cast<std::size_t>(x.cols()));
        std::iota(features_.begin(), features_.end(), 0);
    }

    Tree build(std::vector<std::size_t> rows) {
        grow(std::move(rows), 0);
        return std::move(tree_);
    }

private:
    int grow(std::vector<std::size_t> rows, int depth) {
        const int id = static_cast<int>(tree_.nodes.size());
        tree_.nodes.emplace_back();
        const Split split = depth < params_.max_depth ? best_split(rows) : Split{};
        if (split.feature < 0) {
            tree_.nodes[static_cast<std::size_t>(id)].value = leaf_value_(rows);
            return id;
        }
        std::vector<std::size_t> left;
        std::vector<std::size_t> right;
        left.reserve(split.left_count);
        for (std::size_t r : rows) {
            (x_(static_cast<Eigen::Index>(r), split.feature) <= split.threshold ? left : right)
                .push_back(r);
        }
        rows.clear();
        rows.shrink_to_fit();
        const int l = grow(std::move(left), depth + 1);
        const int r = grow(std::move(right), depth + 1);
        auto& node = tree_.nodes[static_cast<std::size_t>(id)];
        node.feature = split.feature;
        node.threshold = split.threshold;
        node.left = l;
        node.right = r;
        return id;
    }

    std::vector<int> candidate_features() {
        const std::size_t p = features_.size();
        const std::size_t k = params_.max_features == 0 ? p : std::min(params_.max_features, p);
        if (k == p || rng_ == nullptr) {
            return features_;
        }
        // Partial Fisher-Yates, then restore ascending order for tie-breaking.
        std::vector<int> pool = features_;
        for (std::size_t i = 0; i < k; ++i) {
            const auto j = i + static_cast<std::size_t>(uniform_index(*rng_, p - i));
            std::swap(pool[i], pool[j]);
        }
        pool.resize(k);
        std::sort(pool.begin(), pool.end());
        return pool;
    }

    Split best_split(const std::vector<std::size_t>& rows) {
        Split best;
        const std::size_t n = rows.size();
        if (n < 2 * params_.min_samples_leaf || n < 2) {
            return best;
        }
        double sum = 0.0;
        double sum_sq = 0.0;
        for (std::size_t r : rows) {
            sum += y_[r];
            sum_sq += y_[r] * y_[r];
        }
        const double parent = impurity(params_.criterion, static_cast<double>(n), sum, sum_sq);
        // Relative floor keeps round-off from splitting a pure node.
        const double min_gain = 1e-12 * std::max(parent, 1e-300) + 1e-300;
        if (!(parent > 0.0)) {
            return best;
        }
        std::vector<std::size_t> order(rows);
        for (int f : candidate_features()) {
            std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                return x_(static_cast<Eigen::Index>(a), f) < x_(static_cast<Eigen::Index>(b), f);
            });
            double ls = 0.0;
            double lsq = 0.0;
            for (std::size_t i = 0; i + 1 < n; ++i) {
                const double v = y_[order[i]];
                ls += v;
                lsq += v * v;
                const double xi = x_(static_cast<Eigen::Index>(order[i]), f);
                const double xn = x_(static_cast<Eigen::Index>(order[i + 1]), f);
                const std::size_t nl = i + 1;
                if (xi == xn || nl < params_.min_samples_leaf || n - nl < params_.min_samples_leaf) {
                    continue;
                }
                const double child =
                    impurity(params_.criterion, static_cast<double>(nl), ls, lsq) +
                    impurity(params_.criterion, static_cast<double>(n - nl), sum - ls, sum_sq - lsq);
                const double gain = parent - child;
                if (gain > min_gain && gain > best.gain) {
                    best.feature = f;
                    const double mid = xi + (xn - xi) / 2.0;
                    best.threshold = mid < xn ? mid : xi;
                    best.gain = gain;
                    best.left_count = nl;
                }
            }
        }
        return best;
    }

    const Eigen::MatrixXd& x_;
    std::span<const double> y_;
    const TreeParams& params_;
    const LeafValue& leaf_value_;
    std::mt19937_64* rng_;
    std::vector<int> features_;
    Tree tree_;
};

}  // namespace

Tree build_tree(const Eigen::MatrixXd& x, std::span<const double> y, std::vector<std::size_t> rows,
                const TreeParams& params, const LeafValue& leaf_value, std::mt19937_64* rng) {
    return Builder(x, y, params, leaf_value, rng).build(std::move(rows));
}

}  // namespace stockcast::ml
