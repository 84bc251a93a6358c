#pragma once
#ifndef PROXYCAUSE_FOREST_HPP
#define PROXYCAUSE_FOREST_HPP

// Random forest of axis-aligned CART trees (bagging, Gini impurity, random
// feature subsets per split) for binary +1/-1 labels.

#include <Eigen/Dense>

#include "proxycause/core.hpp"

namespace proxycause {

using FeatureMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct ForestConfig {
    int num_trees = 500;
    /// Minimum number of training samples in each child of a split.
    int min_leaf = 2;
    /// Features tried per split; 0 means round(sqrt(width)).
    int features_per_split = 0;
    unsigned jobs = 1;
};

class DecisionTree {
public:
    struct Node {
        int feature = -1; ///< -1 marks a leaf
        double threshold = 0.0;
        int left = -1;
        int right = -1;
        double positive_fraction = 0.5; ///< fraction of +1 labels reaching this node
    };

    DecisionTree() = default;
    explicit DecisionTree(std::vector<Node> nodes) : nodes_(std::move(nodes)) {}

    /// Fraction of +1 training labels in the leaf that `row` falls into.
    template <class Row>
    double positive_fraction(const Row& row) const {
        int i = 0;
        while (nodes_[static_cast<std::size_t>(i)].feature >= 0) {
            const Node& nd = nodes_[static_cast<std::size_t>(i)];
            i = row[nd.feature] <= nd.threshold ? nd.left : nd.right;
        }
        return nodes_[static_cast<std::size_t>(i)].positive_fraction;
    }

    /// 1 for a +1 majority, 0 for a -1 majority, 0.5 for an even leaf.
    template <class Row>
    double vote(const Row& row) const {
        const double p = positive_fraction(row);
        return p > 0.5 ? 1.0 : (p < 0.5 ? 0.0 : 0.5);
    }

    const std::vector<Node>& nodes() const { return nodes_; }

    int max_feature() const {
        int m = -1;
        for (const auto& nd : nodes_)
            m = std::max(m, nd.feature);
        return m;
    }

private:
    std::vector<Node> nodes_;
};

namespace detail {

// Count-weighted Gini impurity total * 2p(1-p), written so that swapping
// the two classes gives a bitwise identical value.
inline double weighted_gini(double pos, double total) {
    if (total <= 0.0)
        return 0.0;
    return 2.0 * (pos * (total - pos)) / total;
}

inline DecisionTree grow_tree(const FeatureMatrix& x, std::span<const int> labels, std::vector<std::size_t> sample,
                              int min_leaf, int per_split, Rng& rng) {
    const int width = static_cast<int>(x.cols());
    std::vector<DecisionTree::Node> nodes;
    struct Pending {
        int node;
        std::size_t begin, end;
    };
    std::vector<Pending> stack;

    auto positives = [&](std::size_t b, std::size_t e) {
        double pos = 0.0;
        for (std::size_t i = b; i < e; ++i)
            pos += labels[sample[i]] > 0 ? 1.0 : 0.0;
        return pos;
    };

    nodes.push_back({});
    stack.push_back({0, 0, sample.size()});
    std::vector<int> feature_order(static_cast<std::size_t>(width));
    std::vector<std::pair<double, int>> column;

    while (!stack.empty()) {
        const Pending cur = stack.back();
        stack.pop_back();
        const std::size_t count = cur.end - cur.begin;
        const double pos = positives(cur.begin, cur.end);
        nodes[static_cast<std::size_t>(cur.node)].positive_fraction = pos / static_cast<double>(count);
        if (pos == 0.0 || pos == static_cast<double>(count) || count < 2 * static_cast<std::size_t>(min_leaf))
            continue;

        for (int f = 0; f < width; ++f)
            feature_order[static_cast<std::size_t>(f)] = f;
        int best_feature = -1;
        double best_threshold = 0.0;
        double best_impurity = std::numeric_limits<double>::infinity();
        int evaluated = 0;
        // Draw features without replacement; constant features do not count
        // toward the per-split budget.
        for (int drawn = 0; drawn < width && evaluated < per_split; ++drawn) {
            const auto pick = drawn + static_cast<int>(rng.below(static_cast<std::uint64_t>(width - drawn)));
            std::swap(feature_order[static_cast<std::size_t>(drawn)], feature_order[static_cast<std::size_t>(pick)]);
            const int f = feature_order[static_cast<std::size_t>(drawn)];

            column.clear();
            for (std::size_t i = cur.begin; i < cur.end; ++i)
                column.emplace_back(x(static_cast<Eigen::Index>(sample[i]), f), labels[sample[i]]);
            std::sort(column.begin(), column.end());
            if (column.front().first == column.back().first)
                continue;
            ++evaluated;

            double left_pos = 0.0;
            for (std::size_t i = 0; i + 1 < count; ++i) {
                left_pos += column[i].second > 0 ? 1.0 : 0.0;
                const std::size_t nl = i + 1;
                const std::size_t nr = count - nl;
                if (column[i].first == column[i + 1].first)
                    continue;
                if (nl < static_cast<std::size_t>(min_leaf) || nr < static_cast<std::size_t>(min_leaf))
                    continue;
                const double impurity = weighted_gini(left_pos, static_cast<double>(nl)) +
                                        weighted_gini(pos - left_pos, static_cast<double>(nr));
                if (impurity < best_impurity) {
                    best_impurity = impurity;
                    best_feature = f;
                    best_threshold = 0.5 * (column[i].first + column[i + 1].first);
                    // Guard against the midpoint rounding onto the upper value.
                    if (!(best_threshold < column[i + 1].first))
                        best_threshold = column[i].first;
                }
            }
        }
        if (best_feature < 0)
            continue;

        const auto mid = std::partition(sample.begin() + static_cast<std::ptrdiff_t>(cur.begin),
                                        sample.begin() + static_cast<std::ptrdiff_t>(cur.end), [&](std::size_t r) {
                                            return x(static_cast<Eigen::Index>(r), best_feature) <= best_threshold;
                                        });
        const auto split = static_cast<std::size_t>(mid - sample.begin());
        const int left = static_cast<int>(nodes.size());
        nodes.push_back({});
        const int right = static_cast<int>(nodes.size());
        nodes.push_back({});
        auto& nd = nodes[static_cast<std::size_t>(cur.node)];
        nd.feature = best_feature;
        nd.threshold = best_threshold;
        nd.left = left;
        nd.right = right;
        stack.push_back({right, split, cur.end});
        stack.push_back({left, cur.begin, split});
    }
    return DecisionTree(std::move(nodes));
}

} // namespace detail

class Forest {
public:
    Forest() = default;
    Forest(std::size_t width, std::vector<DecisionTree> trees, std::vector<std::uint64_t> tree_seeds)
        : width_(width), trees_(std::move(trees)), seeds_(std::move(tree_seeds)) {
        for (const auto& t : trees_)
            if (t.max_feature() >= static_cast<int>(width_))
                throw DataError("forest: split feature exceeds input width");
    }

    std::size_t width() const { return width_; }
    std::size_t num_trees() const { return trees_.size(); }
    const std::vector<DecisionTree>& trees() const { return trees_; }
    const std::vector<std::uint64_t>& tree_seeds() const { return seeds_; }

    /// Fraction of trees voting +1 (even leaves count half).
    double vote_fraction(std::span<const double> row) const {
        if (row.size() != width_)
            throw std::invalid_argument("forest: feature width mismatch");
        double votes = 0.0;
        for (const auto& t : trees_)
            votes += t.vote(row);
        return votes / static_cast<double>(trees_.size());
    }

    /// Verdict by majority vote; score = |fraction - 0.5| * 2.
    Direction predict(std::span<const double> row) const {
        const double frac = vote_fraction(row);
        if (frac == 0.5)
            return {Verdict::XtoY, 0.0, true};
        return {frac > 0.5 ? Verdict::XtoY : Verdict::YtoX, std::abs(frac - 0.5) * 2.0, false};
    }

private:
    std::size_t width_ = 0;
    std::vector<DecisionTree> trees_;
    std::vector<std::uint64_t> seeds_;
};

/// Bagged CART forest. Deterministic given `seed`; each tree draws from its
/// own stream so parallel training matches sequential training.
inline Forest forest_train(const FeatureMatrix& features, std::span<const int> labels, const ForestConfig& cfg,
                           std::uint64_t seed) {
    const auto n = static_cast<std::size_t>(features.rows());
    if (labels.size() != n)
        throw std::invalid_argument("forest_train: label count differs from row count");
    if (features.cols() == 0)
        throw std::invalid_argument("forest_train: zero-width features");
    if (cfg.num_trees < 1)
        throw std::invalid_argument("forest_train: need at least one tree");
    std::size_t npos = 0, nneg = 0;
    for (int l : labels) {
        validate_label(l);
        (l > 0 ? npos : nneg) += 1;
    }
    if (npos < 2 || nneg < 2)
        throw DataError("forest_train: need at least two examples of each class");
    if (!features.allFinite())
        throw DataError("forest_train: non-finite feature");

    const int per_split = cfg.features_per_split > 0
                              ? std::min<int>(cfg.features_per_split, static_cast<int>(features.cols()))
                              : std::max(1, static_cast<int>(std::lround(std::sqrt(static_cast<double>(features.cols())))));
    const auto num_trees = static_cast<std::size_t>(cfg.num_trees);
    std::vector<DecisionTree> trees(num_trees);
    std::vector<std::uint64_t> seeds(num_trees);
    for (std::size_t t = 0; t < num_trees; ++t)
        seeds[t] = derive_seed(seed, "forest/tree/" + std::to_string(t));

    parallel_for(num_trees, cfg.jobs, [&](std::size_t t) {
        Rng rng(seeds[t]);
        std::vector<std::size_t> bag(n);
        for (auto& i : bag)
            i = static_cast<std::size_t>(rng.below(n));
        trees[t] = detail::grow_tree(features, labels, std::move(bag), cfg.min_leaf, per_split, rng);
    });
    return Forest(static_cast<std::size_t>(features.cols()), std::move(trees), std::move(seeds));
}

inline nlohmann::json forest_to_json(const Forest& forest) {
    nlohmann::json trees = nlohmann::json::array();
    for (std::size_t t = 0; t < forest.num_trees(); ++t) {
        std::vector<int> feature, left, right;
        std::vector<double> threshold, fraction;
        for (const auto& nd : forest.trees()[t].nodes()) {
            feature.push_back(nd.feature);
            threshold.push_back(nd.threshold);
            left.push_back(nd.left);
            right.push_back(nd.right);
            fraction.push_back(nd.positive_fraction);
        }
        trees.push_back({{"seed", forest.tree_seeds()[t]},
                         {"feature", feature},
                         {"threshold", threshold},
                         {"left", left},
                         {"right", right},
                         {"positive_fraction", fraction}});
    }
    return {{"width", forest.width()}, {"trees", trees}};
}

inline Forest forest_from_json(const nlohmann::json& j) {
    try {
        const auto width = j.at("width").get<std::size_t>();
        std::vector<DecisionTree> trees;
        std::vector<std::uint64_t> seeds;
        for (const auto& t : j.at("trees")) {
            const auto feature = t.at("feature").get<std::vector<int>>();
            const auto threshold = t.at("threshold").get<std::vector<double>>();
            const auto left = t.at("left").get<std::vector<int>>();
            const auto right = t.at("right").get<std::vector<int>>();
            const auto fraction = t.at("positive_fraction").get<std::vector<double>>();
            const std::size_t m = feature.size();
            if (m == 0 || threshold.size() != m || left.size() != m || right.size() != m || fraction.size() != m)
                throw DataError("forest: inconsistent tree arrays");
            std::vector<DecisionTree::Node> nodes(m);
            for (std::size_t i = 0; i < m; ++i) {
                nodes[i] = {feature[i], threshold[i], left[i], right[i], fraction[i]};
                if (feature[i] >= 0 && (left[i] <= static_cast<int>(i) || right[i] <= static_cast<int>(i) ||
                                        left[i] >= static_cast<int>(m) || right[i] >= static_cast<int>(m)))
                    throw DataError("forest: invalid child index");
            }
            trees.emplace_back(std::move(nodes));
            seeds.push_back(t.at("seed").get<std::uint64_t>());
        }
        if (trees.empty())
            throw DataError("forest: no trees");
        return Forest(width, std::move(trees), std::move(seeds));
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("forest: ") + e.what());
    }
}

} // namespace proxycause

#endif
