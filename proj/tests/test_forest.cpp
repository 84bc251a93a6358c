#include <gtest/gtest.h>

#include "proxycause/forest.hpp"

using namespace proxycause;

namespace {

struct Toy {
    FeatureMatrix x;
    std::vector<int> y;
};

// Label is the sign of x0 + x1; two more noise columns.
Toy separable(std::size_t n, std::uint64_t seed) {
    Rng r(seed);
    Toy t{FeatureMatrix(static_cast<Eigen::Index>(n), 4), {}};
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = static_cast<Eigen::Index>(i);
        double s;
        do {
            for (Eigen::Index c = 0; c < 4; ++c)
                t.x(row, c) = r.uniform(-1, 1);
            s = t.x(row, 0) + t.x(row, 1);
        } while (std::abs(s) < 0.05);
        t.y.push_back(s > 0 ? 1 : -1);
    }
    return t;
}

std::span<const double> row_of(const FeatureMatrix& x, Eigen::Index r) {
    return {x.row(r).data(), static_cast<std::size_t>(x.cols())};
}

ForestConfig small(int trees = 50) {
    ForestConfig c;
    c.num_trees = trees;
    return c;
}

} // namespace

TEST(Forest, SeparableTrainingAccuracy) {
    const auto t = separable(200, 1);
    const auto f = forest_train(t.x, t.y, small(), 7);
    int correct = 0;
    for (Eigen::Index r = 0; r < t.x.rows(); ++r)
        correct += f.predict(row_of(t.x, r)).label() == t.y[static_cast<std::size_t>(r)];
    EXPECT_EQ(correct, 200);
}

TEST(Forest, GeneralizesOnSeparableTask) {
    const auto train = separable(300, 2), test = separable(200, 3);
    const auto f = forest_train(train.x, train.y, small(100), 7);
    int correct = 0;
    for (Eigen::Index r = 0; r < test.x.rows(); ++r)
        correct += f.predict(row_of(test.x, r)).label() == test.y[static_cast<std::size_t>(r)];
    EXPECT_GE(correct, 170);
}

TEST(Forest, FlippedLabelsFlipPredictions) {
    const auto t = separable(120, 4);
    auto flipped = t.y;
    for (auto& l : flipped)
        l = -l;
    const auto a = forest_train(t.x, t.y, small(), 11);
    const auto b = forest_train(t.x, flipped, small(), 11);
    const auto probe = separable(100, 5);
    for (Eigen::Index r = 0; r < probe.x.rows(); ++r) {
        const auto da = a.predict(row_of(probe.x, r)), db = b.predict(row_of(probe.x, r));
        EXPECT_EQ(da.tie, db.tie);
        EXPECT_NEAR(a.vote_fraction(row_of(probe.x, r)), 1.0 - b.vote_fraction(row_of(probe.x, r)), 1e-12);
        if (!da.tie)
            EXPECT_EQ(da.verdict, flip(db.verdict));
    }
}

TEST(Forest, DeterministicAndJobsIndependent) {
    const auto t = separable(150, 6);
    ForestConfig one = small(), many = small();
    many.jobs = 3;
    const auto a = forest_to_json(forest_train(t.x, t.y, one, 21));
    const auto b = forest_to_json(forest_train(t.x, t.y, one, 21));
    const auto c = forest_to_json(forest_train(t.x, t.y, many, 21));
    EXPECT_EQ(a, b);
    EXPECT_EQ(a, c);
    EXPECT_NE(a, forest_to_json(forest_train(t.x, t.y, one, 22)));
}

TEST(Forest, RequiresTwoExamplesPerClass) {
    auto t = separable(20, 7);
    std::vector<int> ones(20, 1);
    EXPECT_THROW(forest_train(t.x, ones, small(), 1), DataError);
    ones[0] = -1;
    EXPECT_THROW(forest_train(t.x, ones, small(), 1), DataError);
    std::vector<int> bad(20, 1);
    bad[0] = 0;
    EXPECT_THROW(forest_train(t.x, bad, small(), 1), DataError);
    EXPECT_THROW(forest_train(t.x, std::vector<int>(5, 1), small(), 1), std::invalid_argument);
}

TEST(Forest, StructuralInvariants) {
    const auto t = separable(200, 8);
    const auto f = forest_train(t.x, t.y, small(30), 3);
    EXPECT_EQ(f.num_trees(), 30u);
    for (const auto& tree : f.trees()) {
        EXPECT_LT(tree.max_feature(), 4);
        for (const auto& nd : tree.nodes()) {
            EXPECT_GE(nd.positive_fraction, 0.0);
            EXPECT_LE(nd.positive_fraction, 1.0);
        }
    }
    const auto probe = separable(50, 9);
    for (Eigen::Index r = 0; r < probe.x.rows(); ++r) {
        const double frac = f.vote_fraction(row_of(probe.x, r));
        const auto d = f.predict(row_of(probe.x, r));
        EXPECT_DOUBLE_EQ(d.score, std::abs(frac - 0.5) * 2);
        EXPECT_EQ(d.tie, frac == 0.5);
    }
}

TEST(Forest, EvenVoteIsTie) {
    // A single tree on a sample it cannot split yields an even leaf.
    FeatureMatrix x(4, 1);
    x << 1, 1, 1, 1;
    const std::vector<int> y{1, 1, -1, -1};
    ForestConfig c = small(1);
    const auto f = forest_train(x, y, c, 0);
    const std::vector<double> probe{1.0};
    // The bootstrap may be unbalanced; only an exactly even leaf is a tie.
    const double frac = f.vote_fraction(probe);
    EXPECT_EQ(f.predict(probe).tie, frac == 0.5);
}

TEST(Forest, JsonRoundTrip) {
    const auto t = separable(100, 10);
    const auto f = forest_train(t.x, t.y, small(20), 4);
    const auto back = forest_from_json(nlohmann::json::parse(forest_to_json(f).dump()));
    for (Eigen::Index r = 0; r < t.x.rows(); ++r)
        EXPECT_EQ(f.vote_fraction(row_of(t.x, r)), back.vote_fraction(row_of(t.x, r)));
    EXPECT_EQ(back.tree_seeds(), f.tree_seeds());
}

TEST(Forest, JsonValidation) {
    const auto t = separable(60, 11);
    auto j = forest_to_json(forest_train(t.x, t.y, small(3), 4));
    auto wide = j;
    wide["width"] = 2;
    EXPECT_THROW(forest_from_json(wide), DataError);
    auto broken = j;
    broken["trees"][0]["left"] = std::vector<int>{};
    EXPECT_THROW(forest_from_json(broken), DataError);
    EXPECT_THROW(forest_from_json(nlohmann::json::object()), DataError);
    EXPECT_THROW(forest_from_json(j).vote_fraction(std::vector<double>{1.0}), std::invalid_argument);
}
