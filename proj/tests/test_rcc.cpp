#include <gtest/gtest.h>

#include "proxycause/rcc.hpp"
#include "proxycause/synthetic.hpp"

using namespace proxycause;

namespace {

std::vector<double> shuffled(const std::vector<double>& v, std::size_t dim, std::uint64_t seed) {
    Rng r(seed);
    const auto perm = r.permutation(v.size() / dim);
    std::vector<double> out;
    for (auto i : perm)
        for (std::size_t d = 0; d < dim; ++d)
            out.push_back(v[i * dim + d]);
    return out;
}

ScatterSample permuted(const ScatterSample& s, std::uint64_t seed) {
    Rng r(seed);
    const auto perm = r.permutation(s.size());
    std::vector<Point> pts;
    for (auto i : perm)
        pts.push_back(s[i]);
    return ScatterSample(pts);
}

double dist(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

RccConfig quick_config(int trees = 100) {
    RccConfig c;
    c.num_features = 40;
    c.forest.num_trees = trees;
    return c;
}

} // namespace

TEST(Rff, SinglePointIsFeatureMap) {
    const auto blk = RffBlock::generate(16, {0.7, 1.3}, 5);
    const std::vector<double> p{0.4, -1.2};
    const auto e = rff_embed(p, blk);
    for (std::size_t k = 0; k < 16; ++k) {
        const double expect = std::sqrt(2.0 / 16) * std::cos(blk.omega[2 * k] * 0.4 + blk.omega[2 * k + 1] * -1.2 + blk.phase[k]);
        EXPECT_NEAR(e[k], expect, 1e-15);
    }
}

TEST(Rff, EntriesBoundedAndShuffleInvariant) {
    const auto blk = RffBlock::generate(32, {1.0}, 6);
    Rng r(1);
    std::vector<double> pts(200);
    for (auto& p : pts)
        p = r.normal();
    const auto e = rff_embed(pts, blk);
    const auto f = rff_embed(shuffled(pts, 1, 2), blk);
    const double bound = std::sqrt(2.0 / 32);
    for (std::size_t k = 0; k < e.size(); ++k) {
        EXPECT_LE(std::abs(e[k]), bound);
        EXPECT_NEAR(e[k], f[k], 1e-12);
    }
}

TEST(Rff, SameDistributionCloserThanShifted) {
    const auto blk = RffBlock::generate(100, {1.0}, 7);
    Rng r(3);
    std::vector<double> a(2000), b(2000), c(2000);
    for (std::size_t i = 0; i < 2000; ++i) {
        a[i] = r.normal();
        b[i] = r.normal();
        c[i] = r.normal() + 1.0;
    }
    const auto ea = rff_embed(a, blk), eb = rff_embed(b, blk), ec = rff_embed(c, blk);
    EXPECT_LT(dist(ea, eb), dist(ea, ec));
}

TEST(Rff, Errors) {
    EXPECT_THROW(RffBlock::generate(0, {1.0}, 1), std::invalid_argument);
    EXPECT_THROW(RffBlock::generate(4, {}, 1), std::invalid_argument);
    EXPECT_THROW(RffBlock::generate(4, {0.0}, 1), std::invalid_argument);
    const auto blk = RffBlock::generate(4, {1.0, 1.0}, 1);
    EXPECT_THROW(rff_embed(std::vector<double>{}, blk), DataError);
    EXPECT_THROW(rff_embed(std::vector<double>{1, 2, 3}, blk), std::invalid_argument);
}

TEST(Featurize, TenPointDirectFormula) {
    const std::vector<Point> pts{{0.3, 1.1},  {-0.7, 0.2}, {1.5, 2.4},  {0.0, -0.5}, {2.2, 1.9},
                                 {-1.1, 0.8}, {0.9, -1.3}, {0.45, 0.6}, {-0.2, 2.7}, {1.25, 0.05}};
    const ScatterSample s(pts);
    const auto spec = RffSpec::generate(4, 0.8, 99);
    const auto f = featurize_scatter(s, spec);
    ASSERT_EQ(f.size(), 12u);

    // Population standardization per coordinate, then plain cosine sums.
    std::vector<double> a, b;
    for (const auto& p : pts) {
        a.push_back(p.a);
        b.push_back(p.b);
    }
    auto zscore = [](std::vector<double> v) {
        double m = 0, ss = 0;
        for (double x : v)
            m += x;
        m /= 10;
        for (double x : v)
            ss += (x - m) * (x - m);
        const double sd = std::sqrt(ss / 10);
        for (double& x : v)
            x = (x - m) / sd;
        return v;
    };
    a = zscore(a);
    b = zscore(b);
    const double scale = std::sqrt(2.0 / 4);
    for (std::size_t k = 0; k < 4; ++k) {
        double ma = 0, mb = 0, mj = 0;
        for (std::size_t i = 0; i < 10; ++i) {
            ma += std::cos(spec.marginal.omega[k] * a[i] + spec.marginal.phase[k]);
            mb += std::cos(spec.marginal.omega[k] * b[i] + spec.marginal.phase[k]);
            mj += std::cos(spec.joint.omega[2 * k] * a[i] + spec.joint.omega[2 * k + 1] * b[i] + spec.joint.phase[k]);
        }
        EXPECT_NEAR(f[k], scale * ma / 10, 1e-12);
        EXPECT_NEAR(f[4 + k], scale * mb / 10, 1e-12);
        EXPECT_NEAR(f[8 + k], scale * mj / 10, 1e-12);
    }
}

TEST(Featurize, BitwisePermutationInvariance) {
    const auto spec = RffSpec::generate(50, 1.0, 3);
    for (int t = 0; t < 10; ++t) {
        const auto s = synth_anm_pair(300, Mechanism::Tanh, NoiseKind::Gaussian, 40 + t).sample;
        EXPECT_EQ(featurize_scatter(s, spec), featurize_scatter(permuted(s, t), spec));
    }
}

TEST(Featurize, SwapExchangesMarginalBlocks) {
    const auto spec = RffSpec::generate(20, 1.0, 4);
    const auto s = synth_anm_pair(200, Mechanism::Cubic, NoiseKind::Uniform, 8).sample;
    const auto f = featurize_scatter(s, spec), g = featurize_scatter(s.swapped(), spec);
    for (std::size_t k = 0; k < 20; ++k) {
        EXPECT_EQ(f[k], g[20 + k]);
        EXPECT_EQ(f[20 + k], g[k]);
    }
    // Joint block of the swap is the embedding of the swapped standardized points.
    const auto za = standardize(s.column_b()), zb = standardize(s.column_a());
    std::vector<double> flat;
    for (std::size_t i = 0; i < za.size(); ++i) {
        flat.push_back(za[i]);
        flat.push_back(zb[i]);
    }
    const auto joint = rff_embed(flat, spec.joint);
    for (std::size_t k = 0; k < 20; ++k)
        EXPECT_NEAR(g[40 + k], joint[k], 1e-12);
}

TEST(Featurize, DegenerateCoordinate) {
    EXPECT_THROW(featurize_scatter(ScatterSample({{1, 2}, {1, 3}, {1, 4}}), RffSpec::generate(4, 1, 1)), DataError);
    EXPECT_THROW(featurize_scatter(ScatterSample({{1, 2}}), RffSpec::generate(4, 1, 1)), DataError);
}

TEST(Rcc, MirrorPairGetsOppositeVerdicts) {
    const auto s = synth_anm_pair(200, Mechanism::Cubic, NoiseKind::Uniform, 12).sample;
    const LabeledScatterDataset data{{s, 1}, {s.swapped(), -1}};
    const auto model = rcc_train(data, quick_config(), 5);
    const auto d = rcc_predict(model, s), e = rcc_predict(model, s.swapped());
    EXPECT_FALSE(d.tie);
    EXPECT_EQ(d.verdict, Verdict::XtoY);
    EXPECT_EQ(e.verdict, Verdict::YtoX);
}

TEST(Rcc, RequiresBothLabels) {
    const auto s = synth_anm_pair(50, Mechanism::Cubic, NoiseKind::Uniform, 1).sample;
    EXPECT_THROW(rcc_train({{s, 1}, {s, 1}}, quick_config(), 1), DataError);
}

TEST(Rcc, LearnsSyntheticDirections) {
    const auto train = synth_anm_dataset(120, 300, 21);
    const auto test = synth_anm_dataset(80, 300, 22);
    const auto model = rcc_train(train, quick_config(200), 1);
    int correct = 0, antisym = 0, decided = 0;
    for (const auto& item : test) {
        const auto d = rcc_predict(model, item.sample);
        correct += !d.tie && d.label() == item.label;
        const auto e = rcc_predict(model, item.sample.swapped());
        if (!d.tie && !e.tie) {
            ++decided;
            antisym += e.verdict == flip(d.verdict);
        }
        // Point order never changes the prediction.
        EXPECT_EQ(rcc_predict(model, permuted(item.sample, 3)).score, d.score);
    }
    EXPECT_GE(correct, 56); // 70% of 80
    EXPECT_GE(antisym * 100, 95 * decided);
}

TEST(Rcc, DeterministicAndJsonRoundTrip) {
    const auto train = synth_anm_dataset(30, 150, 31);
    const auto probe = synth_anm_dataset(10, 150, 32);
    auto cfg = quick_config(40);
    const auto m1 = rcc_train(train, cfg, 4);
    cfg.forest.jobs = 2;
    const auto m2 = rcc_train(train, cfg, 4);
    EXPECT_EQ(rcc_to_json(m1), rcc_to_json(m2));
    const auto back = rcc_from_json(nlohmann::json::parse(rcc_to_json(m1).dump()));
    for (const auto& item : probe) {
        const auto a = rcc_predict(m1, item.sample), b = rcc_predict(back, item.sample);
        EXPECT_EQ(a.verdict, b.verdict);
        EXPECT_EQ(a.score, b.score);
    }
    auto bad = rcc_to_json(m1);
    bad["version"] = 7;
    EXPECT_THROW(rcc_from_json(bad), DataError);
    bad = rcc_to_json(m1);
    bad["rff"]["num_features"] = 41;
    EXPECT_THROW(rcc_from_json(bad), DataError);
    bad = rcc_to_json(m1);
    bad["format"] = "other";
    EXPECT_THROW(rcc_from_json(bad), DataError);
}
