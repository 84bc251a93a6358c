#pragma once
#ifndef PROXYCAUSE_RCC_HPP
#define PROXYCAUSE_RCC_HPP

// Learning-based direction engine. A scatter sample is summarized by random
// Fourier feature approximations of three Gaussian-kernel mean embeddings
// (marginal of A, marginal of B, joint of (A, B)); a random forest trained on
// labeled samples maps that summary to a verdict.

#include <fstream>

#include "proxycause/forest.hpp"
#include "proxycause/independence.hpp"

namespace proxycause {

/// One block of random Fourier features for a `dim`-dimensional input:
/// phi_k(p) = sqrt(2/m) cos(<omega_k, p> + phase_k),
/// omega_k ~ N(0, diag(1/bandwidth^2)), phase_k ~ U[0, 2 pi).
struct RffBlock {
    std::size_t dim = 1;
    std::vector<double> bandwidths;
    std::vector<double> omega; ///< m * dim, row k holds omega_k
    std::vector<double> phase; ///< m
    std::uint64_t seed = 0;

    std::size_t size() const { return phase.size(); }

    static RffBlock generate(std::size_t m, std::vector<double> bandwidths, std::uint64_t seed) {
        if (m == 0)
            throw std::invalid_argument("rff: need at least one feature");
        if (bandwidths.empty())
            throw std::invalid_argument("rff: need at least one input dimension");
        for (double bw : bandwidths)
            if (!(bw > 0.0) || !std::isfinite(bw))
                throw std::invalid_argument("rff: bandwidth must be positive");
        RffBlock blk;
        blk.dim = bandwidths.size();
        blk.bandwidths = std::move(bandwidths);
        blk.seed = seed;
        Rng rng(seed);
        blk.omega.resize(m * blk.dim);
        blk.phase.resize(m);
        for (std::size_t k = 0; k < m; ++k)
            for (std::size_t d = 0; d < blk.dim; ++d)
                blk.omega[k * blk.dim + d] = rng.normal() / blk.bandwidths[d];
        for (std::size_t k = 0; k < m; ++k)
            blk.phase[k] = rng.uniform(0.0, 2.0 * std::numbers::pi);
        return blk;
    }
};

/// Mean feature map over points stored row-major (`points.size()` must be a
/// multiple of the block dimension). The mean is accumulated in the order
/// given, so callers needing exact permutation invariance pass a canonical
/// ordering.
inline std::vector<double> rff_embed(std::span<const double> points, const RffBlock& block) {
    if (points.empty())
        throw DataError("rff_embed: empty input");
    if (points.size() % block.dim != 0)
        throw std::invalid_argument("rff_embed: point buffer is not a multiple of the block dimension");
    const std::size_t n = points.size() / block.dim;
    const std::size_t m = block.size();
    const double scale = std::sqrt(2.0 / static_cast<double>(m));
    std::vector<double> out(m, 0.0);
    for (std::size_t k = 0; k < m; ++k) {
        const double* w = &block.omega[k * block.dim];
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double* p = &points[i * block.dim];
            double dot = block.phase[k];
            for (std::size_t d = 0; d < block.dim; ++d)
                dot += w[d] * p[d];
            s += std::cos(dot);
        }
        out[k] = scale * s / static_cast<double>(n);
    }
    return out;
}

/// The embedding layout: one 1-d block shared by both marginals (so that
/// swapping A and B swaps the marginal feature blocks exactly) and one 2-d
/// block for the joint distribution.
struct RffSpec {
    std::size_t num_features = 100;
    double bandwidth = 1.0;
    std::uint64_t seed = 0;
    RffBlock marginal;
    RffBlock joint;

    static RffSpec generate(std::size_t m, double bandwidth, std::uint64_t seed) {
        RffSpec s;
        s.num_features = m;
        s.bandwidth = bandwidth;
        s.seed = seed;
        s.marginal = RffBlock::generate(m, {bandwidth}, derive_seed(seed, "rff/marginal"));
        s.joint = RffBlock::generate(m, {bandwidth, bandwidth}, derive_seed(seed, "rff/joint"));
        return s;
    }

    std::size_t width() const { return 3 * num_features; }
};

namespace detail {
// Standardize a column using a sorted copy for the moments so that the
// result does not depend on point order.
inline std::vector<double> standardize_order_free(std::vector<double> v) {
    std::vector<double> sorted = v;
    std::sort(sorted.begin(), sorted.end());
    const double m = mean(sorted);
    double ss = 0.0;
    for (double x : sorted)
        ss += (x - m) * (x - m);
    const double sd = std::sqrt(ss / static_cast<double>(sorted.size()));
    if (!(sd > 1e-12 * std::max(1.0, std::abs(m))))
        throw DataError("constant variable");
    for (double& x : v)
        x = (x - m) / sd;
    return v;
}
} // namespace detail

/// [mu(A), mu(B), mu(A, B)] of the per-coordinate standardized sample.
/// Marginals are averaged over sorted values and the joint over
/// lexicographically sorted points, which makes the result bitwise
/// invariant to the order of the sample points.
inline std::vector<double> featurize_scatter(const ScatterSample& sample, const RffSpec& spec) {
    if (sample.size() < 2)
        throw DataError("featurize_scatter: need at least two points");
    const auto a = detail::standardize_order_free(sample.column_a());
    const auto b = detail::standardize_order_free(sample.column_b());

    std::vector<std::pair<double, double>> joint(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        joint[i] = {a[i], b[i]};
    std::sort(joint.begin(), joint.end());
    std::vector<double> flat;
    flat.reserve(2 * joint.size());
    for (const auto& [x, y] : joint) {
        flat.push_back(x);
        flat.push_back(y);
    }
    auto sa = a;
    auto sb = b;
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());

    std::vector<double> out;
    out.reserve(spec.width());
    for (const auto* col : {&sa, &sb}) {
        const auto e = rff_embed(*col, spec.marginal);
        out.insert(out.end(), e.begin(), e.end());
    }
    const auto e = rff_embed(flat, spec.joint);
    out.insert(out.end(), e.begin(), e.end());
    return out;
}

struct RccConfig {
    std::size_t num_features = 100;
    ForestConfig forest{};
};

struct RccModel {
    RffSpec rff;
    Forest forest;
};

/// Trains on the dataset augmented with mirrored copies: every (S, l) also
/// contributes (swap(S), -l). The kernel bandwidth is the median heuristic
/// over the pooled standardized coordinates.
inline RccModel rcc_train(const LabeledScatterDataset& data, const RccConfig& cfg, std::uint64_t seed) {
    bool has_pos = false, has_neg = false;
    for (const auto& item : data) {
        validate_label(item.label);
        (item.label > 0 ? has_pos : has_neg) = true;
    }
    if (!has_pos || !has_neg)
        throw DataError("rcc_train: dataset must contain both labels");

    std::vector<double> pooled;
    for (const auto& item : data) {
        const auto a = detail::standardize_order_free(item.sample.column_a());
        const auto b = detail::standardize_order_free(item.sample.column_b());
        pooled.insert(pooled.end(), a.begin(), a.end());
        pooled.insert(pooled.end(), b.begin(), b.end());
    }
    const double bandwidth = median_heuristic(pooled);

    RccModel model;
    model.rff = RffSpec::generate(cfg.num_features, bandwidth, derive_seed(seed, "rcc/rff"));
    const auto width = static_cast<Eigen::Index>(model.rff.width());
    FeatureMatrix x(static_cast<Eigen::Index>(2 * data.size()), width);
    std::vector<int> labels(2 * data.size());
    parallel_for(data.size(), cfg.forest.jobs, [&](std::size_t i) {
        const auto f = featurize_scatter(data[i].sample, model.rff);
        const auto g = featurize_scatter(data[i].sample.swapped(), model.rff);
        const auto r = static_cast<Eigen::Index>(2 * i);
        x.row(r) = Eigen::Map<const Eigen::RowVectorXd>(f.data(), width);
        x.row(r + 1) = Eigen::Map<const Eigen::RowVectorXd>(g.data(), width);
        labels[2 * i] = data[i].label;
        labels[2 * i + 1] = -data[i].label;
    });
    model.forest = forest_train(x, labels, cfg.forest, derive_seed(seed, "rcc/forest"));
    return model;
}

inline Direction rcc_predict(const RccModel& model, const ScatterSample& sample) {
    const auto f = featurize_scatter(sample, model.rff);
    return model.forest.predict(f);
}

// ---------------------------------------------------------------------------
// Model file: a single JSON document with a format tag and version, the RFF
// seeds and bandwidth (frequencies are regenerated from them) and the
// flattened trees.

inline constexpr const char* kRccFormat = "proxycause-rcc";
inline constexpr int kRccVersion = 1;

inline nlohmann::json rcc_to_json(const RccModel& model) {
    return {{"format", kRccFormat},
            {"version", kRccVersion},
            {"rff",
             {{"num_features", model.rff.num_features},
              {"bandwidth", model.rff.bandwidth},
              {"seed", model.rff.seed},
              {"marginal_seed", model.rff.marginal.seed},
              {"joint_seed", model.rff.joint.seed}}},
            {"forest", forest_to_json(model.forest)}};
}

inline RccModel rcc_from_json(const nlohmann::json& j) {
    try {
        if (j.at("format").get<std::string>() != kRccFormat)
            throw DataError("not an RCC model file");
        const int version = j.at("version").get<int>();
        if (version != kRccVersion)
            throw DataError("unsupported RCC model version " + std::to_string(version));
        const auto& r = j.at("rff");
        RccModel model;
        model.rff = RffSpec::generate(r.at("num_features").get<std::size_t>(), r.at("bandwidth").get<double>(),
                                      r.at("seed").get<std::uint64_t>());
        if (model.rff.marginal.seed != r.at("marginal_seed").get<std::uint64_t>() ||
            model.rff.joint.seed != r.at("joint_seed").get<std::uint64_t>())
            throw DataError("RCC model: block seeds do not match the master seed");
        model.forest = forest_from_json(j.at("forest"));
        if (model.forest.width() != model.rff.width())
            throw DataError("RCC model: forest width does not match the embedding width");
        return model;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("RCC model: ") + e.what());
    }
}

inline void save_rcc(const RccModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw DataError("cannot write " + path);
    out << rcc_to_json(model).dump() << '\n';
}

inline RccModel load_rcc(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot read " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError(path + ": " + e.what());
    }
    return rcc_from_json(j);
}

} // namespace proxycause

#endif
