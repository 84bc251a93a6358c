#pragma once
#ifndef PROXYCAUSE_EXPERIMENTS_HPP
#define PROXYCAUSE_EXPERIMENTS_HPP

// Evaluation protocols: repeated random train/test splits over labeled
// scatter samples or word pairs, exact binomial significance and accuracy
// as a function of annotator consensus.

#include <functional>
#include <optional>

#include "proxycause/proxy_text.hpp"
#include "proxycause/rcc.hpp"
#include "proxycause/synthetic.hpp"
#include "proxycause/word_pairs.hpp"

namespace proxycause {

// ---------------------------------------------------------------------------
// Statistics

/// One-sided exact tail P[Bin(N, p0) >= round(accuracy * N)].
inline double binomial_significance(double accuracy, std::size_t n, double p0 = 0.5) {
    if (!(accuracy >= 0.0 && accuracy <= 1.0))
        throw std::invalid_argument("binomial_significance: accuracy must lie in [0, 1]");
    if (n == 0)
        throw std::invalid_argument("binomial_significance: N must be at least 1");
    if (!(p0 > 0.0 && p0 < 1.0))
        throw std::invalid_argument("binomial_significance: p0 must lie in (0, 1)");
    const auto k = static_cast<std::size_t>(std::llround(accuracy * static_cast<double>(n)));
    if (k == 0)
        return 1.0;
    if (p0 == 0.5 && n <= 62) {
        // Integer binomial coefficients: the tail is an exact dyadic rational.
        std::uint64_t c = 1, tail = 0; // c = C(n, i)
        for (std::size_t i = 0; i <= n; ++i) {
            if (i >= k)
                tail += c;
            if (i < n)
                c = c / (i + 1) * (n - i) + c % (i + 1) * (n - i) / (i + 1);
        }
        return std::ldexp(static_cast<double>(tail), -static_cast<int>(n));
    }
    // Probabilities relative to the mode via the ratio recurrence, then
    // normalized by their total. For p0 = 0.5 the weights are exactly
    // symmetric, so a tail that is half the mass comes out as exactly 0.5.
    const auto mode = std::min(n, static_cast<std::size_t>(std::floor(static_cast<double>(n + 1) * p0)));
    const double odds = p0 / (1.0 - p0);
    std::vector<double> w(n + 1, 0.0);
    w[mode] = 1.0;
    for (std::size_t i = mode; i < n; ++i)
        w[i + 1] = w[i] * (static_cast<double>(n - i) / static_cast<double>(i + 1)) * odds;
    for (std::size_t i = mode; i > 0; --i)
        w[i - 1] = w[i] * (static_cast<double>(i) / static_cast<double>(n - i + 1)) / odds;
    double upper = 0.0, lower = 0.0;
    for (std::size_t i = n + 1; i-- > k;)
        upper += w[i];
    for (std::size_t i = 0; i < k; ++i)
        lower += w[i];
    return std::min(1.0, upper / (upper + lower));
}

// ---------------------------------------------------------------------------
// Repeated split protocol

struct EvalProtocol {
    double split = 0.75;
    std::size_t repeats = 10;
    std::uint64_t seed = 0;

    void validate() const {
        if (!(split > 0.0 && split < 1.0))
            throw std::invalid_argument("split must lie in (0, 1)");
        if (repeats == 0)
            throw std::invalid_argument("repeats must be at least 1");
    }
};

struct PairPrediction {
    std::size_t repeat = 0;
    std::size_t item = 0; ///< index into the caller's item list
    int label = 0;
    int predicted = 0;
    double score = 0.0;
    bool tie = false;

    bool correct() const { return !tie && predicted == label; }
};

/// Accuracy counts a tie as an error.
struct EvalReport {
    std::vector<double> accuracies;
    double mean = 0.0;
    double stddev = 0.0; ///< population standard deviation over repeats
    std::vector<PairPrediction> predictions;
    std::size_t evaluated = 0; ///< items entering the protocol
    std::size_t excluded = 0;  ///< items dropped before the protocol (e.g. out of vocabulary)
    std::vector<std::string> excluded_items;
    std::size_t test_size = 0;
    /// Exact one-sided binomial p-value of the mean accuracy at N = test_size.
    double p_value = 1.0;
};

/// Train indices and test indices for one repeat; disjoint and together
/// covering 0..n-1.
struct Split {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

inline Split make_split(std::size_t n, double split, std::uint64_t seed) {
    Rng rng(seed);
    const auto perm = rng.permutation(n);
    const auto n_train = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::llround(split * static_cast<double>(n))), 1, n - 1);
    Split s;
    s.train.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_train));
    s.test.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_train), perm.end());
    return s;
}

/// Given the training indices and a seed, returns a predictor for any item.
using ItemPredictor = std::function<Direction(std::size_t item)>;
using ItemTrainer = std::function<ItemPredictor(std::span<const std::size_t> train, std::uint64_t seed)>;

/// Runs the protocol over items 0..labels.size()-1. Repeat r uses the seed
/// derived from (protocol.seed, "eval/repeat/r") for its split and passes a
/// second derived seed to the trainer.
inline EvalReport run_protocol(std::span<const int> labels, const ItemTrainer& trainer, const EvalProtocol& protocol) {
    protocol.validate();
    if (labels.size() < 8)
        throw DataError("evaluation needs at least 8 labeled items, got " + std::to_string(labels.size()));
    for (int l : labels)
        validate_label(l);
    EvalReport report;
    report.evaluated = labels.size();
    for (std::size_t r = 0; r < protocol.repeats; ++r) {
        const std::string tag = "eval/repeat/" + std::to_string(r);
        const Split split = make_split(labels.size(), protocol.split, derive_seed(protocol.seed, tag + "/split"));
        const ItemPredictor predict = trainer(split.train, derive_seed(protocol.seed, tag + "/train"));
        std::size_t correct = 0;
        for (std::size_t item : split.test) {
            const Direction d = predict(item);
            PairPrediction p{r, item, labels[item], d.label(), d.score, d.tie};
            correct += p.correct();
            report.predictions.push_back(p);
        }
        report.test_size = split.test.size();
        report.accuracies.push_back(static_cast<double>(correct) / static_cast<double>(split.test.size()));
    }
    report.mean = mean(report.accuracies);
    report.stddev = stddev(report.accuracies);
    report.p_value = binomial_significance(report.mean, report.test_size);
    return report;
}

using ScatterPredictor = std::function<Direction(const ScatterSample&)>;
using ScatterTrainer = std::function<ScatterPredictor(const LabeledScatterDataset& train, std::uint64_t seed)>;

inline ScatterTrainer rcc_trainer(const RccConfig& cfg) {
    return [cfg](const LabeledScatterDataset& train, std::uint64_t seed) -> ScatterPredictor {
        auto model = std::make_shared<const RccModel>(rcc_train(train, cfg, seed));
        return [model](const ScatterSample& s) { return rcc_predict(*model, s); };
    };
}

/// The protocol over labeled scatter samples with a pluggable engine.
inline EvalReport evaluate_scatter_dataset(const LabeledScatterDataset& data, const ScatterTrainer& trainer,
                                           const EvalProtocol& protocol) {
    std::vector<int> labels;
    for (const auto& item : data)
        labels.push_back(item.label);
    return run_protocol(
        labels,
        [&](std::span<const std::size_t> train, std::uint64_t seed) -> ItemPredictor {
            LabeledScatterDataset subset;
            for (std::size_t i : train)
                subset.push_back(data[i]);
            ScatterPredictor p = trainer(subset, seed);
            return [&data, p](std::size_t i) { return p(data[i].sample); };
        },
        protocol);
}

namespace detail {
inline std::string pair_name(const WordPairRecord& r) { return r.x + "," + r.y; }

inline void renumber(EvalReport& report, const std::vector<std::size_t>& original) {
    for (auto& p : report.predictions)
        p.item = original[p.item];
}
} // namespace detail

/// Word pairs become scatter samples under the given projection; pairs with
/// a word outside the vocabulary are excluded and listed. Prediction item
/// indices refer to positions in `pairs`.
inline EvalReport evaluate_distribution_method(const std::vector<WordPairRecord>& pairs, ProjectionKind kind,
                                               const VocabSample& vocab, const TextContext& ctx,
                                               const ScatterTrainer& trainer, const EvalProtocol& protocol) {
    LabeledScatterDataset data;
    std::vector<std::size_t> original;
    std::vector<std::string> excluded;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        try {
            data.push_back({word_pair_scatter(pairs[i].x, pairs[i].y, kind, vocab, ctx), pairs[i].label()});
            original.push_back(i);
        } catch (const OutOfVocabulary&) {
            excluded.push_back(detail::pair_name(pairs[i]));
        }
    }
    EvalReport report = evaluate_scatter_dataset(data, trainer, protocol);
    detail::renumber(report, original);
    report.excluded = excluded.size();
    report.excluded_items = std::move(excluded);
    return report;
}

inline EvalReport evaluate_distribution_method(const std::vector<WordPairRecord>& pairs, ProjectionKind kind,
                                               const VocabSample& vocab, const TextContext& ctx,
                                               const RccConfig& cfg, const EvalProtocol& protocol) {
    return evaluate_distribution_method(pairs, kind, vocab, ctx, rcc_trainer(cfg), protocol);
}

/// The protocol over fixed-length feature vectors classified by a forest.
inline EvalReport evaluate_feature_vectors(const FeatureMatrix& features, std::span<const int> labels,
                                           const ForestConfig& cfg, const EvalProtocol& protocol) {
    if (static_cast<std::size_t>(features.rows()) != labels.size())
        throw std::invalid_argument("evaluate_feature_vectors: row count must equal label count");
    return run_protocol(
        labels,
        [&](std::span<const std::size_t> train, std::uint64_t seed) -> ItemPredictor {
            FeatureMatrix x(static_cast<Eigen::Index>(train.size()), features.cols());
            std::vector<int> y;
            for (std::size_t r = 0; r < train.size(); ++r) {
                x.row(static_cast<Eigen::Index>(r)) = features.row(static_cast<Eigen::Index>(train[r]));
                y.push_back(labels[train[r]]);
            }
            auto forest = std::make_shared<const Forest>(forest_train(x, y, cfg, seed));
            return [&features, forest](std::size_t i) {
                const auto row = features.row(static_cast<Eigen::Index>(i));
                return forest->predict(std::span<const double>(row.data(), static_cast<std::size_t>(row.size())));
            };
        },
        protocol);
}

/// Each pair becomes the 2n-vector (Pi^x, Pi^y).
inline EvalReport evaluate_feature_method(const std::vector<WordPairRecord>& pairs, ProjectionKind kind,
                                          const VocabSample& vocab, const TextContext& ctx, const ForestConfig& cfg,
                                          const EvalProtocol& protocol) {
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    std::vector<std::size_t> original;
    std::vector<std::string> excluded;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        try {
            auto row = projection_vector(kind, pairs[i].x, vocab, ctx);
            const auto py = projection_vector(kind, pairs[i].y, vocab, ctx);
            row.insert(row.end(), py.begin(), py.end());
            rows.push_back(std::move(row));
            labels.push_back(pairs[i].label());
            original.push_back(i);
        } catch (const OutOfVocabulary&) {
            excluded.push_back(detail::pair_name(pairs[i]));
        }
    }
    FeatureMatrix x(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(2 * vocab.size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
        x.row(static_cast<Eigen::Index>(r)) =
            Eigen::Map<const Eigen::RowVectorXd>(rows[r].data(), static_cast<Eigen::Index>(rows[r].size()));
    EvalReport report = evaluate_feature_vectors(x, labels, cfg, protocol);
    detail::renumber(report, original);
    report.excluded = excluded.size();
    report.excluded_items = std::move(excluded);
    return report;
}

// ---------------------------------------------------------------------------
// Baselines over a pair list

struct BaselineReport {
    BaselineKind kind = BaselineKind::Frequency;
    std::size_t evaluated = 0;
    std::size_t correct = 0;
    std::size_t ties = 0;
    std::size_t excluded = 0;
    double accuracy = 0.0; ///< ties count as errors
    double p_value = 1.0;
};

inline BaselineReport evaluate_baseline(BaselineKind kind, const std::vector<WordPairRecord>& pairs,
                                        const VocabSample& vocab, const TextContext& ctx) {
    BaselineReport rep;
    rep.kind = kind;
    for (const auto& r : pairs) {
        try {
            const auto res = baseline_scores(kind, r.x, r.y, vocab, ctx);
            ++rep.evaluated;
            if (res.direction.tie)
                ++rep.ties;
            else if (res.direction.label() == r.label())
                ++rep.correct;
        } catch (const OutOfVocabulary&) {
            ++rep.excluded;
        }
    }
    if (rep.evaluated > 0) {
        rep.accuracy = static_cast<double>(rep.correct) / static_cast<double>(rep.evaluated);
        rep.p_value = binomial_significance(rep.accuracy, rep.evaluated);
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Accuracy against annotator consensus

inline const std::vector<int>& default_confidence_thresholds() {
    static const std::vector<int> t = {0, 20, 40, 50, 60, 70, 80, 90};
    return t;
}

/// A judged item: its vote counts and whether the prediction was right.
struct ConsensusOutcome {
    int majority_votes = 0;
    int total_votes = 1;
    bool correct = false;
};

struct CurvePoint {
    int threshold = 0; ///< percent
    std::optional<double> accuracy;
    std::size_t count = 0;
};

/// For each threshold t, accuracy over items with consensus >= t percent.
/// The comparison is done in integers (100 * majority >= t * total).
inline std::vector<CurvePoint> confidence_curve(std::span<const ConsensusOutcome> outcomes,
                                                const std::vector<int>& thresholds = default_confidence_thresholds()) {
    std::vector<CurvePoint> out;
    for (int t : thresholds) {
        if (t < 0 || t > 100)
            throw std::invalid_argument("confidence threshold must lie in [0, 100]");
        CurvePoint p{t, std::nullopt, 0};
        std::size_t correct = 0;
        for (const auto& o : outcomes)
            if (100LL * o.majority_votes >= static_cast<long long>(t) * o.total_votes) {
                ++p.count;
                correct += o.correct;
            }
        if (p.count > 0)
            p.accuracy = static_cast<double>(correct) / static_cast<double>(p.count);
        out.push_back(p);
    }
    return out;
}

/// Scores a trained predictor on annotated scatter samples.
inline std::vector<CurvePoint> confidence_curve(const ScatterPredictor& model,
                                                const std::vector<std::pair<WordPairRecord, ScatterSample>>& pairs,
                                                const std::vector<int>& thresholds = default_confidence_thresholds()) {
    std::vector<ConsensusOutcome> outcomes;
    for (const auto& [record, sample] : pairs) {
        const Direction d = model(sample);
        outcomes.push_back({record.majority_votes(), record.total(), !d.tie && d.label() == record.label()});
    }
    return confidence_curve(outcomes, thresholds);
}

/// Pools the test predictions of an evaluation over `pairs` into a curve.
inline std::vector<CurvePoint> confidence_curve(const EvalReport& report, const std::vector<WordPairRecord>& pairs,
                                                const std::vector<int>& thresholds = default_confidence_thresholds()) {
    std::vector<ConsensusOutcome> outcomes;
    for (const auto& p : report.predictions) {
        const auto& r = pairs.at(p.item);
        outcomes.push_back({r.majority_votes(), r.total(), p.correct()});
    }
    return confidence_curve(outcomes, thresholds);
}

} // namespace proxycause

#endif
