#include <gtest/gtest.h>

#include <filesystem>
#include <map>
#include <sstream>

#include "proxycause/proxy_text.hpp"

using namespace proxycause;

namespace {

CorpusIndex index_of(const std::string& text) {
    std::istringstream in(text);
    return CorpusIndex::from_stream(in);
}

std::vector<std::vector<std::string>> sentences_of(const std::string& text) {
    std::vector<std::vector<std::string>> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        auto t = tokenize(line);
        if (!t.empty())
            out.push_back(std::move(t));
    }
    return out;
}

// Brute-force sentence statistics straight from the definitions.
struct BruteCounts {
    std::map<std::string, int> unigram;
    std::map<std::pair<std::string, std::string>, int> cooc, prec;
};

BruteCounts brute(const std::vector<std::vector<std::string>>& sentences) {
    BruteCounts b;
    for (const auto& s : sentences) {
        std::map<std::string, std::size_t> first;
        for (std::size_t i = 0; i < s.size(); ++i)
            first.emplace(s[i], i);
        for (const auto& [w, pw] : first) {
            ++b.unigram[w];
            for (const auto& [x, px] : first) {
                if (w == x)
                    continue;
                ++b.cooc[{w, x}];
                if (pw < px)
                    ++b.prec[{w, x}];
            }
        }
    }
    return b;
}

std::string random_corpus(std::size_t lines, std::size_t vocab, std::uint64_t seed) {
    Rng r(seed);
    std::string out;
    for (std::size_t l = 0; l < lines; ++l) {
        const auto len = 1 + r.below(8);
        for (std::size_t i = 0; i < len; ++i)
            out += "w" + std::to_string(r.below(vocab)) + (i + 1 < len ? " " : "");
        out += l % 7 == 3 ? "\n\n" : "\n";
    }
    return out;
}

double cosine(const EmbeddingModel& m, const std::string& a, const std::string& b) {
    const auto va = m.input.row(static_cast<Eigen::Index>(m.row(a)));
    const auto vb = m.input.row(static_cast<Eigen::Index>(m.row(b)));
    return va.dot(vb) / (va.norm() * vb.norm());
}

} // namespace

TEST(Tokenize, LowercaseAndSplit) {
    EXPECT_EQ(tokenize("The Virus, causes-death!"), (std::vector<std::string>{"the", "virus", "causes", "death"}));
    EXPECT_EQ(tokenize("  x2 ,, 3y "), (std::vector<std::string>{"x2", "3y"}));
    EXPECT_EQ(tokenize("caf\xc3\xa9 ok"), (std::vector<std::string>{"caf\xc3\xa9", "ok"}));
    EXPECT_TRUE(tokenize(" .,; ").empty());
}

TEST(CorpusIndex, SwappedPairCounts) {
    const auto idx = index_of("a b\nb a\n");
    EXPECT_EQ(idx.sentence_count(), 2u);
    EXPECT_EQ(idx.cooc(idx.id("a"), idx.id("b")), 2u);
    EXPECT_EQ(idx.prec_cooc(idx.id("a"), idx.id("b")), 1u);
    EXPECT_EQ(idx.prec_cooc(idx.id("b"), idx.id("a")), 1u);
}

TEST(CorpusIndex, RepeatsCountOncePerSentence) {
    const auto idx = index_of("x x y\n");
    const auto x = idx.id("x"), y = idx.id("y");
    EXPECT_EQ(idx.unigram(x), 1u);
    EXPECT_EQ(idx.cooc(x, y), 1u);
    EXPECT_EQ(idx.prec_cooc(x, y), 1u);
    EXPECT_EQ(idx.prec_cooc(y, x), 0u);
    EXPECT_EQ(idx.prec_cooc(x, x), 0u);
    EXPECT_EQ(idx.cooc(x, x), idx.unigram(x));
}

TEST(CorpusIndex, MatchesBruteForceOnRandomCorpora) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto text = random_corpus(120, 15, seed);
        const auto sentences = sentences_of(text);
        const auto idx = index_of(text);
        const auto b = brute(sentences);
        EXPECT_EQ(idx.sentence_count(), sentences.size());
        std::uint64_t unigram_total = 0;
        for (const auto& w : idx.words()) {
            const auto wi = idx.id(w);
            EXPECT_EQ(idx.unigram(wi), static_cast<std::uint64_t>(b.unigram.at(w)));
            unigram_total += idx.unigram(wi);
            for (const auto& x : idx.words()) {
                if (w == x)
                    continue;
                const auto xi = idx.id(x);
                const auto c = b.cooc.count({w, x}) ? b.cooc.at({w, x}) : 0;
                const auto p = b.prec.count({w, x}) ? b.prec.at({w, x}) : 0;
                EXPECT_EQ(idx.cooc(wi, xi), static_cast<std::uint64_t>(c));
                EXPECT_EQ(idx.prec_cooc(wi, xi), static_cast<std::uint64_t>(p));
                // Invariants.
                EXPECT_EQ(idx.cooc(wi, xi), idx.cooc(xi, wi));
                EXPECT_LE(idx.prec_cooc(wi, xi) + idx.prec_cooc(xi, wi), idx.cooc(wi, xi));
                EXPECT_LE(idx.cooc(wi, xi), std::min(idx.unigram(wi), idx.unigram(xi)));
            }
        }
        EXPECT_GE(unigram_total, idx.sentence_count());
    }
}

TEST(CorpusIndex, EmptyCorpusAndOov) {
    EXPECT_THROW(index_of(""), DataError);
    EXPECT_THROW(index_of("\n ,, \n"), DataError);
    const auto idx = index_of("a b\n");
    try {
        idx.id("zebra");
        FAIL();
    } catch (const OutOfVocabulary& e) {
        EXPECT_EQ(e.word(), "zebra");
    }
    EXPECT_FALSE(idx.find("zebra").has_value());
    EXPECT_THROW(build_index("/nonexistent/corpus.txt"), DataError);
}

TEST(CorpusIndex, JsonRoundTrip) {
    const auto idx = index_of(random_corpus(60, 10, 9));
    const auto back = CorpusIndex::from_json(nlohmann::json::parse(idx.to_json().dump()));
    EXPECT_EQ(back.to_json(), idx.to_json());
    EXPECT_EQ(back.words(), idx.words());
    auto bad = idx.to_json();
    bad["version"] = 99;
    EXPECT_THROW(CorpusIndex::from_json(bad), DataError);
}

TEST(VocabSample, TopByCountThenLexicographic) {
    const auto idx = index_of("the cat\nthe dog\nthe cat bird\nzebra\n");
    // Counts: the 3, cat 2, bird 1, dog 1, zebra 1.
    const auto all = vocab_sample(idx, idx.vocabulary_size());
    std::vector<std::string> names;
    for (auto id : all.words)
        names.push_back(idx.word(id));
    EXPECT_EQ(names, (std::vector<std::string>{"the", "cat", "bird", "dog", "zebra"}));
    EXPECT_EQ(vocab_sample(idx, 2).words, (std::vector<WordId>{idx.id("the"), idx.id("cat")}));
    EXPECT_THROW(vocab_sample(idx, 6), DataError);
}

TEST(VocabSample, UniformWithoutReplacement) {
    const auto idx = index_of(random_corpus(80, 30, 2));
    const auto s = vocab_sample_uniform(idx, 12, 5);
    std::set<WordId> distinct(s.words.begin(), s.words.end());
    EXPECT_EQ(distinct.size(), 12u);
    EXPECT_EQ(vocab_sample_uniform(idx, 12, 5).words, s.words);
}

TEST(Sgns, LossDecreasesAfterOneEpoch) {
    const auto sentences = sentences_of("a b c\nb c d\nc d a\na c\nd b\na b d c\n");
    const auto idx = CorpusIndex::from_sentences(sentences);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        SgnsConfig cfg;
        cfg.dim = 2;
        cfg.seed = seed;
        cfg.epochs = 0;
        const auto before = sgns_train(sentences, idx, cfg);
        cfg.epochs = 1;
        cfg.learning_rate = 0.2;
        const auto after = sgns_train(sentences, idx, cfg);
        EXPECT_LT(sgns_loss(sentences, idx, after, cfg.window, cfg.negatives, 77),
                  sgns_loss(sentences, idx, before, cfg.window, cfg.negatives, 77))
            << "seed " << seed;
    }
}

TEST(Sgns, DisjointSublanguagesSeparate) {
    Rng r(4);
    std::string text;
    for (int s = 0; s < 400; ++s) {
        const char group = s % 2 ? 'a' : 'b';
        for (int i = 0; i < 6; ++i)
            text += std::string(1, group) + std::to_string(1 + r.below(5)) + " ";
        text += "\n";
    }
    const auto sentences = sentences_of(text);
    const auto idx = CorpusIndex::from_sentences(sentences);
    SgnsConfig cfg;
    cfg.dim = 10;
    cfg.epochs = 5;
    cfg.window = 3;
    cfg.seed = 1;
    const auto m = sgns_train(sentences, idx, cfg);
    double within = 0, across = 0;
    int nw = 0, na = 0;
    for (int i = 1; i <= 5; ++i)
        for (int j = 1; j <= 5; ++j) {
            const auto ai = "a" + std::to_string(i), aj = "a" + std::to_string(j);
            const auto bi = "b" + std::to_string(i), bj = "b" + std::to_string(j);
            if (i < j) {
                within += cosine(m, ai, aj) + cosine(m, bi, bj);
                nw += 2;
            }
            across += cosine(m, ai, bj);
            ++na;
        }
    EXPECT_GT(within / nw, across / na);
}

TEST(Sgns, DeterministicAndValidated) {
    const auto sentences = sentences_of(random_corpus(50, 12, 3));
    const auto idx = CorpusIndex::from_sentences(sentences);
    SgnsConfig cfg;
    cfg.dim = 8;
    cfg.epochs = 2;
    cfg.seed = 3;
    const auto a = sgns_train(sentences, idx, cfg), b = sgns_train(sentences, idx, cfg);
    EXPECT_EQ(a.input, b.input);
    EXPECT_EQ(a.output, b.output);
    EXPECT_TRUE(a.input.allFinite() && a.output.allFinite());
    cfg.dim = 1;
    EXPECT_THROW(sgns_train(sentences, idx, cfg), std::invalid_argument);
}

TEST(Embeddings, TextRoundTripIsExact) {
    const auto sentences = sentences_of(random_corpus(40, 10, 4));
    const auto idx = CorpusIndex::from_sentences(sentences);
    SgnsConfig cfg;
    cfg.dim = 5;
    cfg.epochs = 1;
    const auto m = sgns_train(sentences, idx, cfg);
    std::stringstream ss;
    write_embeddings(ss, m);
    const auto back = read_embeddings(ss);
    EXPECT_EQ(back.words, m.words);
    EXPECT_EQ(back.input, m.input);
    EXPECT_EQ(back.output, m.output);
}

TEST(Embeddings, MalformedFilesReportLines) {
    auto expect_error = [](const std::string& text, const std::string& needle) {
        std::istringstream in(text);
        try {
            read_embeddings(in);
            FAIL() << "accepted: " << text;
        } catch (const DataError& e) {
            EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
        }
    };
    expect_error("", "missing header");
    expect_error("1 2\nw in 1 2\nw out 1\n", "line 3");
    expect_error("1 2\nw in 1 2\nw side 1 2\n", "line 3");
    expect_error("1 2\nw in 1 2\n", "lacks");
    expect_error("1 2\nw in 1 2\nw in 1 2\n", "duplicate");
    expect_error("1 2\nw in 1 nan\nw out 1 2\n", "line 2");
    expect_error("1 2\nw in 1 2\nv in 1 2\n", "more words");
}

TEST(Projection, CountsAndPmiOnToyCorpus) {
    const auto idx = index_of("a b\na c\n");
    const TextContext ctx{&idx, nullptr};
    EXPECT_EQ(projection_value(ProjectionKind::Pmi, "b", "c", ctx), 0.0);
    EXPECT_DOUBLE_EQ(projection_value(ProjectionKind::Pmi, "a", "b", ctx), 1.0);
    EXPECT_DOUBLE_EQ(projection_value(ProjectionKind::Counts, "a", "b", ctx), 0.5);
    EXPECT_DOUBLE_EQ(projection_value(ProjectionKind::PrecCounts, "a", "b", ctx), 0.5);
    EXPECT_EQ(projection_value(ProjectionKind::PrecCounts, "b", "a", ctx), 0.0);
    EXPECT_DOUBLE_EQ(projection_value(ProjectionKind::PrecPmi, "a", "c", ctx), 1.0);
    EXPECT_EQ(projection_value(ProjectionKind::PrecPmi, "c", "a", ctx), 0.0);
    EXPECT_THROW(projection_value(ProjectionKind::W2vII, "a", "b", ctx), std::invalid_argument);
    EXPECT_THROW(projection_value(ProjectionKind::Counts, "a", "zzz", ctx), OutOfVocabulary);
}

TEST(Projection, PmiSymmetricPrecPmiNot) {
    const auto idx = index_of(random_corpus(100, 12, 6));
    const TextContext ctx{&idx, nullptr};
    bool asymmetric = false;
    for (const auto& w : idx.words())
        for (const auto& x : idx.words()) {
            EXPECT_EQ(projection_value(ProjectionKind::Pmi, w, x, ctx), projection_value(ProjectionKind::Pmi, x, w, ctx));
            asymmetric |= projection_value(ProjectionKind::PrecPmi, w, x, ctx) !=
                          projection_value(ProjectionKind::PrecPmi, x, w, ctx);
        }
    EXPECT_TRUE(asymmetric);
}

TEST(Projection, EmbeddingKinds) {
    const auto idx = index_of("a b\nb c\n");
    EmbeddingModel e;
    e.words = {"c", "b", "a"};
    e.input.resize(3, 2);
    e.output.resize(3, 2);
    e.input << 1, 2, 3, 4, 5, 6;
    e.output << -1, 0, 0, 1, 2, 2;
    const TextContext ctx{&idx, &e};
    // Rows: a -> 2, b -> 1.
    EXPECT_EQ(projection_value(ProjectionKind::W2vII, "a", "b", ctx), 5 * 3 + 6 * 4);
    EXPECT_EQ(projection_value(ProjectionKind::W2vIO, "a", "b", ctx), 5 * 0 + 6 * 1);
    EXPECT_EQ(projection_value(ProjectionKind::W2vOI, "a", "b", ctx), 2 * 3 + 2 * 4);
    EXPECT_GE(projection_value(ProjectionKind::W2vII, "c", "c", ctx), 0.0);
}

TEST(Projection, VectorAlignmentAndScatter) {
    const auto idx = index_of("u a\nu b\nu a b\nu c\n");
    const TextContext ctx{&idx, nullptr};
    const auto vocab = vocab_sample(idx, idx.vocabulary_size());
    // u occurs in every sentence, so its counts entry for w_j is p(w_j).
    const auto v = projection_vector(ProjectionKind::Counts, "u", vocab, ctx);
    double sum = 0;
    for (std::size_t j = 0; j < vocab.size(); ++j) {
        const auto w = vocab.words[j];
        EXPECT_DOUBLE_EQ(v[j], static_cast<double>(idx.unigram(w)) / 4);
        sum += v[j];
    }
    EXPECT_LE(sum, static_cast<double>(vocab.size()));

    const auto s = word_pair_scatter("a", "b", ProjectionKind::Counts, vocab, ctx);
    EXPECT_EQ(s, word_pair_scatter("b", "a", ProjectionKind::Counts, vocab, ctx).swapped());
    const auto diag = word_pair_scatter("a", "a", ProjectionKind::PrecPmi, vocab, ctx);
    for (const auto& p : diag.points())
        EXPECT_EQ(p.a, p.b);
    // Hand table: vocab order u(4), a(2), b(2), c(1).
    const std::vector<Point> expect{{0.5, 0.5}, {0.5, 0.25}, {0.25, 0.5}, {0.0, 0.0}};
    EXPECT_EQ(s.points(), expect);
}

TEST(Projection, ParseNames) {
    for (auto k : kAllProjections)
        EXPECT_EQ(parse_projection(to_string(k)), k);
    EXPECT_EQ(parse_projection("prec-pmi"), ProjectionKind::PrecPmi);
    EXPECT_THROW(parse_projection("bogus"), std::invalid_argument);
    for (auto k : kAllBaselines)
        EXPECT_EQ(parse_baseline(to_string(k)), k);
    EXPECT_THROW(parse_baseline("bogus"), std::invalid_argument);
}

TEST(Baselines, FrequencyHandCount) {
    const auto idx = index_of("x a\nx b\nx y\nc\n");
    const TextContext ctx{&idx, nullptr};
    const auto vocab = vocab_sample(idx, idx.vocabulary_size());
    const auto r = baseline_scores(BaselineKind::Frequency, "x", "y", vocab, ctx);
    EXPECT_EQ(r.s_xy, 3.0);
    EXPECT_EQ(r.s_yx, 1.0);
    EXPECT_EQ(r.direction.verdict, Verdict::XtoY);
    EXPECT_FALSE(r.direction.tie);
    const auto p = baseline_scores(BaselineKind::Precedence, "x", "y", vocab, ctx);
    EXPECT_EQ(p.s_xy, 1.0);
    EXPECT_EQ(p.s_yx, 0.0);
}

TEST(Baselines, EntropyAndWeedsPrecision) {
    EXPECT_EQ(normalized_entropy(std::vector<double>{0, 3, 0}), 0.0);
    EXPECT_EQ(normalized_entropy(std::vector<double>{0, 0}), 0.0);
    EXPECT_NEAR(normalized_entropy(std::vector<double>{1, 1, 1, 1}), std::log(4.0), 1e-15);
    EXPECT_THROW(normalized_entropy(std::vector<double>{1, -1}), std::invalid_argument);
    const std::vector<double> u{1, 2, 0, 3}, v{0, 5, 1, 1};
    EXPECT_DOUBLE_EQ(*weeds_precision(u, v), 5.0 / 6);
    EXPECT_DOUBLE_EQ(*weeds_precision(v, u), 6.0 / 7);
    EXPECT_EQ(*weeds_precision(u, u), 1.0);
    EXPECT_FALSE(weeds_precision(std::vector<double>{0, 0}, std::vector<double>{1, 1}).has_value());
}

TEST(Baselines, IdenticalVectorsTie) {
    const auto idx = index_of("a b\na c\n");
    const TextContext ctx{&idx, nullptr};
    const auto vocab = vocab_sample(idx, idx.vocabulary_size());
    // b and c have identical count profiles.
    for (auto k : {BaselineKind::CountsWs, BaselineKind::PmiWs, BaselineKind::CountsEntropy, BaselineKind::Frequency}) {
        const auto r = baseline_scores(k, "b", "c", vocab, ctx);
        EXPECT_TRUE(r.direction.tie) << to_string(k);
        EXPECT_EQ(r.direction.score, 0.0);
    }
}

TEST(Baselines, SwapExchangesScores) {
    const auto idx = index_of(random_corpus(150, 14, 8));
    const TextContext ctx{&idx, nullptr};
    const auto vocab = vocab_sample(idx, 10);
    const auto& words = idx.words();
    for (auto k : kAllBaselines)
        for (std::size_t i = 0; i + 1 < words.size(); i += 3) {
            const auto f = baseline_scores(k, words[i], words[i + 1], vocab, ctx);
            const auto g = baseline_scores(k, words[i + 1], words[i], vocab, ctx);
            EXPECT_EQ(f.s_xy, g.s_yx);
            EXPECT_EQ(f.s_yx, g.s_xy);
            EXPECT_EQ(f.direction.tie, g.direction.tie);
            if (!f.direction.tie) {
                EXPECT_EQ(g.direction.verdict, flip(f.direction.verdict));
                EXPECT_EQ(f.direction.score, std::abs(f.s_xy - f.s_yx));
            }
        }
}

TEST(Projection, RebuildReproducesBitwise) {
    const auto text = random_corpus(90, 12, 10);
    const auto a = index_of(text), b = index_of(text);
    const TextContext ca{&a, nullptr}, cb{&b, nullptr};
    const auto va = vocab_sample(a, 8), vb = vocab_sample(b, 8);
    for (auto k : {ProjectionKind::Counts, ProjectionKind::Pmi, ProjectionKind::PrecPmi})
        EXPECT_EQ(projection_vector(k, a.words()[0], va, ca), projection_vector(k, b.words()[0], vb, cb));
}
