#pragma once
#ifndef PROXYCAUSE_PROXY_TEXT_HPP
#define PROXYCAUSE_PROXY_TEXT_HPP

// Text proxies. The proxy variable is a vocabulary word w drawn from the
// corpus; a projection pi(w, x) scores a target word x against w using
// sentence co-occurrence statistics or skip-gram embeddings.

#include <array>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <optional>
#include <unordered_map>

#include <Eigen/Dense>

#include "proxycause/core.hpp"

namespace proxycause {

/// Raised when a word is missing from the corpus vocabulary.
class OutOfVocabulary : public DataError {
public:
    explicit OutOfVocabulary(const std::string& word)
        : DataError("out-of-vocabulary word '" + word + "'"), word_(word) {}
    const std::string& word() const { return word_; }

private:
    std::string word_;
};

/// Lowercases ASCII and splits on runs of characters that are not ASCII
/// alphanumerics. Bytes >= 0x80 are kept inside words so UTF-8 text
/// survives intact.
inline std::vector<std::string> tokenize(std::string_view line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        const auto c = static_cast<unsigned char>(ch);
        if (c >= 0x80 || std::isalnum(c)) {
            cur.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : ch);
        } else if (!cur.empty()) {
            out.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty())
        out.push_back(std::move(cur));
    return out;
}

using WordId = std::uint32_t;

/// Sentence-level statistics of a corpus. Lines without tokens are not
/// counted as sentences.
class CorpusIndex {
public:
    static CorpusIndex from_sentences(const std::vector<std::vector<std::string>>& sentences) {
        CorpusIndex idx;
        std::vector<WordId> ids;
        std::unordered_map<WordId, std::size_t> first;
        for (const auto& sentence : sentences) {
            if (sentence.empty())
                continue;
            ++idx.sentence_count_;
            ids.clear();
            first.clear();
            for (std::size_t pos = 0; pos < sentence.size(); ++pos) {
                const WordId id = idx.intern(sentence[pos]);
                if (first.emplace(id, pos).second)
                    ids.push_back(id);
            }
            for (WordId id : ids)
                ++idx.unigram_[id];
            for (std::size_t i = 0; i < ids.size(); ++i)
                for (std::size_t j = i + 1; j < ids.size(); ++j) {
                    const WordId u = ids[i], v = ids[j];
                    ++idx.cooc_[sym_key(u, v)];
                    // ids are in order of first occurrence, so u precedes v.
                    ++idx.prec_[key(u, v)];
                }
        }
        if (idx.sentence_count_ == 0)
            throw DataError("empty corpus");
        return idx;
    }

    static CorpusIndex from_stream(std::istream& in) {
        std::vector<std::vector<std::string>> sentences;
        std::string line;
        while (std::getline(in, line))
            sentences.push_back(tokenize(line));
        return from_sentences(sentences);
    }

    std::size_t sentence_count() const { return sentence_count_; }
    std::size_t vocabulary_size() const { return words_.size(); }
    const std::vector<std::string>& words() const { return words_; }
    const std::string& word(WordId id) const { return words_.at(id); }

    std::optional<WordId> find(std::string_view w) const {
        const auto it = ids_.find(std::string(w));
        if (it == ids_.end())
            return std::nullopt;
        return it->second;
    }

    WordId id(std::string_view w) const {
        const auto found = find(w);
        if (!found)
            throw OutOfVocabulary(std::string(w));
        return *found;
    }

    /// Number of sentences containing the word.
    std::uint64_t unigram(WordId w) const { return unigram_.at(w); }

    /// Number of sentences containing both words; symmetric. For w == x this
    /// is the unigram count.
    std::uint64_t cooc(WordId w, WordId x) const {
        if (w == x)
            return unigram(w);
        const auto it = cooc_.find(sym_key(w, x));
        return it == cooc_.end() ? 0 : it->second;
    }

    /// Number of sentences where the first occurrence of w comes before the
    /// first occurrence of x. Zero for w == x.
    std::uint64_t prec_cooc(WordId w, WordId x) const {
        if (w == x)
            return 0;
        const auto it = prec_.find(key(w, x));
        return it == prec_.end() ? 0 : it->second;
    }

    std::size_t cooc_entries() const { return cooc_.size(); }

    nlohmann::json to_json() const {
        // Sparse maps are written in sorted key order so the file is
        // byte-identical across runs.
        auto sorted = [](const std::unordered_map<std::uint64_t, std::uint64_t>& m) {
            std::vector<std::array<std::uint64_t, 3>> rows;
            rows.reserve(m.size());
            for (const auto& [k, v] : m)
                rows.push_back({k >> 32, k & 0xffffffffULL, v});
            std::sort(rows.begin(), rows.end());
            return rows;
        };
        return {{"format", "proxycause-corpus-index"},
                {"version", 1},
                {"sentence_count", sentence_count_},
                {"words", words_},
                {"unigram", unigram_},
                {"cooc", sorted(cooc_)},
                {"prec_cooc", sorted(prec_)}};
    }

    static CorpusIndex from_json(const nlohmann::json& j) {
        try {
            if (j.at("format").get<std::string>() != "proxycause-corpus-index")
                throw DataError("not a corpus index file");
            if (j.at("version").get<int>() != 1)
                throw DataError("unsupported corpus index version");
            CorpusIndex idx;
            idx.sentence_count_ = j.at("sentence_count").get<std::size_t>();
            for (const auto& w : j.at("words").get<std::vector<std::string>>())
                idx.intern(w);
            idx.unigram_ = j.at("unigram").get<std::vector<std::uint64_t>>();
            if (idx.unigram_.size() != idx.words_.size())
                throw DataError("corpus index: unigram table size mismatch");
            for (const auto& row : j.at("cooc"))
                idx.cooc_[key(row.at(0).get<WordId>(), row.at(1).get<WordId>())] = row.at(2).get<std::uint64_t>();
            for (const auto& row : j.at("prec_cooc"))
                idx.prec_[key(row.at(0).get<WordId>(), row.at(1).get<WordId>())] = row.at(2).get<std::uint64_t>();
            return idx;
        } catch (const nlohmann::json::exception& e) {
            throw DataError(std::string("corpus index: ") + e.what());
        }
    }

private:
    static std::uint64_t key(WordId a, WordId b) { return (static_cast<std::uint64_t>(a) << 32) | b; }
    static std::uint64_t sym_key(WordId a, WordId b) { return a < b ? key(a, b) : key(b, a); }

    WordId intern(const std::string& w) {
        const auto [it, inserted] = ids_.emplace(w, static_cast<WordId>(words_.size()));
        if (inserted) {
            words_.push_back(w);
            unigram_.push_back(0);
        }
        return it->second;
    }

    std::size_t sentence_count_ = 0;
    std::vector<std::string> words_;
    std::unordered_map<std::string, WordId> ids_;
    std::vector<std::uint64_t> unigram_;
    std::unordered_map<std::uint64_t, std::uint64_t> cooc_;
    std::unordered_map<std::uint64_t, std::uint64_t> prec_;
};

inline std::vector<std::vector<std::string>> read_corpus(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot read corpus " + path);
    std::vector<std::vector<std::string>> sentences;
    std::string line;
    while (std::getline(in, line))
        sentences.push_back(tokenize(line));
    return sentences;
}

inline CorpusIndex build_index(const std::string& corpus_path) {
    return CorpusIndex::from_sentences(read_corpus(corpus_path));
}

inline void save_index(const CorpusIndex& idx, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw DataError("cannot write " + path);
    out << idx.to_json().dump() << '\n';
}

inline CorpusIndex load_index(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot read " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError(path + ": " + e.what());
    }
    return CorpusIndex::from_json(j);
}

// ---------------------------------------------------------------------------
// Proxy vocabulary

/// Ordered proxy words w_1..w_n, without duplicates.
struct VocabSample {
    std::vector<WordId> words;
    std::size_t size() const { return words.size(); }
};

/// The n words with the highest sentence counts, ties broken
/// lexicographically.
inline VocabSample vocab_sample(const CorpusIndex& index, std::size_t n) {
    if (n > index.vocabulary_size())
        throw DataError("vocabulary sample of " + std::to_string(n) + " exceeds vocabulary size " +
                        std::to_string(index.vocabulary_size()));
    std::vector<WordId> ids(index.vocabulary_size());
    for (WordId i = 0; i < ids.size(); ++i)
        ids[i] = i;
    std::sort(ids.begin(), ids.end(), [&](WordId a, WordId b) {
        if (index.unigram(a) != index.unigram(b))
            return index.unigram(a) > index.unigram(b);
        return index.word(a) < index.word(b);
    });
    ids.resize(n);
    return {ids};
}

/// Uniform sample of n distinct words, ordered as drawn.
inline VocabSample vocab_sample_uniform(const CorpusIndex& index, std::size_t n, std::uint64_t seed) {
    if (n > index.vocabulary_size())
        throw DataError("vocabulary sample of " + std::to_string(n) + " exceeds vocabulary size " +
                        std::to_string(index.vocabulary_size()));
    Rng rng(seed);
    auto perm = rng.permutation(index.vocabulary_size());
    VocabSample out;
    for (std::size_t i = 0; i < n; ++i)
        out.words.push_back(static_cast<WordId>(perm[i]));
    return out;
}

// ---------------------------------------------------------------------------
// Skip-gram with negative sampling

/// Input and output word vectors over the corpus vocabulary (rows follow the
/// index word ids).
struct EmbeddingModel {
    using Table = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    std::vector<std::string> words;
    Table input;
    Table output;

    std::size_t dim() const { return static_cast<std::size_t>(input.cols()); }

    std::optional<std::size_t> find(std::string_view w) const {
        if (lookup_.empty() && !words.empty())
            rebuild_lookup();
        const auto it = lookup_.find(std::string(w));
        if (it == lookup_.end())
            return std::nullopt;
        return it->second;
    }

    std::size_t row(std::string_view w) const {
        const auto r = find(w);
        if (!r)
            throw OutOfVocabulary(std::string(w));
        return *r;
    }

    void rebuild_lookup() const {
        lookup_.clear();
        for (std::size_t i = 0; i < words.size(); ++i)
            lookup_.emplace(words[i], i);
    }

private:
    mutable std::unordered_map<std::string, std::size_t> lookup_;
};

struct SgnsConfig {
    std::size_t dim = 300;
    int epochs = 5;
    int window = 5;
    int negatives = 5;
    double learning_rate = 0.025;
    std::uint64_t seed = 0;
};

namespace detail {
inline double sigmoid(double z) {
    if (z >= 0)
        return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

/// Cumulative unigram^0.75 distribution over word ids.
inline std::vector<double> noise_cdf(const CorpusIndex& index) {
    std::vector<double> cdf(index.vocabulary_size());
    double acc = 0.0;
    for (WordId i = 0; i < cdf.size(); ++i) {
        acc += std::pow(static_cast<double>(index.unigram(i)), 0.75);
        cdf[i] = acc;
    }
    for (auto& c : cdf)
        c /= acc;
    return cdf;
}

inline WordId draw_noise(const std::vector<double>& cdf, Rng& rng) {
    const double u = rng.uniform();
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    return static_cast<WordId>(std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1));
}

inline std::vector<std::vector<WordId>> encode(const std::vector<std::vector<std::string>>& sentences,
                                               const CorpusIndex& index) {
    std::vector<std::vector<WordId>> out;
    out.reserve(sentences.size());
    for (const auto& s : sentences) {
        if (s.empty())
            continue;
        std::vector<WordId> ids;
        ids.reserve(s.size());
        for (const auto& w : s)
            ids.push_back(index.id(w));
        out.push_back(std::move(ids));
    }
    return out;
}
} // namespace detail

/// Mean negative SGNS objective per (center, context) pair, with negatives
/// drawn from a fixed stream so two models can be compared on equal terms.
inline double sgns_loss(const std::vector<std::vector<std::string>>& sentences, const CorpusIndex& index,
                        const EmbeddingModel& model, int window, int negatives, std::uint64_t seed) {
    const auto encoded = detail::encode(sentences, index);
    const auto cdf = detail::noise_cdf(index);
    Rng rng(seed);
    double loss = 0.0;
    std::size_t pairs = 0;
    for (const auto& s : encoded)
        for (std::size_t c = 0; c < s.size(); ++c)
            for (std::size_t o = c >= static_cast<std::size_t>(window) ? c - window : 0;
                 o < std::min(s.size(), c + static_cast<std::size_t>(window) + 1); ++o) {
                if (o == c)
                    continue;
                const auto vin = model.input.row(s[c]);
                loss -= std::log(std::max(1e-300, detail::sigmoid(vin.dot(model.output.row(s[o])))));
                for (int k = 0; k < negatives; ++k) {
                    const WordId neg = detail::draw_noise(cdf, rng);
                    loss -= std::log(std::max(1e-300, detail::sigmoid(-vin.dot(model.output.row(neg)))));
                }
                ++pairs;
            }
    return pairs ? loss / static_cast<double>(pairs) : 0.0;
}

/// Single-threaded SGD on the skip-gram negative-sampling objective:
/// maximize log s(<v_in[c], v_out[o]>) + sum_neg log s(-<v_in[c], v_out[n]>)
/// for every context word o within `window` of center c, noise words drawn
/// from unigram^0.75. The learning rate decays linearly over training.
inline EmbeddingModel sgns_train(const std::vector<std::vector<std::string>>& sentences, const CorpusIndex& index,
                                 const SgnsConfig& cfg) {
    if (cfg.dim < 2)
        throw std::invalid_argument("sgns: dimension must be at least 2");
    if (cfg.epochs < 0 || cfg.window < 1 || cfg.negatives < 0 || !(cfg.learning_rate > 0.0))
        throw std::invalid_argument("sgns: invalid training parameters");
    const auto encoded = detail::encode(sentences, index);
    if (encoded.empty())
        throw DataError("empty corpus");

    const auto v = static_cast<Eigen::Index>(index.vocabulary_size());
    const auto d = static_cast<Eigen::Index>(cfg.dim);
    EmbeddingModel model;
    model.words = index.words();
    model.input.resize(v, d);
    model.output = EmbeddingModel::Table::Zero(v, d);
    Rng rng(derive_seed(cfg.seed, "sgns/init"));
    for (Eigen::Index i = 0; i < v; ++i)
        for (Eigen::Index j = 0; j < d; ++j)
            model.input(i, j) = (rng.uniform() - 0.5) / static_cast<double>(d);

    const auto cdf = detail::noise_cdf(index);
    std::size_t total_words = 0;
    for (const auto& s : encoded)
        total_words += s.size();
    const double total_steps = static_cast<double>(total_words) * std::max(cfg.epochs, 1);
    std::size_t step = 0;
    Rng noise(derive_seed(cfg.seed, "sgns/noise"));
    Eigen::RowVectorXd grad(d);

    for (int epoch = 0; epoch < cfg.epochs; ++epoch)
        for (const auto& s : encoded)
            for (std::size_t c = 0; c < s.size(); ++c, ++step) {
                const double lr = cfg.learning_rate * std::max(1e-4, 1.0 - static_cast<double>(step) / total_steps);
                const std::size_t lo = c >= static_cast<std::size_t>(cfg.window) ? c - cfg.window : 0;
                const std::size_t hi = std::min(s.size(), c + static_cast<std::size_t>(cfg.window) + 1);
                for (std::size_t o = lo; o < hi; ++o) {
                    if (o == c)
                        continue;
                    auto vin = model.input.row(s[c]);
                    grad.setZero();
                    auto update = [&](WordId target, double label) {
                        auto vout = model.output.row(target);
                        const double g = lr * (label - detail::sigmoid(vin.dot(vout)));
                        grad += g * vout;
                        vout += g * vin;
                    };
                    update(s[o], 1.0);
                    for (int k = 0; k < cfg.negatives; ++k) {
                        const WordId neg = detail::draw_noise(cdf, noise);
                        if (neg != s[o])
                            update(neg, 0.0);
                    }
                    vin += grad;
                }
            }
    model.rebuild_lookup();
    return model;
}

inline EmbeddingModel sgns_train(const std::string& corpus_path, const SgnsConfig& cfg) {
    const auto sentences = read_corpus(corpus_path);
    return sgns_train(sentences, CorpusIndex::from_sentences(sentences), cfg);
}

/// Text format: header "<count> <dim>", then one line per word and table:
/// "word role f1 ... fd" with role "in" or "out".
inline void write_embeddings(std::ostream& out, const EmbeddingModel& model) {
    out << model.words.size() << ' ' << model.dim() << '\n';
    auto row = [&](const std::string& w, const char* role, const auto& vec) {
        out << w << ' ' << role;
        for (Eigen::Index j = 0; j < vec.size(); ++j) {
            char buf[32];
            std::snprintf(buf, sizeof buf, " %.17g", vec(j));
            out << buf;
        }
        out << '\n';
    };
    for (std::size_t i = 0; i < model.words.size(); ++i) {
        row(model.words[i], "in", model.input.row(static_cast<Eigen::Index>(i)));
        row(model.words[i], "out", model.output.row(static_cast<Eigen::Index>(i)));
    }
}

inline EmbeddingModel read_embeddings(std::istream& in) {
    std::string header;
    if (!std::getline(in, header))
        throw DataError("embeddings: missing header");
    std::istringstream hs(header);
    std::size_t count = 0, dim = 0;
    if (!(hs >> count >> dim) || dim == 0)
        throw DataError("embeddings: malformed header '" + header + "'");
    EmbeddingModel model;
    model.input.resize(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(dim));
    model.output.resize(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(dim));
    std::unordered_map<std::string, std::size_t> rows;
    std::vector<std::array<bool, 2>> seen;
    std::string line;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::blank(line))
            continue;
        std::istringstream ls(line);
        std::string word, role;
        const std::string where = "embeddings line " + std::to_string(lineno) + ": ";
        if (!(ls >> word >> role) || (role != "in" && role != "out"))
            throw DataError(where + "expected 'word in|out values...'");
        auto [it, inserted] = rows.emplace(word, model.words.size());
        if (inserted) {
            if (model.words.size() == count)
                throw DataError(where + "more words than declared in the header");
            model.words.push_back(word);
            seen.push_back({false, false});
        }
        const std::size_t r = it->second;
        const int slot = role == "in" ? 0 : 1;
        if (seen[r][static_cast<std::size_t>(slot)])
            throw DataError(where + "duplicate row for '" + word + "'");
        seen[r][static_cast<std::size_t>(slot)] = true;
        auto& table = slot == 0 ? model.input : model.output;
        for (std::size_t j = 0; j < dim; ++j) {
            double x;
            if (!(ls >> x) || !std::isfinite(x))
                throw DataError(where + "expected " + std::to_string(dim) + " finite values");
            table(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = x;
        }
        std::string extra;
        if (ls >> extra)
            throw DataError(where + "too many values");
    }
    if (model.words.size() != count)
        throw DataError("embeddings: header declares " + std::to_string(count) + " words, found " +
                        std::to_string(model.words.size()));
    for (std::size_t i = 0; i < seen.size(); ++i)
        if (!seen[i][0] || !seen[i][1])
            throw DataError("embeddings: word '" + model.words[i] + "' lacks an in or out row");
    model.rebuild_lookup();
    return model;
}

inline void save_embeddings(const EmbeddingModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw DataError("cannot write " + path);
    write_embeddings(out, model);
}

inline EmbeddingModel load_embeddings(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot read " + path);
    return read_embeddings(in);
}

// ---------------------------------------------------------------------------
// Projections

enum class ProjectionKind { W2vII, W2vIO, W2vOI, Counts, PrecCounts, Pmi, PrecPmi };

inline constexpr ProjectionKind kAllProjections[] = {ProjectionKind::W2vII,  ProjectionKind::W2vIO,
                                                     ProjectionKind::W2vOI,  ProjectionKind::Counts,
                                                     ProjectionKind::PrecCounts, ProjectionKind::Pmi,
                                                     ProjectionKind::PrecPmi};

inline const char* to_string(ProjectionKind k) {
    switch (k) {
    case ProjectionKind::W2vII: return "w2vii";
    case ProjectionKind::W2vIO: return "w2vio";
    case ProjectionKind::W2vOI: return "w2voi";
    case ProjectionKind::Counts: return "counts";
    case ProjectionKind::PrecCounts: return "prec-counts";
    case ProjectionKind::Pmi: return "pmi";
    case ProjectionKind::PrecPmi: return "prec-pmi";
    }
    return "?";
}

inline ProjectionKind parse_projection(std::string_view s) {
    for (auto k : kAllProjections)
        if (s == to_string(k))
            return k;
    throw std::invalid_argument("unknown projection '" + std::string(s) + "'");
}

inline bool needs_embeddings(ProjectionKind k) {
    return k == ProjectionKind::W2vII || k == ProjectionKind::W2vIO || k == ProjectionKind::W2vOI;
}

/// What projections read from: the corpus index and, for the word2vec
/// projections, an embedding model over the same vocabulary.
struct TextContext {
    const CorpusIndex* index = nullptr;
    const EmbeddingModel* embeddings = nullptr;
};

/// pi_kind(w, x) for proxy word w and target word x.
inline double projection_value(ProjectionKind kind, WordId w, WordId x, const TextContext& ctx) {
    const CorpusIndex& idx = *ctx.index;
    const double s = static_cast<double>(idx.sentence_count());
    if (needs_embeddings(kind)) {
        if (!ctx.embeddings)
            throw std::invalid_argument(std::string("projection ") + to_string(kind) + " needs embeddings");
        const auto& e = *ctx.embeddings;
        const auto rw = static_cast<Eigen::Index>(e.row(idx.word(w)));
        const auto rx = static_cast<Eigen::Index>(e.row(idx.word(x)));
        switch (kind) {
        case ProjectionKind::W2vII: return e.input.row(rw).dot(e.input.row(rx));
        case ProjectionKind::W2vIO: return e.input.row(rw).dot(e.output.row(rx));
        default: return e.output.row(rw).dot(e.input.row(rx));
        }
    }
    const bool prec = kind == ProjectionKind::PrecCounts || kind == ProjectionKind::PrecPmi;
    const double joint = static_cast<double>(prec ? idx.prec_cooc(w, x) : idx.cooc(w, x)) / s;
    if (kind == ProjectionKind::Counts || kind == ProjectionKind::PrecCounts)
        return joint;
    const double pw = static_cast<double>(idx.unigram(w)) / s;
    const double px = static_cast<double>(idx.unigram(x)) / s;
    if (pw == 0.0 || px == 0.0)
        throw DataError("zero-frequency word");
    return joint / (pw * px);
}

inline double projection_value(ProjectionKind kind, std::string_view w, std::string_view x, const TextContext& ctx) {
    return projection_value(kind, ctx.index->id(w), ctx.index->id(x), ctx);
}

/// Pi_kind^word = (pi(w_1, word), ..., pi(w_n, word)) in vocabulary-sample
/// order.
inline std::vector<double> projection_vector(ProjectionKind kind, std::string_view word, const VocabSample& vocab,
                                             const TextContext& ctx) {
    const WordId x = ctx.index->id(word);
    std::vector<double> out(vocab.size());
    for (std::size_t j = 0; j < vocab.size(); ++j)
        out[j] = projection_value(kind, vocab.words[j], x, ctx);
    return out;
}

inline ScatterSample word_pair_scatter(std::string_view x, std::string_view y, ProjectionKind kind,
                                       const VocabSample& vocab, const TextContext& ctx) {
    const auto a = projection_vector(kind, x, vocab, ctx);
    const auto b = projection_vector(kind, y, vocab, ctx);
    return ScatterSample::from_columns(a, b);
}

// ---------------------------------------------------------------------------
// Unsupervised baselines

enum class BaselineKind {
    Frequency,
    Precedence,
    CountsEntropy,
    CountsWs,
    PrecCountsEntropy,
    PrecCountsWs,
    PmiEntropy,
    PmiWs,
    PrecPmiEntropy,
    PrecPmiWs
};

inline constexpr BaselineKind kAllBaselines[] = {
    BaselineKind::Frequency,     BaselineKind::Precedence,        BaselineKind::CountsEntropy,
    BaselineKind::CountsWs,      BaselineKind::PrecCountsEntropy, BaselineKind::PrecCountsWs,
    BaselineKind::PmiEntropy,    BaselineKind::PmiWs,             BaselineKind::PrecPmiEntropy,
    BaselineKind::PrecPmiWs};

inline const char* to_string(BaselineKind k) {
    switch (k) {
    case BaselineKind::Frequency: return "frequency";
    case BaselineKind::Precedence: return "precedence";
    case BaselineKind::CountsEntropy: return "counts-entropy";
    case BaselineKind::CountsWs: return "counts-ws";
    case BaselineKind::PrecCountsEntropy: return "prec-counts-entropy";
    case BaselineKind::PrecCountsWs: return "prec-counts-ws";
    case BaselineKind::PmiEntropy: return "pmi-entropy";
    case BaselineKind::PmiWs: return "pmi-ws";
    case BaselineKind::PrecPmiEntropy: return "prec-pmi-entropy";
    case BaselineKind::PrecPmiWs: return "prec-pmi-ws";
    }
    return "?";
}

inline BaselineKind parse_baseline(std::string_view s) {
    for (auto k : kAllBaselines)
        if (s == to_string(k))
            return k;
    throw std::invalid_argument("unknown baseline '" + std::string(s) + "'");
}

/// Shannon entropy (nats) of a non-negative vector normalized to sum 1; 0 for
/// an all-zero vector.
inline double normalized_entropy(std::span<const double> v) {
    double total = 0.0;
    for (double x : v) {
        if (x < 0.0)
            throw std::invalid_argument("entropy needs a non-negative vector");
        total += x;
    }
    if (total == 0.0)
        return 0.0;
    double h = 0.0;
    for (double x : v)
        if (x > 0.0) {
            const double p = x / total;
            h -= p * std::log(p);
        }
    return h;
}

/// Weeds precision: share of u's mass on entries where v is also positive.
/// nullopt when u sums to zero.
inline std::optional<double> weeds_precision(std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size())
        throw std::invalid_argument("weeds precision: length mismatch");
    double covered = 0.0, total = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) {
        total += u[j];
        if (u[j] > 0.0 && v[j] > 0.0)
            covered += u[j];
    }
    if (total == 0.0)
        return std::nullopt;
    return covered / total;
}

struct BaselineResult {
    double s_xy = 0.0;
    double s_yx = 0.0;
    Direction direction;
};

inline BaselineResult baseline_scores(BaselineKind kind, std::string_view x, std::string_view y,
                                      const VocabSample& vocab, const TextContext& ctx) {
    const CorpusIndex& idx = *ctx.index;
    const WordId xi = idx.id(x), yi = idx.id(y);
    BaselineResult r;
    bool undefined = false;
    auto projection_for = [](BaselineKind k) {
        switch (k) {
        case BaselineKind::CountsEntropy:
        case BaselineKind::CountsWs: return ProjectionKind::Counts;
        case BaselineKind::PrecCountsEntropy:
        case BaselineKind::PrecCountsWs: return ProjectionKind::PrecCounts;
        case BaselineKind::PmiEntropy:
        case BaselineKind::PmiWs: return ProjectionKind::Pmi;
        default: return ProjectionKind::PrecPmi;
        }
    };
    switch (kind) {
    case BaselineKind::Frequency:
        r.s_xy = static_cast<double>(idx.unigram(xi));
        r.s_yx = static_cast<double>(idx.unigram(yi));
        break;
    case BaselineKind::Precedence:
        r.s_xy = static_cast<double>(idx.prec_cooc(xi, yi));
        r.s_yx = static_cast<double>(idx.prec_cooc(yi, xi));
        break;
    case BaselineKind::CountsEntropy:
    case BaselineKind::PrecCountsEntropy:
    case BaselineKind::PmiEntropy:
    case BaselineKind::PrecPmiEntropy: {
        const auto px = projection_vector(projection_for(kind), x, vocab, ctx);
        const auto py = projection_vector(projection_for(kind), y, vocab, ctx);
        r.s_xy = normalized_entropy(px);
        r.s_yx = normalized_entropy(py);
        break;
    }
    default: {
        const auto px = projection_vector(projection_for(kind), x, vocab, ctx);
        const auto py = projection_vector(projection_for(kind), y, vocab, ctx);
        const auto wxy = weeds_precision(px, py);
        const auto wyx = weeds_precision(py, px);
        undefined = !wxy || !wyx;
        r.s_xy = wxy.value_or(0.0);
        r.s_yx = wyx.value_or(0.0);
        break;
    }
    }
    if (undefined || r.s_xy == r.s_yx)
        r.direction = {Verdict::XtoY, 0.0, true};
    else
        r.direction = {r.s_xy > r.s_yx ? Verdict::XtoY : Verdict::YtoX, std::abs(r.s_xy - r.s_yx), false};
    return r;
}

} // namespace proxycause

#endif
