// Command-line front end. Results go to stdout as JSON, the resolved
// configuration and notes go to stderr.

#include <fnmatch.h>

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "proxycause/proxycause.hpp"

namespace fs = std::filesystem;
namespace pc = proxycause;
using json = nlohmann::json;

namespace {

/// Bad flag values or missing inputs detected after parsing; exit code 2.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Globals {
    std::uint64_t seed = 0;
    unsigned jobs = 1;
};

void log_config(const std::string& command, const Globals& g, json cfg) {
    cfg["seed"] = g.seed;
    cfg["jobs"] = g.jobs;
    std::cerr << json{{"command", command}, {"config", cfg}}.dump() << '\n';
}

void note(const std::string& msg) { std::cerr << json{{"note", msg}}.dump() << '\n'; }

void emit(const json& j) { std::cout << j.dump(2) << '\n'; }

json direction_json(const pc::Direction& d) {
    return {{"verdict", pc::to_string(d.verdict)}, {"score", d.score}, {"tie", d.tie}};
}

json nullable(std::optional<double> v) { return v ? json(*v) : json(nullptr); }

// ---------------------------------------------------------------------------
// Engines

struct EngineOptions {
    std::string name = "anm";
    std::string model;
    int permutations = 499;
    double lambda = 1e-3;

    void add(CLI::App* cmd) {
        cmd->add_option("--engine", name, "Direction engine")->check(CLI::IsMember({"anm", "rcc"}))->capture_default_str();
        cmd->add_option("--model", model, "RCC model file (required for --engine rcc)");
        cmd->add_option("--permutations", permutations, "HSIC permutations for the ANM engine")->capture_default_str();
        cmd->add_option("--lambda", lambda, "Kernel ridge penalty for the ANM engine")->capture_default_str();
    }

    json to_json() const {
        json j{{"engine", name}};
        if (name == "anm") {
            j["permutations"] = permutations;
            j["lambda"] = lambda;
        } else {
            j["model"] = model;
        }
        return j;
    }

    pc::Engine build() const {
        if (name == "anm") {
            pc::AnmConfig cfg;
            cfg.num_permutations = permutations;
            cfg.ridge_lambda = lambda;
            cfg.validate();
            return cfg;
        }
        if (model.empty())
            throw UsageError("--engine rcc requires --model");
        return std::make_shared<const pc::RccModel>(pc::load_rcc(model));
    }
};

/// Verdict plus ANM p-values when that engine is in use.
json classify_scatter(const pc::ScatterSample& sample, const pc::Engine& engine, std::uint64_t seed) {
    const auto* anm = std::get_if<pc::AnmConfig>(&engine);
    const bool diagonal = std::all_of(sample.points().begin(), sample.points().end(),
                                      [](const pc::Point& p) { return p.a == p.b; });
    if (!anm || diagonal)
        return direction_json(pc::scatter_direction(sample, engine, seed));
    const auto r = pc::anm_test(sample, *anm, seed);
    json out = direction_json(r.direction);
    out["p_forward"] = r.p_forward;
    out["p_backward"] = r.p_backward;
    return out;
}

// ---------------------------------------------------------------------------
// Text inputs

struct TextOptions {
    std::string corpus;
    std::string index;
    std::string embeddings;
    std::size_t vocab_size = 10000;
    bool uniform_vocab = false;
    std::size_t dim = 300;
    int epochs = 5;
    int window = 5;
    int negatives = 5;
    double lr = 0.025;
    CLI::Option* vocab_opt = nullptr;

    void add(CLI::App* cmd, bool with_sgns) {
        cmd->add_option("--corpus", corpus, "Plain-text corpus, one sentence per line");
        cmd->add_option("--index", index, "Corpus index file written by index-corpus");
        vocab_opt = cmd->add_option("--vocab-size", vocab_size, "Number of proxy words")->capture_default_str();
        cmd->add_flag("--uniform-vocab", uniform_vocab, "Sample proxy words uniformly instead of by frequency");
        if (with_sgns) {
            cmd->add_option("--embeddings", embeddings, "Embedding file written by embed-train");
            add_sgns(cmd);
        }
    }

    void add_sgns(CLI::App* cmd) {
        cmd->add_option("--dim", dim, "Embedding dimension")->capture_default_str();
        cmd->add_option("--epochs", epochs, "Training epochs")->capture_default_str();
        cmd->add_option("--window", window, "Context window")->capture_default_str();
        cmd->add_option("--negatives", negatives, "Negative samples per pair")->capture_default_str();
        cmd->add_option("--lr", lr, "Initial learning rate")->capture_default_str();
    }

    pc::SgnsConfig sgns(std::uint64_t seed) const {
        pc::SgnsConfig c;
        c.dim = dim;
        c.epochs = epochs;
        c.window = window;
        c.negatives = negatives;
        c.learning_rate = lr;
        c.seed = seed;
        return c;
    }

    json to_json(bool with_sgns) const {
        json j{{"corpus", corpus}, {"index", index}, {"vocab_size", vocab_size}, {"uniform_vocab", uniform_vocab}};
        if (with_sgns) {
            j["embeddings"] = embeddings;
            j["dim"] = dim;
            j["epochs"] = epochs;
            j["window"] = window;
            j["negatives"] = negatives;
            j["lr"] = lr;
        }
        return j;
    }
};

struct TextData {
    pc::CorpusIndex index;
    std::optional<pc::EmbeddingModel> embeddings;
    pc::VocabSample vocab;

    pc::TextContext context() const { return {&index, embeddings ? &*embeddings : nullptr}; }
};

TextData load_text(const TextOptions& opt, bool need_embeddings, std::uint64_t seed) {
    if (opt.corpus.empty() && opt.index.empty())
        throw UsageError("one of --corpus or --index is required");
    std::optional<std::vector<std::vector<std::string>>> sentences;
    TextData t{opt.index.empty() ? pc::CorpusIndex::from_sentences(*(sentences = pc::read_corpus(opt.corpus)))
                                 : pc::load_index(opt.index),
               std::nullopt,
               {}};
    if (need_embeddings) {
        if (!opt.embeddings.empty()) {
            t.embeddings = pc::load_embeddings(opt.embeddings);
        } else {
            if (!sentences) {
                if (opt.corpus.empty())
                    throw UsageError("embedding projections need --embeddings or --corpus");
                sentences = pc::read_corpus(opt.corpus);
            }
            note("training embeddings on the corpus (dim " + std::to_string(opt.dim) + ")");
            t.embeddings = pc::sgns_train(*sentences, t.index, opt.sgns(pc::derive_seed(seed, "text/sgns")));
        }
    }
    std::size_t n = opt.vocab_size;
    if (n > t.index.vocabulary_size() && opt.vocab_opt && opt.vocab_opt->count() == 0) {
        note("default vocabulary size " + std::to_string(n) + " exceeds the corpus vocabulary; using all " +
             std::to_string(t.index.vocabulary_size()) + " words");
        n = t.index.vocabulary_size();
    }
    t.vocab = opt.uniform_vocab ? pc::vocab_sample_uniform(t.index, n, pc::derive_seed(seed, "text/vocab"))
                                : pc::vocab_sample(t.index, n);
    return t;
}

std::vector<pc::ProjectionKind> parse_kinds(const std::vector<std::string>& names) {
    std::vector<pc::ProjectionKind> out;
    if (names.empty())
        return {std::begin(pc::kAllProjections), std::end(pc::kAllProjections)};
    for (const auto& n : names)
        out.push_back(pc::parse_projection(n));
    return out;
}

json report_json(const pc::EvalReport& r, const std::vector<pc::WordPairRecord>* pairs, bool predictions) {
    json j{{"accuracies", r.accuracies}, {"mean", r.mean},           {"std", r.stddev},
           {"p_value", r.p_value},       {"evaluated", r.evaluated}, {"excluded", r.excluded},
           {"excluded_pairs", r.excluded_items}, {"test_size", r.test_size}};
    if (predictions) {
        json preds = json::array();
        for (const auto& p : r.predictions) {
            json e{{"repeat", p.repeat}, {"item", p.item}, {"label", p.label}, {"predicted", p.predicted},
                   {"score", p.score},   {"tie", p.tie}};
            if (pairs) {
                e["x"] = pairs->at(p.item).x;
                e["y"] = pairs->at(p.item).y;
            }
            preds.push_back(e);
        }
        j["predictions"] = preds;
    }
    return j;
}

json baseline_json(const pc::BaselineReport& r) {
    return {{"accuracy", r.accuracy}, {"correct", r.correct},   {"ties", r.ties},
            {"evaluated", r.evaluated}, {"excluded", r.excluded}, {"p_value", r.p_value}};
}

json curve_json(const std::vector<pc::CurvePoint>& curve) {
    json out = json::array();
    for (const auto& p : curve)
        out.push_back({{"threshold", p.threshold}, {"accuracy", nullable(p.accuracy)}, {"count", p.count}});
    return out;
}

std::ofstream open_out(const fs::path& p) {
    std::ofstream out(p);
    if (!out)
        throw pc::DataError("cannot write " + p.string());
    return out;
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw pc::DataError("cannot create directory " + dir + ": " + ec.message());
}

std::string two_digits(std::size_t i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%02zu", i);
    return buf;
}

std::vector<std::string> glob_files(const std::string& dir, const std::string& pattern) {
    if (!fs::is_directory(dir))
        throw pc::DataError("not a directory: " + dir);
    std::vector<std::string> out;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file() && fnmatch(pattern.c_str(), e.path().filename().c_str(), 0) == 0)
            out.push_back(e.path().string());
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Causal direction between static entities via proxy variables", "proxycause"};
    app.config_formatter(std::make_shared<CLI::ConfigINI>());
    app.set_config("--config", "", "key=value configuration file; flags take precedence");
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    app.add_option("--seed", g.seed, "Master seed")->envname("PROXYCAUSE_SEED")->capture_default_str();
    app.add_option("--jobs", g.jobs, "Worker threads; results do not depend on it")
        ->check(CLI::Range(1u, 256u))
        ->capture_default_str();

    std::function<void()> run;

    // index-corpus ----------------------------------------------------------
    auto* index_cmd = app.add_subcommand("index-corpus", "Count sentence-level (co-)occurrences");
    std::string index_corpus, index_out;
    index_cmd->add_option("--corpus", index_corpus, "Plain-text corpus")->required();
    index_cmd->add_option("--out", index_out, "Index file to write")->required();
    index_cmd->callback([&] {
        run = [&] {
            log_config("index-corpus", g, {{"corpus", index_corpus}, {"out", index_out}});
            const auto idx = pc::build_index(index_corpus);
            pc::save_index(idx, index_out);
            emit({{"sentences", idx.sentence_count()},
                  {"vocabulary", idx.vocabulary_size()},
                  {"cooc_entries", idx.cooc_entries()},
                  {"out", index_out}});
        };
    });

    // embed-train -----------------------------------------------------------
    auto* embed_cmd = app.add_subcommand("embed-train", "Train skip-gram embeddings with negative sampling");
    TextOptions embed_opt;
    std::string embed_out;
    embed_cmd->add_option("--corpus", embed_opt.corpus, "Plain-text corpus")->required();
    embed_cmd->add_option("--out", embed_out, "Embedding file to write")->required();
    embed_opt.add_sgns(embed_cmd);
    embed_cmd->callback([&] {
        run = [&] {
            json cfg = embed_opt.to_json(true);
            cfg["out"] = embed_out;
            log_config("embed-train", g, cfg);
            const auto sentences = pc::read_corpus(embed_opt.corpus);
            const auto idx = pc::CorpusIndex::from_sentences(sentences);
            const auto model = pc::sgns_train(sentences, idx, embed_opt.sgns(pc::derive_seed(g.seed, "text/sgns")));
            pc::save_embeddings(model, embed_out);
            emit({{"words", model.words.size()}, {"dim", model.dim()}, {"epochs", embed_opt.epochs}, {"out", embed_out}});
        };
    });

    // word-pair -------------------------------------------------------------
    auto* wp_cmd = app.add_subcommand("word-pair", "Scatter sample and verdict for one word pair");
    TextOptions wp_text;
    EngineOptions wp_engine;
    std::string wp_x, wp_y, wp_kind = "w2voi", wp_scatter_out;
    wp_cmd->add_option("--x", wp_x, "First word")->required();
    wp_cmd->add_option("--y", wp_y, "Second word")->required();
    wp_cmd->add_option("--kind", wp_kind, "Projection")->capture_default_str();
    wp_cmd->add_option("--scatter-out", wp_scatter_out, "Write the scatter sample as JSON lines");
    wp_text.add(wp_cmd, true);
    wp_engine.add(wp_cmd);
    wp_cmd->callback([&] {
        run = [&] {
            json cfg = wp_text.to_json(true);
            cfg.update(wp_engine.to_json());
            cfg.update({{"x", wp_x}, {"y", wp_y}, {"kind", wp_kind}, {"scatter_out", wp_scatter_out}});
            log_config("word-pair", g, cfg);
            const auto kind = pc::parse_projection(wp_kind);
            const auto engine = wp_engine.build();
            const auto text = load_text(wp_text, pc::needs_embeddings(kind), g.seed);
            const auto sample = pc::word_pair_scatter(wp_x, wp_y, kind, text.vocab, text.context());
            if (!wp_scatter_out.empty()) {
                auto out = open_out(wp_scatter_out);
                pc::write_scatter_jsonl(out, sample);
            }
            json result = classify_scatter(sample, engine, pc::derive_seed(g.seed, "word-pair/engine"));
            result.update({{"x", wp_x}, {"y", wp_y}, {"kind", wp_kind}, {"n", sample.size()}});
            emit(result);
        };
    });

    // nlp-eval --------------------------------------------------------------
    auto* nlp_cmd = app.add_subcommand("nlp-eval", "Full word-pair evaluation: projections, feature method, baselines");
    TextOptions nlp_text;
    std::string nlp_pairs, nlp_csv_dir, nlp_curve_kind = "w2voi";
    std::vector<std::string> nlp_kinds;
    int nlp_min_votes = 18, nlp_total_votes = 20, nlp_trees = 500;
    std::size_t nlp_features = 100, nlp_repeats = 10;
    double nlp_split = 0.75;
    bool nlp_predictions = false;
    nlp_cmd->add_option("--pairs", nlp_pairs, "Annotated word pairs (CSV)")->required();
    nlp_cmd->add_option("--kinds", nlp_kinds, "Projections to evaluate (default: all seven)");
    nlp_cmd->add_option("--min-votes", nlp_min_votes, "Consensus filter")->capture_default_str();
    nlp_cmd->add_option("--total-votes", nlp_total_votes, "Annotators per pair")->capture_default_str();
    nlp_cmd->add_option("--trees", nlp_trees, "Trees per forest")->capture_default_str();
    nlp_cmd->add_option("--features", nlp_features, "Random features per embedding block")->capture_default_str();
    nlp_cmd->add_option("--split", nlp_split, "Training fraction")->capture_default_str();
    nlp_cmd->add_option("--repeats", nlp_repeats, "Random splits")->capture_default_str();
    nlp_cmd->add_option("--curve-kind", nlp_curve_kind, "Projection used for the confidence curve")->capture_default_str();
    nlp_cmd->add_option("--csv-dir", nlp_csv_dir, "Also write plotting CSVs here");
    nlp_cmd->add_flag("--predictions", nlp_predictions, "Include per-pair predictions");
    nlp_text.add(nlp_cmd, true);
    nlp_cmd->callback([&] {
        run = [&] {
            json cfg = nlp_text.to_json(true);
            cfg.update({{"pairs", nlp_pairs},
                        {"kinds", nlp_kinds},
                        {"min_votes", nlp_min_votes},
                        {"total_votes", nlp_total_votes},
                        {"trees", nlp_trees},
                        {"features", nlp_features},
                        {"split", nlp_split},
                        {"repeats", nlp_repeats},
                        {"curve_kind", nlp_curve_kind},
                        {"curve_protocol", "pooled test predictions over all pairs, no consensus filter"},
                        {"csv_dir", nlp_csv_dir}});
            log_config("nlp-eval", g, cfg);
            const auto kinds = parse_kinds(nlp_kinds);
            const auto curve_kind = pc::parse_projection(nlp_curve_kind);
            const bool need_emb = pc::needs_embeddings(curve_kind) ||
                                  std::any_of(kinds.begin(), kinds.end(), pc::needs_embeddings);
            const auto all_pairs = pc::load_word_pairs(nlp_pairs);
            const auto pairs = pc::filter_consensus(all_pairs, nlp_min_votes, nlp_total_votes);
            const auto text = load_text(nlp_text, need_emb, g.seed);
            const auto ctx = text.context();

            pc::RccConfig rcc;
            rcc.num_features = nlp_features;
            rcc.forest.num_trees = nlp_trees;
            rcc.forest.jobs = g.jobs;
            pc::EvalProtocol protocol{nlp_split, nlp_repeats, pc::derive_seed(g.seed, "nlp/protocol")};

            json dist = json::object(), feat = json::object(), base = json::object();
            std::vector<std::tuple<std::string, std::string, double, double, double>> bars;
            for (auto kind : kinds) {
                const auto rd = pc::evaluate_distribution_method(pairs, kind, text.vocab, ctx, rcc, protocol);
                const auto rf = pc::evaluate_feature_method(pairs, kind, text.vocab, ctx, rcc.forest, protocol);
                dist[pc::to_string(kind)] = report_json(rd, &pairs, nlp_predictions);
                feat[pc::to_string(kind)] = report_json(rf, &pairs, nlp_predictions);
                bars.emplace_back("distribution", pc::to_string(kind), rd.mean, rd.stddev, rd.p_value);
                bars.emplace_back("feature", pc::to_string(kind), rf.mean, rf.stddev, rf.p_value);
            }
            for (auto b : pc::kAllBaselines) {
                const auto r = pc::evaluate_baseline(b, pairs, text.vocab, ctx);
                base[pc::to_string(b)] = baseline_json(r);
                bars.emplace_back("baseline", pc::to_string(b), r.accuracy, 0.0, r.p_value);
            }
            const auto curve_report =
                pc::evaluate_distribution_method(all_pairs, curve_kind, text.vocab, ctx, rcc, protocol);
            const auto curve = pc::confidence_curve(curve_report, all_pairs);

            if (!nlp_csv_dir.empty()) {
                ensure_dir(nlp_csv_dir);
                auto acc = open_out(fs::path(nlp_csv_dir) / "accuracy.csv");
                acc << "method,kind,accuracy,std,p_value\n";
                for (const auto& [m, k, a, s, p] : bars)
                    acc << m << ',' << k << ',' << json(a).dump() << ',' << json(s).dump() << ',' << json(p).dump()
                        << '\n';
                auto cc = open_out(fs::path(nlp_csv_dir) / "confidence_curve.csv");
                cc << "threshold,accuracy,count\n";
                for (const auto& p : curve)
                    cc << p.threshold << ',' << (p.accuracy ? json(*p.accuracy).dump() : "") << ',' << p.count << '\n';
            }
            emit({{"pairs_total", all_pairs.size()},
                  {"pairs_filtered", pairs.size()},
                  {"vocab_size", text.vocab.size()},
                  {"distribution", dist},
                  {"feature", feat},
                  {"baselines", base},
                  {"confidence_curve",
                   {{"kind", pc::to_string(curve_kind)},
                    {"pairs", curve_report.evaluated},
                    {"points", curve_json(curve)}}}});
        };
    });

    // baselines -------------------------------------------------------------
    auto* base_cmd = app.add_subcommand("baselines", "Unsupervised scores for word pairs");
    TextOptions base_text;
    std::string base_pairs, base_x, base_y;
    int base_min_votes = 18, base_total_votes = 20;
    base_cmd->add_option("--pairs", base_pairs, "Annotated word pairs (CSV)");
    base_cmd->add_option("--x", base_x, "Score a single pair instead");
    base_cmd->add_option("--y", base_y, "Score a single pair instead");
    base_cmd->add_option("--min-votes", base_min_votes, "Consensus filter")->capture_default_str();
    base_cmd->add_option("--total-votes", base_total_votes, "Annotators per pair")->capture_default_str();
    base_text.add(base_cmd, false);
    base_cmd->callback([&] {
        run = [&] {
            json cfg = base_text.to_json(false);
            cfg.update({{"pairs", base_pairs},
                        {"x", base_x},
                        {"y", base_y},
                        {"min_votes", base_min_votes},
                        {"total_votes", base_total_votes}});
            log_config("baselines", g, cfg);
            const bool single = !base_x.empty() || !base_y.empty();
            if (single == !base_pairs.empty())
                throw UsageError("give either --pairs or both --x and --y");
            if (single && (base_x.empty() || base_y.empty()))
                throw UsageError("--x and --y must be given together");
            const auto text = load_text(base_text, false, g.seed);
            const auto ctx = text.context();
            json out = json::object();
            if (single) {
                for (auto b : pc::kAllBaselines) {
                    const auto r = pc::baseline_scores(b, base_x, base_y, text.vocab, ctx);
                    json e = direction_json(r.direction);
                    e["s_xy"] = r.s_xy;
                    e["s_yx"] = r.s_yx;
                    out[pc::to_string(b)] = e;
                }
                emit({{"x", base_x}, {"y", base_y}, {"baselines", out}});
                return;
            }
            const auto pairs = pc::filter_consensus(pc::load_word_pairs(base_pairs), base_min_votes, base_total_votes);
            for (auto b : pc::kAllBaselines)
                out[pc::to_string(b)] = baseline_json(pc::evaluate_baseline(b, pairs, text.vocab, ctx));
            emit({{"pairs_filtered", pairs.size()}, {"baselines", out}});
        };
    });

    // image-pair ------------------------------------------------------------
    auto* img_cmd = app.add_subcommand("image-pair", "Causal direction between two images");
    EngineOptions img_engine;
    std::string img_x, img_y;
    std::size_t img_n = 1024;
    int img_k = 10;
    img_cmd->add_option("--x", img_x, "First image (PGM/PPM)")->required();
    img_cmd->add_option("--y", img_y, "Second image (PGM/PPM)")->required();
    img_cmd->add_option("--n", img_n, "Number of random patches")->capture_default_str();
    img_cmd->add_option("--k", img_k, "Patch side in pixels")->capture_default_str();
    img_engine.add(img_cmd);
    img_cmd->callback([&] {
        run = [&] {
            json cfg = img_engine.to_json();
            cfg.update({{"x", img_x}, {"y", img_y}, {"n", img_n}, {"k", img_k}});
            log_config("image-pair", g, cfg);
            const auto engine = img_engine.build();
            const auto x = pc::load_image(img_x);
            const auto y = pc::load_image(img_y);
            const auto sample = pc::image_pair_scatter(x, y, img_n, img_k, pc::derive_seed(g.seed, "image/masks"));
            json result = classify_scatter(sample, engine, pc::derive_seed(g.seed, "image/engine"));
            result.update({{"x", img_x}, {"y", img_y}, {"n", img_n}, {"k", img_k}});
            emit(result);
        };
    });

    // frames-order ----------------------------------------------------------
    auto* fr_cmd = app.add_subcommand("frames-order", "Recover the temporal order of video frames");
    EngineOptions fr_engine;
    std::string fr_dir, fr_pattern = "*.pgm";
    std::vector<std::string> fr_files;
    std::size_t fr_n = 1024;
    int fr_k = 10;
    fr_cmd->add_option("files", fr_files, "Frame images (alternative to --dir)");
    fr_cmd->add_option("--dir", fr_dir, "Directory holding the frames");
    fr_cmd->add_option("--pattern", fr_pattern, "Glob for frames inside --dir")->capture_default_str();
    fr_cmd->add_option("--n", fr_n, "Number of random patches")->capture_default_str();
    fr_cmd->add_option("--k", fr_k, "Patch side in pixels")->capture_default_str();
    fr_engine.add(fr_cmd);
    fr_cmd->callback([&] {
        run = [&] {
            json cfg = fr_engine.to_json();
            cfg.update({{"files", fr_files}, {"dir", fr_dir}, {"pattern", fr_pattern}, {"n", fr_n}, {"k", fr_k}});
            log_config("frames-order", g, cfg);
            if (fr_dir.empty() == fr_files.empty())
                throw UsageError("give either --dir or a list of frame files");
            const auto files = fr_dir.empty() ? fr_files : glob_files(fr_dir, fr_pattern);
            if (files.size() < 2)
                throw pc::DataError("need at least two frames, found " + std::to_string(files.size()));
            const auto engine = fr_engine.build();
            std::vector<pc::Image> frames;
            for (const auto& f : files)
                frames.push_back(pc::load_image(f));
            const auto r = pc::frames_order(frames, fr_n, fr_k, engine, pc::derive_seed(g.seed, "frames"), g.jobs);
            json names = json::array();
            for (auto i : r.order)
                names.push_back(fs::path(files[i]).filename().string());
            json file_names = json::array();
            for (const auto& f : files)
                file_names.push_back(fs::path(f).filename().string());
            emit({{"files", file_names},
                  {"order", r.order},
                  {"ordered_files", names},
                  {"adjacency", r.adjacency},
                  {"cyclic", r.cyclic},
                  {"ties", r.ties}});
        };
    });

    // synth -----------------------------------------------------------------
    auto* synth_cmd = app.add_subcommand("synth", "Generate synthetic data with known ground truth");
    synth_cmd->require_subcommand(1);

    auto* s_anm = synth_cmd->add_subcommand("anm", "Labeled additive-noise scatter samples (JSON lines)");
    std::size_t s_anm_count = 100, s_anm_n = 500;
    std::string s_anm_out, s_anm_mech, s_anm_noise = "gaussian";
    s_anm->add_option("--count", s_anm_count, "Number of samples")->capture_default_str();
    s_anm->add_option("--n", s_anm_n, "Points per sample")->capture_default_str();
    s_anm->add_option("--mechanism", s_anm_mech, "Fixed mechanism (default: random per sample)");
    s_anm->add_option("--noise", s_anm_noise, "Noise kind with --mechanism")->capture_default_str();
    s_anm->add_option("--out", s_anm_out, "Dataset file to write")->required();
    s_anm->callback([&] {
        run = [&] {
            log_config("synth anm", g,
                       {{"count", s_anm_count}, {"n", s_anm_n}, {"mechanism", s_anm_mech}, {"noise", s_anm_noise},
                        {"out", s_anm_out}});
            pc::LabeledScatterDataset data;
            if (s_anm_mech.empty()) {
                data = pc::synth_anm_dataset(s_anm_count, s_anm_n, g.seed);
            } else {
                const auto mech = pc::parse_mechanism(s_anm_mech);
                const auto noise = pc::parse_noise(s_anm_noise);
                for (std::size_t i = 0; i < s_anm_count; ++i) {
                    auto p = pc::synth_anm_pair(s_anm_n, mech, noise,
                                                pc::derive_seed(g.seed, "synth/anm/" + std::to_string(i)));
                    data.push_back({std::move(p.sample), p.label});
                }
            }
            auto out = open_out(s_anm_out);
            pc::write_dataset_jsonl(out, data);
            std::size_t pos = 0;
            for (const auto& d : data)
                pos += d.label > 0;
            emit({{"count", data.size()}, {"n", s_anm_n}, {"positive", pos}, {"out", s_anm_out}});
        };
    });

    auto* s_sty = synth_cmd->add_subcommand("stylized", "Image pairs related by a local stylization mechanism");
    std::size_t s_sty_count = 1;
    int s_sty_size = 240, s_sty_k = 10;
    double s_sty_noise = 0.05;
    std::string s_sty_dir;
    s_sty->add_option("--count", s_sty_count, "Number of pairs")->capture_default_str();
    s_sty->add_option("--size", s_sty_size, "Image side in pixels (multiple of --k)")->capture_default_str();
    s_sty->add_option("--k", s_sty_k, "Mechanism tile side")->capture_default_str();
    s_sty->add_option("--noise", s_sty_noise, "Noise standard deviation")->capture_default_str();
    s_sty->add_option("--out-dir", s_sty_dir, "Output directory")->required();
    s_sty->callback([&] {
        run = [&] {
            log_config("synth stylized", g,
                       {{"count", s_sty_count}, {"size", s_sty_size}, {"k", s_sty_k}, {"noise", s_sty_noise},
                        {"out_dir", s_sty_dir}});
            ensure_dir(s_sty_dir);
            json pairs = json::array();
            for (std::size_t i = 0; i < s_sty_count; ++i) {
                const std::string tag = "synth/stylized/" + std::to_string(i);
                const auto base = pc::synth_smooth_image(s_sty_size, s_sty_size, pc::derive_seed(g.seed, tag + "/base"));
                const auto mech = pc::LocalMechanism::row_constant_tanh(s_sty_k, s_sty_noise,
                                                                        pc::derive_seed(g.seed, tag + "/mechanism"));
                const auto sty = pc::synth_stylized_pair(base, mech, pc::derive_seed(g.seed, tag + "/noise"));
                const std::string x = "pair_" + two_digits(i) + "_x.pgm", y = "pair_" + two_digits(i) + "_y.pgm";
                pc::save_image(base, (fs::path(s_sty_dir) / x).string());
                pc::save_image(sty.image, (fs::path(s_sty_dir) / y).string());
                pairs.push_back({{"cause", x}, {"effect", y}, {"clip_fraction", sty.clip_fraction}});
            }
            emit({{"pairs", pairs}, {"out_dir", s_sty_dir}});
        };
    });

    auto* s_fr = synth_cmd->add_subcommand("frames", "Diffusion video frames under shuffled names");
    int s_fr_size = 64;
    std::size_t s_fr_frames = 8;
    bool s_fr_keep_order = false;
    std::string s_fr_dir;
    s_fr->add_option("--size", s_fr_size, "Frame side in pixels")->capture_default_str();
    s_fr->add_option("--frames", s_fr_frames, "Number of frames")->capture_default_str();
    s_fr->add_flag("--keep-order", s_fr_keep_order, "Name files in temporal order");
    s_fr->add_option("--out-dir", s_fr_dir, "Output directory")->required();
    s_fr->callback([&] {
        run = [&] {
            log_config("synth frames", g,
                       {{"size", s_fr_size}, {"frames", s_fr_frames}, {"keep_order", s_fr_keep_order},
                        {"out_dir", s_fr_dir}});
            ensure_dir(s_fr_dir);
            const auto frames = pc::synth_diffusion_frames(s_fr_size, s_fr_frames, pc::derive_seed(g.seed, "synth/frames"));
            std::vector<std::size_t> slot(frames.size());
            for (std::size_t t = 0; t < slot.size(); ++t)
                slot[t] = t;
            if (!s_fr_keep_order) {
                pc::Rng rng(pc::derive_seed(g.seed, "synth/frames/shuffle"));
                rng.shuffle(slot);
            }
            json truth = json::array();
            for (std::size_t t = 0; t < frames.size(); ++t) {
                const std::string name = "frame_" + two_digits(slot[t]) + ".pgm";
                pc::save_image(frames[t], (fs::path(s_fr_dir) / name).string());
                truth.push_back(name);
            }
            const json result{{"true_order", truth}, {"out_dir", s_fr_dir}};
            auto t = open_out(fs::path(s_fr_dir) / "truth.json");
            t << json{{"true_order", truth}}.dump(2) << '\n';
            emit(result);
        };
    });

    auto* s_corpus = synth_cmd->add_subcommand("corpus", "Small corpus with annotated cause/effect word pairs");
    pc::SynthCorpusOptions s_corpus_opt;
    std::string s_corpus_dir;
    s_corpus->add_option("--sentences", s_corpus_opt.sentences, "Number of sentences")->capture_default_str();
    s_corpus->add_option("--out-dir", s_corpus_dir, "Output directory")->required();
    s_corpus->callback([&] {
        run = [&] {
            log_config("synth corpus", g, {{"sentences", s_corpus_opt.sentences}, {"out_dir", s_corpus_dir}});
            ensure_dir(s_corpus_dir);
            const auto c = pc::synth_corpus(s_corpus_opt, pc::derive_seed(g.seed, "synth/corpus"));
            auto corpus = open_out(fs::path(s_corpus_dir) / "corpus.txt");
            for (const auto& s : c.sentences)
                corpus << s << '\n';
            auto pairs = open_out(fs::path(s_corpus_dir) / "pairs.csv");
            pc::write_word_pairs(pairs, c.pairs);
            emit({{"sentences", c.sentences.size()}, {"pairs", c.pairs.size()}, {"out_dir", s_corpus_dir}});
        };
    });

    // significance ----------------------------------------------------------
    auto* sig_cmd = app.add_subcommand("significance", "Exact one-sided binomial test of an accuracy");
    double sig_acc = 0.0, sig_p0 = 0.5;
    std::size_t sig_n = 0;
    sig_cmd->add_option("--accuracy", sig_acc, "Observed accuracy")->required();
    sig_cmd->add_option("--n", sig_n, "Number of trials")->required();
    sig_cmd->add_option("--p0", sig_p0, "Chance accuracy")->capture_default_str();
    sig_cmd->callback([&] {
        run = [&] {
            log_config("significance", g, {{"accuracy", sig_acc}, {"n", sig_n}, {"p0", sig_p0}});
            const double p = pc::binomial_significance(sig_acc, sig_n, sig_p0);
            emit({{"accuracy", sig_acc},
                  {"n", sig_n},
                  {"p0", sig_p0},
                  {"successes", std::llround(sig_acc * static_cast<double>(sig_n))},
                  {"p_value", p},
                  {"significant_at_0_05", p < 0.05}});
        };
    });

    // model -----------------------------------------------------------------
    auto* model_cmd = app.add_subcommand("model", "Train, inspect and apply RCC models");
    model_cmd->require_subcommand(1);

    auto* m_train = model_cmd->add_subcommand("train", "Train an RCC model");
    std::string m_data, m_out;
    std::size_t m_count = 200, m_n = 500, m_features = 100;
    int m_trees = 500;
    m_train->add_option("--data", m_data, "Labeled scatter samples (JSON lines); synthetic if omitted");
    m_train->add_option("--count", m_count, "Synthetic samples when --data is omitted")->capture_default_str();
    m_train->add_option("--n", m_n, "Points per synthetic sample")->capture_default_str();
    m_train->add_option("--trees", m_trees, "Trees")->capture_default_str();
    m_train->add_option("--features", m_features, "Random features per block")->capture_default_str();
    m_train->add_option("--out", m_out, "Model file to write")->required();
    m_train->callback([&] {
        run = [&] {
            log_config("model train", g,
                       {{"data", m_data}, {"count", m_count}, {"n", m_n}, {"trees", m_trees},
                        {"features", m_features}, {"out", m_out}});
            pc::LabeledScatterDataset data;
            if (m_data.empty()) {
                data = pc::synth_anm_dataset(m_count, m_n, pc::derive_seed(g.seed, "model/data"));
            } else {
                std::ifstream in(m_data);
                if (!in)
                    throw pc::DataError("cannot read " + m_data);
                data = pc::read_dataset_jsonl(in);
            }
            pc::RccConfig cfg;
            cfg.num_features = m_features;
            cfg.forest.num_trees = m_trees;
            cfg.forest.jobs = g.jobs;
            const auto model = pc::rcc_train(data, cfg, pc::derive_seed(g.seed, "model/train"));
            pc::save_rcc(model, m_out);
            emit({{"examples", data.size()},
                  {"trees", model.forest.num_trees()},
                  {"width", model.forest.width()},
                  {"bandwidth", model.rff.bandwidth},
                  {"out", m_out}});
        };
    });

    auto* m_info = model_cmd->add_subcommand("info", "Describe a model file");
    std::string m_info_path;
    m_info->add_option("--model", m_info_path, "Model file")->required();
    m_info->callback([&] {
        run = [&] {
            log_config("model info", g, {{"model", m_info_path}});
            const auto model = pc::load_rcc(m_info_path);
            std::size_t nodes = 0;
            for (const auto& t : model.forest.trees())
                nodes += t.nodes().size();
            emit({{"format", pc::kRccFormat},
                  {"version", pc::kRccVersion},
                  {"num_features", model.rff.num_features},
                  {"bandwidth", model.rff.bandwidth},
                  {"trees", model.forest.num_trees()},
                  {"width", model.forest.width()},
                  {"nodes", nodes}});
        };
    });

    auto* m_pred = model_cmd->add_subcommand("predict", "Classify a scatter sample");
    std::string m_pred_model, m_pred_scatter;
    m_pred->add_option("--model", m_pred_model, "Model file")->required();
    m_pred->add_option("--scatter", m_pred_scatter, "Scatter sample (JSON lines of {a, b})")->required();
    m_pred->callback([&] {
        run = [&] {
            log_config("model predict", g, {{"model", m_pred_model}, {"scatter", m_pred_scatter}});
            const auto model = pc::load_rcc(m_pred_model);
            std::ifstream in(m_pred_scatter);
            if (!in)
                throw pc::DataError("cannot read " + m_pred_scatter);
            const auto sample = pc::read_scatter_jsonl(in);
            json out = direction_json(pc::rcc_predict(model, sample));
            out["n"] = sample.size();
            emit(out);
        };
    });

    if (argc <= 1) {
        std::cerr << app.help();
        return 2;
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (run)
            run();
        return 0;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const pc::DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
