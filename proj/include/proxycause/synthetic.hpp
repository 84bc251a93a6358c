#pragma once
#ifndef PROXYCAUSE_SYNTHETIC_HPP
#define PROXYCAUSE_SYNTHETIC_HPP

// Synthetic ground-truth generators: additive-noise cause/effect pairs,
// locally stylized images, diffusion frame sequences and a small corpus
// with cause/effect word pairs.

#include <functional>
#include <map>

#include "proxycause/proxy_image.hpp"
#include "proxycause/word_pairs.hpp"

namespace proxycause {

// ---------------------------------------------------------------------------
// Additive-noise pairs

enum class Mechanism { Identity, Linear, Cubic, Tanh, PiecewiseLinear };
enum class NoiseKind { None, Gaussian, Uniform, Laplace };

inline const char* to_string(Mechanism m) {
    switch (m) {
    case Mechanism::Identity: return "identity";
    case Mechanism::Linear: return "linear";
    case Mechanism::Cubic: return "cubic";
    case Mechanism::Tanh: return "tanh";
    case Mechanism::PiecewiseLinear: return "piecewise-linear";
    }
    return "?";
}

inline const char* to_string(NoiseKind k) {
    switch (k) {
    case NoiseKind::None: return "none";
    case NoiseKind::Gaussian: return "gaussian";
    case NoiseKind::Uniform: return "uniform";
    case NoiseKind::Laplace: return "laplace";
    }
    return "?";
}

inline Mechanism parse_mechanism(std::string_view s) {
    for (auto m : {Mechanism::Identity, Mechanism::Linear, Mechanism::Cubic, Mechanism::Tanh, Mechanism::PiecewiseLinear})
        if (s == to_string(m))
            return m;
    throw std::invalid_argument("unknown mechanism '" + std::string(s) + "'");
}

inline NoiseKind parse_noise(std::string_view s) {
    for (auto k : {NoiseKind::None, NoiseKind::Gaussian, NoiseKind::Uniform, NoiseKind::Laplace})
        if (s == to_string(k))
            return k;
    throw std::invalid_argument("unknown noise kind '" + std::string(s) + "'");
}

struct SynthAnmOptions {
    Mechanism mechanism = Mechanism::Cubic;
    NoiseKind noise = NoiseKind::Uniform;
    /// Noise standard deviation relative to the standardized cause.
    double noise_scale = 0.3;
    /// Draw the cause from a Gaussian mixture; otherwise a single standard
    /// Gaussian (used for the non-identifiable linear-Gaussian case).
    bool mixture_cause = true;
    /// Randomly orient the pair; otherwise the cause is always coordinate a.
    bool random_orientation = true;
};

struct SynthPair {
    ScatterSample sample;
    int label = +1;
    /// The additive noise in standardized effect units, aligned with the
    /// sample points; effect = mechanism(cause) + residual up to an affine map.
    std::vector<double> residual;
};

namespace detail {
inline double noise_draw(NoiseKind kind, Rng& rng) {
    switch (kind) {
    case NoiseKind::None: return 0.0;
    case NoiseKind::Gaussian: return rng.normal();
    case NoiseKind::Uniform: return rng.uniform(-std::sqrt(3.0), std::sqrt(3.0));
    case NoiseKind::Laplace: return rng.laplace(1.0 / std::sqrt(2.0));
    }
    return 0.0;
}
} // namespace detail

/// cause ~ Gaussian mixture, effect = mechanism(cause) + noise with noise
/// independent of the cause; both coordinates standardized. With random
/// orientation a seeded coin decides whether the cause is coordinate a
/// (label +1) or b (label -1).
inline SynthPair synth_anm_pair(std::size_t n, const SynthAnmOptions& opt, std::uint64_t seed) {
    if (n < 20)
        throw std::invalid_argument("synth_anm_pair: need n >= 20");
    Rng rng(seed);

    std::vector<double> cause(n);
    if (opt.mixture_cause) {
        const int comps = 1 + static_cast<int>(rng.below(4));
        std::vector<double> mu(static_cast<std::size_t>(comps)), sd(mu.size()), w(mu.size());
        double wsum = 0.0;
        for (std::size_t c = 0; c < mu.size(); ++c) {
            mu[c] = rng.uniform(-2.0, 2.0);
            sd[c] = rng.uniform(0.3, 1.0);
            w[c] = rng.uniform(0.5, 1.5);
            wsum += w[c];
        }
        for (auto& x : cause) {
            double u = rng.uniform() * wsum;
            std::size_t c = 0;
            while (c + 1 < w.size() && u > w[c]) {
                u -= w[c];
                ++c;
            }
            x = rng.normal(mu[c], sd[c]);
        }
    } else {
        for (auto& x : cause)
            x = rng.normal();
    }
    cause = standardize(cause);

    std::function<double(double)> f;
    switch (opt.mechanism) {
    case Mechanism::Identity: f = [](double x) { return x; }; break;
    case Mechanism::Linear: {
        const double slope = rng.uniform(0.5, 2.0) * (rng.below(2) ? 1.0 : -1.0);
        f = [slope](double x) { return slope * x; };
        break;
    }
    case Mechanism::Cubic: {
        const double c1 = rng.uniform(-1.0, 1.0);
        const double c3 = rng.uniform(0.5, 1.5) * (rng.below(2) ? 1.0 : -1.0);
        f = [c1, c3](double x) { return c1 * x + c3 * x * x * x; };
        break;
    }
    case Mechanism::Tanh: {
        const double s = rng.uniform(1.0, 3.0);
        const double shift = rng.uniform(-0.5, 0.5);
        f = [s, shift](double x) { return std::tanh(s * (x - shift)); };
        break;
    }
    case Mechanism::PiecewiseLinear: {
        const double knot = rng.uniform(-0.8, 0.8);
        const double s1 = rng.uniform(0.1, 0.6);
        const double s2 = rng.uniform(1.5, 3.0) * (rng.below(2) ? 1.0 : -1.0);
        f = [knot, s1, s2](double x) { return x < knot ? s1 * (x - knot) : s2 * (x - knot); };
        break;
    }
    }
    std::vector<double> effect(n), noise(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        effect[i] = f(cause[i]);
    if (opt.noise != NoiseKind::None) {
        // Scale noise relative to the spread of the mechanism output.
        const double spread = std::max(stddev(effect), 1e-3);
        for (std::size_t i = 0; i < n; ++i) {
            noise[i] = opt.noise_scale * spread * detail::noise_draw(opt.noise, rng);
            effect[i] += noise[i];
        }
    }
    const double effect_sd = stddev(effect);
    effect = standardize(effect);
    for (auto& e : noise)
        e /= effect_sd;

    const bool forward = !opt.random_orientation || rng.below(2) == 0;
    return forward ? SynthPair{ScatterSample::from_columns(cause, effect), +1, std::move(noise)}
                   : SynthPair{ScatterSample::from_columns(effect, cause), -1, std::move(noise)};
}

inline SynthPair synth_anm_pair(std::size_t n, Mechanism mechanism, NoiseKind noise, std::uint64_t seed) {
    SynthAnmOptions opt;
    opt.mechanism = mechanism;
    opt.noise = noise;
    return synth_anm_pair(n, opt, seed);
}

/// `count` pairs with nonlinear mechanisms, noise families and noise levels
/// drawn per pair; used to train and evaluate the learned engine.
inline LabeledScatterDataset synth_anm_dataset(std::size_t count, std::size_t n, std::uint64_t seed) {
    LabeledScatterDataset out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        Rng pick(derive_seed(seed, "anm-dataset/config/" + std::to_string(i)));
        SynthAnmOptions opt;
        static constexpr Mechanism mechs[] = {Mechanism::Cubic, Mechanism::Tanh, Mechanism::PiecewiseLinear};
        static constexpr NoiseKind noises[] = {NoiseKind::Gaussian, NoiseKind::Uniform, NoiseKind::Laplace};
        opt.mechanism = mechs[pick.below(3)];
        opt.noise = noises[pick.below(3)];
        opt.noise_scale = pick.uniform(0.1, 0.6);
        auto p = synth_anm_pair(n, opt, derive_seed(seed, "anm-dataset/pair/" + std::to_string(i)));
        out.push_back({std::move(p.sample), p.label});
    }
    return out;
}


// ---------------------------------------------------------------------------
// Locally stylized images: every disjoint k x k tile S of the output is
// y_S = g(beta x_S) + eps_S with beta a k^2 x k^2 matrix shared by all tiles.

enum class Nonlinearity { Identity, Tanh, Cube };

inline const char* to_string(Nonlinearity g) {
    switch (g) {
    case Nonlinearity::Identity: return "identity";
    case Nonlinearity::Tanh: return "tanh";
    case Nonlinearity::Cube: return "cube";
    }
    return "?";
}

inline Nonlinearity parse_nonlinearity(std::string_view s) {
    for (auto g : {Nonlinearity::Identity, Nonlinearity::Tanh, Nonlinearity::Cube})
        if (s == to_string(g))
            return g;
    throw std::invalid_argument("unknown nonlinearity '" + std::string(s) + "'");
}

inline double apply(Nonlinearity g, double v) {
    switch (g) {
    case Nonlinearity::Identity: return v;
    case Nonlinearity::Tanh: return std::tanh(v);
    case Nonlinearity::Cube: return v * v * v;
    }
    return v;
}

struct LocalMechanism {
    int k = 10;
    Eigen::MatrixXd beta; ///< k^2 x k^2, acting on the row-major tile vector
    bool row_constant = false;
    Nonlinearity g = Nonlinearity::Tanh;
    double noise_sd = 0.05;

    void validate() const {
        const auto d = static_cast<Eigen::Index>(k) * k;
        if (k < 1 || beta.rows() != d || beta.cols() != d)
            throw std::invalid_argument("LocalMechanism: beta must be k^2 x k^2");
        if (!(noise_sd >= 0.0))
            throw std::invalid_argument("LocalMechanism: negative noise");
        if (row_constant)
            for (Eigen::Index r = 0; r < d; ++r)
                if ((beta.row(r).array() != beta(r, 0)).any())
                    throw std::invalid_argument("LocalMechanism: beta rows are not constant");
    }

    /// beta_jl = alpha_j with alpha_j = c_j / k^2 and c_j ~ U[c_lo, c_hi], so
    /// output pixel j is g(c_j * tile mean) + noise.
    static LocalMechanism row_constant_tanh(int k, double noise_sd, std::uint64_t seed, double c_lo = 0.8,
                                            double c_hi = 1.8) {
        LocalMechanism m;
        m.k = k;
        m.row_constant = true;
        m.g = Nonlinearity::Tanh;
        m.noise_sd = noise_sd;
        const auto d = static_cast<Eigen::Index>(k) * k;
        m.beta.resize(d, d);
        Rng rng(seed);
        for (Eigen::Index r = 0; r < d; ++r)
            m.beta.row(r).setConstant(rng.uniform(c_lo, c_hi) / static_cast<double>(d));
        return m;
    }

    /// Unconstrained beta: a row-constant part plus independent perturbations
    /// of relative size `spread`.
    static LocalMechanism general(int k, Nonlinearity g, double noise_sd, double spread, std::uint64_t seed) {
        LocalMechanism m = row_constant_tanh(k, noise_sd, seed);
        m.row_constant = false;
        m.g = g;
        Rng rng(derive_seed(seed, "beta/perturb"));
        for (Eigen::Index r = 0; r < m.beta.rows(); ++r)
            for (Eigen::Index c = 0; c < m.beta.cols(); ++c)
                m.beta(r, c) *= 1.0 + spread * rng.uniform(-1.0, 1.0);
        return m;
    }

    static LocalMechanism identity(int k) {
        LocalMechanism m;
        m.k = k;
        const auto d = static_cast<Eigen::Index>(k) * k;
        m.beta = Eigen::MatrixXd::Identity(d, d);
        m.g = Nonlinearity::Identity;
        m.noise_sd = 0.0;
        return m;
    }
};

struct StylizedImage {
    Image image;
    double clip_fraction = 0.0; ///< fraction of output values clipped to [0, 1]
};

inline StylizedImage synth_stylized_pair(const Image& base, const LocalMechanism& mech, std::uint64_t seed) {
    mech.validate();
    base.validate();
    const int k = mech.k;
    if (base.width % k != 0 || base.height % k != 0)
        throw std::invalid_argument("synth_stylized_pair: image dimensions must be divisible by the tile size");
    Rng rng(seed);
    StylizedImage out{Image(base.width, base.height, base.channels), 0.0};
    const auto d = static_cast<Eigen::Index>(k) * k;
    Eigen::VectorXd tile(d);
    std::size_t clipped = 0;
    for (int ty = 0; ty < base.height; ty += k)
        for (int tx = 0; tx < base.width; tx += k)
            for (int c = 0; c < base.channels; ++c) {
                for (int dy = 0; dy < k; ++dy)
                    for (int dx = 0; dx < k; ++dx)
                        tile(dy * k + dx) = base.at(tx + dx, ty + dy, c);
                const Eigen::VectorXd mixed = mech.beta * tile;
                for (int dy = 0; dy < k; ++dy)
                    for (int dx = 0; dx < k; ++dx) {
                        double v = apply(mech.g, mixed(dy * k + dx));
                        if (mech.noise_sd > 0.0)
                            v += mech.noise_sd * rng.normal();
                        if (v < 0.0 || v > 1.0) {
                            ++clipped;
                            v = std::clamp(v, 0.0, 1.0);
                        }
                        out.image.at(tx + dx, ty + dy, c) = v;
                    }
            }
    out.clip_fraction = static_cast<double>(clipped) / static_cast<double>(out.image.pixels.size());
    return out;
}

/// Smooth random grayscale image: a sum of random Gaussian bumps rescaled to
/// [lo, hi].
inline Image synth_smooth_image(int w, int h, std::uint64_t seed, int bumps = 24, double lo = 0.1, double hi = 0.9) {
    Image img(w, h, 1);
    Rng rng(seed);
    struct Bump {
        double x, y, s, amp;
    };
    std::vector<Bump> bs(static_cast<std::size_t>(bumps));
    for (auto& b : bs)
        b = {rng.uniform(0, w), rng.uniform(0, h), rng.uniform(0.05, 0.2) * std::min(w, h), rng.uniform(-1.0, 1.0)};
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double v = 0.0;
            for (const auto& b : bs) {
                const double dx = x - b.x, dy = y - b.y;
                v += b.amp * std::exp(-(dx * dx + dy * dy) / (2 * b.s * b.s));
            }
            img.at(x, y) = v;
        }
    const auto [mn, mx] = std::minmax_element(img.pixels.begin(), img.pixels.end());
    const double lo_v = *mn, span = std::max(*mx - *mn, 1e-12);
    for (auto& p : img.pixels)
        p = lo + (hi - lo) * (p - lo_v) / span;
    return img;
}

// ---------------------------------------------------------------------------
// Diffusion frames

struct DiffusionOptions {
    int size = 64;
    std::size_t num_frames = 8;
    int blobs = 6;
    double background = 0.2;
    double rate = 0.2;            ///< stencil step, < 0.25 for stability
    int steps_per_frame = 6;
    double noise_sd = 0.01;
};

/// One explicit heat-equation step with the 5-point stencil on a periodic
/// grid: u' = u + rate * (sum of 4 neighbours - 4u). Preserves the total.
inline Image heat_step(const Image& u, double rate) {
    if (!(rate > 0.0 && rate < 0.25))
        throw std::invalid_argument("heat_step: rate must lie in (0, 0.25)");
    Image out(u.width, u.height, u.channels);
    for (int y = 0; y < u.height; ++y)
        for (int x = 0; x < u.width; ++x)
            for (int c = 0; c < u.channels; ++c) {
                const int xl = (x + u.width - 1) % u.width, xr = (x + 1) % u.width;
                const int yu = (y + u.height - 1) % u.height, yd = (y + 1) % u.height;
                const double lap = u.at(xl, y, c) + u.at(xr, y, c) + u.at(x, yu, c) + u.at(x, yd, c) - 4.0 * u.at(x, y, c);
                out.at(x, y, c) = u.at(x, y, c) + rate * lap;
            }
    return out;
}

/// Frame 0 holds sparse random blobs of ink on a uniform background; each
/// next frame applies `steps_per_frame` heat steps, adds iid Gaussian noise
/// and clips to [0, 1].
inline std::vector<Image> synth_diffusion_frames(const DiffusionOptions& opt, std::uint64_t seed) {
    if (opt.num_frames < 2)
        throw std::invalid_argument("synth_diffusion_frames: need at least two frames");
    Rng rng(seed);
    Image f(opt.size, opt.size, 1, opt.background);
    for (int b = 0; b < opt.blobs; ++b) {
        const double cx = rng.uniform(0, opt.size), cy = rng.uniform(0, opt.size);
        const double r = rng.uniform(0.03, 0.1) * opt.size;
        const double amp = rng.uniform(0.4, 0.7);
        for (int y = 0; y < opt.size; ++y)
            for (int x = 0; x < opt.size; ++x) {
                // Periodic distance so blobs wrap like the stencil does.
                double dx = std::abs(x - cx), dy = std::abs(y - cy);
                dx = std::min(dx, opt.size - dx);
                dy = std::min(dy, opt.size - dy);
                f.at(x, y) += amp * std::exp(-(dx * dx + dy * dy) / (2 * r * r));
            }
    }
    for (auto& p : f.pixels)
        p = std::clamp(p, 0.0, 1.0);
    std::vector<Image> frames{f};
    for (std::size_t t = 1; t < opt.num_frames; ++t) {
        Image g = frames.back();
        for (int s = 0; s < opt.steps_per_frame; ++s)
            g = heat_step(g, opt.rate);
        for (auto& p : g.pixels)
            p = std::clamp(p + opt.noise_sd * rng.normal(), 0.0, 1.0);
        frames.push_back(std::move(g));
    }
    return frames;
}

inline std::vector<Image> synth_diffusion_frames(int size, std::size_t num_frames, std::uint64_t seed) {
    DiffusionOptions opt;
    opt.size = size;
    opt.num_frames = num_frames;
    return synth_diffusion_frames(opt, seed);
}

// ---------------------------------------------------------------------------
// Cause/effect corpus

struct SynthCorpusOptions {
    std::size_t sentences = 5000;
    std::size_t filler_words = 400;
    int annotators = 20;
    double easy_fraction = 0.65; ///< share of pairs with a strong, high-consensus signal
};

struct SynthCorpus {
    std::vector<std::string> sentences;
    std::vector<WordPairRecord> pairs;
    std::vector<int> labels; ///< true orientation of each emitted pair, +1 when x is the cause
};

namespace detail {
inline const std::vector<std::pair<const char*, const char*>>& cause_effect_words() {
    static const std::vector<std::pair<const char*, const char*>> pairs = {
        {"virus", "infection"},      {"rain", "flood"},          {"fire", "smoke"},
        {"smoking", "cancer"},       {"earthquake", "tsunami"},  {"drought", "famine"},
        {"storm", "damage"},         {"poverty", "crime"},       {"stress", "insomnia"},
        {"bacteria", "disease"},     {"war", "refugees"},        {"pollution", "asthma"},
        {"exercise", "fitness"},     {"accident", "injury"},     {"overeating", "obesity"},
        {"lightning", "thunder"},    {"heat", "sweat"},          {"cold", "shivering"},
        {"deforestation", "erosion"}, {"volcano", "ash"},        {"friction", "wear"},
        {"alcohol", "hangover"},     {"sunlight", "sunburn"},    {"mosquito", "malaria"},
        {"wind", "waves"},           {"debt", "bankruptcy"},     {"vaccine", "immunity"},
        {"moon", "tides"},           {"snow", "avalanche"},      {"tremor", "collapse"},
        {"insult", "anger"},         {"joke", "laughter"},       {"practice", "skill"},
        {"fertilizer", "growth"},    {"overfishing", "extinction"}, {"hurricane", "blackout"},
        {"spark", "explosion"},      {"moisture", "rust"},       {"noise", "deafness"},
        {"caffeine", "alertness"}};
    return pairs;
}

inline const std::vector<const char*>& function_words() {
    static const std::vector<const char*> words = {"the", "a",    "of",   "and",  "in",   "to",   "was",
                                                   "is",  "with", "for",  "on",   "that", "it",   "as",
                                                   "at",  "this", "were", "are",  "has",  "had",  "many",
                                                   "some", "often", "more", "its", "their", "also", "near"};
    return words;
}

/// Pronounceable pseudo-words, distinct and stable for a given seed.
inline std::vector<std::string> pseudo_words(std::size_t count, Rng& rng) {
    static const char* onsets[] = {"b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z", "br", "tr", "pl"};
    static const char* vowels[] = {"a", "e", "i", "o", "u", "ai", "ou"};
    std::set<std::string> seen;
    for (const auto& [c, e] : cause_effect_words()) {
        seen.insert(c);
        seen.insert(e);
    }
    for (const char* w : function_words())
        seen.insert(w);
    std::vector<std::string> out;
    while (out.size() < count) {
        std::string w;
        const auto syllables = 2 + rng.below(2);
        for (std::uint64_t s = 0; s < syllables; ++s) {
            w += onsets[rng.below(std::size(onsets))];
            w += vowels[rng.below(std::size(vowels))];
        }
        if (rng.uniform() < 0.5)
            w += "n";
        if (seen.insert(w).second)
            out.push_back(w);
    }
    return out;
}
} // namespace detail

/// A small corpus in which each cause word co-occurs with and mostly precedes
/// its effect, appears in more sentences than its effect, and shares topic
/// words with it. Easy pairs get a strong ordering signal and high annotator
/// consensus; hard pairs get a weak signal and split votes. Pair orientation
/// in the emitted records is a seeded coin flip.
inline SynthCorpus synth_corpus(const SynthCorpusOptions& opt, std::uint64_t seed) {
    if (opt.sentences == 0 || opt.filler_words < 10 || opt.annotators < 2)
        throw std::invalid_argument("synth_corpus: invalid options");
    const auto& base = detail::cause_effect_words();
    const std::size_t num_pairs = base.size();
    Rng rng(seed);
    const auto fillers = detail::pseudo_words(opt.filler_words, rng);

    // Zipf-like weights over fillers.
    std::vector<double> zipf_cdf(fillers.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < fillers.size(); ++i)
        zipf_cdf[i] = acc += 1.0 / static_cast<double>(i + 1);
    for (auto& c : zipf_cdf)
        c /= acc;
    auto filler = [&]() -> const std::string& {
        const auto it = std::upper_bound(zipf_cdf.begin(), zipf_cdf.end(), rng.uniform());
        return fillers[std::min<std::size_t>(static_cast<std::size_t>(it - zipf_cdf.begin()), fillers.size() - 1)];
    };
    auto function_word = [&]() -> std::string { return detail::function_words()[rng.below(detail::function_words().size())]; };

    struct PairPlan {
        bool easy;
        double forward; ///< probability that a joint sentence names the cause first
        std::vector<std::string> topic;
    };
    std::vector<PairPlan> plan(num_pairs);
    const auto order = rng.permutation(num_pairs);
    for (std::size_t r = 0; r < num_pairs; ++r) {
        auto& p = plan[order[r]];
        p.easy = static_cast<double>(r) < opt.easy_fraction * static_cast<double>(num_pairs);
        p.forward = p.easy ? 0.9 : 0.6;
        for (int t = 0; t < 4; ++t)
            p.topic.push_back(fillers[fillers.size() / 2 + rng.below(fillers.size() / 2)]);
    }

    static const char* forward_links[][2] = {{"causes", ""},  {"leads", "to"},    {"triggers", ""},
                                             {"brings", ""},  {"produces", ""},  {"results", "in"}};
    static const char* backward_links[][2] = {{"follows", ""}, {"comes", "from"}, {"results", "from"},
                                              {"after", ""},   {"due", "to"}};

    SynthCorpus out;
    out.sentences.reserve(opt.sentences);
    for (std::size_t s = 0; s < opt.sentences; ++s) {
        std::vector<std::string> tokens;
        const double kind = rng.uniform();
        const auto pi = rng.below(num_pairs);
        const auto& p = plan[pi];
        const std::string cause = base[pi].first, effect = base[pi].second;
        auto pad = [&](int lo, int hi) {
            const auto count = lo + static_cast<int>(rng.below(static_cast<std::uint64_t>(hi - lo + 1)));
            for (int i = 0; i < count; ++i)
                tokens.push_back(rng.uniform() < 0.4 ? function_word() : filler());
        };
        auto topic = [&] { tokens.push_back(p.topic[rng.below(p.topic.size())]); };
        if (kind < 0.45) {
            pad(0, 3);
            const bool forward = rng.uniform() < p.forward;
            const auto* link = forward ? forward_links[rng.below(std::size(forward_links))]
                                       : backward_links[rng.below(std::size(backward_links))];
            tokens.push_back(forward ? cause : effect);
            tokens.push_back(link[0]);
            if (*link[1])
                tokens.push_back(link[1]);
            tokens.push_back(*link[1] ? "the" : function_word());
            tokens.push_back(forward ? effect : cause);
            topic();
            pad(0, 4);
        } else if (kind < 0.65) {
            pad(1, 4);
            tokens.push_back(cause);
            topic();
            pad(1, 5);
        } else if (kind < 0.72) {
            pad(1, 4);
            tokens.push_back(effect);
            topic();
            pad(1, 5);
        } else {
            pad(6, 14);
        }
        std::string line;
        for (const auto& t : tokens) {
            if (!line.empty())
                line += ' ';
            line += t;
        }
        if (!line.empty())
            line[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(line[0])));
        out.sentences.push_back(line + ".");
    }

    const int n = opt.annotators;
    for (std::size_t i = 0; i < num_pairs; ++i) {
        const bool easy = plan[i].easy;
        const int lo = easy ? (9 * n + 9) / 10 : n / 2 - 1;
        const int hi = easy ? n : (9 * n + 9) / 10 - 1;
        const int majority = lo + static_cast<int>(rng.below(static_cast<std::uint64_t>(hi - lo + 1)));
        const int rest = n - majority;
        const int against = std::min(rest, static_cast<int>(rng.below(static_cast<std::uint64_t>(std::max(1, majority / 2)))));
        WordPairRecord r{base[i].first, base[i].second, majority, against, rest - against};
        int label = +1;
        if (rng.uniform() < 0.5) {
            std::swap(r.x, r.y);
            std::swap(r.votes_xy, r.votes_yx);
            label = -1;
        }
        out.pairs.push_back(r);
        out.labels.push_back(label);
    }
    return out;
}

} // namespace proxycause

#endif
