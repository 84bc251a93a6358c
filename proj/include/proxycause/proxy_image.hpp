#pragma once
#ifndef PROXYCAUSE_PROXY_IMAGE_HPP
#define PROXYCAUSE_PROXY_IMAGE_HPP

// Image proxies. A random square mask is the proxy variable; the projection
// is the mean intensity inside the mask. Applying the same masks to two
// images yields a scatter sample whose causal footprint is then classified.

#include <filesystem>
#include <fstream>
#include <memory>
#include <queue>
#include <variant>

#include "proxycause/anm.hpp"
#include "proxycause/rcc.hpp"

namespace proxycause {

/// Row-major pixels in [0, 1], channels interleaved.
struct Image {
    int width = 0;
    int height = 0;
    int channels = 1;
    std::vector<double> pixels;

    Image() = default;
    Image(int w, int h, int c, double fill = 0.0) : width(w), height(h), channels(c) {
        if (w <= 0 || h <= 0)
            throw std::invalid_argument("image dimensions must be positive");
        if (c != 1 && c != 3)
            throw std::invalid_argument("image must have 1 or 3 channels");
        pixels.assign(static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * static_cast<std::size_t>(c), fill);
    }

    double& at(int x, int y, int c = 0) { return pixels[index(x, y, c)]; }
    double at(int x, int y, int c = 0) const { return pixels[index(x, y, c)]; }

    bool same_shape(const Image& o) const { return width == o.width && height == o.height && channels == o.channels; }

    void validate() const {
        if (pixels.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height) *
                                 static_cast<std::size_t>(channels))
            throw DataError("image: pixel count does not match dimensions");
        for (double p : pixels)
            if (!(p >= 0.0 && p <= 1.0))
                throw DataError("image: pixel outside [0, 1]");
    }

private:
    std::size_t index(int x, int y, int c) const {
        return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)) *
                   static_cast<std::size_t>(channels) +
               static_cast<std::size_t>(c);
    }
};

// ---------------------------------------------------------------------------
// Binary PGM (P5) / PPM (P6), 8-bit.

namespace detail {
inline std::string netpbm_token(std::istream& in) {
    std::string tok;
    int ch;
    while ((ch = in.get()) != EOF) {
        if (ch == '#') {
            while ((ch = in.get()) != EOF && ch != '\n') {
            }
            continue;
        }
        if (std::isspace(ch)) {
            if (!tok.empty())
                break;
            continue;
        }
        tok.push_back(static_cast<char>(ch));
    }
    return tok;
}

inline int netpbm_int(std::istream& in, const std::string& path) {
    const std::string tok = netpbm_token(in);
    try {
        std::size_t used = 0;
        const int v = std::stoi(tok, &used);
        if (used != tok.size())
            throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw DataError(path + ": malformed header field '" + tok + "'");
    }
}
} // namespace detail

inline Image read_netpbm(std::istream& in, const std::string& path = "<stream>") {
    const std::string magic = detail::netpbm_token(in);
    int channels = 0;
    if (magic == "P5")
        channels = 1;
    else if (magic == "P6")
        channels = 3;
    else
        throw DataError(path + ": unsupported magic number '" + magic + "' (expected P5 or P6)");
    const int w = detail::netpbm_int(in, path);
    const int h = detail::netpbm_int(in, path);
    const int maxval = detail::netpbm_int(in, path);
    if (w <= 0 || h <= 0)
        throw DataError(path + ": invalid dimensions");
    if (maxval != 255)
        throw DataError(path + ": only 8-bit images (maxval 255) are supported");
    Image img(w, h, channels);
    std::vector<unsigned char> bytes(img.pixels.size());
    in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (in.gcount() != static_cast<std::streamsize>(bytes.size()))
        throw DataError(path + ": truncated payload");
    for (std::size_t i = 0; i < bytes.size(); ++i)
        img.pixels[i] = bytes[i] / 255.0;
    return img;
}

inline Image load_image(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw DataError("cannot read " + path);
    return read_netpbm(in, path);
}

/// Quantizes with round-half-up; pixels that came from an 8-bit file are
/// written back unchanged.
inline void write_netpbm(std::ostream& out, const Image& img) {
    img.validate();
    out << (img.channels == 1 ? "P5" : "P6") << '\n' << img.width << ' ' << img.height << "\n255\n";
    std::vector<unsigned char> bytes(img.pixels.size());
    for (std::size_t i = 0; i < bytes.size(); ++i)
        bytes[i] = static_cast<unsigned char>(std::floor(img.pixels[i] * 255.0 + 0.5));
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

inline void save_image(const Image& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw DataError("cannot write " + path);
    write_netpbm(out, img);
}

// ---------------------------------------------------------------------------
// Mask proxies

struct PatchMask {
    int top = 0;
    int left = 0;
    int size = 1;
    friend bool operator==(const PatchMask&, const PatchMask&) = default;
};

/// n independent masks with top ~ U{0..h-k} and left ~ U{0..w-k}. Masks may
/// overlap.
inline std::vector<PatchMask> sample_masks(int w, int h, int k, std::size_t n, std::uint64_t seed) {
    if (k < 1)
        throw std::invalid_argument("patch size must be positive");
    if (k > std::min(w, h))
        throw std::invalid_argument("patch size " + std::to_string(k) + " exceeds image size " + std::to_string(w) + "x" +
                                    std::to_string(h));
    if (n < 1)
        throw std::invalid_argument("need at least one mask");
    Rng rng(seed);
    std::vector<PatchMask> masks(n);
    for (auto& m : masks) {
        m.top = static_cast<int>(rng.below(static_cast<std::uint64_t>(h - k + 1)));
        m.left = static_cast<int>(rng.below(static_cast<std::uint64_t>(w - k + 1)));
        m.size = k;
    }
    return masks;
}

/// Mean intensity over the patch and all channels: <mask, x> / (k^2 channels).
inline double patch_projection(const Image& img, const PatchMask& mask) {
    if (mask.top < 0 || mask.left < 0 || mask.size < 1 || mask.top + mask.size > img.height ||
        mask.left + mask.size > img.width)
        throw std::invalid_argument("mask outside image bounds");
    double s = 0.0;
    for (int y = mask.top; y < mask.top + mask.size; ++y)
        for (int x = mask.left; x < mask.left + mask.size; ++x)
            for (int c = 0; c < img.channels; ++c)
                s += img.at(x, y, c);
    return s / (static_cast<double>(mask.size) * mask.size * img.channels);
}

/// Paired projections (a_j, b_j) = (pi(w_j, x), pi(w_j, y)) over shared masks.
inline ScatterSample image_pair_scatter(const Image& x, const Image& y, std::size_t n, int k, std::uint64_t seed) {
    if (!x.same_shape(y))
        throw DataError("image dimensions differ: " + std::to_string(x.width) + "x" + std::to_string(x.height) + "x" +
                        std::to_string(x.channels) + " vs " + std::to_string(y.width) + "x" + std::to_string(y.height) +
                        "x" + std::to_string(y.channels));
    const auto masks = sample_masks(x.width, x.height, k, n, seed);
    std::vector<Point> pts(n);
    for (std::size_t j = 0; j < n; ++j)
        pts[j] = {patch_projection(x, masks[j]), patch_projection(y, masks[j])};
    return ScatterSample(std::move(pts));
}

// ---------------------------------------------------------------------------
// Engines

/// Either the ANM engine (with its configuration) or a trained RCC model.
using Engine = std::variant<AnmConfig, std::shared_ptr<const RccModel>>;

/// Classifies a scatter sample with the chosen engine. A sample lying
/// exactly on the diagonal a = b carries no direction and yields a tie.
inline Direction scatter_direction(const ScatterSample& sample, const Engine& engine, std::uint64_t seed) {
    const bool diagonal =
        std::all_of(sample.points().begin(), sample.points().end(), [](const Point& p) { return p.a == p.b; });
    if (diagonal)
        return {Verdict::XtoY, 0.0, true};
    if (const auto* cfg = std::get_if<AnmConfig>(&engine))
        return anm_direction(sample, *cfg, seed);
    const auto& model = std::get<std::shared_ptr<const RccModel>>(engine);
    if (!model)
        throw std::invalid_argument("RCC engine without a model");
    return rcc_predict(*model, sample);
}

inline Direction image_pair_direction(const Image& x, const Image& y, std::size_t n, int k, const Engine& engine,
                                      std::uint64_t seed) {
    const auto sample = image_pair_scatter(x, y, n, k, derive_seed(seed, "image/masks"));
    return scatter_direction(sample, engine, derive_seed(seed, "image/engine"));
}

// ---------------------------------------------------------------------------
// Frame ordering

using AdjacencyMatrix = std::vector<std::vector<int>>;

struct FrameOrdering {
    std::vector<std::size_t> order;
    AdjacencyMatrix adjacency;
    bool cyclic = false;
    std::size_t ties = 0; ///< pairwise calls that were ties (oriented i -> j for i < j)
};

/// Lexicographically least topological order of the digraph, or, when it
/// has a cycle, indices sorted by descending Copeland score (out-degree minus
/// in-degree), stable by index.
inline std::pair<std::vector<std::size_t>, bool> order_from_adjacency(const AdjacencyMatrix& m) {
    const std::size_t n = m.size();
    for (const auto& row : m)
        if (row.size() != n)
            throw std::invalid_argument("adjacency matrix must be square");
    std::vector<int> indeg(n, 0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j && m[i][j])
                ++indeg[j];

    std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
    for (std::size_t i = 0; i < n; ++i)
        if (indeg[i] == 0)
            ready.push(i);
    std::vector<std::size_t> order;
    while (!ready.empty()) {
        const std::size_t u = ready.top();
        ready.pop();
        order.push_back(u);
        for (std::size_t v = 0; v < n; ++v)
            if (v != u && m[u][v] && --indeg[v] == 0)
                ready.push(v);
    }
    if (order.size() == n)
        return {order, false};

    std::vector<int> copeland(n, 0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j && m[i][j]) {
                ++copeland[i];
                --copeland[j];
            }
    order.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return copeland[a] > copeland[b]; });
    return {order, true};
}

/// Calls every unordered frame pair once and sets M_ij = 1 when frame i is
/// judged to cause frame j (M_ji otherwise), then orders the frames. Pair
/// seeds depend on (seed, i, j) only, so `jobs` does not affect the result.
inline FrameOrdering frames_order(const std::vector<Image>& frames, std::size_t n, int k, const Engine& engine,
                                  std::uint64_t seed, unsigned jobs = 1) {
    const std::size_t f = frames.size();
    if (f < 2)
        throw std::invalid_argument("frames_order: need at least two frames");
    for (std::size_t i = 1; i < f; ++i)
        if (!frames[i].same_shape(frames[0]))
            throw DataError("frames_order: frame " + std::to_string(i) + " differs in dimensions from frame 0");

    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < f; ++i)
        for (std::size_t j = i + 1; j < f; ++j)
            pairs.emplace_back(i, j);
    std::vector<Direction> verdicts(pairs.size());
    parallel_for(pairs.size(), jobs, [&](std::size_t p) {
        const auto [i, j] = pairs[p];
        verdicts[p] = image_pair_direction(frames[i], frames[j], n, k, engine,
                                           derive_seed(seed, "frames/" + std::to_string(i) + "/" + std::to_string(j)));
    });

    FrameOrdering out;
    out.adjacency.assign(f, std::vector<int>(f, 0));
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        const auto [i, j] = pairs[p];
        if (verdicts[p].tie)
            ++out.ties;
        if (verdicts[p].verdict == Verdict::XtoY)
            out.adjacency[i][j] = 1;
        else
            out.adjacency[j][i] = 1;
    }
    std::tie(out.order, out.cyclic) = order_from_adjacency(out.adjacency);
    return out;
}

} // namespace proxycause

#endif
