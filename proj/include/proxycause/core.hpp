#pragma once
#ifndef PROXYCAUSE_CORE_HPP
#define PROXYCAUSE_CORE_HPP

// Shared domain types for causal discovery between static entities:
// scatter samples, causal verdicts, seeded randomness and JSON-lines I/O.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <istream>
#include <limits>
#include <mutex>
#include <numbers>
#include <ostream>
#include <random>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

namespace proxycause {

/// Raised for malformed or degenerate input data (bad files, constant
/// variables, out-of-vocabulary words).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Verdict { XtoY, YtoX };

inline Verdict flip(Verdict v) { return v == Verdict::XtoY ? Verdict::YtoX : Verdict::XtoY; }

inline int label_of(Verdict v) { return v == Verdict::XtoY ? +1 : -1; }

inline const char* to_string(Verdict v) { return v == Verdict::XtoY ? "x->y" : "y->x"; }

/// Binary causal verdict with an engine-specific confidence score.
/// Scores are only comparable within a single engine.
struct Direction {
    Verdict verdict = Verdict::XtoY;
    double score = 0.0;
    bool tie = false;

    Direction flipped() const { return {tie ? verdict : flip(verdict), score, tie}; }
    int label() const { return label_of(verdict); }
};

struct Point {
    double a = 0.0;
    double b = 0.0;
    friend bool operator==(const Point&, const Point&) = default;
};

/// n paired draws (a_i, b_i) of the random entities (A, B).
class ScatterSample {
public:
    ScatterSample() = default;

    explicit ScatterSample(std::vector<Point> points) : points_(std::move(points)) {
        if (points_.empty())
            throw DataError("empty sample");
        for (const auto& p : points_)
            if (!std::isfinite(p.a) || !std::isfinite(p.b))
                throw DataError("non-finite coordinate in sample");
    }

    static ScatterSample from_columns(std::span<const double> a, std::span<const double> b) {
        if (a.size() != b.size())
            throw std::invalid_argument("column length mismatch");
        std::vector<Point> pts(a.size());
        for (std::size_t i = 0; i < a.size(); ++i)
            pts[i] = {a[i], b[i]};
        return ScatterSample(std::move(pts));
    }

    std::size_t size() const { return points_.size(); }
    bool empty() const { return points_.empty(); }
    const std::vector<Point>& points() const { return points_; }
    const Point& operator[](std::size_t i) const { return points_[i]; }

    std::vector<double> column_a() const {
        std::vector<double> out(points_.size());
        std::transform(points_.begin(), points_.end(), out.begin(), [](const Point& p) { return p.a; });
        return out;
    }
    std::vector<double> column_b() const {
        std::vector<double> out(points_.size());
        std::transform(points_.begin(), points_.end(), out.begin(), [](const Point& p) { return p.b; });
        return out;
    }

    /// Exchanges the roles of A and B.
    ScatterSample swapped() const {
        std::vector<Point> pts(points_.size());
        std::transform(points_.begin(), points_.end(), pts.begin(), [](const Point& p) { return Point{p.b, p.a}; });
        return ScatterSample(std::move(pts));
    }

    friend bool operator==(const ScatterSample&, const ScatterSample&) = default;

private:
    std::vector<Point> points_;
};

/// A scatter sample with its causal label: +1 means A -> B, -1 means A <- B.
struct LabeledSample {
    ScatterSample sample;
    int label = +1;
};

using LabeledScatterDataset = std::vector<LabeledSample>;

inline void validate_label(int label) {
    if (label != 1 && label != -1)
        throw DataError("label must be +1 or -1, got " + std::to_string(label));
}

// ---------------------------------------------------------------------------
// Seeded randomness

struct SeedSpec {
    std::uint64_t master_seed = 0;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// 64-bit FNV-1a over the bytes of `text`.
inline std::uint64_t fnv1a64(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Per-task stream seed: splitmix64(splitmix64(master) ^ fnv1a64(task_id)).
/// Only integer arithmetic is involved, so the result is identical on every
/// platform.
inline std::uint64_t derive_seed(const SeedSpec& spec, std::string_view task_id) {
    if (task_id.empty())
        throw std::invalid_argument("derive_seed: empty task id");
    return splitmix64(splitmix64(spec.master_seed) ^ fnv1a64(task_id));
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view task_id) {
    return derive_seed(SeedSpec{seed}, task_id);
}

/// Random stream over std::mt19937_64 with hand-written distributions.
/// The standard library distributions are implementation-defined, which
/// would make results differ between toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n), unbiased.
    std::uint64_t below(std::uint64_t n) {
        if (n == 0)
            throw std::invalid_argument("Rng::below(0)");
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
        std::uint64_t r;
        do {
            r = engine_();
        } while (r >= limit);
        return r % n;
    }

    /// Standard normal via Box-Muller.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double t = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(t);
        has_spare_ = true;
        return r * std::cos(t);
    }

    double normal(double mean, double sd) { return mean + sd * normal(); }

    double laplace(double scale) {
        const double u = uniform() - 0.5;
        const double s = u < 0 ? -1.0 : 1.0;
        return -scale * s * std::log(std::max(1e-300, 1.0 - 2.0 * std::abs(u)));
    }

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i)
            std::swap(v[i - 1], v[below(i)]);
    }

    std::vector<std::size_t> permutation(std::size_t n) {
        std::vector<std::size_t> p(n);
        for (std::size_t i = 0; i < n; ++i)
            p[i] = i;
        shuffle(p);
        return p;
    }

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

// ---------------------------------------------------------------------------
// Parallel helpers

/// Runs fn(i) for i in [0, count) on at most `jobs` threads. Work items must
/// be independent; results must be written to per-index slots so output does
/// not depend on scheduling. The first exception thrown is rethrown.
template <class Fn>
void parallel_for(std::size_t count, unsigned jobs, Fn&& fn) {
    if (jobs <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i)
            fn(i);
        return;
    }
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(jobs, count));
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        threads.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error)
                        error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : threads)
        t.join();
    if (error)
        std::rethrow_exception(error);
}

// ---------------------------------------------------------------------------
// Small numeric helpers

inline double mean(std::span<const double> v) {
    double s = 0.0;
    for (double x : v)
        s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

/// Population standard deviation.
inline double stddev(std::span<const double> v) {
    const double m = mean(v);
    double s = 0.0;
    for (double x : v)
        s += (x - m) * (x - m);
    return v.empty() ? 0.0 : std::sqrt(s / static_cast<double>(v.size()));
}

/// Zero mean, unit variance. Throws DataError("constant variable") when the
/// spread is zero at working precision.
inline std::vector<double> standardize(std::span<const double> v) {
    const double m = mean(v);
    const double sd = stddev(v);
    if (!(sd > 1e-12 * std::max(1.0, std::abs(m))))
        throw DataError("constant variable");
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        out[i] = (v[i] - m) / sd;
    return out;
}

// ---------------------------------------------------------------------------
// JSON-lines serialization. One record per line: {"a": .., "b": ..} for a
// sample, {"a": [..], "b": [..], "label": +-1} for a labeled dataset.

inline void write_scatter_jsonl(std::ostream& out, const ScatterSample& sample) {
    if (sample.empty())
        throw DataError("empty sample");
    for (const auto& p : sample.points())
        out << nlohmann::json{{"a", p.a}, {"b", p.b}}.dump() << '\n';
}

inline std::string scatter_to_jsonl(const ScatterSample& sample) {
    std::ostringstream os;
    write_scatter_jsonl(os, sample);
    return os.str();
}

namespace detail {
inline double json_number(const nlohmann::json& j, const char* key, std::size_t line) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_number())
        throw DataError("line " + std::to_string(line) + ": missing numeric field '" + key + "'");
    return it->get<double>();
}

inline nlohmann::json parse_line(const std::string& text, std::size_t line) {
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError("line " + std::to_string(line) + ": " + e.what());
    }
}

inline bool blank(const std::string& s) {
    return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}
} // namespace detail

inline ScatterSample read_scatter_jsonl(std::istream& in) {
    std::vector<Point> pts;
    std::string text;
    std::size_t line = 0;
    while (std::getline(in, text)) {
        ++line;
        if (detail::blank(text))
            continue;
        auto j = detail::parse_line(text, line);
        if (!j.is_object())
            throw DataError("line " + std::to_string(line) + ": expected an object");
        pts.push_back({detail::json_number(j, "a", line), detail::json_number(j, "b", line)});
    }
    if (pts.empty())
        throw DataError("empty sample");
    return ScatterSample(std::move(pts));
}

inline ScatterSample scatter_from_jsonl(const std::string& text) {
    std::istringstream is(text);
    return read_scatter_jsonl(is);
}

inline void write_dataset_jsonl(std::ostream& out, const LabeledScatterDataset& data) {
    for (const auto& item : data) {
        validate_label(item.label);
        out << nlohmann::json{{"a", item.sample.column_a()}, {"b", item.sample.column_b()}, {"label", item.label}}.dump()
            << '\n';
    }
}

inline LabeledScatterDataset read_dataset_jsonl(std::istream& in) {
    LabeledScatterDataset data;
    std::string text;
    std::size_t line = 0;
    while (std::getline(in, text)) {
        ++line;
        if (detail::blank(text))
            continue;
        auto j = detail::parse_line(text, line);
        const std::string where = "line " + std::to_string(line) + ": ";
        if (!j.is_object() || !j.contains("a") || !j.contains("b") || !j.contains("label"))
            throw DataError(where + "expected fields a, b, label");
        std::vector<double> a, b;
        int label = 0;
        try {
            a = j.at("a").get<std::vector<double>>();
            b = j.at("b").get<std::vector<double>>();
            label = j.at("label").get<int>();
        } catch (const nlohmann::json::exception& e) {
            throw DataError(where + e.what());
        }
        if (a.size() != b.size())
            throw DataError(where + "a and b differ in length");
        if (a.empty())
            throw DataError(where + "empty sample");
        validate_label(label);
        data.push_back({ScatterSample::from_columns(a, b), label});
    }
    return data;
}

} // namespace proxycause

#endif
