#pragma once
#ifndef PROXYCAUSE_WORD_PAIRS_HPP
#define PROXYCAUSE_WORD_PAIRS_HPP

// Annotated word pairs: CSV I/O and consensus filtering.

#include <fstream>
#include <set>

#include "proxycause/core.hpp"

namespace proxycause {

/// One annotated pair. votes_xy counts annotators who said "x causes y".
struct WordPairRecord {
    std::string x;
    std::string y;
    int votes_xy = 0;
    int votes_yx = 0;
    int votes_none = 0;

    int total() const { return votes_xy + votes_yx + votes_none; }
    int majority_votes() const { return std::max(votes_xy, votes_yx); }
    /// max(votes_xy, votes_yx) / total.
    double consensus() const { return static_cast<double>(majority_votes()) / static_cast<double>(total()); }
    /// +1 when votes_xy >= votes_yx, else -1.
    int label() const { return votes_xy >= votes_yx ? +1 : -1; }

    bool operator==(const WordPairRecord&) const = default;
};

inline constexpr const char* kWordPairHeader = "x,y,votes_xy,votes_yx,votes_none";

namespace detail {
inline std::string trim(std::string_view s) {
    const auto ws = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
    std::size_t b = 0, e = s.size();
    while (b < e && ws(s[b]))
        ++b;
    while (e > b && ws(s[e - 1]))
        --e;
    return std::string(s.substr(b, e - b));
}

inline std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        out.push_back(trim(std::string_view(line).substr(start, comma == std::string::npos ? std::string::npos
                                                                                            : comma - start)));
        if (comma == std::string::npos)
            return out;
        start = comma + 1;
    }
}

inline int parse_votes(const std::string& field, const std::string& where) {
    std::size_t used = 0;
    long v = 0;
    try {
        v = std::stol(field, &used);
    } catch (const std::exception&) {
        throw DataError(where + "vote count '" + field + "' is not an integer");
    }
    if (used != field.size())
        throw DataError(where + "vote count '" + field + "' is not an integer");
    if (v < 0)
        throw DataError(where + "negative vote count");
    if (v > 1'000'000)
        throw DataError(where + "vote count out of range");
    return static_cast<int>(v);
}
} // namespace detail

inline std::vector<WordPairRecord> read_word_pairs(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!detail::blank(line))
            break;
    }
    if (detail::split_csv(line) != detail::split_csv(kWordPairHeader))
        throw DataError("word pairs line " + std::to_string(lineno) + ": expected header '" + kWordPairHeader + "'");

    std::vector<WordPairRecord> out;
    std::set<std::pair<std::string, std::string>> seen;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::blank(line))
            continue;
        const std::string where = "word pairs line " + std::to_string(lineno) + ": ";
        const auto f = detail::split_csv(line);
        if (f.size() != 5)
            throw DataError(where + "expected 5 fields, got " + std::to_string(f.size()));
        if (f[0].empty() || f[1].empty())
            throw DataError(where + "empty word");
        WordPairRecord r{f[0], f[1], detail::parse_votes(f[2], where), detail::parse_votes(f[3], where),
                         detail::parse_votes(f[4], where)};
        if (r.total() == 0)
            throw DataError(where + "votes sum to zero");
        if (!seen.emplace(r.x, r.y).second)
            throw DataError(where + "duplicate pair (" + r.x + ", " + r.y + ")");
        out.push_back(std::move(r));
    }
    return out;
}

inline std::vector<WordPairRecord> load_word_pairs(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot read " + path);
    return read_word_pairs(in);
}

inline void write_word_pairs(std::ostream& out, const std::vector<WordPairRecord>& records) {
    out << kWordPairHeader << '\n';
    for (const auto& r : records)
        out << r.x << ',' << r.y << ',' << r.votes_xy << ',' << r.votes_yx << ',' << r.votes_none << '\n';
}

inline void save_word_pairs(const std::vector<WordPairRecord>& records, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw DataError("cannot write " + path);
    write_word_pairs(out, records);
}

/// Records whose majority direction has at least `min_votes` votes.
inline std::vector<WordPairRecord> filter_consensus(const std::vector<WordPairRecord>& records, int min_votes,
                                                    int total) {
    if (min_votes > total)
        throw std::invalid_argument("filter_consensus: min_votes exceeds total");
    std::vector<WordPairRecord> out;
    for (const auto& r : records)
        if (r.majority_votes() >= min_votes)
            out.push_back(r);
    return out;
}

} // namespace proxycause

#endif
