#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "proxycause/word_pairs.hpp"

using namespace proxycause;

namespace {

std::vector<WordPairRecord> parse(const std::string& body) {
    std::istringstream in(std::string(kWordPairHeader) + "\n" + body);
    return read_word_pairs(in);
}

void expect_error(const std::string& body, const std::string& needle) {
    try {
        parse(body);
        FAIL() << "accepted: " << body;
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
    }
}

} // namespace

TEST(WordPairs, ConsensusAndLabel) {
    const auto r = parse("virus,death,19,0,1\n");
    ASSERT_EQ(r.size(), 1u);
    EXPECT_EQ(r[0].x, "virus");
    EXPECT_EQ(r[0].total(), 20);
    EXPECT_DOUBLE_EQ(r[0].consensus(), 0.95);
    EXPECT_EQ(r[0].label(), +1);
    EXPECT_EQ(parse("a,b,2,7,1\n")[0].label(), -1);
    EXPECT_EQ(parse("a,b,4,4,0\n")[0].label(), +1);
}

TEST(WordPairs, WhitespaceAndBlankLines) {
    std::istringstream in("\n x , y , votes_xy,votes_yx,votes_none\r\n\n fire , smoke ,18, 1 ,1\r\n\n");
    const auto r = read_word_pairs(in);
    ASSERT_EQ(r.size(), 1u);
    EXPECT_EQ(r[0], (WordPairRecord{"fire", "smoke", 18, 1, 1}));
}

TEST(WordPairs, MalformedInput) {
    expect_error("a,b,0,0,0\n", "votes sum to zero");
    expect_error("a,b,1,-1,0\n", "negative");
    expect_error("a,b,1,x,0\n", "not an integer");
    expect_error("a,b,1.5,0,0\n", "not an integer");
    expect_error("a,b,1,0\n", "expected 5 fields");
    expect_error(",b,1,0,0\n", "empty word");
    expect_error("a,b,1,0,0\nc,d,1,0,0\na,b,2,0,0\n", "line 4");
    expect_error("a,b,1,0,0\na,b,2,0,0\n", "duplicate");
    std::istringstream no_header("a,b,1,0,0\n");
    EXPECT_THROW(read_word_pairs(no_header), DataError);
    EXPECT_THROW(load_word_pairs("/nonexistent/pairs.csv"), DataError);
}

TEST(WordPairs, ReversedPairIsDistinct) {
    const auto r = parse("a,b,1,0,0\nb,a,0,1,0\n");
    EXPECT_EQ(r.size(), 2u);
}

TEST(WordPairs, RoundTrip) {
    const std::vector<WordPairRecord> recs{{"rain", "flood", 17, 2, 1}, {"b", "a", 0, 20, 0}, {"x", "y", 3, 3, 14}};
    std::stringstream ss;
    write_word_pairs(ss, recs);
    EXPECT_EQ(read_word_pairs(ss), recs);

    const auto path = (std::filesystem::temp_directory_path() / "proxycause_pairs.csv").string();
    save_word_pairs(recs, path);
    EXPECT_EQ(load_word_pairs(path), recs);
    std::filesystem::remove(path);
}

TEST(Consensus, FilterKeepsMajorityAtThreshold) {
    const std::vector<WordPairRecord> recs{{"virus", "death", 19, 0, 1},
                                           {"a", "b", 10, 9, 1},
                                           {"c", "d", 1, 18, 1},
                                           {"e", "f", 17, 1, 2}};
    const auto kept = filter_consensus(recs, 18, 20);
    ASSERT_EQ(kept.size(), 2u);
    EXPECT_EQ(kept[0].x, "virus");
    EXPECT_EQ(kept[0].label(), +1);
    EXPECT_EQ(kept[1].x, "c");
    EXPECT_EQ(kept[1].label(), -1);
    EXPECT_EQ(filter_consensus(recs, 0, 20).size(), recs.size());
    EXPECT_THROW(filter_consensus(recs, 21, 20), std::invalid_argument);
}

TEST(Consensus, MonotoneInThreshold) {
    std::vector<WordPairRecord> recs;
    for (int v = 0; v <= 20; ++v)
        recs.push_back({"w" + std::to_string(v), "z", v, 20 - v, 0});
    std::size_t prev = recs.size() + 1;
    for (int t = 0; t <= 20; ++t) {
        const auto n = filter_consensus(recs, t, 20).size();
        EXPECT_LE(n, prev);
        prev = n;
        for (const auto& r : filter_consensus(recs, t, 20))
            EXPECT_GE(r.majority_votes(), t);
    }
}
