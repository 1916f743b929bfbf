#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "corpus.hpp"
#include "error.hpp"
#include "phraseset.hpp"

using namespace meco;

namespace {

// Builds a file that reproduces the 352-meme length histogram.
std::string histogram_file() {
    const std::map<int, int> lengths{{1, 69}, {2, 80}, {3, 69}, {4, 48},
                                     {5, 25}, {6, 25}, {7, 18}, {8, 18}};
    std::string content = "# generated fixture\n\n";
    int serial = 0;
    for (auto [len, count] : lengths) {
        for (int i = 0; i < count; ++i) {
            std::string line;
            for (int t = 0; t < len; ++t) {
                if (t) line += ' ';
                line += "tok" + std::to_string(serial) + "x" + std::to_string(t);
            }
            ++serial;
            content += line + "\n";
        }
    }
    return content;
}

} // namespace

TEST_CASE("load_phrases reproduces the meme length histogram") {
    auto phrases = load_phrases(histogram_file());
    CHECK(phrases.size() == 352);
    std::map<std::size_t, int> by_len;
    for (const Phrase& p : phrases) ++by_len[p.tokens.size()];
    CHECK(by_len[1] == 69);
    CHECK(by_len[2] == 80);
    CHECK(by_len[3] == 69);
    CHECK(by_len[4] == 48);
    CHECK(by_len[5] == 25);
    CHECK(by_len[6] == 25);
    CHECK(by_len[7] == 18);
    CHECK(by_len[8] == 18);
}

TEST_CASE("load_phrases tokenizes, dedups, and truncates") {
    std::vector<LoadWarning> warnings;
    auto phrases = load_phrases("hello darkness my old friend\n"
                                "U WOT M8\n"
                                "u wot m8!!\n"
                                "one two three four five six seven eight nine ten eleven twelve\n",
                                &warnings);
    REQUIRE(phrases.size() == 3);
    CHECK(phrases[0].tokens.size() == 5);
    CHECK(phrases[0].label == "hello darkness my old friend");
    CHECK(phrases[1].tokens ==
          std::vector<std::string>{"u", "wot", "m8"});
    // 12-token line stored as its 8-token prefix.
    CHECK(phrases[2].tokens.size() == 8);
    CHECK(phrases[2].tokens.back() == "eight");
    CHECK(phrases[2].label == "one two three four five six seven eight");

    REQUIRE(warnings.size() == 2);
    CHECK(warnings[0].kind == LoadWarning::duplicate);
    CHECK(warnings[0].line == 3);
    CHECK(warnings[1].kind == LoadWarning::truncated);
    CHECK(warnings[1].line == 4);

    // Order-preserving ids and tokens == tokenize(label).
    for (std::size_t i = 0; i < phrases.size(); ++i) {
        CHECK(phrases[i].phrase_id == i);
        CHECK(phrases[i].tokens == tokenize(phrases[i].label));
    }
}

TEST_CASE("load_phrases is idempotent") {
    std::string file = "y tho\nzerg rush\nmoms spaghetti\n";
    auto once = load_phrases(file);
    auto twice = load_phrases(file);
    REQUIRE(once.size() == twice.size());
    for (std::size_t i = 0; i < once.size(); ++i) {
        CHECK(once[i].label == twice[i].label);
        CHECK(once[i].tokens == twice[i].tokens);
    }
}

TEST_CASE("load_phrases rejects token-free lines") {
    CHECK_THROWS_AS(load_phrases("valid phrase\n!!!\n"), Error);
}

TEST_CASE("sample_background is exhaustive, deterministic, and seed-driven") {
    std::vector<std::pair<std::string, std::uint64_t>> small{
        {"alpha", 500}, {"beta", 200}, {"gamma", 900}};

    SUBCASE("n >= vocabulary returns everything") {
        auto words = sample_background(small, 3, 1, 7);
        CHECK(words == std::vector<std::string>{"alpha", "beta", "gamma"});
        auto more = sample_background(small, 1000, 1, 99);
        CHECK(more.size() == 3);
    }

    SUBCASE("min_count filters the pool") {
        auto words = sample_background(small, 10, 300, 7);
        CHECK(words == std::vector<std::string>{"alpha", "gamma"});
    }

    SUBCASE("same seed, same sample") {
        std::vector<std::pair<std::string, std::uint64_t>> vocab;
        for (int i = 0; i < 5000; ++i)
            vocab.emplace_back("word" + std::to_string(i), 1000);
        auto a = sample_background(vocab, 1000, 1, 1234);
        auto b = sample_background(vocab, 1000, 1, 1234);
        CHECK(a == b);
        CHECK(a.size() == 1000);
    }

    SUBCASE("empty vocabulary is an error") {
        CHECK_THROWS_AS(sample_background({}, 5, 1, 0), Error);
    }
}

TEST_CASE("two seeds overlap near the hypergeometric expectation") {
    // 5000 of 10000 twice: overlap concentrates at 2500 (sd ~ 25).
    std::vector<std::pair<std::string, std::uint64_t>> vocab;
    for (int i = 0; i < 10000; ++i)
        vocab.emplace_back("w" + std::to_string(100000 + i), 500);
    auto a = sample_background(vocab, 5000, 1, 1);
    auto b = sample_background(vocab, 5000, 1, 2);
    std::set<std::string> sa(a.begin(), a.end());
    std::size_t overlap = 0;
    for (const auto& w : b)
        if (sa.count(w)) ++overlap;
    CHECK(overlap >= 2300);
    CHECK(overlap <= 2700);
}
