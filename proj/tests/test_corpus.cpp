#include <doctest.h>

#include "corpus.hpp"
#include "error.hpp"

using namespace meco;

TEST_CASE("tokenize lowercases and splits on punctuation") {
    CHECK(tokenize("Do you even LIFT?") ==
          std::vector<std::string>{"do", "you", "even", "lift"});
    CHECK(tokenize("u wot m8!!") == std::vector<std::string>{"u", "wot", "m8"});
    CHECK(tokenize("") == std::vector<std::string>{});
    CHECK(tokenize("  \t\n ") == std::vector<std::string>{});
    CHECK(tokenize("don't panic") == std::vector<std::string>{"don't", "panic"});
    CHECK(tokenize("a-b_c") == std::vector<std::string>{"a", "b", "c"});
}

TEST_CASE("tokenize is idempotent over its own joined output") {
    auto join = [](const std::vector<std::string>& tokens) {
        std::string s;
        for (const auto& t : tokens) {
            if (!s.empty()) s += ' ';
            s += t;
        }
        return s;
    };
    for (const char* text :
         {"Hello, World!", "it's 2020...", "shrek is love; shrek is life",
          "caf\xc3\xa9 con leche", "1+1=2", "y tho??"}) {
        auto once = tokenize(text);
        CHECK(tokenize(join(once)) == once);
    }
}

TEST_CASE("parse_record accepts valid comments and posts") {
    Document d;
    std::string err;

    SUBCASE("comment at the epoch") {
        REQUIRE(parse_record(
            R"({"id":"a1","created_utc":0,"subreddit":"Pics","kind":"comment","body":"hello"})",
            d, err));
        CHECK(d.community == "pics");
        CHECK(d.day() == 0);
        CHECK(d.text == "hello");
        CHECK(d.kind == DocKind::comment);
    }

    SUBCASE("post joins title and selftext") {
        REQUIRE(parse_record(
            R"({"id":"a2","created_utc":86400,"subreddit":"funny","kind":"post","title":"x","selftext":"y"})",
            d, err));
        CHECK(d.day() == 1);
        CHECK(d.text == "x y");
        CHECK(d.kind == DocKind::post);
    }

    SUBCASE("post with missing fields treats them as empty") {
        REQUIRE(parse_record(
            R"({"id":"a3","created_utc":100,"subreddit":"funny","kind":"post"})",
            d, err));
        CHECK(d.text == " ");
    }
}

TEST_CASE("parse_record rejects malformed and invalid records") {
    Document d;
    std::string err;
    CHECK_FALSE(parse_record("not json", d, err));
    CHECK_FALSE(parse_record("{}", d, err));
    CHECK_FALSE(parse_record(
        R"({"id":"x","subreddit":"a","kind":"comment","body":"b"})", d, err));
    CHECK(err.find("created_utc") != std::string::npos);
    CHECK_FALSE(parse_record(
        R"({"id":"x","created_utc":5,"kind":"comment","body":"b"})", d, err));
    CHECK_FALSE(parse_record(
        R"({"id":"x","created_utc":5,"subreddit":"a b","kind":"comment","body":"c"})",
        d, err));
    CHECK_FALSE(parse_record(
        R"({"id":"x","created_utc":5,"subreddit":"a","kind":"link","body":"c"})",
        d, err));
    CHECK_FALSE(parse_record(
        R"({"id":"x","created_utc":-3,"subreddit":"a","kind":"comment","body":"c"})",
        d, err));
}

TEST_CASE("day and month derivation follow the UTC calendar") {
    CHECK(day_of_utc_seconds(0) == 0);
    CHECK(day_of_utc_seconds(86399) == 0);
    CHECK(day_of_utc_seconds(86400) == 1);
    // 2010-01-01 and 2020-01-01.
    CHECK(parse_day("2010-01-01") == 14610);
    CHECK(parse_day("2020-01-01") == 18262);
    CHECK(format_month(month_of_day(parse_day("2010-01-31"))) == "2010-01");
    CHECK(format_month(month_of_day(parse_day("2010-02-01"))) == "2010-02");
    CHECK(format_date(parse_day("2016-02-29")) == "2016-02-29");
    CHECK(parse_day("14610") == 14610);
}

TEST_CASE("corpus_stats partitions counts by month and kind") {
    auto doc = [](std::int64_t utc, DocKind kind) {
        Document d;
        d.created_utc = utc;
        d.community = "c";
        d.kind = kind;
        return d;
    };
    std::int64_t jan = static_cast<std::int64_t>(parse_day("2015-01-10")) * 86400;
    std::int64_t feb = static_cast<std::int64_t>(parse_day("2015-02-02")) * 86400;

    SUBCASE("single month") {
        std::vector<Document> docs{doc(jan, DocKind::post),
                                   doc(jan + 5, DocKind::post),
                                   doc(jan + 9, DocKind::comment),
                                   doc(jan + 1, DocKind::comment),
                                   doc(jan + 2, DocKind::comment)};
        auto rows = corpus_stats(docs);
        REQUIRE(rows.size() == 1);
        CHECK(rows[0].posts == 2);
        CHECK(rows[0].comments == 3);
        CHECK(rows[0].total == 5);
    }

    SUBCASE("empty stream") { CHECK(corpus_stats(std::span<const Document>{}).empty()); }

    SUBCASE("two months, each counting only its own") {
        // Direct-count oracle on a 10-document fixture.
        std::vector<Document> docs;
        std::uint64_t jan_posts = 0, jan_comments = 0, feb_posts = 0,
                      feb_comments = 0;
        for (int i = 0; i < 10; ++i) {
            bool in_feb = i % 3 == 0;
            DocKind kind = i % 2 == 0 ? DocKind::post : DocKind::comment;
            docs.push_back(doc((in_feb ? feb : jan) + i * 7, kind));
            if (in_feb) {
                kind == DocKind::post ? ++feb_posts : ++feb_comments;
            } else {
                kind == DocKind::post ? ++jan_posts : ++jan_comments;
            }
        }
        auto rows = corpus_stats(docs);
        REQUIRE(rows.size() == 2);
        CHECK(rows[0].posts == jan_posts);
        CHECK(rows[0].comments == jan_comments);
        CHECK(rows[1].posts == feb_posts);
        CHECK(rows[1].comments == feb_comments);
        CHECK(rows[0].total + rows[1].total == 10);
    }
}
