#include <doctest.h>

#include <map>

#include "error.hpp"
#include "matcher.hpp"
#include "scan.hpp"
#include "synth.hpp"

using namespace meco;

namespace {

std::string demo_spec(std::uint64_t seed = 7) {
    return R"({
      "seed": )" + std::to_string(seed) + R"(,
      "window": {"first": "2015-01-01", "last": "2015-03-31"},
      "communities": [
        {"name": "alpha", "docs_per_day": 6, "post_fraction": 0.2},
        {"name": "beta", "docs_per_day": 3}
      ],
      "background": {"vocab_size": 40, "word_rate": 2.0, "growth_factor": 2.0},
      "plants": [
        {"phrase": "hello darkness my old friend",
         "profile": {"shape": "trapezoid", "start": 10, "rise": 5,
                     "plateau": 20, "fall": 10, "peak_rate": 6.0}},
        {"phrase": "y tho", "profile": {"shape": "constant", "rate": 2.0}},
        {"phrase": "zerg rush",
         "profile": {"shape": "linear", "start_rate": 0, "end_rate": 4},
         "communities": ["beta"]},
        {"phrase": "wat", "profile": {"shape": "proportional", "p": 0.01}}
      ]
    })";
}

PhraseSet set_from_truth(const GroundTruth& truth) {
    PhraseSet set;
    for (const std::string& label : truth.phrases) {
        Phrase p;
        p.phrase_id = static_cast<std::uint32_t>(set.phrases.size());
        p.label = label;
        p.tokens = tokenize(label);
        set.phrases.push_back(std::move(p));
    }
    set.background = truth.words;
    return set;
}

} // namespace

TEST_CASE("scan of a generated corpus reproduces ground truth exactly") {
    PlantSpec spec = parse_plant_spec(demo_spec());
    SynthResult result = generate_documents(spec);
    CHECK(result.documents.size() == result.truth.documents);

    PhraseSet set = set_from_truth(result.truth);
    Matcher matcher(set);
    CountTable table = scan_documents(matcher, set, result.documents);

    // Planted phrase counts, summed over communities, must match exactly.
    std::map<std::pair<std::uint32_t, Day>, std::uint64_t> scanned;
    for (const auto& r : table.meme_counts) scanned[{r.phrase, r.day}] += r.count;
    std::map<std::pair<std::uint32_t, Day>, std::uint64_t> expected;
    for (std::uint32_t p = 0; p < result.truth.phrase_counts.size(); ++p)
        for (auto [day, count] : result.truth.phrase_counts[p])
            expected[{p, day}] = count;
    CHECK(scanned == expected);

    // Background word counts likewise.
    std::map<std::pair<std::uint32_t, Day>, std::uint64_t> scanned_bg;
    for (const auto& r : table.background_counts)
        scanned_bg[{r.word, r.day}] += r.count;
    std::map<std::pair<std::uint32_t, Day>, std::uint64_t> expected_bg;
    for (std::uint32_t w = 0; w < result.truth.word_counts.size(); ++w) {
        // Matcher background ids follow the sorted word list; words are
        // generated pre-sorted (w0000, w0001, ...).
        for (auto [day, count] : result.truth.word_counts[w])
            expected_bg[{w, day}] = count;
    }
    CHECK(scanned_bg == expected_bg);
}

TEST_CASE("same seed gives byte-identical corpora, different seeds differ") {
    PlantSpec spec = parse_plant_spec(demo_spec());
    std::string a, b;
    generate(spec, [&](const SynthRecord& rec) {
        a += render_record(rec, spec);
        a += '\n';
    });
    generate(spec, [&](const SynthRecord& rec) {
        b += render_record(rec, spec);
        b += '\n';
    });
    CHECK(a == b);

    PlantSpec other = parse_plant_spec(demo_spec(8));
    std::string c;
    generate(other, [&](const SynthRecord& rec) {
        c += render_record(rec, spec);
        c += '\n';
    });
    CHECK(a != c);
}

TEST_CASE("empty plant list yields pure background") {
    PlantSpec spec = parse_plant_spec(R"({
      "seed": 3,
      "window": {"first": "2015-01-01", "last": "2015-01-20"},
      "communities": [{"name": "solo", "docs_per_day": 4}],
      "background": {"vocab_size": 10, "word_rate": 1.0}
    })");
    SynthResult result = generate_documents(spec);
    CHECK(result.truth.phrases.empty());

    PhraseSet set = set_from_truth(result.truth);
    // Track an unrelated meme: it must never appear.
    Phrase ghost;
    ghost.phrase_id = 0;
    ghost.label = "zerg rush";
    ghost.tokens = tokenize(ghost.label);
    set.phrases.push_back(ghost);
    Matcher matcher(set);
    CountTable table = scan_documents(matcher, set, result.documents);
    CHECK(table.meme_counts.empty());
}

TEST_CASE("proportional plants track background growth") {
    PlantSpec spec = parse_plant_spec(R"({
      "seed": 11,
      "window": {"first": "2015-01-01", "last": "2015-06-30"},
      "communities": [{"name": "solo", "docs_per_day": 5}],
      "background": {"vocab_size": 50, "word_rate": 4.0, "growth_factor": 10.0},
      "plants": [{"phrase": "wat", "profile": {"shape": "proportional", "p": 0.02}}]
    })");
    SynthResult result = generate_documents(spec);

    // Realized phrase count over realized background stays near p throughout.
    std::uint64_t planted = 0, background = 0;
    for (auto [day, count] : result.truth.phrase_counts[0]) planted += count;
    for (const auto& days : result.truth.word_counts)
        for (auto [day, count] : days) background += count;
    double ratio = static_cast<double>(planted) / static_cast<double>(background);
    CHECK(ratio == doctest::Approx(0.02).epsilon(0.15));
}

TEST_CASE("plant spec validation errors carry field paths") {
    auto spec_with = [](const std::string& plants) {
        return R"({"seed":1,"window":{"first":"2015-01-01","last":"2015-01-10"},
                   "communities":[{"name":"a","docs_per_day":1}],
                   "background":{"vocab_size":5,"word_rate":1.0},
                   "plants":)" + plants + "}";
    };
    CHECK_THROWS_WITH_AS(
        parse_plant_spec(spec_with(
            R"([{"phrase":"w0001","profile":{"shape":"constant","rate":1}}])")),
        doctest::Contains("background namespace"), Error);
    CHECK_THROWS_WITH_AS(
        parse_plant_spec(spec_with(
            R"([{"phrase":"a b c","profile":{"shape":"constant","rate":1}},
                {"phrase":"b c","profile":{"shape":"constant","rate":1}}])")),
        doctest::Contains("contained in"), Error);
    CHECK_THROWS_WITH_AS(
        parse_plant_spec(spec_with(
            R"([{"phrase":"ok","profile":{"shape":"proportional","p":1.5}}])")),
        doctest::Contains("$.plants[0].profile.p"), Error);
    CHECK_THROWS_WITH_AS(
        parse_plant_spec(spec_with(
            R"([{"phrase":"ok","profile":{"shape":"trapezoid","start":0,
                "rise":5,"plateau":10,"fall":5,"peak_rate":1}}])")),
        doctest::Contains("window"), Error);
    CHECK_THROWS_AS(parse_plant_spec("{"), Error);
}

TEST_CASE("generated records parse back through the corpus module") {
    PlantSpec spec = parse_plant_spec(demo_spec());
    std::size_t checked = 0;
    generate(spec, [&](const SynthRecord& rec) {
        std::string line = render_record(rec, spec);
        Document d;
        std::string err;
        REQUIRE(parse_record(line, d, err));
        Document direct = to_document(rec, spec);
        REQUIRE(d.community == direct.community);
        REQUIRE(d.created_utc == direct.created_utc);
        REQUIRE(d.kind == direct.kind);
        REQUIRE(tokenize(d.text) == tokenize(direct.text));
        ++checked;
    });
    CHECK(checked > 100);
}
