#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "error.hpp"
#include "io.hpp"
#include "pipeline.hpp"

using namespace meco;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) {
        static int counter = 0;
        path = fs::temp_directory_path() /
               ("meco_pipe_" + name + "_" + std::to_string(counter++));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string str(const std::string& child = "") const {
        return child.empty() ? path.string() : (path / child).string();
    }
};

const char* kSpec = R"({
  "seed": 99,
  "window": {"first": "2015-01-01", "last": "2015-06-30"},
  "communities": [
    {"name": "alpha", "docs_per_day": 5, "post_fraction": 0.25},
    {"name": "beta", "docs_per_day": 2}
  ],
  "background": {"vocab_size": 30, "word_rate": 3.0},
  "plants": [
    {"phrase": "y tho", "profile": {"shape": "constant", "rate": 2.0}},
    {"phrase": "hello darkness",
     "profile": {"shape": "trapezoid", "start": 30, "rise": 10, "plateau": 40,
                 "fall": 10, "peak_rate": 8.0}}
  ]
})";

} // namespace

TEST_CASE("synth -> scan -> metrics end to end") {
    TempDir dir("e2e");
    write_text_file(dir.str("spec.json"), kSpec);
    cmd_synth(dir.str("spec.json"), dir.str("synth"));

    for (const char* f : {"corpus.ndjson", "truth_phrases.csv",
                          "truth_background.csv", "phrases.txt", "background.txt"})
        CHECK(fs::exists(dir.str("synth") + "/" + f));

    RunConfig config;
    config.set("input", dir.str("synth") + "/corpus.ndjson");
    config.set("phrases", dir.str("synth") + "/phrases.txt");
    config.set("background", dir.str("synth") + "/background.txt");
    config.set("out", dir.str("out"));
    config.set("shards", "2");
    ScanOutcome outcome = cmd_scan(config);
    CHECK(outcome.stats.documents > 500);
    CHECK(outcome.stats.skipped == 0);
    CHECK(outcome.phrases == 2);
    CHECK(outcome.background_words == 30);
    CHECK(fs::exists(config.cache_path()));
    CHECK(fs::exists(dir.str("out") + "/scan_summary.json"));

    SUBCASE("rerun produces identical cache bytes") {
        std::string first = read_text_file(config.cache_path());
        cmd_scan(config);
        CHECK(read_text_file(config.cache_path()) == first);
    }

    SUBCASE("cache totals equal the synth ground truth") {
        CountTable table = read_count_cache(config.cache_path());
        REQUIRE(table.phrase_labels.size() == 2);
        std::map<std::string, std::uint64_t> scanned;
        for (const auto& r : table.meme_counts)
            scanned[table.phrase_labels[r.phrase]] += r.count;

        std::map<std::string, std::uint64_t> truth;
        std::istringstream in(
            read_text_file(dir.str("synth") + "/truth_phrases.csv"));
        std::string line;
        std::getline(in, line); // header
        while (std::getline(in, line)) {
            std::size_t second = line.rfind(',');
            std::size_t first = line.rfind(',', second - 1);
            truth[line.substr(0, first)] +=
                std::stoull(line.substr(second + 1));
        }
        CHECK(scanned == truth);
    }

    SUBCASE("directory inputs expand to their files") {
        // Split the corpus into two files under a directory.
        fs::create_directories(dir.str("split"));
        std::istringstream in(
            read_text_file(dir.str("synth") + "/corpus.ndjson"));
        std::ofstream a(dir.str("split") + "/part_a.ndjson", std::ios::binary);
        std::ofstream b(dir.str("split") + "/part_b.ndjson", std::ios::binary);
        std::string line;
        std::size_t i = 0;
        while (std::getline(in, line))
            ((i++ % 2) ? a : b) << line << '\n';
        a.close();
        b.close();

        RunConfig dir_config;
        dir_config.set("input", dir.str("split"));
        dir_config.set("phrases", dir.str("synth") + "/phrases.txt");
        dir_config.set("background", dir.str("synth") + "/background.txt");
        dir_config.set("out", dir.str("out_dir_input"));
        cmd_scan(dir_config);
        CHECK(read_text_file(dir_config.cache_path()) ==
              read_text_file(config.cache_path()));
    }

    SUBCASE("metrics emits every table with headers") {
        cmd_report(config);
        for (const char* f :
             {"corpus_stats.csv", "attention.csv", "diversity.csv",
              "richness.csv", "lifespans.csv", "active.csv", "trends.csv",
              "peak_aligned.csv", "velocity_fit.csv", "velocity_hist.csv",
              "entries.csv", "rankings.csv", "rank_shift.csv", "background.csv",
              "summary.json", "metrics_meta.json", "report.txt"}) {
            INFO(f);
            CHECK(fs::exists(dir.str("out") + "/" + f));
        }
        std::string attention = read_text_file(dir.str("out") + "/attention.csv");
        CHECK(attention.rfind("year_month,mean,ci95,n\n", 0) == 0);
        CHECK(attention.find("2015-01") != std::string::npos);

        // Two memes, three default alphas: exactly six lifespan rows.
        std::string lifespans = read_text_file(dir.str("out") + "/lifespans.csv");
        std::size_t rows = static_cast<std::size_t>(
            std::count(lifespans.begin(), lifespans.end(), '\n'));
        CHECK(rows == 1 + 2 * 3);

        std::string report = read_text_file(dir.str("out") + "/report.txt");
        CHECK(report.find("Tracked phrases: 2") != std::string::npos);

        // Monthly activity totals add up to the number of valid records.
        std::uint64_t monthly_total = 0;
        std::istringstream stats_csv(
            read_text_file(dir.str("out") + "/corpus_stats.csv"));
        std::string line;
        std::getline(stats_csv, line); // header
        while (std::getline(stats_csv, line))
            monthly_total += std::stoull(line.substr(line.rfind(',') + 1));
        CHECK(monthly_total == outcome.stats.documents);
    }

    SUBCASE("phrase warnings land in the scan summary") {
        write_text_file(dir.str("warn_phrases.txt"),
                        "y tho\ny tho!!\n"
                        "a b c d e f g h i j\n");
        RunConfig warn = config;
        warn.set("phrases", dir.str("warn_phrases.txt"));
        warn.set("out", dir.str("out_warn"));
        cmd_scan(warn);
        std::string summary =
            read_text_file(dir.str("out_warn") + "/scan_summary.json");
        CHECK(summary.find("\"duplicate\"") != std::string::npos);
        CHECK(summary.find("\"truncated\"") != std::string::npos);
    }

    SUBCASE("metrics with dump_series writes per-phrase series") {
        config.set("dump_series", "true");
        cmd_metrics(config);
        CHECK(fs::exists(dir.str("out") + "/series/daily.csv"));
        CHECK(fs::exists(dir.str("out") + "/series/normalized.csv"));
    }

    SUBCASE("lifespans stay full-window when the analysis window shrinks") {
        cmd_metrics(config);
        std::string full = read_text_file(dir.str("out") + "/lifespans.csv");

        RunConfig narrow = config;
        narrow.set("out", dir.str("out_narrow"));
        narrow.set("window", "2015-03-01:2015-04-30");
        cmd_scan(narrow);
        cmd_metrics(narrow);
        CHECK(read_text_file(dir.str("out_narrow") + "/lifespans.csv") == full);

        // Trend tables do honor the window.
        std::string active = read_text_file(dir.str("out_narrow") + "/active.csv");
        CHECK(active.find("2015-03") != std::string::npos);
        CHECK(active.find("2015-01") == std::string::npos);
    }

    SUBCASE("window extending past the data stays well-formed") {
        RunConfig wide = config;
        wide.set("out", dir.str("out_wide"));
        wide.set("window", "2014-11-01:2015-09-30");
        cmd_scan(wide);
        cmd_metrics(wide);
        std::string active = read_text_file(dir.str("out_wide") + "/active.csv");
        CHECK(active.find("2014-11") != std::string::npos);
    }

    SUBCASE("window disjoint from the data degrades gracefully") {
        RunConfig off = config;
        off.set("out", dir.str("out_off"));
        off.set("window", "2020-01-01:2020-06-30");
        cmd_scan(off);
        cmd_metrics(off);
        std::string summary = read_text_file(dir.str("out_off") + "/summary.json");
        CHECK(summary.find("attention skipped") != std::string::npos);
    }
}

TEST_CASE("pure-background corpus: attention zeros, diversity empty") {
    TempDir dir("pure");
    write_text_file(dir.str("spec.json"), R"({
      "seed": 5,
      "window": {"first": "2015-01-01", "last": "2015-03-31"},
      "communities": [{"name": "solo", "docs_per_day": 4}],
      "background": {"vocab_size": 12, "word_rate": 2.0}
    })");
    cmd_synth(dir.str("spec.json"), dir.str("synth"));

    // Track memes that never occur.
    write_text_file(dir.str("phrases.txt"), "zerg rush\ny tho\n");

    RunConfig config;
    config.set("input", dir.str("synth") + "/corpus.ndjson");
    config.set("phrases", dir.str("phrases.txt"));
    config.set("background", dir.str("synth") + "/background.txt");
    config.set("out", dir.str("out"));
    cmd_scan(config);
    cmd_metrics(config);

    std::string attention = read_text_file(dir.str("out") + "/attention.csv");
    REQUIRE(attention.find("2015-01,0,0,2") != std::string::npos);

    std::string diversity = read_text_file(dir.str("out") + "/diversity.csv");
    CHECK(diversity == "year_month,mean_d,ci95,n_communities,total_communities\n");

    std::string lifespans = read_text_file(dir.str("out") + "/lifespans.csv");
    CHECK(lifespans == "phrase_id,alpha,start_day,peak_day,end_day,length\n");
}

TEST_CASE("scan validation errors") {
    TempDir dir("errors");
    RunConfig config;
    config.set("out", dir.str("out"));

    SUBCASE("missing phrase file names the path") {
        config.set("input", dir.str("nope.ndjson"));
        config.set("phrases", dir.str("missing_phrases.txt"));
        try {
            cmd_scan(config);
            FAIL("expected error");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::invalid_argument);
            CHECK(std::string(e.what()).find("missing_phrases.txt") !=
                  std::string::npos);
        }
    }

    SUBCASE("no inputs") {
        write_text_file(dir.str("p.txt"), "y tho\n");
        config.set("phrases", dir.str("p.txt"));
        CHECK_THROWS_AS(cmd_scan(config), Error);
    }
}

TEST_CASE("metrics refuses foreign caches with a re-scan message") {
    TempDir dir("version");
    fs::create_directories(dir.str("out"));
    write_text_file(dir.str("out") + "/counts.mec1", "MEC9garbage");
    RunConfig config;
    config.set("out", dir.str("out"));
    try {
        cmd_metrics(config);
        FAIL("expected error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::version_mismatch);
        CHECK(std::string(e.what()).find("re-scan") != std::string::npos);
    }
}

TEST_CASE("config files apply and flags win") {
    TempDir dir("config");
    write_text_file(dir.str("run.conf"),
                    "# comment\n"
                    "seed = 123\n"
                    "alpha = 0.05,0.2\n"
                    "count_mode = per-document\n");
    RunConfig config;
    config.load_file(dir.str("run.conf"));
    CHECK(config.seed == 123);
    CHECK(config.alphas == std::vector<double>{0.05, 0.2});
    CHECK(config.count_mode == CountMode::per_document);

    config.set("seed", "7"); // flag wins
    CHECK(config.seed == 7);

    CHECK_THROWS_AS(config.set("alpha", "2.0"), Error);
    CHECK_THROWS_AS(config.set("bogus_key", "1"), Error);

    // Canonical forms and hashes are stable and phase-scoped.
    RunConfig a, b;
    a.set("seed", "55");
    b.set("seed", "55");
    CHECK(a.scan_canonical() == b.scan_canonical());
    CHECK(a.scan_hash() == b.scan_hash());
    b.set("seed", "56");
    CHECK(a.scan_hash() != b.scan_hash());
    // The seed is scan-phase only; metrics hashes stay equal.
    CHECK(a.metrics_hash() == b.metrics_hash());
    b.set("alpha", "0.5");
    CHECK(a.metrics_hash() != b.metrics_hash());
    // Output directory and shard count never affect either hash.
    b = a;
    b.set("out", "/elsewhere");
    b.set("shards", "7");
    CHECK(a.scan_hash() == b.scan_hash());
    CHECK(a.metrics_hash() == b.metrics_hash());
}

TEST_CASE("gzip input scans identically to plain input") {
    TempDir dir("gz");
    write_text_file(dir.str("spec.json"), R"({
      "seed": 21,
      "window": {"first": "2015-01-01", "last": "2015-01-31"},
      "communities": [{"name": "alpha", "docs_per_day": 6}],
      "background": {"vocab_size": 10, "word_rate": 2.0},
      "plants": [{"phrase": "y tho", "profile": {"shape": "constant", "rate": 1.5}}]
    })");
    cmd_synth(dir.str("spec.json"), dir.str("synth"));

    // Compress with the system gzip if present; skip quietly otherwise.
    std::string plain = dir.str("synth") + "/corpus.ndjson";
    std::string gz = dir.str("synth") + "/corpus2.ndjson.gz";
    std::string cmd = "gzip -c '" + plain + "' > '" + gz + "' 2>/dev/null";
    if (std::system(cmd.c_str()) != 0) return;

    RunConfig base;
    base.set("phrases", dir.str("synth") + "/phrases.txt");
    base.set("background", dir.str("synth") + "/background.txt");

    RunConfig c1 = base;
    c1.set("input", plain);
    c1.set("out", dir.str("out1"));
    cmd_scan(c1);

    RunConfig c2 = base;
    c2.set("input", gz);
    c2.set("out", dir.str("out2"));
    cmd_scan(c2);

    CHECK(read_text_file(c1.cache_path()) == read_text_file(c2.cache_path()));
}
