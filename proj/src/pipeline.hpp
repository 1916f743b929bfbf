#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "counts.hpp"
#include "innovation.hpp"
#include "phraseset.hpp"
#include "scan.hpp"

namespace meco {

const char* version_string();

// Run configuration shared by every subcommand. Values can come from a
// plain key=value file and from flags; later set() calls win.
struct RunConfig {
    std::vector<std::string> inputs;
    std::string phrases_path;
    std::string background_path;      // explicit background word file
    std::size_t background_sample = 0; // > 0: sample from the corpus vocabulary
    std::uint64_t background_min_count = 100;
    std::uint64_t seed = 42;
    std::string window_spec;          // "FIRST:LAST", dates or day indices
    std::vector<double> alphas{0.005, 0.01, 0.02};
    std::uint32_t gap_tolerance = 0;
    std::int32_t peak_window = 14;
    int bins_per_decade = 8;
    CountMode count_mode = CountMode::all;
    MrrMode mrr_mode = MrrMode::per_year;
    std::string out_dir;
    unsigned shards = 0;              // 0 = hardware concurrency
    bool dump_series = false;
    bool dump_counts_csv = false;

    void set(const std::string& key, const std::string& value);
    void load_file(const std::string& path);

    // Phase-scoped canonical forms and hashes. Only keys that influence the
    // phase's output bytes participate, so the same analysis hashes the same
    // regardless of output directory, shard count, or how it was invoked.
    std::string scan_canonical() const;
    std::string metrics_canonical() const;
    std::string scan_hash() const;
    std::string metrics_hash() const;

    std::string cache_path() const { return out_dir + "/counts.mec1"; }

private:
    bool alphas_explicit_ = false;
};

struct ScanOutcome {
    ScanStats stats;
    std::string cache_path;
    std::size_t phrases = 0;
    std::size_t background_words = 0;
    std::vector<LoadWarning> phrase_warnings;
    bool background_short = false; // sample returned fewer words than requested
};

// Scan phase: read corpus, write the MEC1 count cache plus scan_summary.json.
ScanOutcome cmd_scan(const RunConfig& config);

// Metrics phase: read the cache, write every report CSV (plus report.txt
// when with_report is set).
void cmd_metrics(const RunConfig& config, bool with_report = false);

inline void cmd_report(const RunConfig& config) { cmd_metrics(config, true); }

// Synth: generate corpus.ndjson, ground truth CSVs, and companion phrase /
// background files from a JSON plant spec.
void cmd_synth(const std::string& spec_path, const std::string& out_dir);

} // namespace meco
