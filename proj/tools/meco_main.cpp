// meco command line: scan / metrics / report / synth.
// Talks to the core exclusively through the C API in meco.h.

#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "meco.h"

namespace {

int exit_code_of(meco_status status) {
    switch (status) {
    case MECO_OK: return 0;
    case MECO_EINVAL:
    case MECO_EPARSE:
    case MECO_EEMPTY: return 2;
    case MECO_EIO: return 3;
    case MECO_EVERSION: return 4;
    case MECO_EINTERNAL: return 5;
    }
    return 5;
}

int report_failure(meco_status status) {
    std::fprintf(stderr, "meco: error: %s\n", meco_last_error());
    return exit_code_of(status);
}

class ConfigHandle {
public:
    ConfigHandle() : config_(meco_config_new()) {}
    ~ConfigHandle() { meco_config_free(config_); }
    ConfigHandle(const ConfigHandle&) = delete;
    ConfigHandle& operator=(const ConfigHandle&) = delete;

    meco_config* get() const { return config_; }

    meco_status set(const char* key, const std::string& value) {
        return meco_config_set(config_, key, value.c_str());
    }

private:
    meco_config* config_;
};

struct CommonFlags {
    std::string config_file;
    std::string out;
    std::string seed;
    std::string shards;
};

// Config file first, flags win.
meco_status apply(const ConfigHandle& cfg, const CommonFlags& common) {
    if (!common.config_file.empty()) {
        meco_status s =
            meco_config_load_file(cfg.get(), common.config_file.c_str());
        if (s != MECO_OK) return s;
    }
    return MECO_OK;
}

meco_status set_all(ConfigHandle& cfg, const char* key,
                    const std::vector<std::string>& values) {
    for (const std::string& v : values) {
        meco_status s = cfg.set(key, v);
        if (s != MECO_OK) return s;
    }
    return MECO_OK;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"meco - phrase ecology metrics over timestamped corpora"};
    app.set_version_flag("--version", std::string("meco ") + meco_version());
    app.require_subcommand(1);

    // --- scan ---
    auto* scan = app.add_subcommand(
        "scan", "Scan a corpus into a reusable count cache");
    std::vector<std::string> scan_inputs;
    std::string scan_phrases, scan_background, scan_background_sample;
    std::string scan_min_count, scan_count_mode;
    CommonFlags scan_common;
    bool scan_dump_counts = false;
    scan->add_option("--input", scan_inputs,
                     "Input file or directory (newline-delimited JSON, "
                     "optionally gzipped); repeatable")
        ->required();
    scan->add_option("--phrases", scan_phrases, "Phrase file, one meme per line")
        ->required();
    scan->add_option("--background", scan_background,
                     "Background word file (one word per line)");
    scan->add_option("--background-sample", scan_background_sample,
                     "Sample N background words from the corpus vocabulary");
    scan->add_option("--background-min-count", scan_min_count,
                     "Minimum corpus count for sampled background words");
    scan->add_option("--count-mode", scan_count_mode,
                     "all (every occurrence) or per-document");
    scan->add_option("--seed", scan_common.seed, "RNG seed for sampling");
    scan->add_option("--shards", scan_common.shards, "Scan worker count");
    scan->add_option("--out", scan_common.out, "Output directory")->required();
    scan->add_option("--config", scan_common.config_file,
                     "key=value config file (flags win)");
    scan->add_flag("--dump-counts-csv", scan_dump_counts,
                   "Also write counts.csv / background_counts.csv");

    // --- metrics / report ---
    auto add_metrics_flags = [](CLI::App* cmd, std::vector<std::string>& alphas,
                                std::string& window, std::string& gap,
                                std::string& peak_window, std::string& bins,
                                std::string& mrr_mode, bool& dump_series,
                                CommonFlags& common) {
        cmd->add_option("--out", common.out,
                        "Directory holding counts.mec1; tables land here")
            ->required();
        cmd->add_option("--window", window,
                        "Analysis window FIRST:LAST (YYYY-MM-DD or day index)");
        cmd->add_option("--alpha", alphas,
                        "Lifespan threshold; repeatable or comma separated");
        cmd->add_option("--gap-tolerance", gap,
                        "Sub-threshold days tolerated inside a lifespan "
                        "(integer or 'unlimited')");
        cmd->add_option("--peak-window", peak_window,
                        "Days on each side of the peak for aligned curves");
        cmd->add_option("--bins-per-decade", bins,
                        "Velocity histogram resolution");
        cmd->add_option("--mrr-mode", mrr_mode, "yearly or global");
        cmd->add_flag("--dump-series", dump_series,
                      "Write per-phrase daily and normalized series CSVs");
        cmd->add_option("--config", common.config_file,
                        "key=value config file (flags win)");
    };

    auto* metrics = app.add_subcommand(
        "metrics", "Compute every report table from a count cache");
    std::vector<std::string> metrics_alphas;
    std::string metrics_window, metrics_gap, metrics_peak, metrics_bins,
        metrics_mrr;
    bool metrics_dump_series = false;
    CommonFlags metrics_common;
    add_metrics_flags(metrics, metrics_alphas, metrics_window, metrics_gap,
                      metrics_peak, metrics_bins, metrics_mrr,
                      metrics_dump_series, metrics_common);

    auto* report = app.add_subcommand(
        "report", "Metrics plus a human-readable report.txt");
    std::vector<std::string> report_alphas;
    std::string report_window, report_gap, report_peak, report_bins, report_mrr;
    bool report_dump_series = false;
    CommonFlags report_common;
    add_metrics_flags(report, report_alphas, report_window, report_gap,
                      report_peak, report_bins, report_mrr, report_dump_series,
                      report_common);

    // --- synth ---
    auto* synth = app.add_subcommand(
        "synth", "Generate a synthetic corpus with exact ground truth");
    std::string synth_spec, synth_out;
    synth->add_option("--spec", synth_spec, "JSON plant spec")->required();
    synth->add_option("--out", synth_out, "Output directory")->required();

    CLI11_PARSE(app, argc, argv);

    if (scan->parsed()) {
        ConfigHandle cfg;
        meco_status s = apply(cfg, scan_common);
        if (s == MECO_OK) s = set_all(cfg, "input", scan_inputs);
        if (s == MECO_OK) s = cfg.set("phrases", scan_phrases);
        if (s == MECO_OK && !scan_background.empty())
            s = cfg.set("background", scan_background);
        if (s == MECO_OK && !scan_background_sample.empty())
            s = cfg.set("background_sample", scan_background_sample);
        if (s == MECO_OK && !scan_min_count.empty())
            s = cfg.set("background_min_count", scan_min_count);
        if (s == MECO_OK && !scan_count_mode.empty())
            s = cfg.set("count_mode", scan_count_mode);
        if (s == MECO_OK && !scan_common.seed.empty())
            s = cfg.set("seed", scan_common.seed);
        if (s == MECO_OK && !scan_common.shards.empty())
            s = cfg.set("shards", scan_common.shards);
        if (s == MECO_OK) s = cfg.set("out", scan_common.out);
        if (s == MECO_OK && scan_dump_counts)
            s = cfg.set("dump_counts_csv", "true");
        if (s != MECO_OK) return report_failure(s);

        meco_scan_stats stats{};
        s = meco_scan(cfg.get(), &stats);
        if (s != MECO_OK) return report_failure(s);
        double rate = stats.elapsed_seconds > 0
                          ? static_cast<double>(stats.documents) /
                                stats.elapsed_seconds
                          : 0.0;
        std::printf("scanned %llu documents (%llu posts, %llu comments), "
                    "%llu skipped, %llu tokens in %.2fs (%.0f docs/s)\n",
                    static_cast<unsigned long long>(stats.documents),
                    static_cast<unsigned long long>(stats.posts),
                    static_cast<unsigned long long>(stats.comments),
                    static_cast<unsigned long long>(stats.skipped_records),
                    static_cast<unsigned long long>(stats.tokens),
                    stats.elapsed_seconds, rate);
        return 0;
    }

    auto run_metrics = [&](const CommonFlags& common,
                           const std::vector<std::string>& alphas,
                           const std::string& window, const std::string& gap,
                           const std::string& peak, const std::string& bins,
                           const std::string& mrr, bool dump_series,
                           bool with_report) -> int {
        ConfigHandle cfg;
        meco_status s = apply(cfg, common);
        if (s == MECO_OK) s = cfg.set("out", common.out);
        if (s == MECO_OK && !window.empty()) s = cfg.set("window", window);
        if (s == MECO_OK) s = set_all(cfg, "alpha", alphas);
        if (s == MECO_OK && !gap.empty()) s = cfg.set("gap_tolerance", gap);
        if (s == MECO_OK && !peak.empty()) s = cfg.set("peak_window", peak);
        if (s == MECO_OK && !bins.empty()) s = cfg.set("bins_per_decade", bins);
        if (s == MECO_OK && !mrr.empty()) s = cfg.set("mrr_mode", mrr);
        if (s == MECO_OK && dump_series) s = cfg.set("dump_series", "true");
        if (s != MECO_OK) return report_failure(s);

        s = with_report ? meco_report(cfg.get()) : meco_metrics(cfg.get());
        if (s != MECO_OK) return report_failure(s);
        std::printf("metrics written to %s\n", common.out.c_str());
        return 0;
    };

    if (metrics->parsed())
        return run_metrics(metrics_common, metrics_alphas, metrics_window,
                           metrics_gap, metrics_peak, metrics_bins, metrics_mrr,
                           metrics_dump_series, false);
    if (report->parsed())
        return run_metrics(report_common, report_alphas, report_window,
                           report_gap, report_peak, report_bins, report_mrr,
                           report_dump_series, true);

    if (synth->parsed()) {
        meco_status s = meco_synth(synth_spec.c_str(), synth_out.c_str());
        if (s != MECO_OK) return report_failure(s);
        std::printf("synthetic corpus written to %s\n", synth_out.c_str());
        return 0;
    }
    return 0;
}
