#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dynamics.hpp"
#include "ecology.hpp"
#include "error.hpp"
#include "innovation.hpp"
#include "io.hpp"
#include "pipeline.hpp"
#include "series.hpp"

namespace meco {

namespace {

DayWindow parse_window_spec(const std::string& spec) {
    std::size_t colon = spec.find(':');
    if (colon == std::string::npos)
        fail(ErrorCode::invalid_argument,
             "window must be FIRST:LAST (dates or day indices): " + spec);
    DayWindow w;
    w.first = parse_day(spec.substr(0, colon));
    w.last = parse_day(spec.substr(colon + 1));
    if (w.last < w.first)
        fail(ErrorCode::invalid_argument, "window ends before it starts: " + spec);
    return w;
}

void numeric_field(CsvWriter& w, double v) {
    if (std::isnan(v))
        w.empty_field();
    else
        w.field(v);
}

std::string year_pair_label(std::int32_t y1, std::int32_t y2) {
    return std::to_string(y1) + "/" + std::to_string(y2);
}

struct VelocityGroup {
    std::int32_t year = 0;
    VelocityKind kind = VelocityKind::gain;
    std::vector<double> magnitudes;
    std::optional<LogNormalFit> fit;
};

} // namespace

void cmd_metrics(const RunConfig& config, bool with_report) {
    if (config.out_dir.empty())
        fail(ErrorCode::invalid_argument, "output directory not set (--out)");
    if (!std::filesystem::exists(config.cache_path()))
        fail(ErrorCode::invalid_argument,
             "count cache not found (run scan first): " + config.cache_path());

    CountTable table = read_count_cache(config.cache_path());

    Day data_min = 0, data_max = 0;
    if (!table.day_span(data_min, data_max))
        fail(ErrorCode::empty_input, "count cache holds no data");
    DayWindow full{data_min, data_max};
    DayWindow analysis = config.window_spec.empty()
                             ? full
                             : parse_window_spec(config.window_spec);

    std::vector<std::string> notes;
    std::size_t n_phrases = table.phrase_labels.size();

    BackgroundSeries bg_full = background_series(table, full);
    bool has_background =
        std::any_of(bg_full.values.begin(), bg_full.values.end(),
                    [](std::uint64_t v) { return v > 0; });
    if (!has_background)
        notes.push_back(
            "background counts are empty; normalized metrics skipped");

    // Activity per month (full data range).
    std::vector<MonthActivity> activity = corpus_stats(table.doc_counts);

    // Lifespans are computed over the full data window even when trend
    // analysis is restricted to a sub-window.
    std::vector<std::vector<Lifespan>> lifespans_by_alpha(config.alphas.size());
    if (has_background) {
        for (std::uint32_t p = 0; p < n_phrases; ++p) {
            DailySeries raw = daily_series(table, p, full);
            NormalizedSeries norm = normalize(raw, bg_full);
            for (std::size_t ai = 0; ai < config.alphas.size(); ++ai) {
                LifespanParams params{config.alphas[ai], config.gap_tolerance};
                if (auto l = lifespan(norm, params))
                    lifespans_by_alpha[ai].push_back(*l);
            }
        }
    }

    // Collective attention.
    std::optional<AttentionResult> attention;
    if (has_background && n_phrases > 0) {
        MonthIndex m0 = month_of_day(analysis.first);
        MonthIndex m1 = month_of_day(analysis.last);
        if (m1 - m0 + 1 >= 2) {
            try {
                attention = aggregate_attention(table, analysis);
            } catch (const Error& e) {
                notes.push_back(std::string("attention skipped: ") + e.what());
            }
        } else {
            notes.push_back("attention skipped: fewer than 2 months in window");
        }
    }

    // Diversity and richness.
    std::optional<DiversityTrendResult> diversity;
    try {
        diversity = diversity_trend(table, analysis);
    } catch (const Error& e) {
        notes.push_back(std::string("diversity trend skipped: ") + e.what());
    }
    std::vector<RichnessRow> richness_rows = richness_by_community(table, analysis);

    // Active memes and lifespan trends per alpha.
    std::vector<std::vector<ActiveRow>> active_by_alpha(config.alphas.size());
    std::vector<LifespanTrendResult> trend_by_alpha(config.alphas.size());
    if (has_background) {
        for (std::size_t ai = 0; ai < config.alphas.size(); ++ai) {
            active_by_alpha[ai] =
                active_series(lifespans_by_alpha[ai], bg_full, analysis);
            trend_by_alpha[ai] =
                lifespan_trend(lifespans_by_alpha[ai], analysis);
            if (!trend_by_alpha[ai].trend_ok)
                notes.push_back("lifespan trend for alpha=" +
                                format_double(config.alphas[ai]) +
                                " skipped: fewer than 3 active months");
        }
    }

    // Peak dynamics and velocities over the analysis window, on raw counts.
    std::vector<DailySeries> dyn_series;
    std::vector<RawPeak> dyn_peaks;
    std::vector<VelocityGroup> velocity_groups;
    {
        std::map<std::pair<std::int32_t, VelocityKind>, std::vector<double>>
            grouped;
        for (std::uint32_t p = 0; p < n_phrases; ++p) {
            DailySeries s = daily_series(table, p, analysis);
            for (const VelocitySample& v : velocities(s))
                grouped[{v.year, v.kind}].push_back(v.magnitude);
            if (auto pk = raw_peak(s)) {
                dyn_peaks.push_back(*pk);
                dyn_series.push_back(std::move(s));
            }
        }
        for (auto& [key, magnitudes] : grouped) {
            VelocityGroup g;
            g.year = key.first;
            g.kind = key.second;
            g.magnitudes = std::move(magnitudes);
            if (g.magnitudes.size() >= 2) {
                try {
                    g.fit = fit_lognormal(g.magnitudes);
                } catch (const Error&) {
                    notes.push_back(
                        "log-normal fit skipped for year " +
                        std::to_string(g.year) +
                        (g.kind == VelocityKind::gain ? " gains" : " losses") +
                        ": degenerate sample");
                }
            }
            velocity_groups.push_back(std::move(g));
        }
    }
    std::vector<PeakAlignedCurve> curves =
        peak_aligned(dyn_series, dyn_peaks, config.peak_window);

    // Innovation rankings per year of the analysis window.
    std::vector<EntryList> entries = entry_events(table);
    std::vector<InnovationRanking> rankings;
    for (std::int32_t year = year_of_day(analysis.first);
         year <= year_of_day(analysis.last); ++year) {
        InnovationRanking r =
            innovation_ranking(entries, year, config.mrr_mode, table.communities);
        if (!r.scores.empty()) rankings.push_back(std::move(r));
    }
    struct ShiftRow {
        std::string pair;
        RankShift shift;
    };
    std::vector<ShiftRow> shifts;
    for (std::size_t i = 0; i + 1 < rankings.size(); ++i) {
        if (rankings[i + 1].year != rankings[i].year + 1) continue;
        try {
            ShiftRow row;
            row.pair = year_pair_label(rankings[i].year, rankings[i + 1].year);
            row.shift = rank_shift(rankings[i], rankings[i + 1]);
            shifts.push_back(row);
        } catch (const Error& e) {
            notes.push_back("rank shift skipped for " +
                            year_pair_label(rankings[i].year,
                                            rankings[i + 1].year) +
                            ": " + e.what());
        }
    }

    // ---- CSV emission ----
    std::vector<std::string> tables_written;
    auto track = [&](const std::string& name) {
        tables_written.push_back(name);
        return config.out_dir + "/" + name;
    };

    {
        CsvWriter w(track("corpus_stats.csv"));
        w.field("year_month").field("posts").field("comments").field("total");
        w.end_row();
        for (const MonthActivity& row : activity) {
            w.field(format_month(row.month))
                .field(row.posts)
                .field(row.comments)
                .field(row.total);
            w.end_row();
        }
    }
    {
        CsvWriter w(track("attention.csv"));
        w.field("year_month").field("mean").field("ci95").field("n");
        w.end_row();
        if (attention) {
            for (const AttentionRow& row : attention->rows) {
                w.field(format_month(row.month)).field(row.mean);
                numeric_field(w, row.ci95);
                w.field(static_cast<std::uint64_t>(row.n));
                w.end_row();
            }
        }
    }
    {
        CsvWriter w(track("diversity.csv"));
        w.field("year_month")
            .field("mean_d")
            .field("ci95")
            .field("n_communities")
            .field("total_communities");
        w.end_row();
        if (diversity) {
            for (const DiversityMonthRow& row : diversity->rows) {
                if (row.n_communities == 0) continue;
                w.field(format_month(row.month)).field(row.mean_d);
                numeric_field(w, row.ci95);
                w.field(static_cast<std::uint64_t>(row.n_communities));
                w.field(static_cast<std::uint64_t>(row.total_communities));
                w.end_row();
            }
        }
    }
    {
        CsvWriter w(track("richness.csv"));
        w.field("year_month").field("community").field("species").field("proportion");
        w.end_row();
        for (const RichnessRow& row : richness_rows) {
            w.field(format_month(row.month))
                .field(table.communities[row.community])
                .field(row.species)
                .field(row.proportion);
            w.end_row();
        }
    }
    {
        CsvWriter w(track("lifespans.csv"));
        w.field("phrase_id")
            .field("alpha")
            .field("start_day")
            .field("peak_day")
            .field("end_day")
            .field("length");
        w.end_row();
        for (std::size_t ai = 0; ai < config.alphas.size(); ++ai) {
            for (const Lifespan& l : lifespans_by_alpha[ai]) {
                w.field(l.phrase_id)
                    .field(l.alpha)
                    .field(l.start_day)
                    .field(l.peak_day)
                    .field(l.end_day)
                    .field(static_cast<std::int64_t>(l.length_days()));
                w.end_row();
            }
        }
    }
    {
        CsvWriter w(track("active.csv"));
        w.field("year_month").field("alpha").field("active").field("normalized_active");
        w.end_row();
        for (std::size_t ai = 0; ai < config.alphas.size(); ++ai) {
            for (const ActiveRow& row : active_by_alpha[ai]) {
                w.field(format_month(row.month)).field(config.alphas[ai]);
                w.field(row.active);
                if (row.normalized_defined)
                    w.field(row.normalized);
                else
                    w.empty_field();
                w.end_row();
            }
        }
    }
    {
        CsvWriter w(track("trends.csv"));
        w.field("alpha").field("slope").field("intercept").field("pearson_r").field("p");
        w.end_row();
        for (std::size_t ai = 0; ai < config.alphas.size(); ++ai) {
            const LifespanTrendResult& t = trend_by_alpha[ai];
            if (!t.trend_ok) continue;
            w.field(config.alphas[ai])
                .field(t.trend.slope)
                .field(t.trend.intercept)
                .field(t.trend.pearson_r)
                .field(t.trend.p_value);
            w.end_row();
        }
    }
    {
        CsvWriter w(track("peak_aligned.csv"));
        w.field("year").field("delta").field("mean").field("ci95").field("n");
        w.end_row();
        for (const PeakAlignedCurve& curve : curves) {
            for (std::int32_t delta = -curve.w; delta <= curve.w; ++delta) {
                std::size_t k = static_cast<std::size_t>(delta + curve.w);
                w.field(static_cast<std::int64_t>(curve.year));
                w.field(static_cast<std::int64_t>(delta));
                numeric_field(w, curve.mean[k]);
                numeric_field(w, curve.ci95[k]);
                w.field(curve.n[k]);
                w.end_row();
            }
        }
    }
    {
        CsvWriter w(track("velocity_fit.csv"));
        w.field("year").field("kind").field("mu").field("sigma").field("n");
        w.end_row();
        for (const VelocityGroup& g : velocity_groups) {
            if (!g.fit) continue;
            w.field(static_cast<std::int64_t>(g.year));
            w.field(g.kind == VelocityKind::gain ? "gain" : "loss");
            w.field(g.fit->mu).field(g.fit->sigma);
            w.field(static_cast<std::uint64_t>(g.fit->n));
            w.end_row();
        }
    }
    {
        CsvWriter w(track("velocity_hist.csv"));
        w.field("year").field("kind").field("bin_center").field("density").field("fit_density");
        w.end_row();
        for (const VelocityGroup& g : velocity_groups) {
            VelocityHistogram h = velocity_histogram(
                g.magnitudes, config.bins_per_decade,
                g.fit ? &*g.fit : nullptr);
            for (std::size_t b = 0; b < h.center.size(); ++b) {
                w.field(static_cast<std::int64_t>(g.year));
                w.field(g.kind == VelocityKind::gain ? "gain" : "loss");
                w.field(h.center[b]).field(h.density[b]);
                if (h.fit_density.empty())
                    w.empty_field();
                else
                    w.field(h.fit_density[b]);
                w.end_row();
            }
        }
    }
    {
        CsvWriter w(track("entries.csv"));
        w.field("phrase_id").field("rank").field("community").field("first_use_day");
        w.end_row();
        for (const EntryList& list : entries) {
            for (std::size_t i = 0; i < list.entries.size(); ++i) {
                w.field(list.phrase_id);
                w.field(static_cast<std::uint64_t>(i + 1));
                w.field(table.communities[list.entries[i].community]);
                w.field(list.entries[i].first_use_day);
                w.end_row();
            }
        }
    }
    {
        CsvWriter w(track("rankings.csv"));
        w.field("year").field("rank").field("community").field("mrr");
        w.end_row();
        for (const InnovationRanking& r : rankings) {
            for (std::size_t i = 0; i < r.scores.size(); ++i) {
                w.field(static_cast<std::int64_t>(r.year));
                w.field(static_cast<std::uint64_t>(i + 1));
                w.field(table.communities[r.scores[i].community]);
                w.field(r.scores[i].mrr);
                w.end_row();
            }
        }
    }
    {
        CsvWriter w(track("rank_shift.csv"));
        w.field("year_pair").field("tau").field("p").field("n_common");
        w.end_row();
        for (const ShiftRow& row : shifts) {
            w.field(row.pair)
                .field(row.shift.tau)
                .field(row.shift.p)
                .field(static_cast<std::uint64_t>(row.shift.n_common));
            w.end_row();
        }
    }
    {
        CsvWriter w(track("background.csv"));
        w.field("day").field("count");
        w.end_row();
        for (std::size_t i = 0; i < bg_full.values.size(); ++i) {
            w.field(bg_full.first_day + static_cast<Day>(i));
            w.field(bg_full.values[i]);
            w.end_row();
        }
    }

    if (config.dump_series) {
        std::filesystem::create_directories(config.out_dir + "/series");
        CsvWriter daily(config.out_dir + "/series/daily.csv");
        daily.field("phrase_id").field("day").field("count");
        daily.end_row();
        CsvWriter norm(config.out_dir + "/series/normalized.csv");
        norm.field("phrase_id").field("day").field("value").field("defined");
        norm.end_row();
        BackgroundSeries bg_analysis = background_series(table, analysis);
        bool bg_analysis_nonzero =
            std::any_of(bg_analysis.values.begin(), bg_analysis.values.end(),
                        [](std::uint64_t v) { return v > 0; });
        for (std::uint32_t p = 0; p < n_phrases; ++p) {
            DailySeries s = daily_series(table, p, analysis);
            for (std::size_t i = 0; i < s.values.size(); ++i) {
                if (s.values[i] == 0) continue;
                daily.field(p).field(s.first_day + static_cast<Day>(i)).field(s.values[i]);
                daily.end_row();
            }
            if (!bg_analysis_nonzero) continue;
            NormalizedSeries ns = normalize(s, bg_analysis);
            for (std::size_t i = 0; i < ns.values.size(); ++i) {
                norm.field(p).field(ns.first_day + static_cast<Day>(i));
                norm.field(ns.values[i]);
                norm.field(static_cast<std::uint64_t>(ns.defined[i]));
                norm.end_row();
            }
        }
        tables_written.push_back("series/daily.csv");
        tables_written.push_back("series/normalized.csv");
    }

    // ---- summary + metadata sidecar ----
    nlohmann::ordered_json summary;
    summary["window"] = {{"first", format_date(analysis.first)},
                         {"last", format_date(analysis.last)}};
    summary["data_window"] = {{"first", format_date(full.first)},
                              {"last", format_date(full.last)}};
    summary["phrases"] = n_phrases;
    summary["communities"] = table.communities.size();
    if (attention && attention->trend_ok) {
        summary["attention_trend"] = {{"slope", attention->trend.slope},
                                      {"intercept", attention->trend.intercept},
                                      {"pearson_r", attention->trend.pearson_r},
                                      {"p", attention->trend.p_value},
                                      {"n_months", attention->trend.n}};
    }
    if (diversity && diversity->trend_ok) {
        summary["diversity_trend"] = {{"slope", diversity->trend.slope},
                                      {"intercept", diversity->trend.intercept},
                                      {"pearson_r", diversity->trend.pearson_r},
                                      {"p", diversity->trend.p_value},
                                      {"n_months", diversity->trend.n}};
    }
    nlohmann::ordered_json lifespan_trends = nlohmann::ordered_json::array();
    for (std::size_t ai = 0; ai < config.alphas.size(); ++ai) {
        if (!trend_by_alpha[ai].trend_ok) continue;
        const TrendFit& t = trend_by_alpha[ai].trend;
        lifespan_trends.push_back({{"alpha", config.alphas[ai]},
                                   {"slope", t.slope},
                                   {"intercept", t.intercept},
                                   {"pearson_r", t.pearson_r},
                                   {"p", t.p_value},
                                   {"n_months", t.n}});
    }
    if (!lifespan_trends.empty())
        summary["lifespan_trends"] = lifespan_trends;
    if (!notes.empty()) summary["notes"] = notes;
    write_text_file(config.out_dir + "/summary.json", summary.dump(2) + "\n");

    nlohmann::ordered_json meta;
    meta["version"] = version_string();
    meta["config_hash"] = config.metrics_hash();
    meta["cache"] = "counts.mec1";
    meta["tables"] = tables_written;
    write_text_file(config.out_dir + "/metrics_meta.json", meta.dump(2) + "\n");

    if (with_report) {
        std::ostringstream r;
        r << "meco metrics report (v" << version_string() << ")\n";
        r << "=====================================\n\n";
        r << "Analysis window: " << format_date(analysis.first) << " .. "
          << format_date(analysis.last) << "\n";
        r << "Data window:     " << format_date(full.first) << " .. "
          << format_date(full.last) << "\n";
        r << "Tracked phrases: " << n_phrases
          << ", background words: " << table.background_words.size()
          << ", communities: " << table.communities.size() << "\n\n";

        if (attention && attention->trend_ok) {
            r << "Collective attention (monthly mean normalized frequency):\n"
              << "  slope=" << format_double(attention->trend.slope)
              << "  Pearson r=" << format_double(attention->trend.pearson_r)
              << "  p=" << format_double(attention->trend.p_value)
              << "  months=" << attention->trend.n << "\n\n";
        }
        if (diversity && diversity->trend_ok) {
            r << "Simpson diversity across communities:\n"
              << "  slope=" << format_double(diversity->trend.slope)
              << "  Pearson r=" << format_double(diversity->trend.pearson_r)
              << "  p=" << format_double(diversity->trend.p_value)
              << "  months=" << diversity->trend.n << "\n\n";
        }
        for (std::size_t ai = 0; ai < config.alphas.size(); ++ai) {
            r << "Lifespans at alpha=" << format_double(config.alphas[ai])
              << ": " << lifespans_by_alpha[ai].size() << " memes";
            if (trend_by_alpha[ai].trend_ok) {
                r << "; mean-length trend slope="
                  << format_double(trend_by_alpha[ai].trend.slope)
                  << " r=" << format_double(trend_by_alpha[ai].trend.pearson_r)
                  << " p=" << format_double(trend_by_alpha[ai].trend.p_value);
            }
            r << "\n";
        }
        if (!rankings.empty()) {
            r << "\nMost innovative communities by year (top 5):\n";
            for (const InnovationRanking& rank : rankings) {
                r << "  " << rank.year << ":";
                for (std::size_t i = 0; i < rank.scores.size() && i < 5; ++i) {
                    r << (i ? ", " : " ")
                      << table.communities[rank.scores[i].community] << " ("
                      << format_double(rank.scores[i].mrr) << ")";
                }
                r << "\n";
            }
        }
        if (!shifts.empty()) {
            r << "\nYear-over-year rank shift (Kendall tau-b):\n";
            for (const ShiftRow& row : shifts) {
                r << "  " << row.pair << ": tau=" << format_double(row.shift.tau)
                  << " p=" << format_double(row.shift.p)
                  << " n=" << row.shift.n_common << "\n";
            }
        }
        if (!notes.empty()) {
            r << "\nNotes:\n";
            for (const std::string& n : notes) r << "  - " << n << "\n";
        }
        write_text_file(config.out_dir + "/report.txt", r.str());
    }
}

} // namespace meco
