#include "pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <thread>

#include <nlohmann/json.hpp>

#include "ecology.hpp"
#include "error.hpp"
#include "io.hpp"
#include "matcher.hpp"
#include "synth.hpp"

namespace meco {

const char* version_string() { return "0.1.0"; }

namespace {

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc{} || ptr != value.data() + value.size())
        fail(ErrorCode::invalid_argument,
             "config " + key + ": expected a non-negative integer, got '" +
                 value + "'");
    return v;
}

double parse_f64(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        fail(ErrorCode::invalid_argument,
             "config " + key + ": expected a number, got '" + value + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    fail(ErrorCode::invalid_argument,
         "config " + key + ": expected true/false, got '" + value + "'");
}

} // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
    if (key == "input") {
        inputs.push_back(value);
    } else if (key == "phrases") {
        phrases_path = value;
    } else if (key == "background") {
        background_path = value;
    } else if (key == "background_sample") {
        background_sample = static_cast<std::size_t>(parse_u64(key, value));
    } else if (key == "background_min_count") {
        background_min_count = parse_u64(key, value);
    } else if (key == "seed") {
        seed = parse_u64(key, value);
    } else if (key == "window") {
        window_spec = value;
    } else if (key == "alpha") {
        if (!alphas_explicit_) {
            alphas.clear();
            alphas_explicit_ = true;
        }
        std::size_t pos = 0;
        while (pos <= value.size()) {
            std::size_t comma = value.find(',', pos);
            std::string part = value.substr(
                pos, comma == std::string::npos ? std::string::npos : comma - pos);
            if (!part.empty()) {
                double a = parse_f64(key, part);
                if (!(a > 0.0 && a < 1.0))
                    fail(ErrorCode::invalid_argument,
                         "config alpha: must be in (0,1), got " + part);
                alphas.push_back(a);
            }
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        if (alphas.empty())
            fail(ErrorCode::invalid_argument, "config alpha: empty list");
    } else if (key == "gap_tolerance") {
        if (value == "unlimited" || value == "inf") {
            gap_tolerance = kUnlimitedGap;
        } else {
            gap_tolerance = static_cast<std::uint32_t>(parse_u64(key, value));
        }
    } else if (key == "peak_window") {
        peak_window = static_cast<std::int32_t>(parse_u64(key, value));
        if (peak_window < 1)
            fail(ErrorCode::invalid_argument, "config peak_window: must be >= 1");
    } else if (key == "bins_per_decade") {
        bins_per_decade = static_cast<int>(parse_u64(key, value));
        if (bins_per_decade < 1)
            fail(ErrorCode::invalid_argument,
                 "config bins_per_decade: must be >= 1");
    } else if (key == "count_mode") {
        if (value == "all") {
            count_mode = CountMode::all;
        } else if (value == "per-document" || value == "per_document") {
            count_mode = CountMode::per_document;
        } else {
            fail(ErrorCode::invalid_argument,
                 "config count_mode: expected all|per-document");
        }
    } else if (key == "mrr_mode") {
        if (value == "yearly" || value == "per_year") {
            mrr_mode = MrrMode::per_year;
        } else if (value == "global") {
            mrr_mode = MrrMode::global_rank;
        } else {
            fail(ErrorCode::invalid_argument,
                 "config mrr_mode: expected yearly|global");
        }
    } else if (key == "out") {
        out_dir = value;
    } else if (key == "shards") {
        shards = static_cast<unsigned>(parse_u64(key, value));
    } else if (key == "dump_series") {
        dump_series = parse_bool(key, value);
    } else if (key == "dump_counts_csv") {
        dump_counts_csv = parse_bool(key, value);
    } else {
        fail(ErrorCode::invalid_argument, "unknown config key: " + key);
    }
}

void RunConfig::load_file(const std::string& path) {
    std::string content = read_text_file(path);
    std::size_t pos = 0;
    std::uint64_t line_no = 0;
    while (pos <= content.size()) {
        std::size_t nl = content.find('\n', pos);
        std::string line = content.substr(
            pos, nl == std::string::npos ? std::string::npos : nl - pos);
        pos = nl == std::string::npos ? content.size() + 1 : nl + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();

        std::size_t start = line.find_first_not_of(" \t");
        if (start == std::string::npos || line[start] == '#') continue;
        std::size_t eq = line.find('=', start);
        if (eq == std::string::npos)
            fail(ErrorCode::parse, path + ":" + std::to_string(line_no) +
                                       ": expected key=value");
        auto trim = [](const std::string& s) {
            std::size_t a = s.find_first_not_of(" \t");
            std::size_t b = s.find_last_not_of(" \t");
            return a == std::string::npos ? std::string()
                                          : s.substr(a, b - a + 1);
        };
        set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
}

namespace {

std::string fnv1a_hex(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(h));
    return buf;
}

} // namespace

std::string RunConfig::scan_canonical() const {
    std::string out;
    auto kv = [&](const std::string& k, const std::string& v) {
        out += k;
        out += '=';
        out += v;
        out += '\n';
    };
    std::string joined_inputs;
    for (const auto& i : inputs) {
        if (!joined_inputs.empty()) joined_inputs += ';';
        joined_inputs += i;
    }
    kv("background", background_path);
    kv("background_min_count", std::to_string(background_min_count));
    kv("background_sample", std::to_string(background_sample));
    kv("count_mode", count_mode == CountMode::all ? "all" : "per-document");
    kv("input", joined_inputs);
    kv("phrases", phrases_path);
    kv("seed", std::to_string(seed));
    return out;
}

std::string RunConfig::metrics_canonical() const {
    std::string out;
    auto kv = [&](const std::string& k, const std::string& v) {
        out += k;
        out += '=';
        out += v;
        out += '\n';
    };
    std::string joined_alphas;
    for (double a : alphas) {
        if (!joined_alphas.empty()) joined_alphas += ',';
        joined_alphas += format_double(a);
    }
    kv("alpha", joined_alphas);
    kv("bins_per_decade", std::to_string(bins_per_decade));
    kv("gap_tolerance", gap_tolerance == kUnlimitedGap
                            ? "unlimited"
                            : std::to_string(gap_tolerance));
    kv("mrr_mode", mrr_mode == MrrMode::per_year ? "yearly" : "global");
    kv("peak_window", std::to_string(peak_window));
    kv("window", window_spec);
    return out;
}

std::string RunConfig::scan_hash() const { return fnv1a_hex(scan_canonical()); }

std::string RunConfig::metrics_hash() const {
    return fnv1a_hex(metrics_canonical());
}

namespace {

void require_file(const std::string& what, const std::string& path) {
    if (path.empty())
        fail(ErrorCode::invalid_argument, what + " not set");
    if (!std::filesystem::exists(path))
        fail(ErrorCode::invalid_argument, what + " not found: " + path);
}

void ensure_out_dir(const std::string& out_dir) {
    if (out_dir.empty())
        fail(ErrorCode::invalid_argument, "output directory not set (--out)");
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec)
        fail(ErrorCode::io, "cannot create output directory: " + out_dir);
}

unsigned effective_shards(unsigned configured) {
    if (configured > 0) return configured;
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

} // namespace

ScanOutcome cmd_scan(const RunConfig& config) {
    require_file("phrase file", config.phrases_path);
    if (config.inputs.empty())
        fail(ErrorCode::invalid_argument, "no inputs given (--input)");
    for (const std::string& in : config.inputs) require_file("input", in);
    if (!config.background_path.empty())
        require_file("background file", config.background_path);
    ensure_out_dir(config.out_dir);

    ScanOutcome outcome;
    PhraseSet set;
    set.phrases = load_phrases(read_text_file(config.phrases_path),
                               &outcome.phrase_warnings);
    set.rng_seed = config.seed;

    std::vector<std::string> files = expand_inputs(config.inputs);
    if (files.empty())
        fail(ErrorCode::empty_input, "inputs contain no files");

    if (!config.background_path.empty()) {
        set.background =
            load_background_words(read_text_file(config.background_path));
    } else if (config.background_sample > 0) {
        auto vocabulary =
            count_vocabulary(files, effective_shards(config.shards));
        set.background =
            sample_background(vocabulary, config.background_sample,
                              config.background_min_count, config.seed);
        outcome.background_short =
            set.background.size() < config.background_sample;
    }

    Matcher matcher(set);
    ScanOptions options;
    options.mode = config.count_mode;
    options.shards = effective_shards(config.shards);

    CountTable table = scan_corpus(matcher, set, files, options, &outcome.stats);
    outcome.cache_path = config.cache_path();
    outcome.phrases = set.phrases.size();
    outcome.background_words = set.background.size();
    write_count_cache(table, outcome.cache_path);

    if (config.dump_counts_csv)
        write_counts_csv(table, config.out_dir + "/counts.csv",
                         config.out_dir + "/background_counts.csv");

    nlohmann::ordered_json summary;
    summary["documents"] = outcome.stats.documents;
    summary["posts"] = outcome.stats.posts;
    summary["comments"] = outcome.stats.comments;
    summary["skipped_records"] = outcome.stats.skipped;
    summary["tokens"] = outcome.stats.tokens;
    summary["input_bytes"] = outcome.stats.bytes;
    summary["phrases"] = outcome.phrases;
    summary["background_words"] = outcome.background_words;
    summary["communities"] = table.communities.size();
    summary["count_mode"] =
        config.count_mode == CountMode::all ? "all" : "per-document";
    summary["config_hash"] = config.scan_hash();
    summary["version"] = version_string();
    if (!outcome.stats.skip_samples.empty())
        summary["skip_samples"] = outcome.stats.skip_samples;
    if (!outcome.phrase_warnings.empty()) {
        nlohmann::ordered_json warnings = nlohmann::ordered_json::array();
        for (const LoadWarning& w : outcome.phrase_warnings) {
            warnings.push_back(
                {{"line", w.line},
                 {"kind", w.kind == LoadWarning::duplicate ? "duplicate"
                                                           : "truncated"},
                 {"phrase", w.label}});
        }
        summary["phrase_warnings"] = warnings;
    }
    if (outcome.background_short)
        summary["background_sample_short"] = true;
    write_text_file(config.out_dir + "/scan_summary.json",
                    summary.dump(2) + "\n");
    return outcome;
}

void cmd_synth(const std::string& spec_path, const std::string& out_dir) {
    require_file("synth spec", spec_path);
    ensure_out_dir(out_dir);

    PlantSpec spec = parse_plant_spec(read_text_file(spec_path));

    std::ofstream corpus(out_dir + "/corpus.ndjson", std::ios::binary);
    if (!corpus)
        fail(ErrorCode::io, "cannot open " + out_dir + "/corpus.ndjson");
    std::string buffer;
    buffer.reserve(1 << 20);
    GroundTruth truth = generate(spec, [&](const SynthRecord& rec) {
        buffer += render_record(rec, spec);
        buffer += '\n';
        if (buffer.size() > (1 << 20) - 4096) {
            corpus.write(buffer.data(), static_cast<std::streamsize>(buffer.size()));
            buffer.clear();
        }
    });
    corpus.write(buffer.data(), static_cast<std::streamsize>(buffer.size()));
    corpus.close();
    if (!corpus)
        fail(ErrorCode::io, "write failed: " + out_dir + "/corpus.ndjson");

    CsvWriter phrases_truth(out_dir + "/truth_phrases.csv");
    phrases_truth.field("phrase").field("day").field("count");
    phrases_truth.end_row();
    for (std::size_t p = 0; p < truth.phrases.size(); ++p) {
        for (auto [day, count] : truth.phrase_counts[p]) {
            phrases_truth.field(truth.phrases[p]).field(day).field(count);
            phrases_truth.end_row();
        }
    }

    CsvWriter bg_truth(out_dir + "/truth_background.csv");
    bg_truth.field("word").field("day").field("count");
    bg_truth.end_row();
    for (std::size_t w = 0; w < truth.words.size(); ++w) {
        for (auto [day, count] : truth.word_counts[w]) {
            bg_truth.field(truth.words[w]).field(day).field(count);
            bg_truth.end_row();
        }
    }

    std::string phrase_lines;
    for (const std::string& p : truth.phrases) {
        phrase_lines += p;
        phrase_lines += '\n';
    }
    write_text_file(out_dir + "/phrases.txt", phrase_lines);

    std::string word_lines;
    for (const std::string& w : truth.words) {
        word_lines += w;
        word_lines += '\n';
    }
    write_text_file(out_dir + "/background.txt", word_lines);
}

} // namespace meco
