#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "calendar.hpp"

namespace meco {

enum class DocKind : std::uint8_t { post = 0, comment = 1 };

// One timestamped post or comment in one community; the unit of scanning.
struct Document {
    std::string id;
    std::int64_t created_utc = 0;
    std::string community;   // lowercased, no whitespace
    DocKind kind = DocKind::comment;
    std::string text;        // posts carry title + " " + selftext

    Day day() const { return day_of_utc_seconds(created_utc); }
};

// Tokenization rule: lowercase; a token is a maximal run of token bytes where
// token bytes are ASCII letters (case-folded), ASCII digits, the apostrophe,
// and any byte >= 0x80 (UTF-8 sequences pass through untouched). Everything
// else splits. Deterministic and locale-free.
inline bool is_token_byte(unsigned char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
           (c >= '0' && c <= '9') || c == '\'' || c >= 0x80;
}

// Hot-path form: lowercases `text` into `scratch` and appends token views
// (into `scratch`) onto `out`. Neither container is cleared.
void tokenize_into(std::string_view text, std::string& scratch,
                   std::vector<std::string_view>& out);

std::vector<std::string> tokenize(std::string_view text);

// Parses one newline-delimited JSON record. Returns false and sets `error`
// on malformed JSON or failed validation; streaming callers count and skip.
bool parse_record(std::string_view line, Document& out, std::string& error);

// Per-day document tallies, the granularity kept by the scan pass.
struct DayDocCount {
    Day day = 0;
    std::uint64_t posts = 0;
    std::uint64_t comments = 0;
};

struct MonthActivity {
    MonthIndex month = 0;
    std::uint64_t posts = 0;
    std::uint64_t comments = 0;
    std::uint64_t total = 0;
};

std::vector<MonthActivity> corpus_stats(std::span<const Document> docs);
std::vector<MonthActivity> corpus_stats(std::span<const DayDocCount> day_counts);

} // namespace meco
