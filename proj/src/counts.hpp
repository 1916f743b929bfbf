#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "calendar.hpp"
#include "corpus.hpp"

namespace meco {

enum class CountMode : std::uint8_t { all = 0, per_document = 1 };

struct MemeCountRow {
    std::uint32_t phrase = 0;
    Day day = 0;
    std::uint32_t community = 0;
    std::uint64_t count = 0;
};

struct BackgroundCountRow {
    std::uint32_t word = 0;
    Day day = 0;
    std::uint64_t count = 0;
};

// The single product of the scan pass: mergeable counts keyed by
// (phrase, day, community), background word counts keyed by (word, day),
// and per-day document tallies. Rows are kept sorted so merge is a join
// and serialization is byte-stable regardless of shard layout.
struct CountTable {
    std::vector<std::string> phrase_labels;    // index = phrase_id
    std::vector<std::string> background_words; // index = word_id, sorted
    std::vector<std::string> communities;      // index = community_id, sorted
    std::vector<MemeCountRow> meme_counts;         // sorted (phrase, day, community)
    std::vector<BackgroundCountRow> background_counts; // sorted (word, day)
    std::vector<DayDocCount> doc_counts;           // sorted by day
    CountMode mode = CountMode::all;

    bool empty() const {
        return meme_counts.empty() && background_counts.empty() && doc_counts.empty();
    }
    // Observed day span across all three row kinds; false when empty().
    bool day_span(Day& min_day, Day& max_day) const;
};

// Key-wise addition. Both tables must describe the same phrase list,
// background word list, and count mode.
CountTable merge(const CountTable& a, const CountTable& b);

// Versioned binary cache, magic "MEC1".
void write_count_cache(const CountTable& table, const std::string& path);
CountTable read_count_cache(const std::string& path);

// CSV pair: phrase_id,day,community,count and background_word,day,count.
void write_counts_csv(const CountTable& table, const std::string& meme_path,
                      const std::string& background_path);

} // namespace meco
