#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "calendar.hpp"
#include "counts.hpp"

namespace meco {

inline constexpr std::size_t kEntryListLimit = 1000;

struct EntryEvent {
    std::uint32_t community = 0; // CountTable community id
    Day first_use_day = 0;
};

// Communities ordered by first use of one meme (ties by community name),
// truncated to the first kEntryListLimit entries. The first entry is the
// meme's beachhead.
struct EntryList {
    std::uint32_t phrase_id = 0;
    std::vector<EntryEvent> entries;
};

// One EntryList per phrase in the table (empty when the meme never occurs).
std::vector<EntryList> entry_events(const CountTable& table);

enum class MrrMode : std::uint8_t {
    per_year = 0,    // ranks restart at 1 within each year's sub-list
    global_rank = 1, // ranks keep their position in the full entry list
};

struct InnovationScore {
    std::uint32_t community = 0;
    double mrr = 0.0;
};

struct InnovationRanking {
    std::int32_t year = 0;
    std::vector<InnovationScore> scores; // descending mrr, ties by name
    std::size_t memes_considered = 0;    // memes with entries in this year
};

// MRR(s) = mean over memes with a nonempty year sub-list of 1/rank(s),
// counting 0 when s is absent from a meme's sub-list.
InnovationRanking innovation_ranking(std::span<const EntryList> entries,
                                     std::int32_t year, MrrMode mode,
                                     const std::vector<std::string>& community_names);

struct RankShift {
    double tau = 0.0;
    double p = 1.0;
    std::size_t n_common = 0;
};

// Kendall tau-b over the two score orderings restricted to communities
// present in both rankings. Requires n_common >= 3.
RankShift rank_shift(const InnovationRanking& r1, const InnovationRanking& r2);

} // namespace meco
