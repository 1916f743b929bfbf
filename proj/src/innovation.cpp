#include "innovation.hpp"

#include <algorithm>
#include <unordered_map>

#include "error.hpp"
#include "stats.hpp"

namespace meco {

std::vector<EntryList> entry_events(const CountTable& table) {
    std::vector<EntryList> out(table.phrase_labels.size());
    for (std::uint32_t p = 0; p < out.size(); ++p) out[p].phrase_id = p;

    // meme_counts is sorted by (phrase, day, community): the first row seen
    // for a (phrase, community) pair is its earliest day.
    std::vector<std::unordered_map<std::uint32_t, Day>> first_use(out.size());
    for (const auto& r : table.meme_counts) {
        auto [it, inserted] = first_use[r.phrase].try_emplace(r.community, r.day);
        if (!inserted && r.day < it->second) it->second = r.day;
    }

    for (std::uint32_t p = 0; p < out.size(); ++p) {
        auto& entries = out[p].entries;
        entries.reserve(first_use[p].size());
        for (auto [community, day] : first_use[p])
            entries.push_back({community, day});
        std::sort(entries.begin(), entries.end(),
                  [&](const EntryEvent& a, const EntryEvent& b) {
                      if (a.first_use_day != b.first_use_day)
                          return a.first_use_day < b.first_use_day;
                      return table.communities[a.community] <
                             table.communities[b.community];
                  });
        if (entries.size() > kEntryListLimit) entries.resize(kEntryListLimit);
    }
    return out;
}

InnovationRanking innovation_ranking(std::span<const EntryList> entries,
                                     std::int32_t year, MrrMode mode,
                                     const std::vector<std::string>& community_names) {
    InnovationRanking out;
    out.year = year;

    std::unordered_map<std::uint32_t, double> reciprocal_sum;
    std::size_t memes_with_events = 0;

    for (const EntryList& list : entries) {
        std::size_t year_rank = 0;
        bool any = false;
        for (std::size_t i = 0; i < list.entries.size(); ++i) {
            const EntryEvent& e = list.entries[i];
            if (year_of_day(e.first_use_day) != year) continue;
            ++year_rank;
            any = true;
            std::size_t rank =
                mode == MrrMode::per_year ? year_rank : i + 1;
            reciprocal_sum[e.community] += 1.0 / static_cast<double>(rank);
        }
        if (any) ++memes_with_events;
    }
    out.memes_considered = memes_with_events;
    if (memes_with_events == 0) return out; // empty ranking

    out.scores.reserve(reciprocal_sum.size());
    for (auto [community, sum] : reciprocal_sum)
        out.scores.push_back(
            {community, sum / static_cast<double>(memes_with_events)});
    std::sort(out.scores.begin(), out.scores.end(),
              [&](const InnovationScore& a, const InnovationScore& b) {
                  if (a.mrr != b.mrr) return a.mrr > b.mrr;
                  return community_names[a.community] <
                         community_names[b.community];
              });
    return out;
}

RankShift rank_shift(const InnovationRanking& r1, const InnovationRanking& r2) {
    std::unordered_map<std::uint32_t, double> scores2;
    for (const InnovationScore& s : r2.scores) scores2.emplace(s.community, s.mrr);

    std::vector<double> a, b;
    for (const InnovationScore& s : r1.scores) {
        auto it = scores2.find(s.community);
        if (it == scores2.end()) continue;
        a.push_back(s.mrr);
        b.push_back(it->second);
    }
    if (a.size() < 3)
        fail(ErrorCode::invalid_argument,
             "rank_shift needs >= 3 common communities, got " +
                 std::to_string(a.size()));

    TauResult tau = kendall_tau_b(a, b);
    return {tau.tau, tau.p, a.size()};
}

} // namespace meco
