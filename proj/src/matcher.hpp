#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "phraseset.hpp"

namespace meco {

inline constexpr std::uint32_t kNoId = 0xffffffffu;

// Closed token vocabulary: every token of every pattern plus every background
// word. Immutable after Matcher construction; lookups are thread-safe.
class TokenInterner {
public:
    TokenInterner();

    std::uint32_t intern(std::string_view token);
    std::uint32_t lookup(std::string_view token) const;
    std::string_view token(std::uint32_t id) const;
    std::uint32_t size() const { return static_cast<std::uint32_t>(offsets_.size() - 1); }

private:
    void rehash(std::size_t slots);

    std::vector<char> arena_;
    std::vector<std::uint32_t> offsets_; // id -> arena offset; size()+1 entries
    std::vector<std::uint32_t> table_;   // open addressing, id+1, 0 = empty
    std::size_t mask_ = 0;
};

// Aggregated match counts for a single document. The slot vectors are scratch
// reused across documents; keep one DocScan per worker.
struct DocScan {
    std::vector<std::pair<std::uint32_t, std::uint64_t>> phrases;    // (phrase_id, count)
    std::vector<std::pair<std::uint32_t, std::uint64_t>> background; // (word_id, count)

    std::vector<std::uint32_t> phrase_slot;
    std::vector<std::uint32_t> background_slot;
};

// Token-level multi-pattern dictionary automaton over interned token ids.
// Recognizes a phrase at position i iff its token sequence equals the
// document's token window ending at i; all positions are reported, so
// overlapping and nested occurrences each count.
class Matcher {
public:
    explicit Matcher(const PhraseSet& set);

    void scan(const std::vector<std::string_view>& tokens, DocScan& out) const;

    std::uint32_t phrase_count() const { return n_phrases_; }
    std::uint32_t background_count() const { return n_background_; }
    const TokenInterner& interner() const { return interner_; }

private:
    std::uint32_t find_edge(std::uint32_t node, std::uint32_t token) const;

    struct Node {
        std::uint32_t edge_begin = 0;
        std::uint32_t edge_end = 0;
        std::uint32_t fail = 0;
        std::uint32_t output_link = kNoId; // nearest suffix node ending a phrase
        std::uint32_t phrase = kNoId;      // phrase ending exactly here
    };
    struct Edge {
        std::uint32_t token = 0;
        std::uint32_t next = 0;
    };

    TokenInterner interner_;
    std::vector<Node> nodes_;
    std::vector<Edge> edges_;               // per-node ranges, sorted by token
    std::vector<std::uint32_t> root_next_;  // token id -> state from root
    std::vector<std::uint32_t> background_of_; // token id -> background word id
    std::uint32_t n_phrases_ = 0;
    std::uint32_t n_background_ = 0;
};

} // namespace meco
