#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace meco {

inline constexpr std::size_t kMaxPhraseTokens = 8;

struct Phrase {
    std::uint32_t phrase_id = 0;     // dense, assigned in load order
    std::vector<std::string> tokens; // 1..8 lowercase tokens; == tokenize(label)
    std::string label;               // source string (truncated at token 8)
};

// The meme lexicon plus the background word set used for normalization.
struct PhraseSet {
    std::vector<Phrase> phrases;
    std::vector<std::string> background; // single-token words, sorted
    std::uint64_t rng_seed = 0;          // seed used when background was sampled
};

struct LoadWarning {
    std::uint64_t line = 0;
    std::string label;
    enum { duplicate, truncated } kind = duplicate;
};

// One phrase per line; blank lines and '#' comments ignored. Duplicate token
// sequences keep the first occurrence; phrases longer than 8 tokens keep only
// their 8-token prefix. Both cases are reported through `warnings`.
std::vector<Phrase> load_phrases(std::string_view content,
                                 std::vector<LoadWarning>* warnings = nullptr);

// One background word per line; each line must tokenize to a single token.
std::vector<std::string> load_background_words(std::string_view content);

// Uniform sample without replacement from tokens with count >= min_count,
// deterministic given seed. Returns fewer than n words (all eligible ones)
// when the vocabulary is too small; callers detect that by size.
std::vector<std::string> sample_background(
    const std::vector<std::pair<std::string, std::uint64_t>>& vocabulary,
    std::size_t n, std::uint64_t min_count, std::uint64_t seed);

} // namespace meco
