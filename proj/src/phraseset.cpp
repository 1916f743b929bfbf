#include "phraseset.hpp"

#include <algorithm>
#include <unordered_set>

#include "corpus.hpp"
#include "error.hpp"
#include "rng.hpp"

namespace meco {

namespace {

std::string join_tokens(const std::vector<std::string_view>& tokens,
                        std::size_t count) {
    std::string key;
    for (std::size_t i = 0; i < count; ++i) {
        if (i) key += ' ';
        key += tokens[i];
    }
    return key;
}

} // namespace

std::vector<Phrase> load_phrases(std::string_view content,
                                 std::vector<LoadWarning>* warnings) {
    std::vector<Phrase> phrases;
    std::unordered_set<std::string> seen;
    std::string scratch;
    std::vector<std::string_view> tokens;

    std::uint64_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= content.size()) {
        std::size_t nl = content.find('\n', pos);
        std::string_view line = content.substr(
            pos, nl == std::string_view::npos ? content.size() - pos : nl - pos);
        pos = nl == std::string_view::npos ? content.size() + 1 : nl + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

        std::string_view trimmed = line;
        while (!trimmed.empty() && (trimmed.front() == ' ' || trimmed.front() == '\t'))
            trimmed.remove_prefix(1);
        if (trimmed.empty() || trimmed.front() == '#') continue;

        scratch.clear();
        tokens.clear();
        tokenize_into(line, scratch, tokens);
        if (tokens.empty())
            fail(ErrorCode::parse, "phrase file line " + std::to_string(line_no) +
                                       " tokenizes to zero tokens");

        std::size_t kept = std::min(tokens.size(), kMaxPhraseTokens);
        std::string label;
        if (tokens.size() > kMaxPhraseTokens) {
            // Keep the source string up to the end of the 8th token so the
            // tokens == tokenize(label) invariant survives truncation.
            std::size_t end = static_cast<std::size_t>(
                tokens[kept - 1].data() + tokens[kept - 1].size() - scratch.data());
            label = std::string(line.substr(0, end));
            if (warnings)
                warnings->push_back({line_no, label, LoadWarning::truncated});
        } else {
            label = std::string(line);
        }

        std::string key = join_tokens(tokens, kept);
        if (!seen.insert(key).second) {
            if (warnings)
                warnings->push_back({line_no, label, LoadWarning::duplicate});
            continue;
        }

        Phrase p;
        p.phrase_id = static_cast<std::uint32_t>(phrases.size());
        p.label = std::move(label);
        p.tokens.reserve(kept);
        for (std::size_t i = 0; i < kept; ++i)
            p.tokens.emplace_back(tokens[i]);
        phrases.push_back(std::move(p));
    }
    return phrases;
}

std::vector<std::string> load_background_words(std::string_view content) {
    std::vector<std::string> words;
    std::unordered_set<std::string> seen;
    std::uint64_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= content.size()) {
        std::size_t nl = content.find('\n', pos);
        std::string_view line = content.substr(
            pos, nl == std::string_view::npos ? content.size() - pos : nl - pos);
        pos = nl == std::string_view::npos ? content.size() + 1 : nl + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty() || line.front() == '#') continue;

        std::vector<std::string> tokens = tokenize(line);
        if (tokens.empty()) continue;
        if (tokens.size() != 1)
            fail(ErrorCode::parse, "background file line " + std::to_string(line_no) +
                                       " is not a single token");
        if (seen.insert(tokens[0]).second)
            words.push_back(tokens[0]);
    }
    std::sort(words.begin(), words.end());
    return words;
}

std::vector<std::string> sample_background(
    const std::vector<std::pair<std::string, std::uint64_t>>& vocabulary,
    std::size_t n, std::uint64_t min_count, std::uint64_t seed) {
    if (vocabulary.empty())
        fail(ErrorCode::empty_input, "background sampling: empty vocabulary");
    if (n < 1)
        fail(ErrorCode::invalid_argument, "background sample size must be >= 1");

    std::vector<std::string> eligible;
    for (const auto& [token, count] : vocabulary)
        if (count >= min_count) eligible.push_back(token);
    // Sorting makes the draw independent of the caller's map iteration order.
    std::sort(eligible.begin(), eligible.end());
    eligible.erase(std::unique(eligible.begin(), eligible.end()), eligible.end());

    if (eligible.size() <= n) {
        return eligible;
    }

    Rng rng(seed);
    // Partial Fisher-Yates: the first n slots become the sample.
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t j = i + static_cast<std::size_t>(
                                rng.uniform_below(eligible.size() - i));
        std::swap(eligible[i], eligible[j]);
    }
    eligible.resize(n);
    std::sort(eligible.begin(), eligible.end());
    return eligible;
}

} // namespace meco
