#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "counts.hpp"
#include "corpus.hpp"
#include "matcher.hpp"
#include "phraseset.hpp"

namespace meco {

struct ScanStats {
    std::uint64_t documents = 0; // valid records scanned
    std::uint64_t posts = 0;
    std::uint64_t comments = 0;
    std::uint64_t skipped = 0;   // invalid records counted and skipped
    std::uint64_t tokens = 0;
    std::uint64_t bytes = 0;     // raw input bytes read
    double elapsed_seconds = 0.0;
    std::vector<std::string> skip_samples; // first few diagnostics
};

struct ScanOptions {
    CountMode mode = CountMode::all;
    unsigned shards = 1; // scan worker count
};

// Single-pass scan over newline-delimited JSON files (plain or gzip).
// The result is independent of shard count and input sharding.
CountTable scan_corpus(const Matcher& matcher, const PhraseSet& set,
                       const std::vector<std::string>& files,
                       const ScanOptions& options, ScanStats* stats = nullptr);

// In-memory variant for already-parsed documents.
CountTable scan_documents(const Matcher& matcher, const PhraseSet& set,
                          std::span<const Document> docs,
                          CountMode mode = CountMode::all);

// Token -> corpus count over all valid documents, for background sampling.
std::vector<std::pair<std::string, std::uint64_t>> count_vocabulary(
    const std::vector<std::string>& files, unsigned shards,
    std::uint64_t* skipped = nullptr);

} // namespace meco
