#include "scan.hpp"

#include <algorithm>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <exception>
#include <mutex>
#include <thread>
#include <tuple>
#include <unordered_map>

#include "error.hpp"
#include "io.hpp"

namespace meco {

namespace {

// Packed count keys: phrase 20 bits, community 22 bits, day 22 bits.
constexpr Day kMaxDay = (1 << 22) - 1;

std::uint64_t pack_meme(std::uint32_t phrase, std::uint32_t community, Day day) {
    return (static_cast<std::uint64_t>(phrase) << 44) |
           (static_cast<std::uint64_t>(community) << 22) |
           static_cast<std::uint64_t>(day);
}

std::uint64_t pack_background(std::uint32_t word, Day day) {
    return (static_cast<std::uint64_t>(word) << 22) |
           static_cast<std::uint64_t>(day);
}

struct WorkerCounts {
    std::unordered_map<std::uint64_t, std::uint64_t> meme;
    std::unordered_map<std::uint64_t, std::uint64_t> background;
    std::unordered_map<Day, std::pair<std::uint64_t, std::uint64_t>> docs;
    std::unordered_map<std::string, std::uint32_t> community_ids;
    std::vector<std::string> community_names;
    std::uint64_t documents = 0;
    std::uint64_t posts = 0;
    std::uint64_t comments = 0;
    std::uint64_t skipped = 0;
    std::uint64_t tokens = 0;

    std::uint32_t community_id(const std::string& name) {
        auto [it, inserted] = community_ids.try_emplace(
            name, static_cast<std::uint32_t>(community_names.size()));
        if (inserted) {
            if (community_names.size() >= (1u << 22))
                fail(ErrorCode::internal,
                     "too many distinct communities (max 2^22 per shard)");
            community_names.push_back(name);
        }
        return it->second;
    }
};

struct ScanContext {
    const Matcher* matcher = nullptr;
    CountMode mode = CountMode::all;
};

void scan_one(const ScanContext& ctx, const Document& doc, WorkerCounts& wc,
              DocScan& scratch, std::string& text_scratch,
              std::vector<std::string_view>& token_scratch) {
    Day day = doc.day();
    if (day < 0 || day > kMaxDay) {
        ++wc.skipped;
        return;
    }
    text_scratch.clear();
    token_scratch.clear();
    tokenize_into(doc.text, text_scratch, token_scratch);
    ctx.matcher->scan(token_scratch, scratch);

    ++wc.documents;
    wc.tokens += token_scratch.size();
    auto& day_row = wc.docs[day];
    if (doc.kind == DocKind::post) {
        ++wc.posts;
        ++day_row.first;
    } else {
        ++wc.comments;
        ++day_row.second;
    }

    if (!scratch.phrases.empty()) {
        std::uint32_t community = wc.community_id(doc.community);
        for (auto [phrase, count] : scratch.phrases) {
            std::uint64_t c =
                ctx.mode == CountMode::per_document ? 1 : count;
            wc.meme[pack_meme(phrase, community, day)] += c;
        }
    }
    for (auto [word, count] : scratch.background)
        wc.background[pack_background(word, day)] += count;
}

CountTable finalize(std::vector<WorkerCounts>& workers, const PhraseSet& set,
                    CountMode mode) {
    CountTable out;
    out.mode = mode;
    for (const Phrase& p : set.phrases) out.phrase_labels.push_back(p.label);
    out.background_words = set.background;

    for (const WorkerCounts& wc : workers)
        out.communities.insert(out.communities.end(),
                               wc.community_names.begin(),
                               wc.community_names.end());
    std::sort(out.communities.begin(), out.communities.end());
    out.communities.erase(
        std::unique(out.communities.begin(), out.communities.end()),
        out.communities.end());

    std::size_t meme_rows = 0, bg_rows = 0;
    for (const WorkerCounts& wc : workers) {
        meme_rows += wc.meme.size();
        bg_rows += wc.background.size();
    }
    out.meme_counts.reserve(meme_rows);
    out.background_counts.reserve(bg_rows);

    for (WorkerCounts& wc : workers) {
        std::vector<std::uint32_t> remap(wc.community_names.size());
        for (std::size_t i = 0; i < wc.community_names.size(); ++i) {
            auto it = std::lower_bound(out.communities.begin(),
                                       out.communities.end(),
                                       wc.community_names[i]);
            remap[i] = static_cast<std::uint32_t>(it - out.communities.begin());
        }
        for (auto [key, count] : wc.meme) {
            MemeCountRow row;
            row.phrase = static_cast<std::uint32_t>(key >> 44);
            row.community = remap[static_cast<std::uint32_t>((key >> 22) & 0x3fffff)];
            row.day = static_cast<Day>(key & 0x3fffff);
            row.count = count;
            out.meme_counts.push_back(row);
        }
        for (auto [key, count] : wc.background) {
            BackgroundCountRow row;
            row.word = static_cast<std::uint32_t>(key >> 22);
            row.day = static_cast<Day>(key & 0x3fffff);
            row.count = count;
            out.background_counts.push_back(row);
        }
        for (auto [day, counts] : wc.docs) {
            DayDocCount row;
            row.day = day;
            row.posts = counts.first;
            row.comments = counts.second;
            out.doc_counts.push_back(row);
        }
        wc.meme.clear();
        wc.background.clear();
        wc.docs.clear();
    }

    std::sort(out.meme_counts.begin(), out.meme_counts.end(),
              [](const MemeCountRow& x, const MemeCountRow& y) {
                  return std::tie(x.phrase, x.day, x.community) <
                         std::tie(y.phrase, y.day, y.community);
              });
    std::size_t w = 0;
    for (std::size_t i = 0; i < out.meme_counts.size(); ++i) {
        if (w > 0 && out.meme_counts[w - 1].phrase == out.meme_counts[i].phrase &&
            out.meme_counts[w - 1].day == out.meme_counts[i].day &&
            out.meme_counts[w - 1].community == out.meme_counts[i].community) {
            out.meme_counts[w - 1].count += out.meme_counts[i].count;
        } else {
            out.meme_counts[w++] = out.meme_counts[i];
        }
    }
    out.meme_counts.resize(w);

    std::sort(out.background_counts.begin(), out.background_counts.end(),
              [](const BackgroundCountRow& x, const BackgroundCountRow& y) {
                  return std::tie(x.word, x.day) < std::tie(y.word, y.day);
              });
    w = 0;
    for (std::size_t i = 0; i < out.background_counts.size(); ++i) {
        if (w > 0 &&
            out.background_counts[w - 1].word == out.background_counts[i].word &&
            out.background_counts[w - 1].day == out.background_counts[i].day) {
            out.background_counts[w - 1].count += out.background_counts[i].count;
        } else {
            out.background_counts[w++] = out.background_counts[i];
        }
    }
    out.background_counts.resize(w);

    std::sort(out.doc_counts.begin(), out.doc_counts.end(),
              [](const DayDocCount& x, const DayDocCount& y) { return x.day < y.day; });
    w = 0;
    for (std::size_t i = 0; i < out.doc_counts.size(); ++i) {
        if (w > 0 && out.doc_counts[w - 1].day == out.doc_counts[i].day) {
            out.doc_counts[w - 1].posts += out.doc_counts[i].posts;
            out.doc_counts[w - 1].comments += out.doc_counts[i].comments;
        } else {
            out.doc_counts[w++] = out.doc_counts[i];
        }
    }
    out.doc_counts.resize(w);
    return out;
}

// Batches of raw lines flowing from the reader thread to scan workers.
struct Batch {
    std::string blob;                 // lines back to back
    std::vector<std::uint32_t> ends;  // exclusive end offset of each line
    const std::string* file = nullptr;
    std::uint64_t first_line = 0;
};

class BatchQueue {
public:
    explicit BatchQueue(std::size_t capacity) : capacity_(capacity) {}

    void push(Batch&& b) {
        std::unique_lock lock(mu_);
        not_full_.wait(lock, [&] { return queue_.size() < capacity_; });
        queue_.push_back(std::move(b));
        not_empty_.notify_one();
    }

    bool pop(Batch& out) {
        std::unique_lock lock(mu_);
        not_empty_.wait(lock, [&] { return !queue_.empty() || done_; });
        if (queue_.empty()) return false;
        out = std::move(queue_.front());
        queue_.pop_front();
        not_full_.notify_one();
        return true;
    }

    void close() {
        std::lock_guard lock(mu_);
        done_ = true;
        not_empty_.notify_all();
    }

private:
    std::mutex mu_;
    std::condition_variable not_empty_;
    std::condition_variable not_full_;
    std::deque<Batch> queue_;
    std::size_t capacity_;
    bool done_ = false;
};

constexpr std::size_t kBatchLines = 256;

// Streams files into the queue; returns bytes read. Exceptions are captured
// by the caller through the returned exception_ptr.
void reader_loop(const std::vector<std::string>& files, BatchQueue& queue,
                 std::uint64_t& bytes, std::exception_ptr& error) {
    try {
        for (const std::string& path : files) {
            LineReader reader(path);
            Batch batch;
            batch.file = &path;
            batch.first_line = 1;
            std::string_view line;
            while (reader.next_line(line)) {
                batch.blob.append(line);
                batch.ends.push_back(static_cast<std::uint32_t>(batch.blob.size()));
                if (batch.ends.size() >= kBatchLines) {
                    std::uint64_t next_first = reader.line_number() + 1;
                    queue.push(std::move(batch));
                    batch = Batch{};
                    batch.file = &path;
                    batch.first_line = next_first;
                }
            }
            if (!batch.ends.empty()) queue.push(std::move(batch));
            bytes += reader.bytes_read();
        }
    } catch (...) {
        error = std::current_exception();
    }
    queue.close();
}

} // namespace

CountTable scan_corpus(const Matcher& matcher, const PhraseSet& set,
                       const std::vector<std::string>& files,
                       const ScanOptions& options, ScanStats* stats) {
    auto start = std::chrono::steady_clock::now();
    unsigned shards = std::max(1u, options.shards);

    ScanContext ctx{&matcher, options.mode};
    std::vector<WorkerCounts> workers(shards);
    BatchQueue queue(static_cast<std::size_t>(shards) * 4);

    std::mutex sample_mu;
    std::vector<std::string> samples;

    auto worker_fn = [&](unsigned w) {
        WorkerCounts& wc = workers[w];
        DocScan scratch;
        Document doc;
        std::string text_scratch;
        std::vector<std::string_view> token_scratch;
        std::string error;
        Batch batch;
        while (queue.pop(batch)) {
            std::uint32_t begin = 0;
            for (std::size_t i = 0; i < batch.ends.size(); ++i) {
                std::string_view line(batch.blob.data() + begin,
                                      batch.ends[i] - begin);
                begin = batch.ends[i];
                if (line.empty()) continue;
                if (!parse_record(line, doc, error)) {
                    ++wc.skipped;
                    std::lock_guard lock(sample_mu);
                    if (samples.size() < 5)
                        samples.push_back(*batch.file + ":" +
                                          std::to_string(batch.first_line + i) +
                                          ": " + error);
                    continue;
                }
                scan_one(ctx, doc, wc, scratch, text_scratch, token_scratch);
            }
        }
    };

    std::uint64_t bytes = 0;
    std::exception_ptr reader_error;
    std::thread reader([&] { reader_loop(files, queue, bytes, reader_error); });
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < shards; ++w)
        pool.emplace_back(worker_fn, w);
    reader.join();
    for (auto& t : pool) t.join();
    if (reader_error) std::rethrow_exception(reader_error);

    CountTable table = finalize(workers, set, options.mode);

    if (stats) {
        for (const WorkerCounts& wc : workers) {
            stats->documents += wc.documents;
            stats->posts += wc.posts;
            stats->comments += wc.comments;
            stats->skipped += wc.skipped;
            stats->tokens += wc.tokens;
        }
        stats->bytes = bytes;
        stats->skip_samples = std::move(samples);
        stats->elapsed_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                .count();
    }
    return table;
}

CountTable scan_documents(const Matcher& matcher, const PhraseSet& set,
                          std::span<const Document> docs, CountMode mode) {
    ScanContext ctx{&matcher, mode};
    std::vector<WorkerCounts> workers(1);
    DocScan scratch;
    std::string text_scratch;
    std::vector<std::string_view> token_scratch;
    for (const Document& doc : docs)
        scan_one(ctx, doc, workers[0], scratch, text_scratch, token_scratch);
    return finalize(workers, set, mode);
}

std::vector<std::pair<std::string, std::uint64_t>> count_vocabulary(
    const std::vector<std::string>& files, unsigned shards,
    std::uint64_t* skipped) {
    shards = std::max(1u, shards);
    std::vector<std::unordered_map<std::string, std::uint64_t>> maps(shards);
    std::vector<std::uint64_t> skips(shards, 0);
    BatchQueue queue(static_cast<std::size_t>(shards) * 4);

    auto worker_fn = [&](unsigned w) {
        auto& counts = maps[w];
        Document doc;
        std::string error;
        std::string text_scratch;
        std::vector<std::string_view> token_scratch;
        Batch batch;
        while (queue.pop(batch)) {
            std::uint32_t begin = 0;
            for (std::size_t i = 0; i < batch.ends.size(); ++i) {
                std::string_view line(batch.blob.data() + begin,
                                      batch.ends[i] - begin);
                begin = batch.ends[i];
                if (line.empty()) continue;
                if (!parse_record(line, doc, error)) {
                    ++skips[w];
                    continue;
                }
                text_scratch.clear();
                token_scratch.clear();
                tokenize_into(doc.text, text_scratch, token_scratch);
                for (std::string_view tok : token_scratch) {
                    auto it = counts.find(std::string(tok));
                    if (it == counts.end())
                        counts.emplace(std::string(tok), 1);
                    else
                        ++it->second;
                }
            }
        }
    };

    std::uint64_t bytes = 0;
    std::exception_ptr reader_error;
    std::thread reader([&] { reader_loop(files, queue, bytes, reader_error); });
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < shards; ++w)
        pool.emplace_back(worker_fn, w);
    reader.join();
    for (auto& t : pool) t.join();
    if (reader_error) std::rethrow_exception(reader_error);

    std::unordered_map<std::string, std::uint64_t> total;
    for (auto& m : maps)
        for (auto& [token, count] : m) total[token] += count;
    std::vector<std::pair<std::string, std::uint64_t>> vocab(total.begin(),
                                                             total.end());
    std::sort(vocab.begin(), vocab.end());
    if (skipped) {
        *skipped = 0;
        for (std::uint64_t s : skips) *skipped += s;
    }
    return vocab;
}

} // namespace meco
