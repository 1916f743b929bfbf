#include "counts.hpp"

#include <algorithm>
#include <cstring>
#include <tuple>
#include <unordered_map>

#include "error.hpp"
#include "io.hpp"

namespace meco {

namespace {

constexpr char kMagic[4] = {'M', 'E', 'C', '1'};
constexpr std::uint32_t kFormatVersion = 1;

struct Writer {
    std::string buf;

    void u8(std::uint8_t v) { buf.push_back(static_cast<char>(v)); }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    }
    void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    }
    void str(const std::string& s) {
        u32(static_cast<std::uint32_t>(s.size()));
        buf.append(s);
    }
};

struct Reader {
    const std::string& buf;
    std::size_t pos = 0;
    const std::string& path;

    void need(std::size_t n) {
        if (pos + n > buf.size())
            fail(ErrorCode::parse, "truncated count cache: " + path);
    }
    std::uint8_t u8() {
        need(1);
        return static_cast<std::uint8_t>(buf[pos++]);
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i)
            v |= static_cast<std::uint32_t>(static_cast<unsigned char>(buf[pos++])) << (8 * i);
        return v;
    }
    std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i)
            v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[pos++])) << (8 * i);
        return v;
    }
    std::string str() {
        std::uint32_t n = u32();
        need(n);
        std::string s = buf.substr(pos, n);
        pos += n;
        return s;
    }
};

} // namespace

bool CountTable::day_span(Day& min_day, Day& max_day) const {
    bool any = false;
    auto see = [&](Day d) {
        if (!any) {
            min_day = max_day = d;
            any = true;
        } else {
            min_day = std::min(min_day, d);
            max_day = std::max(max_day, d);
        }
    };
    for (const auto& r : meme_counts) see(r.day);
    for (const auto& r : background_counts) see(r.day);
    for (const auto& r : doc_counts) see(r.day);
    return any;
}

CountTable merge(const CountTable& a, const CountTable& b) {
    if (a.phrase_labels != b.phrase_labels)
        fail(ErrorCode::invalid_argument, "merge: phrase lists differ");
    if (a.background_words != b.background_words)
        fail(ErrorCode::invalid_argument, "merge: background word lists differ");
    if (a.mode != b.mode)
        fail(ErrorCode::invalid_argument, "merge: count modes differ");

    CountTable out;
    out.phrase_labels = a.phrase_labels;
    out.background_words = a.background_words;
    out.mode = a.mode;

    // Union of community names; remap each side's ids.
    out.communities = a.communities;
    out.communities.insert(out.communities.end(), b.communities.begin(),
                           b.communities.end());
    std::sort(out.communities.begin(), out.communities.end());
    out.communities.erase(
        std::unique(out.communities.begin(), out.communities.end()),
        out.communities.end());

    auto remap = [&](const CountTable& t) {
        std::vector<std::uint32_t> map(t.communities.size());
        for (std::size_t i = 0; i < t.communities.size(); ++i) {
            auto it = std::lower_bound(out.communities.begin(),
                                       out.communities.end(), t.communities[i]);
            map[i] = static_cast<std::uint32_t>(it - out.communities.begin());
        }
        return map;
    };
    std::vector<std::uint32_t> map_a = remap(a);
    std::vector<std::uint32_t> map_b = remap(b);

    out.meme_counts.reserve(a.meme_counts.size() + b.meme_counts.size());
    for (const auto& r : a.meme_counts)
        out.meme_counts.push_back({r.phrase, r.day, map_a[r.community], r.count});
    for (const auto& r : b.meme_counts)
        out.meme_counts.push_back({r.phrase, r.day, map_b[r.community], r.count});
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

    out.background_counts.reserve(a.background_counts.size() +
                                  b.background_counts.size());
    out.background_counts = a.background_counts;
    out.background_counts.insert(out.background_counts.end(),
                                 b.background_counts.begin(),
                                 b.background_counts.end());
    std::sort(out.background_counts.begin(), out.background_counts.end(),
              [](const BackgroundCountRow& x, const BackgroundCountRow& y) {
                  return std::tie(x.word, x.day) < std::tie(y.word, y.day);
              });
    w = 0;
    for (std::size_t i = 0; i < out.background_counts.size(); ++i) {
        if (w > 0 && out.background_counts[w - 1].word == out.background_counts[i].word &&
            out.background_counts[w - 1].day == out.background_counts[i].day) {
            out.background_counts[w - 1].count += out.background_counts[i].count;
        } else {
            out.background_counts[w++] = out.background_counts[i];
        }
    }
    out.background_counts.resize(w);

    out.doc_counts = a.doc_counts;
    out.doc_counts.insert(out.doc_counts.end(), b.doc_counts.begin(),
                          b.doc_counts.end());
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

void write_count_cache(const CountTable& table, const std::string& path) {
    Writer w;
    w.buf.append(kMagic, 4);
    w.u32(kFormatVersion);
    w.u8(static_cast<std::uint8_t>(table.mode));

    w.u32(static_cast<std::uint32_t>(table.phrase_labels.size()));
    for (const auto& s : table.phrase_labels) w.str(s);
    w.u32(static_cast<std::uint32_t>(table.background_words.size()));
    for (const auto& s : table.background_words) w.str(s);
    w.u32(static_cast<std::uint32_t>(table.communities.size()));
    for (const auto& s : table.communities) w.str(s);

    w.u64(table.doc_counts.size());
    for (const auto& r : table.doc_counts) {
        w.i32(r.day);
        w.u64(r.posts);
        w.u64(r.comments);
    }
    w.u64(table.meme_counts.size());
    for (const auto& r : table.meme_counts) {
        w.u32(r.phrase);
        w.i32(r.day);
        w.u32(r.community);
        w.u64(r.count);
    }
    w.u64(table.background_counts.size());
    for (const auto& r : table.background_counts) {
        w.u32(r.word);
        w.i32(r.day);
        w.u64(r.count);
    }
    write_text_file(path, w.buf);
}

CountTable read_count_cache(const std::string& path) {
    std::string data = read_text_file(path);
    if (data.size() < 8 || std::memcmp(data.data(), kMagic, 4) != 0)
        fail(ErrorCode::version_mismatch,
             "not a MEC1 count cache (re-scan required): " + path);
    Reader r{data, 4, path};
    std::uint32_t version = r.u32();
    if (version != kFormatVersion)
        fail(ErrorCode::version_mismatch,
             "count cache version " + std::to_string(version) +
                 " unsupported (re-scan required): " + path);

    CountTable t;
    t.mode = static_cast<CountMode>(r.u8());

    t.phrase_labels.resize(r.u32());
    for (auto& s : t.phrase_labels) s = r.str();
    t.background_words.resize(r.u32());
    for (auto& s : t.background_words) s = r.str();
    t.communities.resize(r.u32());
    for (auto& s : t.communities) s = r.str();

    t.doc_counts.resize(r.u64());
    for (auto& row : t.doc_counts) {
        row.day = r.i32();
        row.posts = r.u64();
        row.comments = r.u64();
    }
    t.meme_counts.resize(r.u64());
    for (auto& row : t.meme_counts) {
        row.phrase = r.u32();
        row.day = r.i32();
        row.community = r.u32();
        row.count = r.u64();
    }
    t.background_counts.resize(r.u64());
    for (auto& row : t.background_counts) {
        row.word = r.u32();
        row.day = r.i32();
        row.count = r.u64();
    }
    if (r.pos != data.size())
        fail(ErrorCode::parse, "trailing bytes in count cache: " + path);
    return t;
}

void write_counts_csv(const CountTable& table, const std::string& meme_path,
                      const std::string& background_path) {
    CsvWriter memes(meme_path);
    memes.field("phrase_id").field("day").field("community").field("count");
    memes.end_row();
    for (const auto& r : table.meme_counts) {
        memes.field(r.phrase)
            .field(r.day)
            .field(table.communities[r.community])
            .field(r.count);
        memes.end_row();
    }

    CsvWriter bg(background_path);
    bg.field("background_word").field("day").field("count");
    bg.end_row();
    for (const auto& r : table.background_counts) {
        bg.field(table.background_words[r.word]).field(r.day).field(r.count);
        bg.end_row();
    }
}

} // namespace meco
