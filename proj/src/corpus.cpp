#include "corpus.hpp"

#include <algorithm>
#include <map>

#include <nlohmann/json.hpp>

namespace meco {

void tokenize_into(std::string_view text, std::string& scratch,
                   std::vector<std::string_view>& out) {
    std::size_t base = scratch.size();
    scratch.reserve(base + text.size());
    for (unsigned char c : text)
        scratch.push_back((c >= 'A' && c <= 'Z') ? char(c - 'A' + 'a') : char(c));

    const char* data = scratch.data() + base;
    std::size_t n = text.size();
    std::size_t i = 0;
    while (i < n) {
        while (i < n && !is_token_byte(static_cast<unsigned char>(data[i]))) ++i;
        std::size_t start = i;
        while (i < n && is_token_byte(static_cast<unsigned char>(data[i]))) ++i;
        if (i > start)
            out.emplace_back(data + start, i - start);
    }
}

std::vector<std::string> tokenize(std::string_view text) {
    std::string scratch;
    std::vector<std::string_view> views;
    tokenize_into(text, scratch, views);
    return {views.begin(), views.end()};
}

namespace {

bool has_whitespace(std::string_view s) {
    return s.find_first_of(" \t\r\n\f\v") != std::string_view::npos;
}

void ascii_lower_inplace(std::string& s) {
    for (char& c : s)
        if (c >= 'A' && c <= 'Z') c = char(c - 'A' + 'a');
}

const nlohmann::json* find_string(const nlohmann::json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_string()) return nullptr;
    return &*it;
}

} // namespace

bool parse_record(std::string_view line, Document& out, std::string& error) {
    nlohmann::json obj =
        nlohmann::json::parse(line.begin(), line.end(), nullptr, false);
    if (obj.is_discarded() || !obj.is_object()) {
        error = "malformed JSON";
        return false;
    }

    auto created = obj.find("created_utc");
    if (created == obj.end() ||
        !(created->is_number_integer() || created->is_number_unsigned())) {
        error = "missing or non-integer created_utc";
        return false;
    }
    out.created_utc = created->get<std::int64_t>();
    if (out.created_utc < 0) {
        error = "created_utc before epoch";
        return false;
    }

    const nlohmann::json* subreddit = find_string(obj, "subreddit");
    if (!subreddit || subreddit->get_ref<const std::string&>().empty()) {
        error = "missing community (subreddit)";
        return false;
    }
    out.community = subreddit->get<std::string>();
    if (has_whitespace(out.community)) {
        error = "community contains whitespace";
        return false;
    }
    ascii_lower_inplace(out.community);

    const nlohmann::json* kind = find_string(obj, "kind");
    if (!kind) {
        error = "missing kind";
        return false;
    }
    const std::string& kind_s = kind->get_ref<const std::string&>();
    if (kind_s == "post") {
        out.kind = DocKind::post;
    } else if (kind_s == "comment") {
        out.kind = DocKind::comment;
    } else {
        error = "kind must be \"post\" or \"comment\"";
        return false;
    }

    const nlohmann::json* id = find_string(obj, "id");
    out.id = id ? id->get<std::string>() : std::string();

    out.text.clear();
    if (out.kind == DocKind::post) {
        if (const auto* title = find_string(obj, "title"))
            out.text = title->get<std::string>();
        out.text += ' ';
        if (const auto* selftext = find_string(obj, "selftext"))
            out.text += selftext->get<std::string>();
    } else {
        if (const auto* body = find_string(obj, "body"))
            out.text = body->get<std::string>();
    }
    return true;
}

std::vector<MonthActivity> corpus_stats(std::span<const Document> docs) {
    std::map<MonthIndex, MonthActivity> by_month;
    for (const Document& d : docs) {
        MonthIndex m = month_of_day(d.day());
        MonthActivity& row = by_month[m];
        row.month = m;
        if (d.kind == DocKind::post)
            ++row.posts;
        else
            ++row.comments;
    }
    std::vector<MonthActivity> rows;
    rows.reserve(by_month.size());
    for (auto& [m, row] : by_month) {
        row.total = row.posts + row.comments;
        rows.push_back(row);
    }
    return rows;
}

std::vector<MonthActivity> corpus_stats(std::span<const DayDocCount> day_counts) {
    std::map<MonthIndex, MonthActivity> by_month;
    for (const DayDocCount& d : day_counts) {
        MonthIndex m = month_of_day(d.day);
        MonthActivity& row = by_month[m];
        row.month = m;
        row.posts += d.posts;
        row.comments += d.comments;
    }
    std::vector<MonthActivity> rows;
    rows.reserve(by_month.size());
    for (auto& [m, row] : by_month) {
        row.total = row.posts + row.comments;
        rows.push_back(row);
    }
    return rows;
}

} // namespace meco
