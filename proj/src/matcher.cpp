#include "matcher.hpp"

#include <algorithm>
#include <cstring>
#include <map>
#include <queue>

#include "error.hpp"

namespace meco {

namespace {

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

} // namespace

TokenInterner::TokenInterner() {
    offsets_.push_back(0);
    rehash(1024);
}

void TokenInterner::rehash(std::size_t slots) {
    table_.assign(slots, 0);
    mask_ = slots - 1;
    for (std::uint32_t id = 0; id < size(); ++id) {
        std::size_t pos = fnv1a(token(id)) & mask_;
        while (table_[pos] != 0) pos = (pos + 1) & mask_;
        table_[pos] = id + 1;
    }
}

std::uint32_t TokenInterner::intern(std::string_view tok) {
    std::uint32_t existing = lookup(tok);
    if (existing != kNoId) return existing;
    if ((static_cast<std::size_t>(size()) + 1) * 2 >= table_.size())
        rehash(table_.size() * 2);

    std::uint32_t id = size();
    arena_.insert(arena_.end(), tok.begin(), tok.end());
    offsets_.push_back(static_cast<std::uint32_t>(arena_.size()));

    std::size_t pos = fnv1a(tok) & mask_;
    while (table_[pos] != 0) pos = (pos + 1) & mask_;
    table_[pos] = id + 1;
    return id;
}

std::uint32_t TokenInterner::lookup(std::string_view tok) const {
    std::size_t pos = fnv1a(tok) & mask_;
    while (true) {
        std::uint32_t slot = table_[pos];
        if (slot == 0) return kNoId;
        if (token(slot - 1) == tok) return slot - 1;
        pos = (pos + 1) & mask_;
    }
}

std::string_view TokenInterner::token(std::uint32_t id) const {
    return std::string_view(arena_.data() + offsets_[id],
                            offsets_[id + 1] - offsets_[id]);
}

Matcher::Matcher(const PhraseSet& set) {
    if (set.phrases.size() >= (1u << 20))
        fail(ErrorCode::invalid_argument, "phrase set too large (max 2^20)");
    n_phrases_ = static_cast<std::uint32_t>(set.phrases.size());
    n_background_ = static_cast<std::uint32_t>(set.background.size());

    // Build the trie with temporary per-node edge maps, then flatten.
    std::vector<std::map<std::uint32_t, std::uint32_t>> trie(1);
    std::vector<std::uint32_t> phrase_at(1, kNoId);

    for (const Phrase& p : set.phrases) {
        std::uint32_t node = 0;
        for (const std::string& tok : p.tokens) {
            std::uint32_t t = interner_.intern(tok);
            auto [it, inserted] = trie[node].try_emplace(
                t, static_cast<std::uint32_t>(trie.size()));
            if (inserted) {
                trie.emplace_back();
                phrase_at.push_back(kNoId);
            }
            node = it->second;
        }
        // Duplicate sequences were removed at load; keep the first id if not.
        if (phrase_at[node] == kNoId) phrase_at[node] = p.phrase_id;
    }

    background_of_.clear();
    for (std::uint32_t w = 0; w < n_background_; ++w) {
        std::uint32_t t = interner_.intern(set.background[w]);
        if (background_of_.size() <= t) background_of_.resize(t + 1, kNoId);
        background_of_[t] = w;
    }
    background_of_.resize(interner_.size(), kNoId);

    nodes_.assign(trie.size(), Node{});
    for (std::size_t n = 0; n < trie.size(); ++n) {
        nodes_[n].phrase = phrase_at[n];
        nodes_[n].edge_begin = static_cast<std::uint32_t>(edges_.size());
        for (auto [tok, next] : trie[n])
            edges_.push_back({tok, next});
        nodes_[n].edge_end = static_cast<std::uint32_t>(edges_.size());
    }

    // Breadth-first failure links; output links chain to the nearest proper
    // suffix that ends a phrase.
    std::queue<std::uint32_t> bfs;
    for (auto [tok, next] : trie[0]) {
        nodes_[next].fail = 0;
        bfs.push(next);
    }
    while (!bfs.empty()) {
        std::uint32_t n = bfs.front();
        bfs.pop();
        const Node& node = nodes_[n];
        nodes_[n].output_link = nodes_[node.fail].phrase != kNoId
                                    ? node.fail
                                    : nodes_[node.fail].output_link;
        for (std::uint32_t e = node.edge_begin; e < node.edge_end; ++e) {
            std::uint32_t tok = edges_[e].token;
            std::uint32_t child = edges_[e].next;
            std::uint32_t f = node.fail;
            std::uint32_t via = kNoId;
            while (true) {
                via = find_edge(f, tok);
                if (via != kNoId || f == 0) break;
                f = nodes_[f].fail;
            }
            nodes_[child].fail = (via != kNoId && via != child) ? via : 0;
            bfs.push(child);
        }
    }

    root_next_.assign(interner_.size(), 0);
    for (auto [tok, next] : trie[0])
        root_next_[tok] = next;
}

std::uint32_t Matcher::find_edge(std::uint32_t node, std::uint32_t token) const {
    const Node& n = nodes_[node];
    const Edge* first = edges_.data() + n.edge_begin;
    const Edge* last = edges_.data() + n.edge_end;
    const Edge* it = std::lower_bound(
        first, last, token,
        [](const Edge& e, std::uint32_t t) { return e.token < t; });
    if (it != last && it->token == token) return it->next;
    return kNoId;
}

void Matcher::scan(const std::vector<std::string_view>& tokens,
                   DocScan& out) const {
    out.phrases.clear();
    out.background.clear();
    if (out.phrase_slot.size() < n_phrases_)
        out.phrase_slot.assign(n_phrases_, 0);
    if (out.background_slot.size() < n_background_)
        out.background_slot.assign(n_background_, 0);

    auto count_phrase = [&](std::uint32_t p) {
        std::uint32_t& slot = out.phrase_slot[p];
        if (slot == 0) {
            out.phrases.emplace_back(p, 1);
            slot = static_cast<std::uint32_t>(out.phrases.size());
        } else {
            ++out.phrases[slot - 1].second;
        }
    };

    std::uint32_t state = 0;
    for (std::string_view tok : tokens) {
        std::uint32_t id = interner_.lookup(tok);
        if (id == kNoId) {
            state = 0;
            continue;
        }
        std::uint32_t bg = background_of_[id];
        if (bg != kNoId) {
            std::uint32_t& slot = out.background_slot[bg];
            if (slot == 0) {
                out.background.emplace_back(bg, 1);
                slot = static_cast<std::uint32_t>(out.background.size());
            } else {
                ++out.background[slot - 1].second;
            }
        }

        if (state == 0) {
            state = root_next_[id];
        } else {
            while (true) {
                std::uint32_t next = find_edge(state, id);
                if (next != kNoId) {
                    state = next;
                    break;
                }
                state = nodes_[state].fail;
                if (state == 0) {
                    state = root_next_[id];
                    break;
                }
            }
        }

        const Node& n = nodes_[state];
        if (n.phrase != kNoId) count_phrase(n.phrase);
        for (std::uint32_t o = n.output_link; o != kNoId; o = nodes_[o].output_link)
            count_phrase(nodes_[o].phrase);
    }

    for (auto& [p, c] : out.phrases) out.phrase_slot[p] = 0;
    for (auto& [w, c] : out.background) out.background_slot[w] = 0;
}

} // namespace meco
