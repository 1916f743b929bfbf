#include "synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <nlohmann/json.hpp>

#include "error.hpp"
#include "phraseset.hpp"
#include "rng.hpp"

namespace meco {

namespace {

using nlohmann::json;

[[noreturn]] void spec_fail(const std::string& path, const std::string& why) {
    fail(ErrorCode::invalid_argument, "synth spec: " + path + ": " + why);
}

double get_number(const json& obj, const std::string& path, const char* key,
                  bool required, double fallback = 0.0) {
    auto it = obj.find(key);
    if (it == obj.end()) {
        if (required) spec_fail(path + "." + key, "missing");
        return fallback;
    }
    if (!it->is_number()) spec_fail(path + "." + key, "must be a number");
    return it->get<double>();
}

std::string get_string(const json& obj, const std::string& path, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) spec_fail(path + "." + key, "missing");
    if (!it->is_string()) spec_fail(path + "." + key, "must be a string");
    return it->get<std::string>();
}

bool is_background_name(std::string_view token) {
    if (token.size() < 2 || token[0] != 'w') return false;
    for (std::size_t i = 1; i < token.size(); ++i)
        if (token[i] < '0' || token[i] > '9') return false;
    return true;
}

bool contains_subsequence(const std::vector<std::string>& haystack,
                          const std::vector<std::string>& needle) {
    if (needle.size() > haystack.size()) return false;
    for (std::size_t i = 0; i + needle.size() <= haystack.size(); ++i) {
        bool match = true;
        for (std::size_t j = 0; j < needle.size(); ++j) {
            if (haystack[i + j] != needle[j]) {
                match = false;
                break;
            }
        }
        if (match) return true;
    }
    return false;
}

} // namespace

std::string background_word_name(std::size_t index) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "w%04zu", index);
    return buf;
}

PlantSpec parse_plant_spec(const std::string& json_text) {
    json root = json::parse(json_text, nullptr, false);
    if (root.is_discarded() || !root.is_object())
        fail(ErrorCode::parse, "synth spec: not a JSON object");

    PlantSpec spec;
    spec.seed = static_cast<std::uint64_t>(
        get_number(root, "$", "seed", false, 0.0));

    auto window_it = root.find("window");
    if (window_it == root.end() || !window_it->is_object())
        spec_fail("$.window", "missing object");
    spec.window.first = parse_day(get_string(*window_it, "$.window", "first"));
    spec.window.last = parse_day(get_string(*window_it, "$.window", "last"));

    auto communities_it = root.find("communities");
    if (communities_it == root.end() || !communities_it->is_array())
        spec_fail("$.communities", "missing array");
    std::size_t ci = 0;
    for (const json& c : *communities_it) {
        std::string path = "$.communities[" + std::to_string(ci++) + "]";
        if (!c.is_object()) spec_fail(path, "must be an object");
        CommunitySpec cs;
        cs.name = get_string(c, path, "name");
        cs.docs_per_day = get_number(c, path, "docs_per_day", true);
        cs.post_fraction = get_number(c, path, "post_fraction", false, 0.1);
        spec.communities.push_back(std::move(cs));
    }

    auto bg_it = root.find("background");
    if (bg_it == root.end() || !bg_it->is_object())
        spec_fail("$.background", "missing object");
    spec.growth_factor =
        get_number(*bg_it, "$.background", "growth_factor", false, 1.0);
    if (auto rates = bg_it->find("word_rates"); rates != bg_it->end()) {
        if (!rates->is_array())
            spec_fail("$.background.word_rates", "must be an array");
        for (const json& r : *rates) {
            if (!r.is_number())
                spec_fail("$.background.word_rates", "entries must be numbers");
            spec.background_rates.push_back(r.get<double>());
        }
    } else {
        std::size_t vocab = static_cast<std::size_t>(
            get_number(*bg_it, "$.background", "vocab_size", true));
        double rate = get_number(*bg_it, "$.background", "word_rate", true);
        spec.background_rates.assign(vocab, rate);
    }

    if (auto plants_it = root.find("plants"); plants_it != root.end()) {
        if (!plants_it->is_array()) spec_fail("$.plants", "must be an array");
        std::size_t pi = 0;
        for (const json& p : *plants_it) {
            std::string path = "$.plants[" + std::to_string(pi++) + "]";
            if (!p.is_object()) spec_fail(path, "must be an object");
            PlantedPhrase plant;
            plant.phrase = get_string(p, path, "phrase");

            auto profile_it = p.find("profile");
            if (profile_it == p.end() || !profile_it->is_object())
                spec_fail(path + ".profile", "missing object");
            std::string ppath = path + ".profile";
            std::string shape = get_string(*profile_it, ppath, "shape");
            ProfileSpec& prof = plant.profile;
            if (shape == "constant") {
                prof.shape = ProfileSpec::Shape::constant;
                prof.rate = get_number(*profile_it, ppath, "rate", true);
            } else if (shape == "linear") {
                prof.shape = ProfileSpec::Shape::linear;
                prof.start_rate = get_number(*profile_it, ppath, "start_rate", true);
                prof.end_rate = get_number(*profile_it, ppath, "end_rate", true);
            } else if (shape == "trapezoid") {
                prof.shape = ProfileSpec::Shape::trapezoid;
                prof.start = static_cast<std::int32_t>(
                    get_number(*profile_it, ppath, "start", true));
                prof.rise = static_cast<std::int32_t>(
                    get_number(*profile_it, ppath, "rise", true));
                prof.plateau = static_cast<std::int32_t>(
                    get_number(*profile_it, ppath, "plateau", true));
                prof.fall = static_cast<std::int32_t>(
                    get_number(*profile_it, ppath, "fall", true));
                prof.peak_rate = get_number(*profile_it, ppath, "peak_rate", true);
            } else if (shape == "proportional") {
                prof.shape = ProfileSpec::Shape::proportional;
                prof.p = get_number(*profile_it, ppath, "p", true);
            } else {
                spec_fail(ppath + ".shape", "unknown shape: " + shape);
            }

            if (auto comm = p.find("communities"); comm != p.end()) {
                if (!comm->is_array())
                    spec_fail(path + ".communities", "must be an array");
                for (const json& name : *comm) {
                    if (!name.is_string())
                        spec_fail(path + ".communities", "entries must be strings");
                    plant.communities.push_back(name.get<std::string>());
                }
            }
            spec.plants.push_back(std::move(plant));
        }
    }
    validate_plant_spec(spec);
    return spec;
}

void validate_plant_spec(PlantSpec& spec) {
    if (spec.window.last < spec.window.first)
        spec_fail("$.window", "last day before first day");
    if (spec.communities.empty())
        spec_fail("$.communities", "at least one community required");
    for (std::size_t i = 0; i < spec.communities.size(); ++i) {
        const CommunitySpec& c = spec.communities[i];
        std::string path = "$.communities[" + std::to_string(i) + "]";
        if (c.name.empty() ||
            c.name.find_first_of(" \t\r\n") != std::string::npos)
            spec_fail(path + ".name", "must be non-empty without whitespace");
        if (c.docs_per_day < 0)
            spec_fail(path + ".docs_per_day", "must be >= 0");
        if (c.post_fraction < 0 || c.post_fraction > 1)
            spec_fail(path + ".post_fraction", "must be in [0,1]");
    }
    if (spec.background_rates.empty())
        spec_fail("$.background", "vocabulary must be non-empty");
    for (std::size_t i = 0; i < spec.background_rates.size(); ++i)
        if (spec.background_rates[i] < 0)
            spec_fail("$.background.word_rates[" + std::to_string(i) + "]",
                      "must be >= 0");
    if (spec.growth_factor <= 0)
        spec_fail("$.background.growth_factor", "must be > 0");

    std::int64_t window_len =
        static_cast<std::int64_t>(spec.window.last) - spec.window.first + 1;
    for (std::size_t i = 0; i < spec.plants.size(); ++i) {
        PlantedPhrase& plant = spec.plants[i];
        std::string path = "$.plants[" + std::to_string(i) + "]";
        plant.tokens = tokenize(plant.phrase);
        if (plant.tokens.empty())
            spec_fail(path + ".phrase", "tokenizes to zero tokens");
        if (plant.tokens.size() > kMaxPhraseTokens)
            spec_fail(path + ".phrase", "longer than 8 tokens");
        for (const std::string& tok : plant.tokens)
            if (is_background_name(tok))
                spec_fail(path + ".phrase",
                          "token '" + tok + "' collides with the background namespace");

        const ProfileSpec& prof = plant.profile;
        switch (prof.shape) {
        case ProfileSpec::Shape::constant:
            if (prof.rate < 0) spec_fail(path + ".profile.rate", "must be >= 0");
            break;
        case ProfileSpec::Shape::linear:
            if (prof.start_rate < 0 || prof.end_rate < 0)
                spec_fail(path + ".profile", "rates must be >= 0");
            break;
        case ProfileSpec::Shape::trapezoid:
            if (prof.peak_rate < 0)
                spec_fail(path + ".profile.peak_rate", "must be >= 0");
            if (prof.start < 0 || prof.rise < 0 || prof.plateau < 0 || prof.fall < 0)
                spec_fail(path + ".profile", "trapezoid lengths must be >= 0");
            if (prof.start + prof.rise + prof.plateau + prof.fall > window_len)
                spec_fail(path + ".profile", "trapezoid extends past the window");
            break;
        case ProfileSpec::Shape::proportional:
            if (!(prof.p > 0 && prof.p < 1))
                spec_fail(path + ".profile.p", "must be in (0,1)");
            break;
        }

        for (const std::string& name : plant.communities) {
            bool known = std::any_of(
                spec.communities.begin(), spec.communities.end(),
                [&](const CommunitySpec& c) { return c.name == name; });
            if (!known)
                spec_fail(path + ".communities", "unknown community: " + name);
        }
    }
    for (std::size_t i = 0; i < spec.plants.size(); ++i) {
        for (std::size_t j = 0; j < spec.plants.size(); ++j) {
            if (i == j) continue;
            if (contains_subsequence(spec.plants[i].tokens, spec.plants[j].tokens))
                spec_fail("$.plants[" + std::to_string(j) + "].phrase",
                          "contained in plants[" + std::to_string(i) +
                              "]; nested plants would break exact ground truth");
        }
    }
}

namespace {

double profile_rate(const ProfileSpec& prof, Day day, DayWindow window) {
    std::int64_t offset = static_cast<std::int64_t>(day) - window.first;
    std::int64_t span = static_cast<std::int64_t>(window.last) - window.first;
    switch (prof.shape) {
    case ProfileSpec::Shape::constant:
        return prof.rate;
    case ProfileSpec::Shape::linear: {
        double frac = span > 0 ? static_cast<double>(offset) / span : 0.0;
        return prof.start_rate + (prof.end_rate - prof.start_rate) * frac;
    }
    case ProfileSpec::Shape::trapezoid: {
        std::int64_t o = offset - prof.start;
        if (o < 0) return 0.0;
        if (o < prof.rise)
            return prof.peak_rate * static_cast<double>(o + 1) / (prof.rise + 1);
        o -= prof.rise;
        if (o < prof.plateau) return prof.peak_rate;
        o -= prof.plateau;
        if (o < prof.fall)
            return prof.peak_rate * static_cast<double>(prof.fall - o) /
                   (prof.fall + 1);
        return 0.0;
    }
    case ProfileSpec::Shape::proportional:
        return 0.0; // handled separately against realized B(t)
    }
    return 0.0;
}

struct DocShell {
    std::uint32_t community = 0;
    DocKind kind = DocKind::comment;
    std::int64_t created_utc = 0;
    std::vector<std::uint32_t> bg_tokens;
    std::vector<std::uint32_t> plants;
};

void append_json_string(std::string& out, std::string_view s) {
    out += '"';
    for (char c : s) {
        switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\r': out += "\\r"; break;
        case '\t': out += "\\t"; break;
        default:
            if (static_cast<unsigned char>(c) < 0x20) {
                char buf[8];
                std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                out += buf;
            } else {
                out += c;
            }
        }
    }
    out += '"';
}

} // namespace

GroundTruth generate(const PlantSpec& spec,
                     const std::function<void(const SynthRecord&)>& sink) {
    GroundTruth truth;
    truth.words.reserve(spec.background_rates.size());
    for (std::size_t w = 0; w < spec.background_rates.size(); ++w)
        truth.words.push_back(background_word_name(w));
    truth.word_counts.resize(truth.words.size());
    for (const PlantedPhrase& p : spec.plants) truth.phrases.push_back(p.phrase);
    truth.phrase_counts.resize(spec.plants.size());

    // Per plant, the indices of allowed communities.
    std::vector<std::vector<std::uint32_t>> allowed(spec.plants.size());
    for (std::size_t p = 0; p < spec.plants.size(); ++p) {
        if (spec.plants[p].communities.empty()) {
            for (std::uint32_t c = 0; c < spec.communities.size(); ++c)
                allowed[p].push_back(c);
        } else {
            for (const std::string& name : spec.plants[p].communities)
                for (std::uint32_t c = 0; c < spec.communities.size(); ++c)
                    if (spec.communities[c].name == name)
                        allowed[p].push_back(c);
        }
    }

    Rng rng(spec.seed);
    std::uint64_t doc_counter = 0;
    std::vector<DocShell> docs;
    std::vector<std::vector<std::uint32_t>> docs_of_community(
        spec.communities.size());
    SynthRecord rec;

    std::int64_t span = static_cast<std::int64_t>(spec.window.last) -
                        spec.window.first;
    for (Day day = spec.window.first; day <= spec.window.last; ++day) {
        double frac = span > 0
                          ? static_cast<double>(day - spec.window.first) / span
                          : 0.0;
        double growth = std::pow(spec.growth_factor, frac);

        docs.clear();
        for (auto& v : docs_of_community) v.clear();
        for (std::uint32_t c = 0; c < spec.communities.size(); ++c) {
            std::uint64_t n_docs = rng.poisson(spec.communities[c].docs_per_day);
            for (std::uint64_t k = 0; k < n_docs; ++k) {
                DocShell shell;
                shell.community = c;
                shell.kind = rng.uniform() < spec.communities[c].post_fraction
                                 ? DocKind::post
                                 : DocKind::comment;
                shell.created_utc = static_cast<std::int64_t>(day) * kSecondsPerDay +
                                    static_cast<std::int64_t>(rng.uniform_below(kSecondsPerDay));
                docs_of_community[c].push_back(
                    static_cast<std::uint32_t>(docs.size()));
                docs.push_back(std::move(shell));
            }
        }

        auto carrier_doc = [&](std::uint32_t community) {
            DocShell shell;
            shell.community = community;
            shell.kind = DocKind::comment;
            shell.created_utc = static_cast<std::int64_t>(day) * kSecondsPerDay +
                                static_cast<std::int64_t>(rng.uniform_below(kSecondsPerDay));
            docs_of_community[community].push_back(
                static_cast<std::uint32_t>(docs.size()));
            docs.push_back(std::move(shell));
            return static_cast<std::uint32_t>(docs.size() - 1);
        };

        // Background word draws; counts are recorded when placed, and every
        // drawn occurrence is placed.
        std::uint64_t b_today = 0;
        for (std::size_t w = 0; w < spec.background_rates.size(); ++w) {
            std::uint64_t cnt = rng.poisson(spec.background_rates[w] * growth);
            if (cnt == 0) continue;
            if (docs.empty()) carrier_doc(0);
            b_today += cnt;
            truth.word_counts[w][day] += cnt;
            for (std::uint64_t k = 0; k < cnt; ++k) {
                std::uint32_t d = static_cast<std::uint32_t>(
                    rng.uniform_below(docs.size()));
                docs[d].bg_tokens.push_back(static_cast<std::uint32_t>(w));
            }
        }

        // Plant insertions.
        for (std::size_t p = 0; p < spec.plants.size(); ++p) {
            const ProfileSpec& prof = spec.plants[p].profile;
            std::uint64_t n_insert =
                prof.shape == ProfileSpec::Shape::proportional
                    ? rng.binomial(b_today, prof.p)
                    : rng.poisson(profile_rate(prof, day, spec.window));
            if (n_insert == 0) continue;

            std::uint64_t have = 0;
            for (std::uint32_t c : allowed[p]) have += docs_of_community[c].size();
            if (have == 0) carrier_doc(allowed[p].front());

            truth.phrase_counts[p][day] += n_insert;
            for (std::uint64_t k = 0; k < n_insert; ++k) {
                // Uniform over allowed docs via community-size weighting.
                std::uint64_t total = 0;
                for (std::uint32_t c : allowed[p])
                    total += docs_of_community[c].size();
                std::uint64_t pick = rng.uniform_below(total);
                for (std::uint32_t c : allowed[p]) {
                    if (pick < docs_of_community[c].size()) {
                        docs[docs_of_community[c][pick]].plants.push_back(
                            static_cast<std::uint32_t>(p));
                        break;
                    }
                    pick -= docs_of_community[c].size();
                }
            }
        }

        // Assemble and emit.
        for (DocShell& shell : docs) {
            std::size_t k = shell.plants.size();
            if (k > 0) {
                while (shell.bg_tokens.size() < k - 1) {
                    // Borrow separator tokens so planted phrases never touch.
                    std::uint32_t w = static_cast<std::uint32_t>(
                        rng.uniform_below(spec.background_rates.size()));
                    shell.bg_tokens.push_back(w);
                    truth.word_counts[w][day] += 1;
                }
            }
            rng.shuffle(shell.bg_tokens);

            std::string text;
            auto emit_word = [&](std::uint32_t w) {
                if (!text.empty()) text += ' ';
                text += truth.words[w];
            };
            auto emit_phrase = [&](std::uint32_t p) {
                for (const std::string& tok : spec.plants[p].tokens) {
                    if (!text.empty()) text += ' ';
                    text += tok;
                }
            };
            if (k == 0) {
                for (std::uint32_t w : shell.bg_tokens) emit_word(w);
            } else {
                std::size_t m = shell.bg_tokens.size();
                std::vector<std::size_t> gaps(k + 1, 0);
                for (std::size_t g = 1; g < k; ++g) gaps[g] = 1;
                std::size_t rem = m - (k - 1);
                for (std::size_t r = 0; r < rem; ++r)
                    ++gaps[rng.uniform_below(k + 1)];
                std::size_t next_bg = 0;
                for (std::size_t slot = 0; slot <= k; ++slot) {
                    for (std::size_t g = 0; g < gaps[slot]; ++g)
                        emit_word(shell.bg_tokens[next_bg++]);
                    if (slot < k) emit_phrase(shell.plants[slot]);
                }
            }

            rec.id = "s" + std::to_string(doc_counter++);
            rec.created_utc = shell.created_utc;
            rec.community = shell.community;
            rec.kind = shell.kind;
            if (shell.kind == DocKind::post) {
                // Split at a token boundary; the parser rejoins title and
                // body with one space, restoring the original token stream.
                std::size_t n_tokens =
                    text.empty() ? 0
                                 : 1 + static_cast<std::size_t>(std::count(
                                           text.begin(), text.end(), ' '));
                std::size_t cut_tokens = rng.uniform_below(n_tokens + 1);
                if (cut_tokens == 0) {
                    rec.title.clear();
                    rec.body = std::move(text);
                } else if (cut_tokens == n_tokens) {
                    rec.title = std::move(text);
                    rec.body.clear();
                } else {
                    std::size_t pos = 0, seen = 0;
                    for (std::size_t i = 0; i < text.size(); ++i) {
                        if (text[i] == ' ' && ++seen == cut_tokens) {
                            pos = i;
                            break;
                        }
                    }
                    rec.title = text.substr(0, pos);
                    rec.body = text.substr(pos + 1);
                }
            } else {
                rec.title.clear();
                rec.body = std::move(text);
            }
            ++truth.documents;
            sink(rec);
        }
    }
    return truth;
}

Document to_document(const SynthRecord& rec, const PlantSpec& spec) {
    Document d;
    d.id = rec.id;
    d.created_utc = rec.created_utc;
    d.community = spec.communities[rec.community].name;
    for (char& c : d.community)
        if (c >= 'A' && c <= 'Z') c = char(c - 'A' + 'a');
    d.kind = rec.kind;
    d.text = rec.kind == DocKind::post ? rec.title + " " + rec.body : rec.body;
    return d;
}

std::string render_record(const SynthRecord& rec, const PlantSpec& spec) {
    std::string out;
    out.reserve(rec.title.size() + rec.body.size() + 96);
    out += "{\"id\":";
    append_json_string(out, rec.id);
    out += ",\"created_utc\":";
    out += std::to_string(rec.created_utc);
    out += ",\"subreddit\":";
    append_json_string(out, spec.communities[rec.community].name);
    if (rec.kind == DocKind::post) {
        out += ",\"kind\":\"post\",\"title\":";
        append_json_string(out, rec.title);
        out += ",\"selftext\":";
        append_json_string(out, rec.body);
    } else {
        out += ",\"kind\":\"comment\",\"body\":";
        append_json_string(out, rec.body);
    }
    out += '}';
    return out;
}

SynthResult generate_documents(const PlantSpec& spec) {
    SynthResult result;
    result.truth = generate(spec, [&](const SynthRecord& rec) {
        result.documents.push_back(to_document(rec, spec));
    });
    return result;
}

} // namespace meco
