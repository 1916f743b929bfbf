#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "corpus.hpp"
#include "series.hpp"

namespace meco {

// Daily expected-insertion profile for one planted phrase. Day offsets are
// relative to the window start.
struct ProfileSpec {
    enum class Shape { constant, linear, trapezoid, proportional };
    Shape shape = Shape::constant;
    double rate = 0.0;                     // constant
    double start_rate = 0.0;               // linear
    double end_rate = 0.0;
    std::int32_t start = 0;                // trapezoid: zero before start,
    std::int32_t rise = 0;                 // ramp up over `rise` days,
    std::int32_t plateau = 0;              // hold peak_rate for `plateau` days,
    std::int32_t fall = 0;                 // ramp back down over `fall` days
    double peak_rate = 0.0;
    double p = 0.0;                        // proportional to realized B(t)
};

struct CommunitySpec {
    std::string name;
    double docs_per_day = 0.0;
    double post_fraction = 0.1;
};

struct PlantedPhrase {
    std::string phrase;
    std::vector<std::string> tokens; // filled during validation
    ProfileSpec profile;
    std::vector<std::string> communities; // empty = any community
};

struct PlantSpec {
    DayWindow window;
    std::vector<CommunitySpec> communities;
    std::vector<double> background_rates; // per synthetic word w0000, w0001, ...
    double growth_factor = 1.0;           // background rate multiplier across the window
    std::vector<PlantedPhrase> plants;
    std::uint64_t seed = 0;
};

// Parses and validates the JSON spec; errors carry the offending field path.
PlantSpec parse_plant_spec(const std::string& json_text);
void validate_plant_spec(PlantSpec& spec);

std::string background_word_name(std::size_t index);

// Realized (post-draw) counts, exact by construction: the generator draws
// from the spec's rates and records what it actually emitted.
struct GroundTruth {
    std::vector<std::string> phrases;                      // plant labels
    std::vector<std::map<Day, std::uint64_t>> phrase_counts;
    std::vector<std::string> words;
    std::vector<std::map<Day, std::uint64_t>> word_counts;
    std::uint64_t documents = 0;
};

struct SynthRecord {
    std::string id;
    std::int64_t created_utc = 0;
    std::uint32_t community = 0; // index into spec.communities
    DocKind kind = DocKind::comment;
    std::string title; // posts only
    std::string body;  // comment body / post selftext
};

// Deterministic given spec.seed; documents arrive in generation order.
GroundTruth generate(const PlantSpec& spec,
                     const std::function<void(const SynthRecord&)>& sink);

struct SynthResult {
    std::vector<Document> documents;
    GroundTruth truth;
};

SynthResult generate_documents(const PlantSpec& spec);

Document to_document(const SynthRecord& rec, const PlantSpec& spec);
std::string render_record(const SynthRecord& rec, const PlantSpec& spec);

} // namespace meco
