#pragma once

// Shared vocabulary of the engine: events, memories, plans, prompt
// templates and episode configuration, with JSON serialization for
// manifests and the canonical timeline forms.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "tlr/cache.hpp"
#include "tlr/calendar.hpp"
#include "tlr/errors.hpp"
#include "tlr/text.hpp"

namespace tlr {

using Json = nlohmann::json;

struct SourceRef {
    std::string doc_id;
    int chunk_index = 0;

    friend bool operator==(const SourceRef&, const SourceRef&) = default;
    friend bool operator<(const SourceRef& a, const SourceRef& b) {
        return std::tie(a.doc_id, a.chunk_index) < std::tie(b.doc_id, b.chunk_index);
    }
};

struct DatedEvent {
    CalendarDate date;
    std::string description;
    std::vector<std::string> entities;
    std::vector<SourceRef> support;
    int salience = 0;  // distinct supporting documents

    void recompute_salience() {
        std::set<std::string> docs;
        for (const auto& ref : support) docs.insert(ref.doc_id);
        salience = static_cast<int>(docs.size());
    }
};

struct EventMetadata {
    std::vector<DatedEvent> events;
    std::string source_query;
};

struct GlobalEventMemory {
    std::vector<DatedEvent> events;
    int revision = 0;

    // Sorted ascending by date; within a date, descending salience then
    // lexicographic description.
    void sort_events() {
        std::stable_sort(events.begin(), events.end(),
                         [](const DatedEvent& a, const DatedEvent& b) {
                             if (a.date != b.date) return a.date < b.date;
                             if (a.salience != b.salience)
                                 return a.salience > b.salience;
                             return a.description < b.description;
                         });
    }
};

struct TimelineEntry {
    CalendarDate date;  // Day granularity only
    std::string summary;
    std::vector<SourceRef> support;
    int introduced_at_iteration = 0;
    int last_revised_at_iteration = 0;
};

struct TimelineMemory {
    std::vector<TimelineEntry> entries;
    int revision = 0;

    void sort_entries() {
        std::stable_sort(entries.begin(), entries.end(),
                         [](const TimelineEntry& a, const TimelineEntry& b) {
                             return a.date < b.date;
                         });
    }

    bool valid() const {
        for (size_t i = 0; i < entries.size(); ++i) {
            if (entries[i].date.granularity != Granularity::Day) return false;
            if (entries[i].summary.empty()) return false;
            if (i > 0 && !(entries[i - 1].date < entries[i].date)) return false;
        }
        return true;
    }
};

struct SubTimeline {
    std::vector<TimelineEntry> entries;
};

enum class DeficiencyKind { MissingEvent, CoarseTimestamp, UnderSpecified, SparseRegion };

inline const char* to_string(DeficiencyKind k) {
    switch (k) {
        case DeficiencyKind::MissingEvent: return "missing_event";
        case DeficiencyKind::CoarseTimestamp: return "coarse_timestamp";
        case DeficiencyKind::UnderSpecified: return "under_specified";
        case DeficiencyKind::SparseRegion: return "sparse_region";
    }
    return "?";
}

struct Deficiency {
    DeficiencyKind kind = DeficiencyKind::MissingEvent;
    std::optional<CalendarDate> anchor;
    std::optional<CalendarDate> interval_end;  // SparseRegion only
    std::string note;
};

enum class PlanVerdict { Continue, Terminate };

struct SearchPlan {
    struct Item {
        Deficiency deficiency;
        std::vector<std::string> queries;
    };
    std::vector<Item> items;
    PlanVerdict verdict = PlanVerdict::Terminate;
};

struct PromptTemplate {
    std::string name;
    std::string body;

    // Every {placeholder} referenced by the body must be supplied.
    // Doubled braces render as literal braces.
    std::string render(const std::map<std::string, std::string>& values) const {
        std::string out;
        out.reserve(body.size());
        for (size_t i = 0; i < body.size();) {
            if (body[i] == '{' && i + 1 < body.size() && body[i + 1] == '{') {
                out += '{';
                i += 2;
            } else if (body[i] == '}' && i + 1 < body.size() && body[i + 1] == '}') {
                out += '}';
                i += 2;
            } else if (body[i] == '{') {
                size_t close = body.find('}', i);
                if (close == std::string::npos)
                    throw Error("unterminated placeholder in template " + name);
                std::string key = body.substr(i + 1, close - i - 1);
                auto it = values.find(key);
                if (it == values.end())
                    throw Error("missing placeholder '" + key + "' for template " + name);
                out += it->second;
                i = close + 1;
            } else {
                out += body[i];
                ++i;
            }
        }
        return out;
    }

    std::string version_hash() const { return hash_hex(body); }
};

struct EpisodeConfig {
    std::string query;
    int n_init = 20;
    int n_exp = 20;
    int top_k = 20;
    int max_iterations = 5;
    int max_searches_per_iteration = 8;
    int64_t token_budget = 1000000;
    int chunk_size_words = 800;
    int64_t seed = 0;
    double fusion_threshold = 0.6;  // global-memory description fusion

    void validate() const {
        if (query.empty()) throw Error("config: query must be non-empty");
        if (n_init <= 0 || n_exp <= 0 || top_k <= 0 || max_iterations <= 0 ||
            max_searches_per_iteration <= 0 || token_budget <= 0 ||
            chunk_size_words <= 0)
            throw Error("config: all counts must be positive");
    }
};

// --- JSON ---------------------------------------------------------------

inline void to_json(Json& j, const CalendarDate& d) { j = format_date(d); }
inline void from_json(const Json& j, CalendarDate& d) {
    d = parse_date(j.get<std::string>());
}

inline void to_json(Json& j, const SourceRef& r) {
    j = Json{{"doc", r.doc_id}, {"chunk", r.chunk_index}};
}
inline void from_json(const Json& j, SourceRef& r) {
    j.at("doc").get_to(r.doc_id);
    j.at("chunk").get_to(r.chunk_index);
}

inline void to_json(Json& j, const DatedEvent& e) {
    j = Json{{"date", e.date},
             {"description", e.description},
             {"entities", e.entities},
             {"support", e.support},
             {"salience", e.salience}};
}
inline void from_json(const Json& j, DatedEvent& e) {
    j.at("date").get_to(e.date);
    j.at("description").get_to(e.description);
    if (j.contains("entities")) j.at("entities").get_to(e.entities);
    if (j.contains("support")) j.at("support").get_to(e.support);
    e.recompute_salience();
}

inline void to_json(Json& j, const GlobalEventMemory& m) {
    j = Json{{"revision", m.revision}, {"events", m.events}};
}
inline void from_json(const Json& j, GlobalEventMemory& m) {
    j.at("revision").get_to(m.revision);
    j.at("events").get_to(m.events);
}

inline void to_json(Json& j, const TimelineEntry& e) {
    j = Json{{"date", e.date},
             {"summary", e.summary},
             {"sources", Json::array()},
             {"introduced", e.introduced_at_iteration},
             {"revised", e.last_revised_at_iteration}};
    std::set<std::string> docs;
    for (const auto& ref : e.support) docs.insert(ref.doc_id);
    for (const auto& d : docs) j["sources"].push_back(d);
}

inline void to_json(Json& j, const TimelineMemory& m) {
    j = Json{{"revision", m.revision}, {"entries", m.entries}};
}

inline void to_json(Json& j, const Deficiency& d) {
    j = Json{{"kind", to_string(d.kind)}, {"note", d.note}};
    if (d.anchor) j["anchor"] = *d.anchor;
    if (d.interval_end) j["interval_end"] = *d.interval_end;
}

inline void to_json(Json& j, const SearchPlan& p) {
    j = Json{{"verdict", p.verdict == PlanVerdict::Terminate ? "terminate" : "continue"},
             {"items", Json::array()}};
    for (const auto& item : p.items)
        j["items"].push_back(Json{{"deficiency", item.deficiency}, {"queries", item.queries}});
}

inline void to_json(Json& j, const EpisodeConfig& c) {
    j = Json{{"query", c.query},
             {"n_init", c.n_init},
             {"n_exp", c.n_exp},
             {"top_k", c.top_k},
             {"max_iterations", c.max_iterations},
             {"max_searches_per_iteration", c.max_searches_per_iteration},
             {"token_budget", c.token_budget},
             {"chunk_size_words", c.chunk_size_words},
             {"seed", c.seed},
             {"fusion_threshold", c.fusion_threshold}};
}
inline void from_json(const Json& j, EpisodeConfig& c) {
    if (j.contains("query")) j.at("query").get_to(c.query);
    if (j.contains("n_init")) j.at("n_init").get_to(c.n_init);
    if (j.contains("n_exp")) j.at("n_exp").get_to(c.n_exp);
    if (j.contains("top_k")) j.at("top_k").get_to(c.top_k);
    if (j.contains("max_iterations")) j.at("max_iterations").get_to(c.max_iterations);
    if (j.contains("max_searches_per_iteration"))
        j.at("max_searches_per_iteration").get_to(c.max_searches_per_iteration);
    if (j.contains("token_budget")) j.at("token_budget").get_to(c.token_budget);
    if (j.contains("chunk_size_words")) j.at("chunk_size_words").get_to(c.chunk_size_words);
    if (j.contains("seed")) j.at("seed").get_to(c.seed);
    if (j.contains("fusion_threshold")) j.at("fusion_threshold").get_to(c.fusion_threshold);
}

// --- Canonical timeline forms ------------------------------------------

// Text lines "YYYY-MM-DD: <summary>" sorted ascending.
inline std::string timeline_to_text(const TimelineMemory& m) {
    std::string out;
    for (const auto& e : m.entries) {
        out += format_date(e.date);
        out += ": ";
        out += e.summary;
        out += '\n';
    }
    return out;
}

inline Json timeline_to_structured(const TimelineMemory& m, const std::string& query) {
    Json entries = Json::array();
    for (const auto& e : m.entries) {
        Json sources = Json::array();
        std::set<std::string> docs;
        for (const auto& ref : e.support) docs.insert(ref.doc_id);
        for (const auto& d : docs) sources.push_back(d);
        entries.push_back(Json{{"date", format_date(e.date)},
                               {"summary", e.summary},
                               {"sources", sources}});
    }
    return Json{{"query", query}, {"entries", entries}};
}

inline std::string render_memory_lines(const GlobalEventMemory& m) {
    std::string out;
    for (const auto& e : m.events) {
        out += format_date(e.date);
        out += ": ";
        out += e.description;
        out += '\n';
    }
    return out;
}

}  // namespace tlr
