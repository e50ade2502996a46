#pragma once

// Event Scraper: query -> top-k documents -> chunks -> per-chunk model
// extraction -> normalized, deduplicated event metadata.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tlr/domain.hpp"
#include "tlr/gateway.hpp"
#include "tlr/prompts.hpp"
#include "tlr/retrieval.hpp"
#include "tlr/text.hpp"

namespace tlr {

struct Chunk {
    std::string doc_id;
    int index = 0;
    std::string text;
    int word_count = 0;
};

namespace detail {

inline void emit_chunk(std::vector<Chunk>& chunks, const std::string& doc_id,
                       std::vector<std::string>& words) {
    if (words.empty()) return;
    std::string text;
    for (size_t i = 0; i < words.size(); ++i) {
        if (i) text += ' ';
        text += words[i];
    }
    chunks.push_back(Chunk{doc_id, static_cast<int>(chunks.size()), text,
                           static_cast<int>(words.size())});
    words.clear();
}

}  // namespace detail

// Greedy packing of whole paragraphs (split on blank lines) up to
// max_words; an oversized paragraph is split on sentence boundaries, then
// hard-split by words. Word coverage of the body is preserved in order.
inline std::vector<Chunk> chunk_document(const Document& doc, int max_words) {
    std::vector<std::string> paragraphs;
    {
        std::string cur;
        size_t i = 0;
        const std::string& body = doc.body;
        while (i < body.size()) {
            if (body[i] == '\n') {
                size_t j = i;
                int newlines = 0;
                while (j < body.size() &&
                       (body[j] == '\n' || body[j] == ' ' || body[j] == '\t' ||
                        body[j] == '\r')) {
                    if (body[j] == '\n') ++newlines;
                    ++j;
                }
                if (newlines >= 2) {
                    paragraphs.push_back(cur);
                    cur.clear();
                } else {
                    cur += ' ';
                }
                i = j;
            } else {
                cur += body[i];
                ++i;
            }
        }
        paragraphs.push_back(cur);
    }

    std::vector<Chunk> chunks;
    std::vector<std::string> pending;
    for (const auto& para : paragraphs) {
        std::vector<std::string> words = split_words(para);
        if (words.empty()) continue;
        if (static_cast<int>(words.size()) <= max_words) {
            if (static_cast<int>(pending.size() + words.size()) > max_words)
                detail::emit_chunk(chunks, doc.doc_id, pending);
            pending.insert(pending.end(), words.begin(), words.end());
            continue;
        }
        // Oversized paragraph: flush, then pack sentences.
        detail::emit_chunk(chunks, doc.doc_id, pending);
        for (const auto& sentence : split_sentences(para)) {
            std::vector<std::string> sw = split_words(sentence);
            if (static_cast<int>(sw.size()) > max_words) {
                // Hard split by words as last resort.
                detail::emit_chunk(chunks, doc.doc_id, pending);
                for (const auto& w : sw) {
                    pending.push_back(w);
                    if (static_cast<int>(pending.size()) == max_words)
                        detail::emit_chunk(chunks, doc.doc_id, pending);
                }
                continue;
            }
            if (static_cast<int>(pending.size() + sw.size()) > max_words)
                detail::emit_chunk(chunks, doc.doc_id, pending);
            pending.insert(pending.end(), sw.begin(), sw.end());
        }
        detail::emit_chunk(chunks, doc.doc_id, pending);
    }
    detail::emit_chunk(chunks, doc.doc_id, pending);
    return chunks;
}

// Prompts the scraper model for a JSON array of {date, description,
// entities}. Unparseable dates are dropped; one repair reprompt on array
// parse failure, then []. Failures degrade, never throw.
inline std::vector<DatedEvent> extract_events(Gateway& gateway,
                                              const ModelProfile& profile,
                                              const Chunk& chunk,
                                              std::optional<CalendarDate> published,
                                              std::vector<std::string>* log = nullptr) {
    std::string pub = published ? format_date(*published) : "unknown";
    std::string prompt = prompts::event_extraction().render(
        {{"published", pub}, {"chunk", chunk.text}});
    std::vector<Message> messages{{"user", prompt}};

    auto try_parse = [](const std::string& text) -> std::optional<Json> {
        std::string t = detail::trim(text);
        try {
            Json j = Json::parse(t);
            if (j.is_array()) return j;
        } catch (const Json::exception&) {
        }
        size_t open = t.find('[');
        size_t close = t.rfind(']');
        if (open != std::string::npos && close != std::string::npos && close > open) {
            try {
                Json j = Json::parse(t.substr(open, close - open + 1));
                if (j.is_array()) return j;
            } catch (const Json::exception&) {
            }
        }
        return std::nullopt;
    };

    std::optional<Json> array;
    try {
        auto [text, usage] = gateway.complete(profile, messages);
        (void)usage;
        array = try_parse(text);
        if (!array) {
            messages.push_back({"assistant", text});
            messages.push_back({"user", prompts::extraction_repair().body});
            auto [repaired, usage2] = gateway.complete(profile, messages);
            (void)usage2;
            array = try_parse(repaired);
        }
    } catch (const BudgetExceeded&) {
        throw;  // budget stops the episode, not just this chunk
    } catch (const Error& e) {
        if (log) log->push_back("extraction failed on " + chunk.doc_id + "#" +
                               std::to_string(chunk.index) + ": " + e.what());
        return {};
    }
    if (!array) {
        if (log) log->push_back("extraction returned no JSON array for " +
                               chunk.doc_id + "#" + std::to_string(chunk.index));
        return {};
    }

    std::vector<DatedEvent> events;
    for (const auto& item : *array) {
        if (!item.is_object() || !item.contains("date") || !item.contains("description"))
            continue;
        DatedEvent ev;
        try {
            ev.date = parse_date(item["date"].get<std::string>(), published);
        } catch (const Error&) {
            continue;  // items with unparseable dates are dropped
        }
        ev.description = collapse_whitespace(item["description"].get<std::string>());
        if (ev.description.empty()) continue;
        if (item.contains("entities") && item["entities"].is_array())
            for (const auto& ent : item["entities"])
                if (ent.is_string()) ev.entities.push_back(ent.get<std::string>());
        ev.support.push_back(SourceRef{chunk.doc_id, chunk.index});
        ev.recompute_salience();
        events.push_back(std::move(ev));
    }
    return events;
}

// Exact-duplicate merge on (date, normalized description): support is
// unioned, salience recomputed. Idempotent.
inline std::vector<DatedEvent> dedup_events(std::vector<DatedEvent> events) {
    std::map<std::pair<std::string, std::string>, size_t> seen;
    std::vector<DatedEvent> out;
    for (auto& ev : events) {
        std::pair<std::string, std::string> key{format_date(ev.date),
                                                normalize_description(ev.description)};
        auto it = seen.find(key);
        if (it == seen.end()) {
            seen[key] = out.size();
            out.push_back(std::move(ev));
        } else {
            DatedEvent& kept = out[it->second];
            for (const auto& ref : ev.support)
                if (std::find(kept.support.begin(), kept.support.end(), ref) ==
                    kept.support.end())
                    kept.support.push_back(ref);
            for (const auto& ent : ev.entities)
                if (std::find(kept.entities.begin(), kept.entities.end(), ent) ==
                    kept.entities.end())
                    kept.entities.push_back(ent);
            kept.recompute_salience();
        }
    }
    for (auto& ev : out) ev.recompute_salience();
    std::stable_sort(out.begin(), out.end(),
                     [](const DatedEvent& a, const DatedEvent& b) {
                         if (a.date != b.date) return a.date < b.date;
                         return normalize_description(a.description) <
                                normalize_description(b.description);
                     });
    return out;
}

class EventScraper {
public:
    EventScraper(Gateway& gateway, ModelProfile profile, SearchProvider& provider,
                 int chunk_size_words = 800)
        : gateway_(gateway),
          profile_(std::move(profile)),
          provider_(provider),
          chunk_size_words_(chunk_size_words) {}

    EventMetadata scrape(const std::string& query, int k) {
        EventMetadata metadata;
        metadata.source_query = query;
        std::vector<SearchHit> hits = provider_.search(query, k);
        std::vector<DatedEvent> all;
        for (const auto& hit : hits) {
            std::optional<Document> doc = provider_.fetch(hit);
            if (!doc) {
                log_.push_back("fetch skipped for " + hit.doc_id);
                continue;
            }
            for (const auto& chunk : chunk_document(*doc, chunk_size_words_)) {
                std::vector<DatedEvent> events =
                    extract_events(gateway_, profile_, chunk, doc->published, &log_);
                all.insert(all.end(), events.begin(), events.end());
            }
        }
        metadata.events = dedup_events(std::move(all));
        return metadata;
    }

    const std::vector<std::string>& log() const { return log_; }

private:
    Gateway& gateway_;
    ModelProfile profile_;
    SearchProvider& provider_;
    int chunk_size_words_;
    std::vector<std::string> log_;
};

}  // namespace tlr
