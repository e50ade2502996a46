#pragma once

// Global event memory: deterministic fusion of scraped metadata plus an
// optional, validated model synthesis pass. The deterministic merge is the
// anchor; synthesis can only rewrite wording, never lose events.

#include <optional>
#include <string>
#include <vector>

#include "tlr/domain.hpp"
#include "tlr/gateway.hpp"
#include "tlr/prompts.hpp"
#include "tlr/scraper.hpp"
#include "tlr/text.hpp"

namespace tlr {

// Union of events; two events fuse when their dates are equal (same
// granularity) and the unigram F1 of their normalized descriptions is at
// least `threshold`. The fused event keeps the longer description, the
// union of entities and support, and distinct-document salience.
inline GlobalEventMemory merge_metadata(const GlobalEventMemory& existing,
                                        const EventMetadata& incoming,
                                        double threshold = 0.6) {
    GlobalEventMemory out = existing;
    for (const auto& ev : incoming.events) {
        DatedEvent* match = nullptr;
        double best = threshold;
        for (auto& candidate : out.events) {
            if (candidate.date != ev.date) continue;
            double sim = unigram_f1(normalize_description(candidate.description),
                                    normalize_description(ev.description));
            if (sim >= best) {
                best = sim;
                match = &candidate;
            }
        }
        if (!match) {
            DatedEvent copy = ev;
            copy.recompute_salience();
            out.events.push_back(std::move(copy));
            continue;
        }
        if (ev.description.size() > match->description.size())
            match->description = ev.description;
        for (const auto& ref : ev.support)
            if (std::find(match->support.begin(), match->support.end(), ref) ==
                match->support.end())
                match->support.push_back(ref);
        for (const auto& ent : ev.entities)
            if (std::find(match->entities.begin(), match->entities.end(), ent) ==
                match->entities.end())
                match->entities.push_back(ent);
        match->recompute_salience();
    }
    out.sort_events();
    out.revision = existing.revision + 1;
    return out;
}

// Validated synthesis: the model may rewrite descriptions for concision.
// Rejected (deterministic result kept) unless every pre-synthesis date
// survives, no new dates appear, per-date counts match, and each rewritten
// description stays within the fusion similarity of the original.
inline GlobalEventMemory apply_synthesis(const GlobalEventMemory& memory,
                                         Gateway& gateway, const ModelProfile& profile,
                                         double threshold = 0.6) {
    if (memory.events.empty()) return memory;
    std::string prompt = prompts::memory_synthesis().render(
        {{"memory", render_memory_lines(memory)}});
    std::string text;
    try {
        auto [reply, usage] = gateway.complete(profile, {{"user", prompt}});
        (void)usage;
        text = reply;
    } catch (const BudgetExceeded&) {
        throw;
    } catch (const Error&) {
        return memory;
    }

    // Parse "DATE: description" lines in order.
    std::vector<std::pair<CalendarDate, std::string>> lines;
    {
        std::istringstream in(text);
        std::string line;
        while (std::getline(in, line)) {
            size_t colon = line.find(": ");
            if (colon == std::string::npos) continue;
            try {
                CalendarDate d = parse_date(detail::trim(line.substr(0, colon)));
                std::string desc = collapse_whitespace(line.substr(colon + 2));
                if (!desc.empty()) lines.emplace_back(d, desc);
            } catch (const Error&) {
            }
        }
    }
    if (lines.size() != memory.events.size()) return memory;

    GlobalEventMemory rewritten = memory;
    for (size_t i = 0; i < lines.size(); ++i) {
        if (!(lines[i].first == memory.events[i].date)) return memory;
        double sim = unigram_f1(normalize_description(lines[i].second),
                                normalize_description(memory.events[i].description));
        if (sim < threshold) return memory;
        rewritten.events[i].description = lines[i].second;
    }
    return rewritten;
}

struct CognitionOptions {
    bool synthesis = false;
    double fusion_threshold = 0.6;
};

// Broad scrape -> deterministic merge into an empty memory -> optional
// synthesis. Revision 0. Zero scraped events abort the episode.
inline GlobalEventMemory init_memory(const std::string& query, const EpisodeConfig& config,
                                     EventScraper& scraper, Gateway& gateway,
                                     const ModelProfile& reasoner,
                                     const CognitionOptions& options = {}) {
    config.validate();
    EventMetadata metadata = scraper.scrape(query, config.n_init);
    if (metadata.events.empty())
        throw EmptyCognition("initial scrape for '" + query + "' yielded zero events");
    GlobalEventMemory memory = merge_metadata(GlobalEventMemory{}, metadata,
                                              options.fusion_threshold);
    if (options.synthesis)
        memory = apply_synthesis(memory, gateway, reasoner, options.fusion_threshold);
    memory.revision = 0;
    return memory;
}

inline GlobalEventMemory update_memory(const GlobalEventMemory& memory,
                                       const EventMetadata& new_metadata,
                                       Gateway& gateway, const ModelProfile& reasoner,
                                       const CognitionOptions& options = {}) {
    GlobalEventMemory merged = merge_metadata(memory, new_metadata,
                                              options.fusion_threshold);
    if (options.synthesis) {
        int revision = merged.revision;
        merged = apply_synthesis(merged, gateway, reasoner, options.fusion_threshold);
        merged.revision = revision;
    }
    return merged;
}

}  // namespace tlr
