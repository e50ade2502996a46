#pragma once

// Timeline Updater: parse sub-timelines out of update-action bodies and
// merge them into timeline memory under a hard no-loss guarantee.

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "tlr/domain.hpp"
#include "tlr/gateway.hpp"
#include "tlr/prompts.hpp"
#include "tlr/text.hpp"

namespace tlr {

// Accepts lines "<date>: <summary>" where the date parses at Day
// granularity; non-matching lines are ignored; duplicate dates within the
// body are merged by joining distinct sentences.
inline SubTimeline parse_subtimeline(const std::string& body) {
    SubTimeline sub;
    std::istringstream in(body);
    std::string line;
    while (std::getline(in, line)) {
        size_t colon = line.find(": ");
        if (colon == std::string::npos) continue;
        CalendarDate date;
        try {
            date = parse_date(detail::trim(line.substr(0, colon)));
        } catch (const Error&) {
            continue;
        }
        if (date.granularity != Granularity::Day) continue;
        std::string summary = collapse_whitespace(line.substr(colon + 2));
        if (summary.empty()) continue;

        TimelineEntry* existing = nullptr;
        for (auto& e : sub.entries)
            if (e.date == date) existing = &e;
        if (!existing) {
            sub.entries.push_back(TimelineEntry{date, summary, {}, 0, 0});
            continue;
        }
        for (const auto& sentence : split_sentences(summary)) {
            bool duplicate = false;
            for (const auto& have : split_sentences(existing->summary))
                if (normalize_description(have) == normalize_description(sentence))
                    duplicate = true;
            if (!duplicate) {
                existing->summary += ' ';
                existing->summary += sentence;
            }
        }
    }
    if (sub.entries.empty()) throw EmptySubTimeline("no parseable dated lines");
    std::stable_sort(sub.entries.begin(), sub.entries.end(),
                     [](const TimelineEntry& a, const TimelineEntry& b) {
                         return a.date < b.date;
                     });
    return sub;
}

enum class MergeMode { Deterministic, Assisted };

namespace detail {

// Per-date union: new dates inserted; colliding dates extended with sub
// sentences whose similarity against every existing sentence of that entry
// stays below the near-duplicate threshold.
inline TimelineMemory merge_deterministic(const TimelineMemory& memory,
                                          const SubTimeline& sub, int iteration,
                                          double near_dup_threshold = 0.8) {
    TimelineMemory out = memory;
    for (const auto& incoming : sub.entries) {
        TimelineEntry* entry = nullptr;
        for (auto& e : out.entries)
            if (e.date == incoming.date) entry = &e;
        if (!entry) {
            TimelineEntry fresh = incoming;
            fresh.introduced_at_iteration = iteration;
            fresh.last_revised_at_iteration = iteration;
            out.entries.push_back(std::move(fresh));
            continue;
        }
        std::vector<std::string> existing_sentences = split_sentences(entry->summary);
        for (const auto& sentence : split_sentences(incoming.summary)) {
            double max_sim = 0.0;
            for (const auto& have : existing_sentences)
                max_sim = std::max(max_sim, unigram_f1(have, sentence));
            if (max_sim < near_dup_threshold) {
                entry->summary += ' ';
                entry->summary += sentence;
                existing_sentences.push_back(sentence);
            }
        }
        for (const auto& ref : incoming.support)
            if (std::find(entry->support.begin(), entry->support.end(), ref) ==
                entry->support.end())
                entry->support.push_back(ref);
        entry->last_revised_at_iteration = iteration;
    }
    out.sort_entries();
    out.revision = memory.revision + 1;
    return out;
}

}  // namespace detail

// No-loss check: every input entry must keep, at its date, at least one
// sentence with unigram F1 >= 0.5 against its original summary.
inline bool no_loss_holds(const TimelineMemory& before, const TimelineMemory& after,
                          double floor = 0.5) {
    for (const auto& old_entry : before.entries) {
        const TimelineEntry* kept = nullptr;
        for (const auto& e : after.entries)
            if (e.date == old_entry.date) kept = &e;
        if (!kept) return false;
        bool ok = false;
        for (const auto& sentence : split_sentences(kept->summary))
            if (unigram_f1(sentence, old_entry.summary) >= floor) ok = true;
        if (!ok) return false;
    }
    return true;
}

inline TimelineMemory merge_timeline(const TimelineMemory& memory, const SubTimeline& sub,
                                     const GlobalEventMemory& global_memory,
                                     Gateway* gateway, const ModelProfile& reasoner,
                                     MergeMode mode, int iteration = 0,
                                     double near_dup_threshold = 0.8) {
    if (sub.entries.empty()) throw EmptySubTimeline("merge of empty sub-timeline");
    TimelineMemory merged =
        detail::merge_deterministic(memory, sub, iteration, near_dup_threshold);
    if (mode == MergeMode::Deterministic || gateway == nullptr) return merged;

    // Assisted: the model rewrites the merged timeline for fluency; the
    // validator re-inserts anything it dropped.
    std::string sub_text;
    for (const auto& e : sub.entries)
        sub_text += format_date(e.date) + ": " + e.summary + "\n";
    std::string prompt = prompts::assisted_merge().render(
        {{"memory", render_memory_lines(global_memory)},
         {"timeline", timeline_to_text(memory)},
         {"sub", sub_text}});
    std::string reply;
    try {
        auto [text, usage] = gateway->complete(reasoner, {{"user", prompt}});
        (void)usage;
        reply = text;
    } catch (const BudgetExceeded&) {
        throw;
    } catch (const Error&) {
        return merged;
    }

    SubTimeline rewritten;
    try {
        rewritten = parse_subtimeline(reply);
    } catch (const EmptySubTimeline&) {
        return merged;
    }
    TimelineMemory assisted;
    assisted.revision = memory.revision + 1;
    for (const auto& e : rewritten.entries) {
        TimelineEntry entry = e;
        entry.introduced_at_iteration = iteration;
        entry.last_revised_at_iteration = iteration;
        for (const auto& prior : merged.entries)
            if (prior.date == entry.date) {
                entry.support = prior.support;
                entry.introduced_at_iteration = prior.introduced_at_iteration;
            }
        assisted.entries.push_back(std::move(entry));
    }
    assisted.sort_entries();

    // Re-insert verbatim whatever the rewrite lost.
    for (const auto& must_keep : merged.entries) {
        bool present = false;
        for (const auto& e : assisted.entries)
            if (e.date == must_keep.date) present = true;
        if (!present) assisted.entries.push_back(must_keep);
    }
    assisted.sort_entries();
    if (!no_loss_holds(memory, assisted)) {
        for (auto& e : assisted.entries)
            for (const auto& old_entry : memory.entries)
                if (e.date == old_entry.date) {
                    bool ok = false;
                    for (const auto& s : split_sentences(e.summary))
                        if (unigram_f1(s, old_entry.summary) >= 0.5) ok = true;
                    if (!ok) e.summary = old_entry.summary + " " + e.summary;
                }
    }
    return assisted;
}

}  // namespace tlr
