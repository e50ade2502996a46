#pragma once

// Supervisor: deterministic analyzers for the three deficiency dimensions
// (coverage, completeness, density) feeding a model plan generator with a
// deterministic fallback. The analyzer's verdict decides termination.

#include <algorithm>
#include <string>
#include <vector>

#include "tlr/domain.hpp"
#include "tlr/gateway.hpp"
#include "tlr/prompts.hpp"
#include "tlr/text.hpp"

namespace tlr {

struct SupervisorThresholds {
    int coverage_window_days = 3;
    double coverage_similarity_floor = 0.2;
    int min_summary_tokens = 8;
    double sparse_gap_multiplier = 3.0;
    int sparse_gap_min_days = 14;
};

// Deterministic, pure. Order: coverage (Missing / CoarseTimestamp), then
// UnderSpecified, then SparseRegion.
inline std::vector<Deficiency> analyze(const TimelineMemory& timeline,
                                       const GlobalEventMemory& memory,
                                       const SupervisorThresholds& t = {}) {
    std::vector<Deficiency> deficiencies;

    // (1) Coverage consistency against the global event memory.
    for (const auto& ev : memory.events) {
        if (ev.date.granularity != Granularity::Day) {
            Deficiency d;
            d.kind = DeficiencyKind::CoarseTimestamp;
            d.anchor = ev.date;
            d.note = ev.description;
            deficiencies.push_back(std::move(d));
            continue;
        }
        bool near = false;
        double max_sim = 0.0;
        for (const auto& entry : timeline.entries) {
            if (date_distance_days(entry.date, ev.date) <= t.coverage_window_days)
                near = true;
            max_sim = std::max(max_sim, unigram_f1(entry.summary, ev.description));
        }
        if (!near && max_sim < t.coverage_similarity_floor) {
            Deficiency d;
            d.kind = DeficiencyKind::MissingEvent;
            d.anchor = ev.date;
            d.note = ev.description;
            deficiencies.push_back(std::move(d));
        }
    }

    // (2) Semantic completeness.
    for (const auto& entry : timeline.entries) {
        if (static_cast<int>(tokenize(entry.summary).size()) < t.min_summary_tokens) {
            Deficiency d;
            d.kind = DeficiencyKind::UnderSpecified;
            d.anchor = entry.date;
            d.note = entry.summary;
            deficiencies.push_back(std::move(d));
        }
    }

    // (3) Temporal density: gaps above max(multiplier * median gap, floor).
    if (timeline.entries.size() >= 3) {
        std::vector<int64_t> gaps;
        for (size_t i = 1; i < timeline.entries.size(); ++i)
            gaps.push_back(date_distance_days(timeline.entries[i].date,
                                              timeline.entries[i - 1].date));
        std::vector<int64_t> sorted = gaps;
        std::sort(sorted.begin(), sorted.end());
        double median;
        size_t n = sorted.size();
        if (n % 2 == 1) {
            median = static_cast<double>(sorted[n / 2]);
        } else {
            median = (static_cast<double>(sorted[n / 2 - 1]) +
                      static_cast<double>(sorted[n / 2])) / 2.0;
        }
        double threshold = std::max(t.sparse_gap_multiplier * median,
                                    static_cast<double>(t.sparse_gap_min_days));
        for (size_t i = 0; i < gaps.size(); ++i) {
            if (static_cast<double>(gaps[i]) > threshold) {
                Deficiency d;
                d.kind = DeficiencyKind::SparseRegion;
                d.anchor = timeline.entries[i].date;
                d.interval_end = timeline.entries[i + 1].date;
                d.note = "gap of " + std::to_string(gaps[i]) + " days";
                deficiencies.push_back(std::move(d));
            }
        }
    }
    return deficiencies;
}

// Fixed per-kind query templates; every kind maps to one non-empty query.
inline std::string fallback_query(const Deficiency& d, const std::string& topic_query) {
    switch (d.kind) {
        case DeficiencyKind::MissingEvent: {
            std::string year = d.anchor ? std::to_string(d.anchor->year) : "";
            return collapse_whitespace(topic_query + " " + d.note + " " + year);
        }
        case DeficiencyKind::CoarseTimestamp:
            return collapse_whitespace(d.note + " exact date");
        case DeficiencyKind::UnderSpecified:
            return collapse_whitespace(topic_query + " " +
                                       (d.anchor ? format_date(*d.anchor) : "") +
                                       " details");
        case DeficiencyKind::SparseRegion:
            return collapse_whitespace(
                topic_query + " events between " +
                (d.anchor ? format_date(*d.anchor) : "") + " and " +
                (d.interval_end ? format_date(*d.interval_end) : ""));
    }
    return topic_query;
}

// Empty deficiencies -> Terminate (the model cannot override an empty
// analysis). Otherwise the model proposes sub-queries; a validator requires
// every deficiency to be addressed, else the fallback templates apply.
inline SearchPlan make_plan(const std::vector<Deficiency>& deficiencies,
                            const std::string& topic_query, Gateway* gateway,
                            const ModelProfile& reasoner) {
    SearchPlan plan;
    if (deficiencies.empty()) {
        plan.verdict = PlanVerdict::Terminate;
        return plan;
    }
    plan.verdict = PlanVerdict::Continue;

    std::vector<std::vector<std::string>> queries(deficiencies.size());
    bool valid = false;
    if (gateway) {
        std::string listing;
        for (size_t i = 0; i < deficiencies.size(); ++i) {
            Json j = deficiencies[i];
            listing += std::to_string(i) + ": " + j.dump() + "\n";
        }
        std::string prompt = prompts::supervisor_plan().render(
            {{"query", topic_query}, {"deficiencies", listing}});
        try {
            auto [reply, usage] = gateway->complete(reasoner, {{"user", prompt}});
            (void)usage;
            std::string t = detail::trim(reply);
            size_t open = t.find('[');
            size_t close = t.rfind(']');
            if (open != std::string::npos && close != std::string::npos && close > open) {
                Json arr = Json::parse(t.substr(open, close - open + 1));
                if (arr.is_array()) {
                    std::vector<std::vector<std::string>> proposed(deficiencies.size());
                    bool shape_ok = true;
                    for (const auto& item : arr) {
                        if (!item.is_object() || !item.contains("deficiency") ||
                            !item.contains("queries") || !item["queries"].is_array()) {
                            shape_ok = false;
                            break;
                        }
                        int idx = item["deficiency"].get<int>();
                        if (idx < 0 || idx >= static_cast<int>(deficiencies.size())) {
                            shape_ok = false;
                            break;
                        }
                        for (const auto& q : item["queries"]) {
                            if (!q.is_string()) { shape_ok = false; break; }
                            std::string query = collapse_whitespace(q.get<std::string>());
                            if (!query.empty())
                                proposed[static_cast<size_t>(idx)].push_back(query);
                        }
                    }
                    if (shape_ok) {
                        bool covered = true;
                        for (const auto& qs : proposed)
                            if (qs.empty()) covered = false;
                        if (covered) {
                            queries = std::move(proposed);
                            valid = true;
                        }
                    }
                }
            }
        } catch (const BudgetExceeded&) {
            throw;
        } catch (const Json::exception&) {
        } catch (const Error&) {
        }
    }
    if (!valid) {
        for (size_t i = 0; i < deficiencies.size(); ++i)
            queries[i] = {fallback_query(deficiencies[i], topic_query)};
    }
    for (size_t i = 0; i < deficiencies.size(); ++i)
        plan.items.push_back(SearchPlan::Item{deficiencies[i], queries[i]});
    return plan;
}

inline bool should_terminate(const SearchPlan& plan, int iteration,
                             const EpisodeConfig& config) {
    return plan.verdict == PlanVerdict::Terminate || iteration >= config.max_iterations;
}

}  // namespace tlr
