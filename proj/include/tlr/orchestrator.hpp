#pragma once

// Exploration orchestrator: drives the reasoner through the marker
// protocol, dispatching searches to the Event Scraper, updates to the
// Timeline Updater, memory refreshes to global cognition and reviews to
// the Supervisor, under iteration, search and token budgets.

#include <chrono>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "tlr/cognition.hpp"
#include "tlr/domain.hpp"
#include "tlr/gateway.hpp"
#include "tlr/prompts.hpp"
#include "tlr/scraper.hpp"
#include "tlr/supervisor.hpp"
#include "tlr/updater.hpp"

namespace tlr {

inline constexpr const char* kBeginSearch = "<|begin_search_query|>";
inline constexpr const char* kEndSearch = "<|end_search_query|>";
inline constexpr const char* kBeginUpdate = "<|begin_update_timeline|>";
inline constexpr const char* kEndUpdate = "<|end_update_timeline|>";
inline constexpr const char* kBeginResult = "<|begin_search_result|>";
inline constexpr const char* kEndResult = "<|end_search_result|>";

struct AgentAction {
    enum class Kind { Search, UpdateTimeline, Finish, Malformed };
    Kind kind = Kind::Finish;
    std::string payload;
};

// Extracts the payload of the most recent begin/end marker pair. Natural
// end with no marker is Finish; a begin without its end is Malformed.
inline AgentAction detect_action(const std::string& text) {
    size_t search_pos = text.rfind(kBeginSearch);
    size_t update_pos = text.rfind(kBeginUpdate);
    if (search_pos == std::string::npos && update_pos == std::string::npos)
        return {AgentAction::Kind::Finish, ""};

    bool is_search = search_pos != std::string::npos &&
                     (update_pos == std::string::npos || search_pos > update_pos);
    size_t begin_pos = is_search ? search_pos : update_pos;
    const std::string begin = is_search ? kBeginSearch : kBeginUpdate;
    const std::string end = is_search ? kEndSearch : kEndUpdate;

    size_t payload_start = begin_pos + begin.size();
    size_t end_pos = text.find(end, payload_start);
    if (end_pos == std::string::npos) return {AgentAction::Kind::Malformed, ""};
    std::string payload = text.substr(payload_start, end_pos - payload_start);
    if (is_search) {
        payload = collapse_whitespace(payload);
        if (payload.empty()) return {AgentAction::Kind::Malformed, ""};
        return {AgentAction::Kind::Search, payload};
    }
    return {AgentAction::Kind::UpdateTimeline, payload};
}

enum class TerminationReason { SupervisorTerminate, MaxIterations, BudgetExceeded, EmptyCognition };

inline const char* to_string(TerminationReason r) {
    switch (r) {
        case TerminationReason::SupervisorTerminate: return "supervisor_terminate";
        case TerminationReason::MaxIterations: return "max_iterations";
        case TerminationReason::BudgetExceeded: return "budget_exceeded";
        case TerminationReason::EmptyCognition: return "empty_cognition";
    }
    return "?";
}

// JSON Lines manifest, one record per event. Every record carries a
// wall-clock "ts" field which comparisons must exclude.
class ManifestWriter {
public:
    void add(Json record) {
        record["ts"] = now_millis();
        records_.push_back(std::move(record));
    }

    const std::vector<Json>& records() const { return records_; }

    std::string to_jsonl() const {
        std::string out;
        for (const auto& r : records_) {
            out += r.dump();
            out += '\n';
        }
        return out;
    }

    void write(const std::string& path) const {
        std::ofstream out(path, std::ios::trunc);
        out << to_jsonl();
    }

private:
    static int64_t now_millis() {
        return std::chrono::duration_cast<std::chrono::milliseconds>(
                   std::chrono::system_clock::now().time_since_epoch())
            .count();
    }

    std::vector<Json> records_;
};

struct EpisodeResult {
    TimelineMemory timeline;
    GlobalEventMemory memory;
    ManifestWriter manifest;
    TerminationReason reason = TerminationReason::SupervisorTerminate;
    TokenUsage usage;
};

struct EpisodeBackends {
    Gateway& gateway;
    SearchProvider& provider;
    ModelProfile reasoner;
    ModelProfile scraper;
    CognitionOptions cognition;
    MergeMode merge_mode = MergeMode::Deterministic;
    SupervisorThresholds thresholds;
    bool supervisor_llm = false;  // plan generation via model vs fallback
};

namespace detail {

inline std::string render_metadata_lines(const EventMetadata& metadata) {
    std::string out;
    for (const auto& ev : metadata.events) {
        out += format_date(ev.date);
        out += ": ";
        out += ev.description;
        out += '\n';
    }
    if (out.empty()) out = "(no results)\n";
    return out;
}

}  // namespace detail

class Orchestrator {
public:
    Orchestrator(const EpisodeConfig& config, EpisodeBackends backends)
        : config_(config), b_(std::move(backends)) {
        config_.validate();
        b_.gateway.set_budget(config_.token_budget);
    }

    EpisodeResult run_episode() {
        EpisodeResult result;
        result.manifest.add(Json{{"type", "config"},
                                 {"config", config_},
                                 {"prompt_versions", prompt_versions()}});
        EventScraper scraper(b_.gateway, b_.scraper, b_.provider, config_.chunk_size_words);

        GlobalEventMemory memory;
        try {
            memory = init_memory(config_.query, config_, scraper, b_.gateway,
                                 b_.reasoner, b_.cognition);
        } catch (const EmptyCognition& e) {
            result.manifest.add(Json{{"type", "diagnostic"}, {"message", e.what()}});
            return finish(result, TerminationReason::EmptyCognition);
        } catch (const BudgetExceeded& e) {
            result.manifest.add(Json{{"type", "diagnostic"}, {"message", e.what()}});
            return finish(result, TerminationReason::BudgetExceeded);
        }
        result.memory = memory;
        result.manifest.add(Json{{"type", "xi_revision"}, {"memory", memory}});

        TimelineMemory timeline;
        SearchPlan prior_plan;
        bool have_plan = false;
        TerminationReason reason = TerminationReason::MaxIterations;

        for (int iteration = 1; iteration <= config_.max_iterations; ++iteration) {
            result.manifest.add(Json{{"type", "iteration_start"}, {"iteration", iteration}});
            try {
                run_iteration(iteration, scraper, memory, timeline,
                              have_plan ? &prior_plan : nullptr, result.manifest);
            } catch (const BudgetExceeded& e) {
                result.manifest.add(Json{{"type", "diagnostic"}, {"message", e.what()}});
                result.timeline = timeline;
                result.memory = memory;
                return finish(result, TerminationReason::BudgetExceeded);
            }

            std::vector<Deficiency> deficiencies = analyze(timeline, memory, b_.thresholds);
            result.manifest.add(Json{{"type", "deficiencies"},
                                     {"iteration", iteration},
                                     {"items", deficiencies}});
            SearchPlan plan;
            try {
                plan = make_plan(deficiencies, config_.query,
                                 b_.supervisor_llm ? &b_.gateway : nullptr, b_.reasoner);
            } catch (const BudgetExceeded& e) {
                result.manifest.add(Json{{"type", "diagnostic"}, {"message", e.what()}});
                result.timeline = timeline;
                result.memory = memory;
                return finish(result, TerminationReason::BudgetExceeded);
            }
            result.manifest.add(Json{{"type", "plan"}, {"iteration", iteration}, {"plan", plan}});
            prior_plan = plan;
            have_plan = true;
            if (should_terminate(plan, iteration, config_)) {
                reason = plan.verdict == PlanVerdict::Terminate
                             ? TerminationReason::SupervisorTerminate
                             : TerminationReason::MaxIterations;
                break;
            }
        }
        result.timeline = timeline;
        result.memory = memory;
        return finish(result, reason);
    }

private:
    Json prompt_versions() const {
        return Json{{prompts::event_extraction().name, prompts::event_extraction().version_hash()},
                    {prompts::exploration().name, prompts::exploration().version_hash()},
                    {prompts::supervisor_plan().name, prompts::supervisor_plan().version_hash()}};
    }

    EpisodeResult finish(EpisodeResult& result, TerminationReason reason) {
        result.reason = reason;
        result.usage = b_.gateway.ledger();
        result.manifest.add(Json{{"type", "termination"},
                                 {"reason", to_string(reason)},
                                 {"usage", result.usage}});
        return std::move(result);
    }

    // One marker-protocol loop: searches and updates until Finish or the
    // per-iteration search cap. An iteration with no update is barren.
    void run_iteration(int iteration, EventScraper& scraper, GlobalEventMemory& memory,
                       TimelineMemory& timeline, const SearchPlan* prior_plan,
                       ManifestWriter& manifest) {
        std::string plan_text = "(none)";
        if (prior_plan) {
            plan_text.clear();
            for (const auto& item : prior_plan->items)
                for (const auto& q : item.queries) plan_text += "- " + q + "\n";
            if (plan_text.empty()) plan_text = "(none)";
        }
        std::string prompt = prompts::exploration().render(
            {{"query", config_.query},
             {"memory", render_memory_lines(memory)},
             {"timeline", timeline.entries.empty() ? "(empty)\n" : timeline_to_text(timeline)},
             {"plan", plan_text}});
        std::vector<Message> conversation{{"user", prompt}};

        int searches = 0;
        int updates = 0;
        bool reprompted = false;
        while (true) {
            StreamResult stream = b_.gateway.stream_until_marker(
                b_.reasoner, conversation, {kEndSearch, kEndUpdate});
            AgentAction action = detect_action(stream.text);
            conversation.push_back({"assistant", stream.text});

            if (action.kind == AgentAction::Kind::Finish) {
                manifest.add(Json{{"type", "action"}, {"iteration", iteration}, {"kind", "finish"}});
                break;
            }
            if (action.kind == AgentAction::Kind::Malformed) {
                manifest.add(Json{{"type", "action"}, {"iteration", iteration}, {"kind", "malformed"}});
                if (reprompted) break;  // forced finish
                reprompted = true;
                conversation.push_back({"user", prompts::protocol_reminder().body});
                continue;
            }
            if (action.kind == AgentAction::Kind::Search) {
                ++searches;
                manifest.add(Json{{"type", "action"},
                                  {"iteration", iteration},
                                  {"kind", "search"},
                                  {"query", action.payload}});
                EventMetadata metadata = scraper.scrape(action.payload, config_.n_exp);
                manifest.add(Json{{"type", "search_result"},
                                  {"iteration", iteration},
                                  {"query", action.payload},
                                  {"event_count", metadata.events.size()}});
                memory = update_memory(memory, metadata, b_.gateway, b_.reasoner, b_.cognition);
                manifest.add(Json{{"type", "xi_revision"}, {"memory", memory}});
                conversation.push_back(
                    {"user", std::string(kBeginResult) + "\n" +
                                 detail::render_metadata_lines(metadata) + kEndResult});
                if (searches >= config_.max_searches_per_iteration) {
                    manifest.add(Json{{"type", "action"},
                                      {"iteration", iteration},
                                      {"kind", "search_cap_reached"}});
                    break;
                }
                continue;
            }
            // UpdateTimeline
            SubTimeline sub;
            try {
                sub = parse_subtimeline(action.payload);
            } catch (const EmptySubTimeline&) {
                manifest.add(Json{{"type", "action"},
                                  {"iteration", iteration},
                                  {"kind", "update_rejected"}});
                if (reprompted) break;
                reprompted = true;
                conversation.push_back({"user", prompts::protocol_reminder().body});
                continue;
            }
            ++updates;
            timeline = merge_timeline(timeline, sub, memory, &b_.gateway, b_.reasoner,
                                      b_.merge_mode, iteration);
            manifest.add(Json{{"type", "action"},
                              {"iteration", iteration},
                              {"kind", "update"},
                              {"entries", sub.entries.size()}});
            manifest.add(Json{{"type", "timeline_revision"}, {"timeline", timeline}});
            conversation.push_back({"user", "Timeline updated."});
        }
        manifest.add(Json{{"type", "iteration_end"},
                          {"iteration", iteration},
                          {"searches", searches},
                          {"updates", updates},
                          {"barren", updates == 0}});
    }

    EpisodeConfig config_;
    EpisodeBackends b_;
};

inline EpisodeResult run_episode(const EpisodeConfig& config, EpisodeBackends backends) {
    Orchestrator orchestrator(config, std::move(backends));
    return orchestrator.run_episode();
}

}  // namespace tlr
