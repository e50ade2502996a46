#pragma once

// Baseline runners: DIRECT (one retrieval, one generation), REWRITE
// (2-3 query variants, union of retrievals, one generation) and ITER_RAG
// (five refine-retrieve-regenerate rounds). All emit the same artifact
// shapes as the main engine so evaluation treats methods uniformly.

#include <set>
#include <string>
#include <vector>

#include "tlr/domain.hpp"
#include "tlr/gateway.hpp"
#include "tlr/orchestrator.hpp"
#include "tlr/prompts.hpp"
#include "tlr/retrieval.hpp"
#include "tlr/updater.hpp"

namespace tlr {

enum class BaselineKind { Direct, Rewrite, IterRag };

inline const char* to_string(BaselineKind k) {
    switch (k) {
        case BaselineKind::Direct: return "direct";
        case BaselineKind::Rewrite: return "rewrite";
        case BaselineKind::IterRag: return "iter_rag";
    }
    return "?";
}

namespace detail {

inline std::string render_documents(const std::vector<Document>& docs, int max_words_per_doc) {
    std::string out;
    for (const auto& doc : docs) {
        out += "### " + doc.title;
        if (doc.published) out += " (" + format_date(*doc.published) + ")";
        out += "\n";
        std::vector<std::string> words = split_words(doc.body);
        for (size_t i = 0; i < words.size() && i < static_cast<size_t>(max_words_per_doc); ++i) {
            if (i) out += ' ';
            out += words[i];
        }
        out += "\n\n";
    }
    return out;
}

inline std::vector<Document> retrieve_docs(SearchProvider& provider, const std::string& query,
                                           int k, std::set<std::string>& seen,
                                           ManifestWriter& manifest, int round) {
    std::vector<SearchHit> hits = provider.search(query, k);
    manifest.add(Json{{"type", "retrieval"},
                      {"round", round},
                      {"query", query},
                      {"hit_count", hits.size()}});
    std::vector<Document> docs;
    for (const auto& hit : hits) {
        if (!seen.insert(hit.doc_id).second) continue;
        if (auto doc = provider.fetch(hit)) docs.push_back(std::move(*doc));
    }
    return docs;
}

inline TimelineMemory parse_generated_timeline(const std::string& text) {
    TimelineMemory timeline;
    try {
        SubTimeline sub = parse_subtimeline(text);
        timeline = merge_deterministic(TimelineMemory{}, sub, 0);
        timeline.revision = 0;
    } catch (const EmptySubTimeline&) {
        // degenerate generation; empty timeline is a valid (bad) output
    }
    return timeline;
}

}  // namespace detail

struct BaselineResult {
    TimelineMemory timeline;
    ManifestWriter manifest;
    TokenUsage usage;
};

inline BaselineResult run_baseline(BaselineKind kind, const EpisodeConfig& config,
                                   Gateway& gateway, SearchProvider& provider,
                                   const ModelProfile& model,
                                   int doc_words_in_prompt = 400) {
    config.validate();
    gateway.set_budget(config.token_budget);
    BaselineResult result;
    result.manifest.add(Json{{"type", "config"},
                             {"config", config},
                             {"method", to_string(kind)}});
    std::set<std::string> seen;

    try {
        switch (kind) {
            case BaselineKind::Direct: {
                std::vector<Document> docs = detail::retrieve_docs(
                    provider, config.query, config.top_k, seen, result.manifest, 1);
                std::string prompt = prompts::baseline_generate().render(
                    {{"query", config.query},
                     {"documents", detail::render_documents(docs, doc_words_in_prompt)}});
                auto [text, usage] = gateway.complete(model, {{"user", prompt}});
                (void)usage;
                result.manifest.add(Json{{"type", "generation"}, {"round", 1}});
                result.timeline = detail::parse_generated_timeline(text);
                break;
            }
            case BaselineKind::Rewrite: {
                std::string prompt = prompts::baseline_rewrite().render(
                    {{"query", config.query}});
                auto [reply, usage] = gateway.complete(model, {{"user", prompt}});
                (void)usage;
                std::vector<std::string> variants;
                {
                    std::istringstream in(reply);
                    std::string line;
                    while (std::getline(in, line)) {
                        std::string v = collapse_whitespace(line);
                        if (!v.empty()) variants.push_back(v);
                    }
                }
                if (variants.empty()) variants.push_back(config.query);
                if (variants.size() > 3) variants.resize(3);
                result.manifest.add(Json{{"type", "rewrite"}, {"variants", variants}});
                std::vector<Document> docs;
                int round = 0;
                for (const auto& v : variants) {
                    std::vector<Document> batch = detail::retrieve_docs(
                        provider, v, config.top_k, seen, result.manifest, ++round);
                    docs.insert(docs.end(), batch.begin(), batch.end());
                }
                std::string gen_prompt = prompts::baseline_generate().render(
                    {{"query", config.query},
                     {"documents", detail::render_documents(docs, doc_words_in_prompt)}});
                auto [text, usage2] = gateway.complete(model, {{"user", gen_prompt}});
                (void)usage2;
                result.manifest.add(Json{{"type", "generation"}, {"round", 1}});
                result.timeline = detail::parse_generated_timeline(text);
                break;
            }
            case BaselineKind::IterRag: {
                constexpr int kRounds = 5;
                TimelineMemory timeline;
                for (int round = 1; round <= kRounds; ++round) {
                    std::string query = config.query;
                    if (round > 1) {
                        std::string refine = prompts::baseline_refine().render(
                            {{"query", config.query},
                             {"timeline", timeline.entries.empty()
                                              ? "(empty)\n"
                                              : timeline_to_text(timeline)}});
                        auto [reply, usage] = gateway.complete(model, {{"user", refine}});
                        (void)usage;
                        std::string refined = collapse_whitespace(reply);
                        if (!refined.empty()) query = refined;
                    }
                    std::vector<Document> docs = detail::retrieve_docs(
                        provider, query, config.top_k, seen, result.manifest, round);
                    std::string gen_prompt = prompts::iter_generate().render(
                        {{"query", config.query},
                         {"timeline", timeline.entries.empty() ? "(empty)\n"
                                                               : timeline_to_text(timeline)},
                         {"documents", detail::render_documents(docs, doc_words_in_prompt)}});
                    auto [text, usage2] = gateway.complete(model, {{"user", gen_prompt}});
                    (void)usage2;
                    result.manifest.add(Json{{"type", "generation"}, {"round", round}});
                    TimelineMemory generated = detail::parse_generated_timeline(text);
                    if (!generated.entries.empty()) timeline = generated;
                    timeline.revision = round;
                }
                result.timeline = timeline;
                break;
            }
        }
    } catch (const BudgetExceeded& e) {
        result.manifest.add(Json{{"type", "diagnostic"}, {"message", e.what()}});
        result.usage = gateway.ledger();
        result.manifest.add(Json{{"type", "termination"},
                                 {"reason", "budget_exceeded"},
                                 {"usage", result.usage}});
        return result;
    }
    result.usage = gateway.ledger();
    result.manifest.add(Json{{"type", "termination"},
                             {"reason", "completed"},
                             {"usage", result.usage}});
    return result;
}

}  // namespace tlr
