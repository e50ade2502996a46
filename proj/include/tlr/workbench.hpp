#pragma once

// Operator surface behind the CLI verbs: index, run, baseline, eval,
// replay, report. Each command is an ordinary function over paths so tests
// can drive it directly.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "tlr/baselines.hpp"
#include "tlr/gateway.hpp"
#include "tlr/http.hpp"
#include "tlr/metrics.hpp"
#include "tlr/orchestrator.hpp"
#include "tlr/retrieval.hpp"

namespace tlr {

namespace detail {

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path);
    out << content;
}

inline std::string env_or(const char* name, const std::string& fallback) {
    const char* value = std::getenv(name);
    return value ? value : fallback;
}

}  // namespace detail

struct RunOptions {
    std::string config_path;
    std::string out_dir;
    std::string scenario_path;   // scripted mode when set
    std::string index_path;      // local retrieval when set
    std::string cache_dir;
    std::string refs_path;       // evaluate after the run when set
    bool truncate_to_ref = true;
    std::string reasoner_model = "qwq-32b";
    std::string scraper_model = "qwen2.5-32b";

    // Flag overrides; flags > config file > built-in defaults.
    std::optional<std::string> query;
    std::optional<int> n_init, n_exp, top_k, max_iterations;
    std::optional<int64_t> token_budget;
    std::optional<int64_t> seed;
};

inline EpisodeConfig resolve_config(const RunOptions& opts) {
    EpisodeConfig config;
    if (!opts.config_path.empty()) {
        Json j = Json::parse(detail::read_file(opts.config_path));
        config = j.get<EpisodeConfig>();
    }
    if (opts.query) config.query = *opts.query;
    if (opts.n_init) config.n_init = *opts.n_init;
    if (opts.n_exp) config.n_exp = *opts.n_exp;
    if (opts.top_k) config.top_k = *opts.top_k;
    if (opts.max_iterations) config.max_iterations = *opts.max_iterations;
    if (opts.token_budget) config.token_budget = *opts.token_budget;
    if (opts.seed) config.seed = *opts.seed;
    config.validate();
    return config;
}

struct ResolvedBackends {
    std::shared_ptr<ChatBackend> chat;
    std::unique_ptr<Gateway> gateway;
    std::unique_ptr<SearchProvider> provider;
};

inline ResolvedBackends resolve_backends(const RunOptions& opts, const EpisodeConfig& config) {
    ResolvedBackends r;
    if (!opts.scenario_path.empty()) {
        Json scenario = Json::parse(detail::read_file(opts.scenario_path));
        r.chat = std::make_shared<ScriptedResponder>(ScriptedResponder::from_json(scenario));
    } else {
        std::string endpoint = detail::env_or("LLM_ENDPOINT", "");
        if (endpoint.empty())
            throw Error("LLM_ENDPOINT not set and no --scenario given");
        r.chat = std::make_shared<HttpChatBackend>(
            endpoint, detail::env_or("LLM_API_KEY", ""), http_post_transport());
    }
    DiskCache cache = opts.cache_dir.empty() ? DiskCache()
                                             : DiskCache(opts.cache_dir + "/llm");
    r.gateway = std::make_unique<Gateway>(r.chat, config.token_budget, std::move(cache));

    if (!opts.index_path.empty()) {
        Json j = Json::parse(detail::read_file(opts.index_path));
        r.provider = std::make_unique<LocalSearchProvider>(index_from_json(j));
    } else {
        std::string key = detail::env_or("SEARCH_API_KEY", "");
        if (key.empty())
            throw Error("SEARCH_API_KEY not set and no --index given");
        DiskCache search_cache = opts.cache_dir.empty()
                                     ? DiskCache()
                                     : DiskCache(opts.cache_dir + "/search");
        r.provider = std::make_unique<RemoteSearchProvider>(
            detail::env_or("SEARCH_ENDPOINT", "https://google.serper.dev/search"), key,
            std::move(search_cache), http_post_transport(), http_get_transport());
    }
    return r;
}

inline void write_run_outputs(const std::string& out_dir, const EpisodeConfig& config,
                              const TimelineMemory& timeline, const ManifestWriter& manifest) {
    std::filesystem::create_directories(out_dir);
    detail::write_file(out_dir + "/timeline.txt", timeline_to_text(timeline));
    detail::write_file(out_dir + "/timeline.json",
                       timeline_to_structured(timeline, config.query).dump(2) + "\n");
    manifest.write(out_dir + "/manifest.jsonl");
}

inline TimelineMemory load_structured_timeline(const Json& j) {
    TimelineMemory timeline;
    for (const auto& e : j.at("entries")) {
        TimelineEntry entry;
        entry.date = parse_date(e.at("date").get<std::string>());
        entry.summary = e.at("summary").get<std::string>();
        if (e.contains("sources"))
            for (const auto& s : e.at("sources"))
                entry.support.push_back(SourceRef{s.get<std::string>(), 0});
        timeline.entries.push_back(std::move(entry));
    }
    timeline.sort_entries();
    return timeline;
}

// --- Commands -----------------------------------------------------------

inline int cmd_index(const std::string& corpus_path, const std::string& index_path,
                     std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    try {
        std::ifstream in(corpus_path);
        if (!in) throw Error("cannot read " + corpus_path);
        LocalIndex index = index_corpus(load_corpus_jsonl(in));
        detail::write_file(index_path, index_to_json(index).dump() + "\n");
        out << "indexed " << index.doc_count << " documents, vocabulary "
            << index.vocabulary_size() << " terms\n";
        return 0;
    } catch (const Error& e) {
        err << "index: " << e.what() << "\n";
        return 1;
    }
}

inline int evaluate_into(const TimelineMemory& timeline, const std::string& refs_path,
                         bool truncate, const std::string& out_path, std::ostream& out) {
    Json refs_json = Json::parse(detail::read_file(refs_path));
    std::vector<ReferenceTimeline> refs = load_references(refs_json);
    MetricReport report = evaluate(timeline, refs, truncate);
    Json j = report;
    if (!out_path.empty()) detail::write_file(out_path, j.dump(2) + "\n");
    out << report_to_table(report);
    return 0;
}

inline int cmd_run(const RunOptions& opts, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
    EpisodeConfig config;
    ResolvedBackends backends;
    try {
        config = resolve_config(opts);
        backends = resolve_backends(opts, config);
    } catch (const Error& e) {
        err << "run: " << e.what() << "\n";
        return 2;  // configuration errors exit before any network call
    }
    try {
        EpisodeBackends eb{*backends.gateway, *backends.provider,
                           ModelProfile::reasoner(opts.reasoner_model),
                           ModelProfile::scraper(opts.scraper_model)};
        EpisodeResult result = run_episode(config, std::move(eb));
        write_run_outputs(opts.out_dir, config, result.timeline, result.manifest);
        out << "termination: " << to_string(result.reason) << "\n"
            << "tokens: prompt " << result.usage.prompt_tokens << ", completion "
            << result.usage.completion_tokens << ", calls " << result.usage.call_count
            << "\n";
        if (!opts.refs_path.empty())
            evaluate_into(result.timeline, opts.refs_path, opts.truncate_to_ref,
                          opts.out_dir + "/metrics.json", out);
        return result.reason == TerminationReason::EmptyCognition ? 1 : 0;
    } catch (const Error& e) {
        err << "run: " << e.what() << "\n";
        return 1;
    }
}

inline int cmd_baseline(const std::string& kind_name, const RunOptions& opts,
                        std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    BaselineKind kind;
    if (kind_name == "direct") {
        kind = BaselineKind::Direct;
    } else if (kind_name == "rewrite") {
        kind = BaselineKind::Rewrite;
    } else if (kind_name == "iter_rag") {
        kind = BaselineKind::IterRag;
    } else {
        err << "baseline: unknown kind '" << kind_name << "'\n";
        return 2;
    }
    EpisodeConfig config;
    ResolvedBackends backends;
    try {
        config = resolve_config(opts);
        backends = resolve_backends(opts, config);
    } catch (const Error& e) {
        err << "baseline: " << e.what() << "\n";
        return 2;
    }
    try {
        BaselineResult result =
            run_baseline(kind, config, *backends.gateway, *backends.provider,
                         ModelProfile::reasoner(opts.reasoner_model));
        write_run_outputs(opts.out_dir, config, result.timeline, result.manifest);
        out << "method: " << kind_name << "\n"
            << "tokens: prompt " << result.usage.prompt_tokens << ", completion "
            << result.usage.completion_tokens << ", calls " << result.usage.call_count
            << "\n";
        if (!opts.refs_path.empty())
            evaluate_into(result.timeline, opts.refs_path, opts.truncate_to_ref,
                          opts.out_dir + "/metrics.json", out);
        return 0;
    } catch (const Error& e) {
        err << "baseline: " << e.what() << "\n";
        return 1;
    }
}

inline int cmd_eval(const std::string& pred_path, const std::string& refs_path,
                    bool truncate, const std::string& out_path = "",
                    std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    try {
        Json pred_json = Json::parse(detail::read_file(pred_path));
        TimelineMemory timeline = load_structured_timeline(pred_json);
        return evaluate_into(timeline, refs_path, truncate, out_path, out);
    } catch (const Json::exception& e) {
        err << "eval: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        err << "eval: " << e.what() << "\n";
        return 1;
    }
}

// Renders a manifest as a human-readable transcript of the episode.
inline int cmd_replay(const std::string& manifest_path, std::ostream& out = std::cout,
                      std::ostream& err = std::cerr) {
    try {
        std::istringstream in(detail::read_file(manifest_path));
        std::string line;
        size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty()) continue;
            Json j;
            std::string type;
            try {
                j = Json::parse(line);
                type = j.value("type", "?");
            } catch (const Json::exception& e) {
                err << "replay: corrupt manifest at line " << line_no << ": " << e.what()
                    << "\n";
                return 1;
            }
            if (type == "config") {
                out << "== episode: " << j.value("config", Json::object()).value("query", "")
                    << " ==\n";
            } else if (type == "iteration_start") {
                out << "-- iteration " << j["iteration"] << " --\n";
            } else if (type == "action") {
                std::string kind = j.value("kind", "?");
                out << "  action: " << kind;
                if (j.contains("query")) out << " " << kBeginSearch << j["query"].get<std::string>() << kEndSearch;
                if (j.contains("entries")) out << " (" << j["entries"] << " entries)";
                out << "\n";
            } else if (type == "search_result") {
                out << "  " << kBeginResult << j["event_count"] << " events"
                    << kEndResult << "\n";
            } else if (type == "xi_revision") {
                out << "  global memory revision " << j["memory"]["revision"] << " ("
                    << j["memory"]["events"].size() << " events)\n";
            } else if (type == "timeline_revision") {
                out << "  timeline revision " << j["timeline"]["revision"] << " ("
                    << j["timeline"]["entries"].size() << " entries)\n";
            } else if (type == "deficiencies") {
                out << "  supervisor: " << j["items"].size() << " deficiencies\n";
            } else if (type == "plan") {
                out << "  plan: " << j["plan"]["verdict"].get<std::string>() << "\n";
            } else if (type == "retrieval") {
                out << "  retrieval round " << j["round"] << ": " << j.value("query", "")
                    << " (" << j["hit_count"] << " hits)\n";
            } else if (type == "generation") {
                out << "  generation round " << j["round"] << "\n";
            } else if (type == "termination") {
                out << "== termination: " << j["reason"].get<std::string>() << ", tokens "
                    << j["usage"]["prompt_tokens"].get<int64_t>() +
                           j["usage"]["completion_tokens"].get<int64_t>()
                    << " ==\n";
            }
        }
        return 0;
    } catch (const Error& e) {
        err << "replay: " << e.what() << "\n";
        return 1;
    }
}

// Emits a method x {Align R-2, Date F1, total tokens} comparison table from
// run directories holding manifest.jsonl and metrics.json.
inline int cmd_report(const std::vector<std::string>& run_dirs,
                      std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    struct Row {
        std::string method;
        double align_r2 = 0;
        double date_f1 = 0;
        int64_t tokens = 0;
    };
    std::vector<Row> rows;
    for (const auto& dir : run_dirs) {
        try {
            Row row;
            row.method = std::filesystem::path(dir).filename().string();
            std::istringstream manifest(detail::read_file(dir + "/manifest.jsonl"));
            std::string line;
            while (std::getline(manifest, line)) {
                if (line.empty()) continue;
                Json j = Json::parse(line);
                if (j.value("type", "") == "config" && j.contains("method"))
                    row.method = j["method"].get<std::string>();
                if (j.value("type", "") == "termination")
                    row.tokens = j["usage"]["prompt_tokens"].get<int64_t>() +
                                 j["usage"]["completion_tokens"].get<int64_t>();
            }
            Json metrics = Json::parse(detail::read_file(dir + "/metrics.json"));
            row.align_r2 = metrics.value("align_r2", 0.0);
            row.date_f1 = metrics.value("date_f1", 0.0);
            rows.push_back(std::move(row));
        } catch (const Json::exception& e) {
            err << "report: " << dir << ": " << e.what() << "\n";
            return 1;
        } catch (const Error& e) {
            err << "report: " << e.what() << "\n";
            return 1;
        }
    }
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%-20s %10s %10s %12s\n", "method", "align_r2",
                  "date_f1", "tokens");
    out << buf;
    for (const auto& row : rows) {
        std::snprintf(buf, sizeof(buf), "%-20s %10.4f %10.4f %12lld\n",
                      row.method.c_str(), row.align_r2, row.date_f1,
                      static_cast<long long>(row.tokens));
        out << buf;
    }
    return 0;
}

}  // namespace tlr
