#pragma once

// Single entry point for model calls: chat-completion over HTTP, sampling
// parameter management, marker-aware streaming, token/usage accounting,
// response caching and a deterministic scripted responder for tests.

#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tlr/cache.hpp"
#include "tlr/domain.hpp"
#include "tlr/errors.hpp"
#include "tlr/retrieval.hpp"  // HttpResponse / PostFn

namespace tlr {

// ceil(chars / 4); used when the provider reports no usage.
inline int64_t approximate_tokens(const std::string& text) {
    return (static_cast<int64_t>(text.size()) + 3) / 4;
}

struct SamplingParams {
    double temperature = 0.7;
    double top_p = 0.9;
    double repetition_penalty = 1.05;
    int max_tokens = 32768;

    void validate() const {
        if (temperature < 0.0 || temperature > 2.0)
            throw Error("temperature out of range");
        if (top_p <= 0.0 || top_p > 1.0) throw Error("top_p out of range");
        if (repetition_penalty < 1.0) throw Error("repetition_penalty out of range");
        if (max_tokens <= 0) throw Error("max_tokens must be positive");
    }
};

enum class ModelRole { Reasoner, Scraper };

struct ModelProfile {
    std::string name;
    ModelRole role = ModelRole::Reasoner;
    SamplingParams params;

    static ModelProfile reasoner(std::string name) {
        ModelProfile p{std::move(name), ModelRole::Reasoner, {}};
        p.params.max_tokens = 32768;
        return p;
    }
    static ModelProfile scraper(std::string name) {
        ModelProfile p{std::move(name), ModelRole::Scraper, {}};
        p.params.max_tokens = 8192;
        return p;
    }
};

struct TokenUsage {
    int64_t prompt_tokens = 0;
    int64_t completion_tokens = 0;
    int64_t call_count = 0;

    int64_t total() const { return prompt_tokens + completion_tokens; }

    TokenUsage& operator+=(const TokenUsage& o) {
        prompt_tokens += o.prompt_tokens;
        completion_tokens += o.completion_tokens;
        call_count += o.call_count;
        return *this;
    }
};

inline void to_json(Json& j, const TokenUsage& u) {
    j = Json{{"prompt_tokens", u.prompt_tokens},
             {"completion_tokens", u.completion_tokens},
             {"call_count", u.call_count}};
}

struct Message {
    std::string role;  // "system" | "user" | "assistant"
    std::string content;
};

inline std::string messages_as_text(const std::vector<Message>& messages) {
    std::string out;
    for (const auto& m : messages) {
        out += m.role;
        out += ": ";
        out += m.content;
        out += '\n';
    }
    return out;
}

class ChatBackend {
public:
    virtual ~ChatBackend() = default;
    // Returns completion text and provider-reported usage when available.
    virtual std::pair<std::string, std::optional<TokenUsage>> complete(
        const ModelProfile& profile, const std::vector<Message>& messages) = 0;
};

// Messages-array chat-completion client. One automatic retry on transport
// failure with 2-second backoff; none on provider errors.
class HttpChatBackend : public ChatBackend {
public:
    HttpChatBackend(std::string endpoint, std::string api_key, PostFn post)
        : endpoint_(std::move(endpoint)),
          api_key_(std::move(api_key)),
          post_(std::move(post)) {}

    std::pair<std::string, std::optional<TokenUsage>> complete(
        const ModelProfile& profile, const std::vector<Message>& messages) override {
        Json body{{"model", profile.name},
                  {"messages", Json::array()},
                  {"temperature", profile.params.temperature},
                  {"top_p", profile.params.top_p},
                  {"max_tokens", profile.params.max_tokens}};
        for (const auto& m : messages)
            body["messages"].push_back(Json{{"role", m.role}, {"content", m.content}});

        HttpResponse resp = issue(body.dump());
        if (!resp.transport_ok) {
            std::this_thread::sleep_for(std::chrono::seconds(2));
            resp = issue(body.dump());
            if (!resp.transport_ok) throw TransportError(resp.transport_error);
        }
        if (resp.status < 200 || resp.status >= 300)
            throw ProviderError(resp.status, resp.body.substr(0, 200));

        Json parsed;
        try {
            parsed = Json::parse(resp.body);
        } catch (const Json::exception& e) {
            throw ParseError(std::string("completion response: ") + e.what());
        }
        std::string text;
        try {
            text = parsed.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const Json::exception& e) {
            throw ParseError(std::string("completion shape: ") + e.what());
        }
        std::optional<TokenUsage> usage;
        if (parsed.contains("usage")) {
            TokenUsage u;
            u.prompt_tokens = parsed["usage"].value("prompt_tokens", 0);
            u.completion_tokens = parsed["usage"].value("completion_tokens", 0);
            u.call_count = 1;
            usage = u;
        }
        return {text, usage};
    }

private:
    HttpResponse issue(const std::string& body) {
        return post_(endpoint_, body,
                     {{"Authorization", "Bearer " + api_key_},
                      {"Content-Type", "application/json"}});
    }

    std::string endpoint_;
    std::string api_key_;
    PostFn post_;
};

// Deterministic scenario playback: each call consumes the first unconsumed
// entry whose matcher matches the request (empty matcher matches anything;
// an ordinal matcher matches only its 1-based call index).
class ScriptedResponder : public ChatBackend {
public:
    struct Entry {
        std::string match;   // substring of the flattened request, "" = any
        int ordinal = 0;     // 1-based call index, 0 = any
        std::string response;
        bool consumed = false;
    };

    ScriptedResponder() = default;
    explicit ScriptedResponder(std::vector<Entry> entries) : entries_(std::move(entries)) {}

    static ScriptedResponder from_json(const Json& j) {
        std::vector<Entry> entries;
        for (const auto& item : j.at("responses")) {
            Entry e;
            if (item.contains("match")) e.match = item["match"].get<std::string>();
            if (item.contains("ordinal")) e.ordinal = item["ordinal"].get<int>();
            e.response = item.at("response").get<std::string>();
            entries.push_back(std::move(e));
        }
        return ScriptedResponder(std::move(entries));
    }

    std::pair<std::string, std::optional<TokenUsage>> complete(
        const ModelProfile&, const std::vector<Message>& messages) override {
        ++call_index_;
        std::string request = messages_as_text(messages);
        for (auto& e : entries_) {
            if (e.consumed) continue;
            if (e.ordinal != 0 && e.ordinal != call_index_) continue;
            if (!e.match.empty() && request.find(e.match) == std::string::npos) continue;
            e.consumed = true;
            return {e.response, std::nullopt};
        }
        throw Error("scripted scenario exhausted at call " + std::to_string(call_index_) +
                    "; request began: " + request.substr(0, 120));
    }

    int calls_made() const { return call_index_; }

private:
    std::vector<Entry> entries_;
    int call_index_ = 0;
};

struct StreamResult {
    std::string text;                    // accumulated text, marker included
    std::optional<std::string> marker;   // absent on natural end
};

class Gateway {
public:
    explicit Gateway(std::shared_ptr<ChatBackend> backend,
                     int64_t token_budget = 1000000,
                     DiskCache disk_cache = DiskCache())
        : backend_(std::move(backend)),
          budget_(token_budget),
          disk_cache_(std::move(disk_cache)) {}

    void set_budget(int64_t budget) { budget_ = budget; }

    TokenUsage ledger() const {
        std::lock_guard<std::mutex> lock(mutex_);
        return ledger_;
    }

    // Full completion with caching and budget enforcement. Cache hits do
    // not touch the ledger.
    std::pair<std::string, TokenUsage> complete(const ModelProfile& profile,
                                                const std::vector<Message>& messages) {
        if (messages.empty()) throw Error("complete: messages must be non-empty");
        profile.params.validate();

        std::string key = cache_key(profile, messages);
        {
            std::lock_guard<std::mutex> lock(mutex_);
            auto it = memory_cache_.find(key);
            if (it != memory_cache_.end()) return it->second;
        }
        if (auto cached = disk_cache_.get(key)) {
            Json j = Json::parse(*cached);
            TokenUsage u;
            u.prompt_tokens = j["usage"]["prompt_tokens"].get<int64_t>();
            u.completion_tokens = j["usage"]["completion_tokens"].get<int64_t>();
            u.call_count = 1;
            std::pair<std::string, TokenUsage> result{j["text"].get<std::string>(), u};
            std::lock_guard<std::mutex> lock(mutex_);
            memory_cache_[key] = result;
            return result;
        }

        std::string prompt_text = messages_as_text(messages);
        int64_t est_prompt = approximate_tokens(prompt_text);
        {
            std::lock_guard<std::mutex> lock(mutex_);
            if (ledger_.total() >= budget_ || ledger_.total() + est_prompt > budget_)
                throw BudgetExceeded("token budget " + std::to_string(budget_) +
                                     " would be exceeded (ledger " +
                                     std::to_string(ledger_.total()) + ")");
        }

        auto [text, provider_usage] = backend_->complete(profile, messages);
        TokenUsage usage;
        if (provider_usage) {
            usage = *provider_usage;
        } else {
            usage.prompt_tokens = est_prompt;
            usage.completion_tokens = approximate_tokens(text);
            usage.call_count = 1;
        }
        {
            std::lock_guard<std::mutex> lock(mutex_);
            ledger_ += usage;
            memory_cache_[key] = {text, usage};
        }
        Json record{{"text", text},
                    {"usage", Json{{"prompt_tokens", usage.prompt_tokens},
                                   {"completion_tokens", usage.completion_tokens}}}};
        disk_cache_.put(key, record.dump());
        return {text, usage};
    }

    // Consumes the completion until any stop marker fully appears or the
    // stream ends; the returned text includes the matched marker.
    StreamResult stream_until_marker(const ModelProfile& profile,
                                     const std::vector<Message>& messages,
                                     const std::vector<std::string>& stop_markers) {
        if (stop_markers.empty())
            throw Error("stream_until_marker: stop_markers must be non-empty");
        auto [text, usage] = complete(profile, messages);
        (void)usage;

        size_t best_pos = std::string::npos;
        size_t best_len = 0;
        std::string matched;
        for (const auto& marker : stop_markers) {
            size_t pos = text.find(marker);
            if (pos != std::string::npos &&
                (pos < best_pos || (pos == best_pos && marker.size() > best_len))) {
                best_pos = pos;
                best_len = marker.size();
                matched = marker;
            }
        }
        if (best_pos == std::string::npos) {
            if (approximate_tokens(text) >= profile.params.max_tokens)
                throw MarkerOverflow("no stop marker within " +
                                     std::to_string(profile.params.max_tokens) + " tokens");
            return {text, std::nullopt};
        }
        return {text.substr(0, best_pos + best_len), matched};
    }

private:
    static std::string cache_key(const ModelProfile& profile,
                                 const std::vector<Message>& messages) {
        std::string key = profile.name + "|" +
                          std::to_string(profile.params.temperature) + "|" +
                          std::to_string(profile.params.top_p) + "|" +
                          std::to_string(profile.params.repetition_penalty) + "|" +
                          std::to_string(profile.params.max_tokens) + "|";
        key += messages_as_text(messages);
        return "llm|" + hash_hex(key);
    }

    std::shared_ptr<ChatBackend> backend_;
    int64_t budget_;
    DiskCache disk_cache_;
    TokenUsage ledger_;
    std::map<std::string, std::pair<std::string, TokenUsage>> memory_cache_;
    mutable std::mutex mutex_;
};

}  // namespace tlr
