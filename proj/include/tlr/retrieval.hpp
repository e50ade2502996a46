#pragma once

// Search abstraction: a local BM25 inverted index over a fixed corpus for
// closed-domain runs and a JSON-over-HTTP web-search client for open-domain
// runs, plus document fetching, markup cleaning and response caching.

#include <algorithm>
#include <cmath>
#include <functional>
#include <istream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tlr/cache.hpp"
#include "tlr/domain.hpp"
#include "tlr/errors.hpp"
#include "tlr/text.hpp"

namespace tlr {

struct SearchHit {
    std::string doc_id;  // identifier or URL
    std::string title;
    std::string snippet;
    std::optional<CalendarDate> published;
    double score = 0.0;
};

struct Document {
    std::string doc_id;
    std::string title;
    std::optional<CalendarDate> published;
    std::string body;  // markup-free plain text
};

inline void to_json(Json& j, const SearchHit& h) {
    j = Json{{"doc_id", h.doc_id},
             {"title", h.title},
             {"snippet", h.snippet},
             {"score", h.score}};
    if (h.published) j["published"] = *h.published;
}
inline void from_json(const Json& j, SearchHit& h) {
    j.at("doc_id").get_to(h.doc_id);
    if (j.contains("title")) j.at("title").get_to(h.title);
    if (j.contains("snippet")) j.at("snippet").get_to(h.snippet);
    if (j.contains("score")) j.at("score").get_to(h.score);
    if (j.contains("published")) h.published = j.at("published").get<CalendarDate>();
}

// --- Markup cleaning ----------------------------------------------------

// Removes script/style regions, strips tags, decodes the five standard
// entities, collapses whitespace.
inline std::string clean_markup(const std::string& raw) {
    std::string no_regions;
    no_regions.reserve(raw.size());
    std::string lower = to_lower(raw);
    size_t i = 0;
    while (i < raw.size()) {
        bool skipped = false;
        for (const char* open : {"<script", "<style"}) {
            std::string tag(open);
            if (lower.compare(i, tag.size(), tag) == 0) {
                std::string close = tag[1] == 's' && tag[2] == 'c' ? "</script" : "</style";
                size_t end = lower.find(close, i);
                if (end == std::string::npos) {
                    i = raw.size();
                } else {
                    size_t gt = lower.find('>', end);
                    i = gt == std::string::npos ? raw.size() : gt + 1;
                }
                skipped = true;
                break;
            }
        }
        if (skipped) continue;
        if (raw[i] == '<') {
            size_t gt = raw.find('>', i);
            if (gt == std::string::npos) break;
            no_regions += ' ';
            i = gt + 1;
        } else {
            no_regions += raw[i];
            ++i;
        }
    }
    // Entity decoding.
    std::string decoded;
    decoded.reserve(no_regions.size());
    static const std::vector<std::pair<std::string, char>> entities = {
        {"&amp;", '&'}, {"&lt;", '<'}, {"&gt;", '>'}, {"&quot;", '"'},
        {"&apos;", '\''}, {"&#39;", '\''}};
    for (size_t p = 0; p < no_regions.size();) {
        bool matched = false;
        if (no_regions[p] == '&') {
            for (const auto& [ent, ch] : entities) {
                if (no_regions.compare(p, ent.size(), ent) == 0) {
                    decoded += ch;
                    p += ent.size();
                    matched = true;
                    break;
                }
            }
        }
        if (!matched) {
            decoded += no_regions[p];
            ++p;
        }
    }
    return collapse_whitespace(decoded);
}

// --- Corpus and local index ---------------------------------------------

struct CorpusRecord {
    std::string id;
    std::string title;
    std::optional<CalendarDate> date;
    std::string text;
};

// JSON Lines, one record per line:
// {"id": text, "title": text, "date": "YYYY-MM-DD" optional, "text": text}
inline std::vector<CorpusRecord> load_corpus_jsonl(std::istream& in) {
    std::vector<CorpusRecord> records;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        Json j;
        try {
            j = Json::parse(line);
        } catch (const Json::exception& e) {
            throw MalformedRecord("line " + std::to_string(line_no) + ": " + e.what());
        }
        CorpusRecord rec;
        if (!j.contains("id") || !j["id"].is_string() || j["id"].get<std::string>().empty())
            throw MalformedRecord("line " + std::to_string(line_no) + ": missing doc_id");
        if (!j.contains("text") || !j["text"].is_string())
            throw MalformedRecord("line " + std::to_string(line_no) + ": missing body");
        rec.id = j["id"].get<std::string>();
        rec.text = j["text"].get<std::string>();
        if (j.contains("title")) rec.title = j["title"].get<std::string>();
        if (j.contains("date")) rec.date = parse_date(j["date"].get<std::string>());
        records.push_back(std::move(rec));
    }
    return records;
}

struct LocalIndex {
    std::map<std::string, std::vector<std::pair<std::string, int>>> postings;
    std::map<std::string, int64_t> doc_lengths;
    double avg_doc_length = 0.0;
    int doc_count = 0;
    std::map<std::string, Document> documents;

    size_t vocabulary_size() const { return postings.size(); }
};

// Index over lowercase alphanumeric tokens of title+body; deterministic for
// a given input order.
inline LocalIndex index_corpus(const std::vector<CorpusRecord>& records) {
    LocalIndex index;
    for (const auto& rec : records) {
        if (rec.id.empty()) throw MalformedRecord("record with empty doc_id");
        if (rec.text.empty()) throw MalformedRecord("record '" + rec.id + "' has no body");
        if (index.documents.count(rec.id))
            throw DuplicateDocId("duplicate doc_id: " + rec.id);
        std::vector<std::string> tokens = tokenize(rec.title + " " + rec.text);
        std::map<std::string, int> tf;
        for (const auto& t : tokens) ++tf[t];
        for (const auto& [term, count] : tf)
            index.postings[term].emplace_back(rec.id, count);
        index.doc_lengths[rec.id] = static_cast<int64_t>(tokens.size());
        index.documents[rec.id] = Document{rec.id, rec.title, rec.date, rec.text};
    }
    index.doc_count = static_cast<int>(index.documents.size());
    if (index.doc_count > 0) {
        int64_t total = 0;
        for (const auto& [id, len] : index.doc_lengths) total += len;
        index.avg_doc_length = static_cast<double>(total) / index.doc_count;
    }
    return index;
}

// Top-k by BM25, k1=1.2, b=0.75, IDF = ln(1 + (N - df + 0.5)/(df + 0.5));
// ties broken by lexicographic doc_id.
inline std::vector<SearchHit> search_local(const LocalIndex& index,
                                           const std::string& query, int k) {
    constexpr double k1 = 1.2;
    constexpr double b = 0.75;
    std::map<std::string, double> scores;
    std::vector<std::string> terms = tokenize(query);
    std::set<std::string> seen;
    for (const auto& term : terms) {
        if (!seen.insert(term).second) continue;  // score each term once
        auto it = index.postings.find(term);
        if (it == index.postings.end()) continue;
        double df = static_cast<double>(it->second.size());
        double idf = std::log(1.0 + (index.doc_count - df + 0.5) / (df + 0.5));
        for (const auto& [doc_id, tf] : it->second) {
            double len = static_cast<double>(index.doc_lengths.at(doc_id));
            double norm = tf * (k1 + 1.0) /
                          (tf + k1 * (1.0 - b + b * len / index.avg_doc_length));
            scores[doc_id] += idf * norm;
        }
    }
    std::vector<std::pair<std::string, double>> ranked(scores.begin(), scores.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b2) {
        if (a.second != b2.second) return a.second > b2.second;
        return a.first < b2.first;
    });
    if (static_cast<int>(ranked.size()) > k) ranked.resize(static_cast<size_t>(k));

    std::vector<SearchHit> hits;
    for (const auto& [doc_id, score] : ranked) {
        const Document& doc = index.documents.at(doc_id);
        std::vector<std::string> words = split_words(doc.body);
        std::string snippet;
        for (size_t i = 0; i < words.size() && i < 30; ++i) {
            if (i) snippet += ' ';
            snippet += words[i];
        }
        hits.push_back(SearchHit{doc_id, doc.title, snippet, doc.published, score});
    }
    return hits;
}

inline Json index_to_json(const LocalIndex& index) {
    Json docs = Json::array();
    for (const auto& [id, doc] : index.documents) {
        Json d{{"id", doc.doc_id}, {"title", doc.title}, {"text", doc.body}};
        if (doc.published) d["date"] = *doc.published;
        docs.push_back(std::move(d));
    }
    return Json{{"documents", docs}};
}

inline LocalIndex index_from_json(const Json& j) {
    std::vector<CorpusRecord> records;
    for (const auto& d : j.at("documents")) {
        CorpusRecord rec;
        rec.id = d.at("id").get<std::string>();
        if (d.contains("title")) rec.title = d.at("title").get<std::string>();
        rec.text = d.at("text").get<std::string>();
        if (d.contains("date")) rec.date = d.at("date").get<CalendarDate>();
        records.push_back(std::move(rec));
    }
    return index_corpus(records);
}

// --- Providers ----------------------------------------------------------

class SearchProvider {
public:
    virtual ~SearchProvider() = default;
    virtual std::vector<SearchHit> search(const std::string& query, int k) = 0;
    // Snippet fallback applies on fetch failure; nullopt means unusable.
    virtual std::optional<Document> fetch(const SearchHit& hit) = 0;
};

class LocalSearchProvider : public SearchProvider {
public:
    explicit LocalSearchProvider(LocalIndex index) : index_(std::move(index)) {}

    std::vector<SearchHit> search(const std::string& query, int k) override {
        return search_local(index_, query, k);
    }

    std::optional<Document> fetch(const SearchHit& hit) override {
        auto it = index_.documents.find(hit.doc_id);
        if (it == index_.documents.end()) return std::nullopt;
        return it->second;
    }

    const LocalIndex& index() const { return index_; }

private:
    LocalIndex index_;
};

struct HttpResponse {
    int status = 0;
    std::string body;
    bool transport_ok = true;
    std::string transport_error;
};

using PostFn = std::function<HttpResponse(const std::string& url, const std::string& body,
                                          const std::map<std::string, std::string>& headers)>;
using GetFn = std::function<HttpResponse(const std::string& url)>;

class RemoteSearchProvider : public SearchProvider {
public:
    RemoteSearchProvider(std::string endpoint, std::string api_key, DiskCache cache,
                         PostFn post, GetFn get)
        : endpoint_(std::move(endpoint)),
          api_key_(std::move(api_key)),
          cache_(std::move(cache)),
          post_(std::move(post)),
          get_(std::move(get)) {}

    std::vector<SearchHit> search(const std::string& query, int k) override {
        std::string key = "search|" + endpoint_ + "|" + query + "|" + std::to_string(k);
        if (auto cached = cache_.get(key)) return parse_hits(Json::parse(*cached));

        Json body{{"q", query}, {"num", k}};
        HttpResponse resp = post_(endpoint_, body.dump(),
                                  {{"X-API-KEY", api_key_},
                                   {"Content-Type", "application/json"}});
        if (!resp.transport_ok) throw TransportError(resp.transport_error);
        if (resp.status < 200 || resp.status >= 300)
            throw ProviderError(resp.status, resp.body.substr(0, 200));
        Json parsed;
        try {
            parsed = Json::parse(resp.body);
        } catch (const Json::exception& e) {
            throw ParseError(std::string("search response: ") + e.what());
        }
        std::vector<SearchHit> hits = parse_hits(parsed);
        cache_.put(key, hits_to_json(hits).dump());
        return hits;
    }

    std::optional<Document> fetch(const SearchHit& hit) override {
        std::string key = "fetch|" + hit.doc_id;
        std::string text;
        if (auto cached = cache_.get(key)) {
            text = *cached;
        } else {
            HttpResponse resp = get_(hit.doc_id);
            if (!resp.transport_ok || resp.status < 200 || resp.status >= 300) {
                return snippet_fallback(hit);
            }
            text = clean_markup(resp.body);
            cache_.put(key, text);
        }
        if (tokenize(text).size() < 20) return snippet_fallback(hit);
        return Document{hit.doc_id, hit.title, hit.published, text};
    }

private:
    static std::optional<Document> snippet_fallback(const SearchHit& hit) {
        std::string body = collapse_whitespace(hit.title + ". " + hit.snippet);
        if (tokenize(body).empty()) return std::nullopt;
        return Document{hit.doc_id, hit.title, hit.published, body};
    }

    static Json hits_to_json(const std::vector<SearchHit>& hits) {
        Json arr = Json::array();
        for (const auto& h : hits) arr.push_back(h);
        return Json{{"hits", arr}};
    }

    std::vector<SearchHit> parse_hits(const Json& j) const {
        const Json* arr = nullptr;
        if (j.is_array()) {
            arr = &j;
        } else if (j.contains("hits") && j["hits"].is_array()) {
            arr = &j["hits"];
        } else if (j.contains("organic") && j["organic"].is_array()) {
            arr = &j["organic"];
        } else {
            throw ParseError("search response has no result array");
        }
        std::vector<SearchHit> hits;
        for (const auto& item : *arr) {
            SearchHit h;
            if (item.contains("doc_id")) {
                h = item.get<SearchHit>();
            } else {
                if (!item.contains("link")) throw ParseError("hit without link");
                h.doc_id = item["link"].get<std::string>();
                if (item.contains("title")) h.title = item["title"].get<std::string>();
                if (item.contains("snippet")) h.snippet = item["snippet"].get<std::string>();
                if (item.contains("date")) {
                    try {
                        h.published = parse_date(item["date"].get<std::string>());
                    } catch (const Error&) {
                        // unparseable provider dates are dropped
                    }
                }
            }
            hits.push_back(std::move(h));
        }
        return hits;
    }

    std::string endpoint_;
    std::string api_key_;
    DiskCache cache_;
    PostFn post_;
    GetFn get_;
};

}  // namespace tlr
