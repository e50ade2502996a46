#pragma once

// Text utilities shared by the metric suite and the merge rules:
// tokenization, n-gram overlap, ROUGE-N F1, sentence and word splitting.

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace tlr {

inline std::string to_lower(std::string s) {
    for (char& c : s)
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

inline std::string collapse_whitespace(const std::string& s) {
    std::string out;
    bool in_ws = true;
    for (char c : s) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (!in_ws) out += ' ';
            in_ws = true;
        } else {
            out += c;
            in_ws = false;
        }
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    return out;
}

// Canonical form used for dedup keys: lowercase, collapsed whitespace,
// terminal punctuation stripped.
inline std::string normalize_description(const std::string& s) {
    std::string out = collapse_whitespace(to_lower(s));
    while (!out.empty() &&
           (out.back() == '.' || out.back() == '!' || out.back() == '?' ||
            out.back() == ',' || out.back() == ';' || out.back() == ':')) {
        out.pop_back();
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    return out;
}

inline const std::set<std::string>& default_stopwords() {
    static const std::set<std::string> words = {
        "a", "an", "the", "and", "or", "of", "in", "on", "at",
        "to", "for", "is", "was", "are", "were", "be", "by", "with"};
    return words;
}

// Lowercase, split on any non-alphanumeric character, drop empties.
inline std::vector<std::string> tokenize(const std::string& text,
                                         bool drop_stopwords = false) {
    std::vector<std::string> tokens;
    std::string cur;
    for (char c : text) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            cur += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        } else if (!cur.empty()) {
            tokens.push_back(cur);
            cur.clear();
        }
    }
    if (!cur.empty()) tokens.push_back(cur);
    if (drop_stopwords) {
        std::vector<std::string> kept;
        kept.reserve(tokens.size());
        for (auto& t : tokens)
            if (!default_stopwords().count(t)) kept.push_back(std::move(t));
        tokens = std::move(kept);
    }
    return tokens;
}

using NgramCounts = std::map<std::string, int>;

inline NgramCounts ngram_counts(const std::vector<std::string>& tokens, int n) {
    NgramCounts counts;
    if (n <= 0 || tokens.size() < static_cast<size_t>(n)) return counts;
    for (size_t i = 0; i + static_cast<size_t>(n) <= tokens.size(); ++i) {
        std::string key = tokens[i];
        for (int j = 1; j < n; ++j) {
            key += '\x1f';
            key += tokens[i + static_cast<size_t>(j)];
        }
        ++counts[key];
    }
    return counts;
}

inline int64_t total_ngrams(const std::vector<std::string>& tokens, int n) {
    if (tokens.size() < static_cast<size_t>(n)) return 0;
    return static_cast<int64_t>(tokens.size()) - n + 1;
}

// Clipped overlap: sum over n-grams of min(count_a, count_b).
inline int64_t clipped_overlap(const NgramCounts& a, const NgramCounts& b) {
    int64_t overlap = 0;
    for (const auto& [gram, count] : a) {
        auto it = b.find(gram);
        if (it != b.end()) overlap += std::min(count, it->second);
    }
    return overlap;
}

inline double f1_from_pr(double p, double r) {
    if (p + r <= 0.0) return 0.0;
    return 2.0 * p * r / (p + r);
}

inline double rouge_f1(const std::vector<std::string>& pred,
                       const std::vector<std::string>& ref, int n) {
    int64_t pred_total = total_ngrams(pred, n);
    int64_t ref_total = total_ngrams(ref, n);
    if (pred_total == 0 || ref_total == 0) return 0.0;
    int64_t overlap = clipped_overlap(ngram_counts(pred, n), ngram_counts(ref, n));
    double p = static_cast<double>(overlap) / static_cast<double>(pred_total);
    double r = static_cast<double>(overlap) / static_cast<double>(ref_total);
    return f1_from_pr(p, r);
}

// Unigram ROUGE-1 F1 over raw texts, the similarity used by fusion and
// dedup rules throughout.
inline double unigram_f1(const std::string& a, const std::string& b) {
    return rouge_f1(tokenize(a), tokenize(b), 1);
}

// Split into sentences on ./!/? followed by whitespace or end of text.
inline std::vector<std::string> split_sentences(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (size_t i = 0; i < text.size(); ++i) {
        cur += text[i];
        if ((text[i] == '.' || text[i] == '!' || text[i] == '?') &&
            (i + 1 == text.size() ||
             std::isspace(static_cast<unsigned char>(text[i + 1])))) {
            std::string t = collapse_whitespace(cur);
            if (!t.empty()) out.push_back(t);
            cur.clear();
        }
    }
    std::string t = collapse_whitespace(cur);
    if (!t.empty()) out.push_back(t);
    return out;
}

inline std::vector<std::string> split_words(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (!cur.empty()) {
                out.push_back(cur);
                cur.clear();
            }
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

}  // namespace tlr
