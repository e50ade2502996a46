#pragma once

// Timeline metric suite: Concat/Agree/Align ROUGE-1/2 F1 and Date F1,
// with the exact maximum-weight assignment underlying Align.

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "tlr/assignment.hpp"
#include "tlr/calendar.hpp"
#include "tlr/domain.hpp"
#include "tlr/text.hpp"

namespace tlr {

struct ReferenceTimeline {
    std::string query;
    std::map<CalendarDate, std::vector<std::string>> entries;
};

// Reference file: {"query": text, "timelines": [{"YYYY-MM-DD": [sentence,
// ...], ...}, ...]}
inline std::vector<ReferenceTimeline> load_references(const Json& j) {
    std::vector<ReferenceTimeline> refs;
    std::string query = j.value("query", "");
    for (const auto& tl : j.at("timelines")) {
        ReferenceTimeline ref;
        ref.query = query;
        for (const auto& [date_str, sentences] : tl.items()) {
            CalendarDate date = parse_date(date_str);
            if (date.granularity != Granularity::Day)
                throw ParseError("reference date not day-granular: " + date_str);
            std::vector<std::string> list;
            for (const auto& s : sentences) list.push_back(s.get<std::string>());
            if (list.empty())
                throw ParseError("reference date with no sentences: " + date_str);
            ref.entries[date] = std::move(list);
        }
        refs.push_back(std::move(ref));
    }
    return refs;
}

struct MetricReport {
    double concat_r1 = 0, concat_r2 = 0;
    double agree_r1 = 0, agree_r2 = 0;
    double align_r1 = 0, align_r2 = 0;
    double date_f1 = 0;
    int reference_count = 0;
    std::vector<Json> per_reference;
};

inline void to_json(Json& j, const MetricReport& r) {
    j = Json{{"concat_r1", r.concat_r1}, {"concat_r2", r.concat_r2},
             {"agree_r1", r.agree_r1},   {"agree_r2", r.agree_r2},
             {"align_r1", r.align_r1},   {"align_r2", r.align_r2},
             {"date_f1", r.date_f1},     {"reference_count", r.reference_count},
             {"per_reference", r.per_reference}};
}

namespace detail {

struct DatedText {
    CalendarDate date;
    std::vector<std::string> tokens;
};

inline std::vector<DatedText> pred_texts(const TimelineMemory& pred) {
    std::vector<DatedText> out;
    TimelineMemory sorted = pred;
    sorted.sort_entries();
    for (const auto& e : sorted.entries)
        out.push_back({e.date, tokenize(e.summary)});
    return out;
}

inline std::vector<DatedText> ref_texts(const ReferenceTimeline& ref) {
    std::vector<DatedText> out;
    for (const auto& [date, sentences] : ref.entries) {
        std::string joined;
        for (const auto& s : sentences) {
            if (!joined.empty()) joined += ' ';
            joined += s;
        }
        out.push_back({date, tokenize(joined)});
    }
    return out;
}

inline int64_t side_total(const std::vector<DatedText>& side, int n) {
    int64_t total = 0;
    for (const auto& d : side) total += total_ngrams(d.tokens, n);
    return total;
}

}  // namespace detail

inline double concat_f1(const TimelineMemory& pred, const ReferenceTimeline& ref, int n) {
    std::vector<std::string> pred_tokens, ref_tokens;
    for (const auto& d : detail::pred_texts(pred))
        pred_tokens.insert(pred_tokens.end(), d.tokens.begin(), d.tokens.end());
    for (const auto& d : detail::ref_texts(ref))
        ref_tokens.insert(ref_tokens.end(), d.tokens.begin(), d.tokens.end());
    return rouge_f1(pred_tokens, ref_tokens, n);
}

// Clipped overlap over matching dates; denominators span ALL dates on each
// side, so content at wrong dates costs precision and recall.
inline double agree_f1(const TimelineMemory& pred, const ReferenceTimeline& ref, int n) {
    std::vector<detail::DatedText> ps = detail::pred_texts(pred);
    std::vector<detail::DatedText> rs = detail::ref_texts(ref);
    int64_t overlap = 0;
    for (const auto& p : ps)
        for (const auto& r : rs)
            if (p.date == r.date)
                overlap += clipped_overlap(ngram_counts(p.tokens, n),
                                           ngram_counts(r.tokens, n));
    int64_t pred_total = detail::side_total(ps, n);
    int64_t ref_total = detail::side_total(rs, n);
    if (pred_total == 0 || ref_total == 0) return 0.0;
    return f1_from_pr(static_cast<double>(overlap) / static_cast<double>(pred_total),
                      static_cast<double>(overlap) / static_cast<double>(ref_total));
}

// Matching weight: unigram ROUGE F1 times the date penalty 1/(1+days).
// Matched pairs contribute their penalty-weighted clipped n-gram overlap.
inline double align_f1(const TimelineMemory& pred, const ReferenceTimeline& ref, int n) {
    std::vector<detail::DatedText> ps = detail::pred_texts(pred);
    std::vector<detail::DatedText> rs = detail::ref_texts(ref);
    if (ps.empty() || rs.empty()) return 0.0;

    Matrix weights(ps.size(), std::vector<double>(rs.size(), 0.0));
    Matrix distances(ps.size(), std::vector<double>(rs.size(), 0.0));
    for (size_t i = 0; i < ps.size(); ++i) {
        for (size_t j = 0; j < rs.size(); ++j) {
            double d = static_cast<double>(date_distance_days(ps[i].date, rs[j].date));
            distances[i][j] = d;
            weights[i][j] = rouge_f1(ps[i].tokens, rs[j].tokens, 1) / (1.0 + d);
        }
    }
    std::vector<std::pair<int, int>> matching = max_weight_assignment(weights, distances);

    double numerator = 0.0;
    for (const auto& [i, j] : matching) {
        int64_t overlap =
            clipped_overlap(ngram_counts(ps[static_cast<size_t>(i)].tokens, n),
                            ngram_counts(rs[static_cast<size_t>(j)].tokens, n));
        numerator += static_cast<double>(overlap) /
                     (1.0 + distances[static_cast<size_t>(i)][static_cast<size_t>(j)]);
    }
    int64_t pred_total = detail::side_total(ps, n);
    int64_t ref_total = detail::side_total(rs, n);
    if (pred_total == 0 || ref_total == 0) return 0.0;
    return f1_from_pr(numerator / static_cast<double>(pred_total),
                      numerator / static_cast<double>(ref_total));
}

inline double date_f1(const TimelineMemory& pred, const ReferenceTimeline& ref) {
    std::set<CalendarDate> dp, dr;
    for (const auto& e : pred.entries) dp.insert(e.date);
    for (const auto& [date, sentences] : ref.entries) dr.insert(date);
    if (dp.empty() || dr.empty()) return 0.0;
    int64_t common = 0;
    for (const auto& d : dp)
        if (dr.count(d)) ++common;
    return f1_from_pr(static_cast<double>(common) / static_cast<double>(dp.size()),
                      static_cast<double>(common) / static_cast<double>(dr.size()));
}

// Keep the `limit` highest-salience entries (salience = distinct supporting
// documents; ties resolved toward earlier dates).
inline TimelineMemory truncate_to_length(const TimelineMemory& pred, size_t limit) {
    if (pred.entries.size() <= limit) return pred;
    std::vector<size_t> order(pred.entries.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    auto salience = [&](size_t i) {
        std::set<std::string> docs;
        for (const auto& ref : pred.entries[i].support) docs.insert(ref.doc_id);
        return docs.size();
    };
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        size_t sa = salience(a), sb = salience(b);
        if (sa != sb) return sa > sb;
        return pred.entries[a].date < pred.entries[b].date;
    });
    order.resize(limit);
    std::sort(order.begin(), order.end());
    TimelineMemory out;
    out.revision = pred.revision;
    for (size_t i : order) out.entries.push_back(pred.entries[i]);
    return out;
}

// Per reference: optional truncation to the reference's date count, then
// all seven metrics; report per-reference values and their means.
inline MetricReport evaluate(const TimelineMemory& pred,
                             const std::vector<ReferenceTimeline>& refs,
                             bool truncate_to_ref_length = false) {
    if (refs.empty()) throw NoReferences("evaluate called with zero references");
    MetricReport report;
    report.reference_count = static_cast<int>(refs.size());
    for (const auto& ref : refs) {
        TimelineMemory p = truncate_to_ref_length
                               ? truncate_to_length(pred, ref.entries.size())
                               : pred;
        Json one{{"concat_r1", concat_f1(p, ref, 1)},
                 {"concat_r2", concat_f1(p, ref, 2)},
                 {"agree_r1", agree_f1(p, ref, 1)},
                 {"agree_r2", agree_f1(p, ref, 2)},
                 {"align_r1", align_f1(p, ref, 1)},
                 {"align_r2", align_f1(p, ref, 2)},
                 {"date_f1", date_f1(p, ref)}};
        report.concat_r1 += one["concat_r1"].get<double>();
        report.concat_r2 += one["concat_r2"].get<double>();
        report.agree_r1 += one["agree_r1"].get<double>();
        report.agree_r2 += one["agree_r2"].get<double>();
        report.align_r1 += one["align_r1"].get<double>();
        report.align_r2 += one["align_r2"].get<double>();
        report.date_f1 += one["date_f1"].get<double>();
        report.per_reference.push_back(std::move(one));
    }
    double n = static_cast<double>(refs.size());
    report.concat_r1 /= n;
    report.concat_r2 /= n;
    report.agree_r1 /= n;
    report.agree_r2 /= n;
    report.align_r1 /= n;
    report.align_r2 /= n;
    report.date_f1 /= n;
    return report;
}

inline std::string report_to_table(const MetricReport& r) {
    char buf[512];
    std::snprintf(buf, sizeof(buf),
                  "%-12s %8s %8s\n"
                  "%-12s %8.4f %8.4f\n"
                  "%-12s %8.4f %8.4f\n"
                  "%-12s %8.4f %8.4f\n"
                  "%-12s %8.4f %8s\n",
                  "metric", "R-1", "R-2",
                  "concat", r.concat_r1, r.concat_r2,
                  "agree", r.agree_r1, r.agree_r2,
                  "align", r.align_r1, r.align_r2,
                  "date_f1", r.date_f1, "-");
    return buf;
}

}  // namespace tlr
