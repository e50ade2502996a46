#pragma once

// Versioned prompt templates. Each template's FNV hash is recorded in the
// run manifest so transcripts are traceable to the exact prompt text.

#include "tlr/domain.hpp"

namespace tlr::prompts {

inline const PromptTemplate& event_extraction() {
    static const PromptTemplate t{
        "event-extraction-v1",
        "Extract dated events from the news text below.\n"
        "Return only a JSON array; each element must be an object with fields "
        "\"date\" (an explicit date such as 2021-03-05 or March 5, 2021), "
        "\"description\" (one short sentence) and \"entities\" (a list of names).\n"
        "If the text mentions no dated events, return [].\n"
        "Publication date: {published}\n"
        "Text:\n{chunk}\n"};
    return t;
}

inline const PromptTemplate& extraction_repair() {
    static const PromptTemplate t{
        "extraction-repair-v1",
        "Your previous reply was not a valid JSON array. "
        "Return only the JSON array, with no other text.\n"};
    return t;
}

inline const PromptTemplate& exploration() {
    static const PromptTemplate t{
        "exploration-v1",
        "You are a reasoning assistant with the ability to perform web searches "
        "to help create an accurate chronological timeline.\n"
        "To search, write <|begin_search_query|>your query<|end_search_query|>. "
        "Search results will be returned between <|begin_search_result|> and "
        "<|end_search_result|>.\n"
        "To add or revise timeline entries, write <|begin_update_timeline|> "
        "followed by lines of the form YYYY-MM-DD: summary, then "
        "<|end_update_timeline|>.\n"
        "When the timeline is complete, stop without emitting further markers.\n\n"
        "News query: {query}\n\n"
        "Global event memory:\n{memory}\n"
        "Current timeline:\n{timeline}\n"
        "Supervisor plan:\n{plan}\n"};
    return t;
}

inline const PromptTemplate& protocol_reminder() {
    static const PromptTemplate t{
        "protocol-reminder-v1",
        "Your last message did not follow the action protocol. Use "
        "<|begin_search_query|>...<|end_search_query|> to search or "
        "<|begin_update_timeline|>...<|end_update_timeline|> to update the "
        "timeline, or stop emitting markers to finish.\n"};
    return t;
}

inline const PromptTemplate& memory_synthesis() {
    static const PromptTemplate t{
        "memory-synthesis-v1",
        "Rewrite the event descriptions below for concision. Keep one line per "
        "event in the form DATE: description, keep every date exactly as given, "
        "and do not add, remove or reorder events.\n\n{memory}\n"};
    return t;
}

inline const PromptTemplate& assisted_merge() {
    static const PromptTemplate t{
        "assisted-merge-v1",
        "Merge the new sub-timeline into the current timeline. Keep one line "
        "per date in the form YYYY-MM-DD: summary. Preserve every existing "
        "date and its established facts; you may improve wording.\n\n"
        "Global event memory:\n{memory}\n"
        "Current timeline:\n{timeline}\n"
        "New sub-timeline:\n{sub}\n"};
    return t;
}

inline const PromptTemplate& supervisor_plan() {
    static const PromptTemplate t{
        "supervisor-plan-v1",
        "You review a timeline under construction for the news query "
        "\"{query}\". The deficiencies below were detected. For each one, "
        "propose one or more search queries that would resolve it.\n"
        "Return only a JSON array of objects {{\"deficiency\": index, "
        "\"queries\": [string, ...]}} covering every deficiency index.\n\n"
        "Deficiencies:\n{deficiencies}\n"};
    return t;
}

inline const PromptTemplate& baseline_generate() {
    static const PromptTemplate t{
        "baseline-generate-v1",
        "Write a chronological timeline for the news query \"{query}\" from "
        "the documents below. Output one line per event in the form "
        "YYYY-MM-DD: summary, sorted by date.\n\nDocuments:\n{documents}\n"};
    return t;
}

inline const PromptTemplate& baseline_rewrite() {
    static const PromptTemplate t{
        "baseline-rewrite-v1",
        "Rewrite the search query \"{query}\" into 2-3 variants that would "
        "surface additional coverage. Return one variant per line, nothing "
        "else.\n"};
    return t;
}

inline const PromptTemplate& baseline_refine() {
    static const PromptTemplate t{
        "baseline-refine-v1",
        "Given the news query \"{query}\" and the timeline draft below, "
        "write one search query that would fill its most important gap. "
        "Return only the query.\n\nTimeline draft:\n{timeline}\n"};
    return t;
}

inline const PromptTemplate& iter_generate() {
    static const PromptTemplate t{
        "iter-generate-v1",
        "Revise the timeline draft for the news query \"{query}\" using the "
        "documents below. Output one line per event in the form "
        "YYYY-MM-DD: summary, sorted by date.\n\n"
        "Timeline draft:\n{timeline}\n\nDocuments:\n{documents}\n"};
    return t;
}

}  // namespace tlr::prompts
