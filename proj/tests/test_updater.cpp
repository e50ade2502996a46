#include <doctest.h>

#include <random>

#include "tlr/updater.hpp"

using namespace tlr;

namespace {

TimelineMemory timeline_of(std::vector<std::pair<std::string, std::string>> rows,
                           int revision = 0) {
    TimelineMemory m;
    for (const auto& [date, summary] : rows)
        m.entries.push_back(TimelineEntry{parse_date(date), summary, {}, 0, 0});
    m.revision = revision;
    m.sort_entries();
    return m;
}

SubTimeline sub_of(std::vector<std::pair<std::string, std::string>> rows) {
    SubTimeline s;
    for (const auto& [date, summary] : rows)
        s.entries.push_back(TimelineEntry{parse_date(date), summary, {}, 0, 0});
    return s;
}

}  // namespace

TEST_CASE("parse_subtimeline reads dated lines and skips the rest") {
    SubTimeline sub = parse_subtimeline(
        "Here is the update:\n"
        "2001-11-10: Introduction of the iPod.\n"
        "not a timeline line\n"
        "2001-10-23: Apple announced the iPod.\n"
        "2001-11: too coarse, skipped\n"
        "??: nonsense\n");
    REQUIRE(sub.entries.size() == 2);
    CHECK(sub.entries[0].date == CalendarDate::make_day(2001, 10, 23));
    CHECK(sub.entries[0].summary == "Apple announced the iPod.");
    CHECK(sub.entries[1].date == CalendarDate::make_day(2001, 11, 10));
    CHECK(sub.entries[1].summary == "Introduction of the iPod.");
}

TEST_CASE("parse_subtimeline merges duplicate dates joining distinct sentences") {
    SubTimeline sub = parse_subtimeline(
        "2020-01-01: The product launched.\n"
        "2020-01-01: The product launched.\n"
        "2020-01-01: Reviews praised the battery.\n");
    REQUIRE(sub.entries.size() == 1);
    CHECK(sub.entries[0].summary ==
          "The product launched. Reviews praised the battery.");
}

TEST_CASE("parse_subtimeline accepts English dates at day granularity") {
    SubTimeline sub = parse_subtimeline("November 10, 2001: iPod reached stores.\n");
    REQUIRE(sub.entries.size() == 1);
    CHECK(sub.entries[0].date == CalendarDate::make_day(2001, 11, 10));
}

TEST_CASE("parse_subtimeline with no usable lines throws") {
    CHECK_THROWS_AS(parse_subtimeline("nothing dated here"), EmptySubTimeline);
    CHECK_THROWS_AS(parse_subtimeline(""), EmptySubTimeline);
    CHECK_THROWS_AS(parse_subtimeline("2020: year granularity only\n"), EmptySubTimeline);
}

TEST_CASE("deterministic merge unions disjoint dates") {
    TimelineMemory m = timeline_of({{"2020-01-01", "First event happened."}}, 3);
    SubTimeline sub = sub_of({{"2020-02-02", "Second event happened."}});
    TimelineMemory merged = merge_timeline(m, sub, {}, nullptr,
                                           ModelProfile::reasoner("m"),
                                           MergeMode::Deterministic, 2);
    REQUIRE(merged.entries.size() == 2);
    CHECK(merged.revision == 4);
    CHECK(merged.entries[0].summary == "First event happened.");
    CHECK(merged.entries[1].summary == "Second event happened.");
    CHECK(merged.entries[1].introduced_at_iteration == 2);
    CHECK(merged.entries[1].last_revised_at_iteration == 2);
    CHECK(merged.entries[0].introduced_at_iteration == 0);
}

TEST_CASE("colliding dates append only genuinely new sentences") {
    TimelineMemory m = timeline_of(
        {{"2020-01-01", "The company launched the product in Berlin."}});
    // near-duplicate: high unigram overlap with the existing sentence
    SubTimeline near_dup = sub_of(
        {{"2020-01-01", "The company launched the product in Munich."}});
    double sim = unigram_f1("The company launched the product in Berlin.",
                            "The company launched the product in Munich.");
    CHECK(sim >= 0.8);  // 6 of 7 tokens shared: F1 = 6/7
    TimelineMemory unchanged = merge_timeline(m, near_dup, {}, nullptr,
                                              ModelProfile::reasoner("m"),
                                              MergeMode::Deterministic, 1);
    CHECK(unchanged.entries[0].summary ==
          "The company launched the product in Berlin.");

    SubTimeline fresh = sub_of(
        {{"2020-01-01", "Preorders sold out within an hour."}});
    CHECK(unigram_f1("The company launched the product in Berlin.",
                     "Preorders sold out within an hour.") < 0.8);
    TimelineMemory extended = merge_timeline(m, fresh, {}, nullptr,
                                             ModelProfile::reasoner("m"),
                                             MergeMode::Deterministic, 1);
    CHECK(extended.entries[0].summary ==
          "The company launched the product in Berlin. Preorders sold out within an hour.");
    CHECK(extended.entries[0].last_revised_at_iteration == 1);
}

TEST_CASE("merging an empty sub-timeline is an error") {
    TimelineMemory m = timeline_of({{"2020-01-01", "x y z."}});
    CHECK_THROWS_AS(merge_timeline(m, SubTimeline{}, {}, nullptr,
                                   ModelProfile::reasoner("m"),
                                   MergeMode::Deterministic),
                    EmptySubTimeline);
}

TEST_CASE("no-loss and idempotence hold over random merges") {
    std::mt19937 rng(59);
    std::uniform_int_distribution<int> day(1, 12);
    std::uniform_int_distribution<int> pick(0, 5);
    const char* summaries[] = {
        "The board approved the merger proposal.",
        "Regulators opened a formal inquiry.",
        "The chief executive resigned abruptly.",
        "Shares fell nine percent in a day.",
        "A settlement ended the litigation.",
        "The product recall expanded nationwide."};
    for (int trial = 0; trial < 200; ++trial) {
        TimelineMemory m;
        int base = 1 + static_cast<int>(rng() % 4);
        for (int i = 0; i < base; ++i) {
            CalendarDate d = CalendarDate::make_day(2022, 3, day(rng));
            bool dup = false;
            for (const auto& e : m.entries)
                if (e.date == d) dup = true;
            if (!dup) m.entries.push_back(TimelineEntry{d, summaries[pick(rng)], {}, 0, 0});
        }
        m.sort_entries();

        SubTimeline sub;
        int adds = 1 + static_cast<int>(rng() % 3);
        for (int i = 0; i < adds; ++i) {
            CalendarDate d = CalendarDate::make_day(2022, 3, day(rng));
            bool dup = false;
            for (const auto& e : sub.entries)
                if (e.date == d) dup = true;
            if (!dup) sub.entries.push_back(TimelineEntry{d, summaries[pick(rng)], {}, 0, 0});
        }

        TimelineMemory once = merge_timeline(m, sub, {}, nullptr,
                                             ModelProfile::reasoner("m"),
                                             MergeMode::Deterministic, 1);
        CHECK(no_loss_holds(m, once));
        CHECK(once.valid());

        TimelineMemory twice = merge_timeline(once, sub, {}, nullptr,
                                              ModelProfile::reasoner("m"),
                                              MergeMode::Deterministic, 2);
        REQUIRE(twice.entries.size() == once.entries.size());
        for (size_t i = 0; i < once.entries.size(); ++i)
            CHECK(twice.entries[i].summary == once.entries[i].summary);
    }
}

TEST_CASE("assisted merge keeps a faithful rewrite") {
    TimelineMemory m = timeline_of({{"2020-01-01", "The product launched worldwide."}});
    SubTimeline sub = sub_of({{"2020-02-02", "A software update fixed early bugs."}});
    std::string rewrite =
        "2020-01-01: The product launched worldwide.\n"
        "2020-02-02: A software update fixed the early bugs.\n";
    auto backend = std::make_shared<ScriptedResponder>(
        std::vector<ScriptedResponder::Entry>{{"", 0, rewrite, false}});
    Gateway gateway(backend);
    TimelineMemory merged = merge_timeline(m, sub, {}, &gateway,
                                           ModelProfile::reasoner("m"),
                                           MergeMode::Assisted, 1);
    REQUIRE(merged.entries.size() == 2);
    CHECK(merged.entries[1].summary == "A software update fixed the early bugs.");
    CHECK(no_loss_holds(m, merged));
}

TEST_CASE("assisted merge restores entries the model dropped") {
    TimelineMemory m = timeline_of({{"2020-01-01", "The product launched worldwide."}});
    SubTimeline sub = sub_of({{"2020-02-02", "A software update fixed early bugs."}});
    // rewrite silently drops the January entry
    auto backend = std::make_shared<ScriptedResponder>(
        std::vector<ScriptedResponder::Entry>{
            {"", 0, "2020-02-02: A software update fixed early bugs.\n", false}});
    Gateway gateway(backend);
    TimelineMemory merged = merge_timeline(m, sub, {}, &gateway,
                                           ModelProfile::reasoner("m"),
                                           MergeMode::Assisted, 1);
    REQUIRE(merged.entries.size() == 2);
    CHECK(merged.entries[0].date == CalendarDate::make_day(2020, 1, 1));
    CHECK(merged.entries[0].summary == "The product launched worldwide.");
    CHECK(no_loss_holds(m, merged));
}

TEST_CASE("assisted merge falls back to deterministic on a garbage reply") {
    TimelineMemory m = timeline_of({{"2020-01-01", "The product launched worldwide."}});
    SubTimeline sub = sub_of({{"2020-02-02", "A software update fixed early bugs."}});
    auto backend = std::make_shared<ScriptedResponder>(
        std::vector<ScriptedResponder::Entry>{{"", 0, "no dated lines at all", false}});
    Gateway gateway(backend);
    TimelineMemory merged = merge_timeline(m, sub, {}, &gateway,
                                           ModelProfile::reasoner("m"),
                                           MergeMode::Assisted, 1);
    REQUIRE(merged.entries.size() == 2);
    CHECK(merged.entries[0].summary == "The product launched worldwide.");
    CHECK(merged.entries[1].summary == "A software update fixed early bugs.");
}

TEST_CASE("assisted merge prepends the old summary when fidelity is lost") {
    TimelineMemory m = timeline_of({{"2020-01-01", "The product launched worldwide."}});
    SubTimeline sub = sub_of({{"2020-01-01", "Preorders sold out quickly."}});
    auto backend = std::make_shared<ScriptedResponder>(
        std::vector<ScriptedResponder::Entry>{
            {"", 0, "2020-01-01: Totally unrelated replacement text instead.\n", false}});
    Gateway gateway(backend);
    TimelineMemory merged = merge_timeline(m, sub, {}, &gateway,
                                           ModelProfile::reasoner("m"),
                                           MergeMode::Assisted, 1);
    REQUIRE(merged.entries.size() == 1);
    CHECK(merged.entries[0].summary.find("The product launched worldwide.") == 0);
    CHECK(no_loss_holds(m, merged));
}
