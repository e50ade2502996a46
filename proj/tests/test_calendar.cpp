#include <doctest.h>

#include <random>

#include "tlr/calendar.hpp"

using namespace tlr;

TEST_CASE("parse_date accepts ISO and English forms") {
    CalendarDate d = parse_date("November 10, 2001");
    CHECK(d == CalendarDate::make_day(2001, 11, 10));

    CHECK(parse_date("2023-06") == CalendarDate::make_month(2023, 6));
    CHECK(parse_date("2023-06-05") == CalendarDate::make_day(2023, 6, 5));
    CHECK(parse_date("1984") == CalendarDate::make_year(1984));
    CHECK(parse_date("January 24, 1984") == CalendarDate::make_day(1984, 1, 24));
    CHECK(parse_date("24 January 1984") == CalendarDate::make_day(1984, 1, 24));
    CHECK(parse_date("March 2021") == CalendarDate::make_month(2021, 3));
    CHECK(parse_date("Mar 5, 2021") == CalendarDate::make_day(2021, 3, 5));
}

TEST_CASE("parse_date resolves relative tokens against the reference") {
    CalendarDate ref = CalendarDate::make_day(2020, 5, 2);
    CHECK(parse_date("yesterday", ref) == CalendarDate::make_day(2020, 5, 1));
    CHECK(parse_date("today", ref) == CalendarDate::make_day(2020, 5, 2));
    CHECK(parse_date("tomorrow", ref) == CalendarDate::make_day(2020, 5, 3));
    // month boundary
    CHECK(parse_date("yesterday", CalendarDate::make_day(2020, 3, 1)) ==
          CalendarDate::make_day(2020, 2, 29));
}

TEST_CASE("parse_date error paths") {
    CHECK_THROWS_AS(parse_date(""), UnparseableDate);
    CHECK_THROWS_AS(parse_date("yesterday"), UnparseableDate);
    CHECK_THROWS_AS(parse_date("sometime soon"), UnparseableDate);
    CHECK_THROWS_AS(parse_date("last week", CalendarDate::make_day(2020, 1, 1)),
                    UnparseableDate);
    CHECK_THROWS_AS(parse_date("2020-13"), InvalidDate);
    CHECK_THROWS_AS(parse_date("2021-02-29"), InvalidDate);
    CHECK_THROWS_AS(parse_date("2020-01-32"), InvalidDate);
}

TEST_CASE("format/parse round-trips at all granularities") {
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> year(1900, 2100);
    std::uniform_int_distribution<int> month(1, 12);
    for (int i = 0; i < 200; ++i) {
        int y = year(rng);
        int m = month(rng);
        std::uniform_int_distribution<int> day(1, detail::days_in_month(y, m));
        CalendarDate cases[3] = {CalendarDate::make_year(y),
                                 CalendarDate::make_month(y, m),
                                 CalendarDate::make_day(y, m, day(rng))};
        for (const CalendarDate& d : cases) CHECK(parse_date(format_date(d)) == d);
    }
}

TEST_CASE("total order is antisymmetric and transitive") {
    std::mt19937 rng(11);
    std::uniform_int_distribution<int> year(2019, 2021);
    std::uniform_int_distribution<int> month(1, 12);
    std::uniform_int_distribution<int> pick(0, 2);
    auto random_date = [&]() {
        int y = year(rng), m = month(rng);
        switch (pick(rng)) {
            case 0: return CalendarDate::make_year(y);
            case 1: return CalendarDate::make_month(y, m);
            default: {
                std::uniform_int_distribution<int> day(1, detail::days_in_month(y, m));
                return CalendarDate::make_day(y, m, day(rng));
            }
        }
    };
    for (int i = 0; i < 500; ++i) {
        CalendarDate a = random_date(), b = random_date(), c = random_date();
        if (a < b) CHECK_FALSE(b < a);
        if (!(a < b) && !(b < a)) CHECK(a == b);
        if (a < b && b < c) CHECK(a < c);
    }
}

TEST_CASE("ties at equal numeric position order Day < Month < Year") {
    CalendarDate day = CalendarDate::make_day(2020, 1, 1);
    CalendarDate month = CalendarDate::make_month(2020, 1);
    CalendarDate year = CalendarDate::make_year(2020);
    CHECK(day < month);
    CHECK(month < year);
    CHECK(day < year);
}

TEST_CASE("date_distance_days with midpoint widening") {
    CHECK(date_distance_days(CalendarDate::make_day(2020, 1, 1),
                             CalendarDate::make_day(2020, 1, 1)) == 0);
    CHECK(date_distance_days(CalendarDate::make_day(2020, 1, 1),
                             CalendarDate::make_day(2020, 1, 31)) == 30);

    // Oracle: the midpoint of February 2020 by brute-force enumeration is
    // the day minimizing the maximum distance to the month's ends -> 15.
    {
        int best_day = 0;
        long best_spread = 1 << 30;
        for (int d = 1; d <= detail::days_in_month(2020, 2); ++d) {
            long spread = std::max(d - 1, detail::days_in_month(2020, 2) - d);
            if (spread < best_spread) {
                best_spread = spread;
                best_day = d;
            }
        }
        CHECK(best_day == 15);
    }
    CHECK(date_distance_days(CalendarDate::make_month(2020, 2),
                             CalendarDate::make_day(2020, 2, 15)) == 0);
    CHECK(date_distance_days(CalendarDate::make_year(2020),
                             CalendarDate::make_day(2020, 7, 1)) == 0);
    // distance spans year boundaries
    CHECK(date_distance_days(CalendarDate::make_day(2019, 12, 31),
                             CalendarDate::make_day(2020, 1, 1)) == 1);
}
