#include "stockcast/data/features.hpp"
#include "stockcast/data/io.hpp"
#include "stockcast/data/transform.hpp"
#include "stockcast/error.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace stockcast;
using namespace stockcast::data;

namespace {

PriceSeries parse(const std::string& text, const CsvSchema& schema = {}) {
    std::istringstream in(text);
    return read_csv(in, schema, "X");
}

ErrorKind kind_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "expected stockcast::Error";
    return ErrorKind::Io;
}

std::vector<Date> weekdays(Date from, std::size_t count) {
    std::vector<Date> out;
    for (Date d = from; out.size() < count; d = d.plus_days(1)) {
        if (!d.is_weekend()) {
            out.push_back(d);
        }
    }
    return out;
}

}  // namespace

TEST(Date, ParsesIsoAndRejectsImpossibleDays) {
    ASSERT_TRUE(Date::parse("2021-03-31"));
    EXPECT_EQ(Date::parse("2021-03-31")->to_string(), "2021-03-31");
    EXPECT_FALSE(Date::parse("2021-02-30"));
    EXPECT_FALSE(Date::parse("2021/02/01"));
    EXPECT_FALSE(Date::parse("21-02-01"));
    EXPECT_TRUE(Date(2016, 1, 2).is_weekend());
}

TEST(LoadCsv, WellFormedRowsAscending) {
    const auto s = parse(
        "Date,Open,High,Low,Close,Volume\n"
        "2021-01-04,10,11,9,10.5,100\n"
        "2021-01-05,10.5,12,10,11,200\n"
        "2021-01-06,11,11.5,10,10.2,150\n");
    ASSERT_EQ(s.size(), 3u);
    EXPECT_EQ(s.bars[0].date, Date(2021, 1, 4));
    EXPECT_EQ(s.bars[2].date, Date(2021, 1, 6));
    EXPECT_DOUBLE_EQ(s.bars[1].close, 11.0);
    EXPECT_EQ(s.bars[1].volume, 200);
}

TEST(LoadCsv, OutOfOrderRowsAreSorted) {
    const auto s = parse(
        "Date,Open,High,Low,Close,Volume\n"
        "2021-01-06,11,11.5,10,10.2,150\n"
        "2021-01-04,10,11,9,10.5,100\n"
        "2021-01-05,10.5,12,10,11,200\n");
    ASSERT_EQ(s.size(), 3u);
    EXPECT_EQ(s.bars[0].date, Date(2021, 1, 4));
    EXPECT_EQ(s.bars[1].date, Date(2021, 1, 5));
    EXPECT_EQ(s.bars[2].date, Date(2021, 1, 6));
}

TEST(LoadCsv, HighBelowLowCitesDate) {
    try {
        parse("Date,Open,High,Low,Close,Volume\n2021-01-04,10,9,11,10,100\n");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Validation);
        EXPECT_NE(std::string(e.what()).find("2021-01-04"), std::string::npos);
    }
}

TEST(LoadCsv, MissingColumnIsNamed) {
    try {
        parse("Date,Open,High,Low,Volume\n2021-01-04,10,11,9,100\n");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Schema);
        EXPECT_NE(std::string(e.what()).find("Close"), std::string::npos);
    }
}

TEST(LoadCsv, BadRowReportsLineNumber) {
    try {
        parse(
            "Date,Open,High,Low,Close,Volume\n"
            "2021-01-04,10,11,9,10.5,100\n"
            "2021-01-05,10.5,abc,10,11,200\n");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Row);
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
    }
}

TEST(LoadCsv, SchemaRemapsColumns) {
    CsvSchema schema;
    schema.date = "day";
    schema.close = "Adj Close";
    const auto s = parse(
        "day,Open,High,Low,Adj Close,Volume\n"
        "2021-01-04,10,11,9,10.5,100.0\n",
        schema);
    ASSERT_EQ(s.size(), 1u);
    EXPECT_DOUBLE_EQ(s.bars[0].close, 10.5);
}

TEST(LoadCsv, DuplicateDatesRejected) {
    EXPECT_EQ(kind_of([] {
                  parse(
                      "Date,Open,High,Low,Close,Volume\n"
                      "2021-01-04,10,11,9,10.5,100\n"
                      "2021-01-04,10,11,9,10.5,100\n");
              }),
              ErrorKind::Validation);
}

TEST(LoadCsv, WriteThenReadIsIdentity) {
    const auto s = fixtures::random_price_series(50, 3, "X");
    std::stringstream buf;
    write_csv(buf, s);
    EXPECT_EQ(read_csv(buf, {}, "X"), s);
}

TEST(Calendar, RejectsDescendingDates) {
    std::istringstream ok("2021-01-04\n2021-01-05\n\n");
    EXPECT_EQ(read_calendar(ok).size(), 2u);
    std::istringstream bad("2021-01-05\n2021-01-04\n");
    EXPECT_EQ(kind_of([&] { (void)read_calendar(bad); }), ErrorKind::Validation);
}

TEST(AlignCalendar, ForwardFillsWithZeroVolume) {
    const Date mon(2021, 1, 4);
    const Date tue(2021, 1, 5);
    const Date wed(2021, 1, 6);
    PriceSeries s{"X", {{mon, 100, 101, 99, 100, 500}, {wed, 104, 105, 103, 104, 700}}};
    const std::vector<Date> cal{mon, tue, wed};
    const auto out = align_calendar(s, cal);
    ASSERT_EQ(out.size(), 3u);
    EXPECT_EQ(out.bars[1].date, tue);
    EXPECT_DOUBLE_EQ(out.bars[1].close, 100.0);
    EXPECT_DOUBLE_EQ(out.bars[1].open, 100.0);
    EXPECT_EQ(out.bars[1].volume, 0);
    EXPECT_EQ(out.bars[2].volume, 700);
    EXPECT_EQ(count_missing(s, cal), 1u);
}

TEST(AlignCalendar, GapFreeSeriesUnchanged) {
    const auto s = fixtures::random_price_series(30, 5);
    EXPECT_EQ(align_calendar(s, s.dates()), s);
}

TEST(AlignCalendar, CalendarBeforeFirstObservationIsUncoverable) {
    const auto s = fixtures::random_price_series(5, 5);
    std::vector<Date> cal{s.bars[0].date.plus_days(-1), s.bars[0].date};
    EXPECT_EQ(kind_of([&] { (void)align_calendar(s, cal); }), ErrorKind::Range);
    EXPECT_EQ(kind_of([&] { (void)align_calendar(s, std::vector<Date>{}); }),
              ErrorKind::Parameter);
}

TEST(AlignCalendar, OutputDatesEqualCalendarOfAnyLength) {
    // A 1482-day trading calendar yields exactly 1482 aligned rows.
    auto s = fixtures::random_price_series(1700, 9);
    std::vector<Date> cal;
    for (std::size_t i = 0; i < s.size() && cal.size() < 1482; ++i) {
        if (i % 13 != 7) {
            cal.push_back(s.bars[i].date);
        }
    }
    // Drop some observations so that filling actually happens.
    PriceSeries sparse{s.symbol, {}};
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i == 0 || i % 17 != 0) {
            sparse.bars.push_back(s.bars[i]);
        }
    }
    const auto out = align_calendar(sparse, cal);
    EXPECT_EQ(out.size(), 1482u);
    EXPECT_EQ(out.dates(), cal);
}

TEST(AlignCalendar, Idempotent) {
    auto s = fixtures::random_price_series(200, 11);
    const auto cal = weekdays(s.bars.front().date, 260);
    PriceSeries sparse{s.symbol, {}};
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i % 5 != 3) {
            sparse.bars.push_back(s.bars[i]);
        }
    }
    const auto once = align_calendar(sparse, cal);
    EXPECT_EQ(align_calendar(once, cal), once);
}

TEST(SplitTrainTest, BoundaryAtSplitDate) {
    const auto s = fixtures::random_price_series(40, 2);
    const Date split = s.bars[19].date;
    const auto [train, test] = split_train_test(s, split);
    EXPECT_EQ(train.bars.back().date, split);
    EXPECT_EQ(test.bars.front().date, s.bars[20].date);
    EXPECT_EQ(concat(train, test), s);
}

TEST(SplitTrainTest, YearEndSplitStartsTestOnFirstTradingDayOfNextYear) {
    std::vector<double> closes(400, 50.0);
    const auto s = fixtures::series_from_closes(closes, "X", Date(2020, 6, 1));
    const auto [train, test] = split_train_test(s, Date(2020, 12, 31));
    EXPECT_EQ(train.bars.back().date, Date(2020, 12, 31));
    EXPECT_EQ(test.bars.front().date, Date(2021, 1, 1));
}

TEST(SplitTrainTest, DayBeforeLastLeavesOneTestBar) {
    const auto s = fixtures::random_price_series(10, 2);
    const auto [train, test] = split_train_test(s, s.bars.back().date.plus_days(-1));
    EXPECT_GE(test.size(), 1u);
    EXPECT_EQ(train.size() + test.size(), s.size());
}

TEST(SplitTrainTest, OutsideRangeIsRangeError) {
    const auto s = fixtures::random_price_series(10, 2);
    EXPECT_EQ(kind_of([&] { (void)split_train_test(s, s.bars.front().date.plus_days(-3)); }),
              ErrorKind::Range);
    EXPECT_EQ(kind_of([&] { (void)split_train_test(s, s.bars.back().date); }), ErrorKind::Range);
}

TEST(SplitTrainTest, SplitThenConcatReproducesAlignedSeries) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto s = fixtures::random_price_series(60, seed);
        const auto idx = static_cast<std::size_t>(seed * 7 % 58);
        const auto [train, test] = split_train_test(s, s.bars[idx].date);
        EXPECT_EQ(concat(train, test), s);
    }
}

TEST(Returns, SimpleAndLogExamples) {
    const auto s = fixtures::series_from_closes({100, 110});
    const auto simple = returns(s, ReturnKind::Simple);
    const auto log = returns(s, ReturnKind::Log);
    ASSERT_EQ(simple.values.size(), 1u);
    EXPECT_NEAR(simple.values[0], 0.10, 1e-15);
    EXPECT_NEAR(log.values[0], 0.0953102, 1e-6);
    EXPECT_EQ(simple.dates[0], s.bars[1].date);
}

TEST(Returns, ConstantClosesGiveZeros) {
    const auto s = fixtures::series_from_closes(std::vector<double>(10, 42.0));
    for (auto kind : {ReturnKind::Simple, ReturnKind::Log}) {
        const auto r = returns(s, kind);
        EXPECT_EQ(r.values.size(), 9u);
        for (double v : r.values) {
            EXPECT_EQ(v, 0.0);
        }
    }
}

TEST(Returns, FewerThanTwoBars) {
    const auto s = fixtures::series_from_closes({100});
    EXPECT_EQ(kind_of([&] { (void)returns(s, ReturnKind::Simple); }),
              ErrorKind::InsufficientData);
}

TEST(Returns, LogEqualsLog1pOfSimple) {
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
        const auto s = fixtures::random_price_series(100, seed);
        const auto simple = returns(s, ReturnKind::Simple);
        const auto log = returns(s, ReturnKind::Log);
        for (std::size_t i = 0; i < simple.values.size(); ++i) {
            EXPECT_NEAR(std::log1p(simple.values[i]), log.values[i], 1e-12);
        }
    }
}

TEST(Rsi, RisingFallingAlternating) {
    std::vector<double> rising;
    std::vector<double> falling;
    std::vector<double> alternating;
    for (int i = 0; i < 40; ++i) {
        rising.push_back(100.0 + i);
        falling.push_back(100.0 - i);
        alternating.push_back(100.0 + (i % 2));
    }
    const auto up = rsi(fixtures::series_from_closes(rising), 14);
    const auto down = rsi(fixtures::series_from_closes(falling), 14);
    const auto alt = rsi(fixtures::series_from_closes(alternating), 14);
    EXPECT_EQ(up.offset, 14u);
    EXPECT_EQ(up.values.size(), 26u);
    for (double v : up.values) EXPECT_EQ(v, 100.0);
    for (double v : down.values) EXPECT_EQ(v, 0.0);
    for (double v : alt.values) EXPECT_DOUBLE_EQ(v, 50.0);
}

TEST(Rsi, ParameterBounds) {
    const auto s = fixtures::random_price_series(10, 1);
    EXPECT_EQ(kind_of([&] { (void)rsi(s, 0); }), ErrorKind::Parameter);
    EXPECT_EQ(kind_of([&] { (void)rsi(s, 10); }), ErrorKind::Parameter);
    EXPECT_NO_THROW((void)rsi(s, 9));
}

TEST(Rsi, BoundedAndScaleInvariant) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto s = fixtures::random_price_series(120, seed);
        auto scaled = s;
        const double k = 0.37 * static_cast<double>(seed);
        for (auto& b : scaled.bars) {
            b.open *= k;
            b.high *= k;
            b.low *= k;
            b.close *= k;
        }
        const auto a = rsi(s, 14);
        const auto b = rsi(scaled, 14);
        for (std::size_t i = 0; i < a.values.size(); ++i) {
            EXPECT_GE(a.values[i], 0.0);
            EXPECT_LE(a.values[i], 100.0);
            EXPECT_NEAR(a.values[i], b.values[i], 1e-9);
        }
    }
}

TEST(MovingAverage, Examples) {
    const auto s = fixtures::series_from_closes({1, 2, 3});
    const auto ma3 = moving_average(s, 3);
    EXPECT_EQ(ma3.offset, 2u);
    ASSERT_EQ(ma3.values.size(), 1u);
    EXPECT_DOUBLE_EQ(ma3.values[0], 2.0);

    const auto r = fixtures::random_price_series(30, 4);
    const auto ma1 = moving_average(r, 1);
    EXPECT_EQ(ma1.values, r.closes());

    const auto c = moving_average(fixtures::series_from_closes(std::vector<double>(12, 7.5)), 4);
    for (double v : c.values) EXPECT_DOUBLE_EQ(v, 7.5);

    EXPECT_EQ(kind_of([&] { (void)moving_average(s, 4); }), ErrorKind::Parameter);
}

TEST(BuildDataset, CloseOnlyShiftsLabelByOne) {
    const auto s = fixtures::random_price_series(10, 8);
    FeatureConfig cfg;
    cfg.volume = false;
    cfg.return_lags.clear();
    cfg.rsi_period.reset();
    cfg.ma_windows.clear();
    const auto fm = build_dataset(s, cfg, Target::NextClose);
    ASSERT_EQ(fm.size(), 9u);
    EXPECT_EQ(fm.feature_names, std::vector<std::string>{"close"});
    for (std::size_t t = 0; t < 9; ++t) {
        EXPECT_EQ(fm.rows[t][0], s.bars[t].close);
        EXPECT_EQ(fm.labels[t], s.bars[t + 1].close);
        EXPECT_EQ(fm.dates[t], s.bars[t].date);
    }
}

TEST(BuildDataset, RisingClosesAllLabelledUp) {
    std::vector<double> closes;
    for (int i = 0; i < 60; ++i) closes.push_back(10.0 + i);
    const auto fm = build_dataset(fixtures::series_from_closes(closes), {}, Target::NextDirection);
    ASSERT_FALSE(fm.labels.empty());
    for (double y : fm.labels) EXPECT_EQ(y, 1.0);
}

TEST(BuildDataset, EqualClosesLabelledZero) {
    const auto fm = build_dataset(fixtures::series_from_closes(std::vector<double>(40, 5.0)), {},
                                  Target::NextDirection);
    for (double y : fm.labels) EXPECT_EQ(y, 0.0);
}

TEST(BuildDataset, Rsi14OnTenBarsIsInsufficient) {
    FeatureConfig cfg;
    cfg.ma_windows.clear();
    cfg.return_lags.clear();
    EXPECT_EQ(kind_of([&] {
                  (void)build_dataset(fixtures::random_price_series(10, 1), cfg,
                                      Target::NextClose);
              }),
              ErrorKind::InsufficientData);
}

TEST(BuildDataset, EmptyConfigRejected) {
    FeatureConfig cfg;
    cfg.close = false;
    cfg.volume = false;
    cfg.return_lags.clear();
    cfg.rsi_period.reset();
    cfg.ma_windows.clear();
    EXPECT_EQ(kind_of([&] {
                  (void)build_dataset(fixtures::random_price_series(30, 1), cfg,
                                      Target::NextClose);
              }),
              ErrorKind::Config);
}

TEST(BuildDataset, DefaultFeatureSetShape) {
    const auto s = fixtures::random_price_series(100, 12);
    const auto fm = build_dataset(s, {}, Target::NextClose);
    const std::vector<std::string> expected{"close",    "volume",   "ret_lag1", "ret_lag2",
                                            "ret_lag3", "ret_lag4", "ret_lag5", "rsi_14",
                                            "ma_5",     "ma_10",    "ma_20"};
    EXPECT_EQ(fm.feature_names, expected);
    // Warm-up is max(5, 14, 19) = 19 bars; the final bar has no label.
    EXPECT_EQ(fm.size(), 100u - 19u - 1u);
    EXPECT_EQ(fm.dates.front(), s.bars[19].date);
    for (const auto& row : fm.rows) {
        ASSERT_EQ(row.size(), expected.size());
        for (double v : row) EXPECT_TRUE(std::isfinite(v));
    }
}

TEST(BuildDataset, NoLookahead) {
    // Rewriting every bar after t must not change row t's features.
    const auto s = fixtures::random_price_series(80, 21);
    const auto base = build_dataset(s, {}, Target::NextClose);
    for (std::size_t r = 0; r < base.size(); r += 7) {
        auto perturbed = s;
        std::size_t t = 0;
        while (perturbed.bars[t].date != base.dates[r]) ++t;
        for (std::size_t j = t + 1; j < perturbed.size(); ++j) {
            auto& b = perturbed.bars[j];
            b.close *= 1.5;
            b.high *= 1.5;
            b.open = b.close;
            b.volume += 17;
        }
        const auto moved = build_dataset(perturbed, {}, Target::NextClose);
        EXPECT_EQ(moved.rows[r], base.rows[r]);
    }
}
