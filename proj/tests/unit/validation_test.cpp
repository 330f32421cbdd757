#include "stockcast/error.hpp"
#include "stockcast/ts/smoothing.hpp"
#include "stockcast/validation/metrics.hpp"
#include "stockcast/validation/walk_forward.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

namespace stockcast::validation {
namespace {

std::vector<Date> weekdays(std::size_t n) {
    std::vector<Date> out;
    Date d(2020, 1, 6);
    while (out.size() < n) {
        if (!d.is_weekend()) out.push_back(d);
        d = d.plus_days(1);
    }
    return out;
}

std::vector<double> index_series(std::size_t n) {
    std::vector<double> v(n);
    std::iota(v.begin(), v.end(), 0.0);
    return v;
}

// Echoes the training indices it was given so the windows can be checked.
struct Recorder {
    std::vector<std::vector<double>>* seen;
    std::vector<double> operator()(std::span<const double> train, int h) const {
        seen->emplace_back(train.begin(), train.end());
        return std::vector<double>(static_cast<std::size_t>(h), train.back());
    }
};

TEST(FoldWindows, SlidingSixPoints) {
    const auto w = fold_windows(6, {WindowMode::Sliding, 3, 1, 1});
    ASSERT_EQ(w.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_EQ(w[i].train_begin, i);
        EXPECT_EQ(w[i].train_end, i + 3);
        EXPECT_EQ(w[i].test_begin, i + 3);
        EXPECT_EQ(w[i].test_end, i + 4);
        EXPECT_FALSE(w[i].partial);
    }
}

TEST(FoldWindows, RollingSixPoints) {
    const auto w = fold_windows(6, {WindowMode::Rolling, 3, 1, 1});
    ASSERT_EQ(w.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_EQ(w[i].train_begin, 0u);
        EXPECT_EQ(w[i].train_end, i + 3);
    }
}

TEST(FoldWindows, FinalPartialFoldIsKept) {
    const auto w = fold_windows(10, {WindowMode::Sliding, 4, 4, 4});
    ASSERT_EQ(w.size(), 2u);
    EXPECT_EQ(w[1].test_begin, 8u);
    EXPECT_EQ(w[1].test_end, 10u);
    EXPECT_TRUE(w[1].partial);
    EXPECT_FALSE(w[0].partial);
}

TEST(FoldWindows, UnrolledDefinitionForManySpecs) {
    for (auto mode : {WindowMode::Rolling, WindowMode::Sliding}) {
        for (std::size_t train = 2; train <= 6; ++train) {
            for (std::size_t test = 1; test <= 3; ++test) {
                for (std::size_t step = 1; step <= 3; ++step) {
                    const std::size_t n = 20;
                    const auto w = fold_windows(n, {mode, train, test, step});
                    std::size_t i = 0;
                    for (; train + i * step < n; ++i) {
                        ASSERT_LT(i, w.size());
                        EXPECT_EQ(w[i].train_begin, mode == WindowMode::Rolling ? 0 : i * step);
                        EXPECT_EQ(w[i].train_end, train + i * step);
                        EXPECT_EQ(w[i].test_end, std::min(train + i * step + test, n));
                    }
                    EXPECT_EQ(w.size(), i);
                }
            }
        }
    }
}

TEST(FoldWindows, TestRangesTileWhenStepEqualsTestSize) {
    const auto w = fold_windows(50, {WindowMode::Sliding, 10, 5, 5});
    for (std::size_t i = 1; i < w.size(); ++i) {
        EXPECT_EQ(w[i].test_begin, w[i - 1].test_end);
    }
    EXPECT_EQ(w.back().test_end, 50u);
}

TEST(FoldWindows, RejectsBadSpecsAndShortSeries) {
    EXPECT_THROW((void)fold_windows(10, {WindowMode::Sliding, 1, 1, 1}), Error);
    EXPECT_THROW((void)fold_windows(10, {WindowMode::Sliding, 3, 0, 1}), Error);
    EXPECT_THROW((void)fold_windows(10, {WindowMode::Sliding, 3, 1, 0}), Error);
    try {
        (void)fold_windows(4, {WindowMode::Sliding, 4, 1, 1});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::InsufficientData);
    }
}

TEST(WalkForward, ForecasterSeesOnlyItsTrainingWindow) {
    const auto values = index_series(30);
    const auto dates = weekdays(30);
    std::vector<std::vector<double>> seen;
    const WindowSpec spec{WindowMode::Sliding, 5, 2, 3};
    const auto folds = walk_forward(values, dates, spec, Recorder{&seen});
    ASSERT_EQ(seen.size(), folds.size());
    for (std::size_t i = 0; i < folds.size(); ++i) {
        EXPECT_EQ(seen[i].front(), static_cast<double>(i * 3));
        EXPECT_EQ(seen[i].size(), 5u);
        // Nothing at or beyond the first test bar.
        EXPECT_LT(seen[i].back(), folds[i].actuals.front());
        EXPECT_EQ(folds[i].test_first, dates[folds[i].window.test_begin]);
        EXPECT_EQ(folds[i].train_last, dates[folds[i].window.train_end - 1]);
    }
}

TEST(WalkForward, ConstantSeriesWithSesHasZeroError) {
    const std::vector<double> values(40, 12.5);
    const auto dates = weekdays(40);
    const auto grid = ts::SmoothingGrid::standard_axis();
    auto ses = [&](std::span<const double> train, int h) {
        return ts::ses_forecast(ts::ses_fit(train, grid), h);
    };
    const auto folds = walk_forward(values, dates, {WindowMode::Rolling, 10, 3, 3}, ses);
    for (const auto& f : folds) {
        for (std::size_t i = 0; i < f.actuals.size(); ++i) {
            EXPECT_EQ(f.predictions[i], f.actuals[i]);
        }
    }
    EXPECT_EQ(evaluate(folds).rmse, 0.0);
}

TEST(WalkForward, ThreadedRunMatchesSerial) {
    const auto values = fixtures::random_walk(300, 5, 100.0);
    const auto dates = weekdays(300);
    const auto grid = ts::SmoothingGrid::standard_axis();
    auto ses = [&](std::span<const double> train, int h) {
        return ts::ses_forecast(ts::ses_fit(train, grid), h);
    };
    const WindowSpec spec{WindowMode::Sliding, 100, 5, 5};
    const auto serial = walk_forward(values, dates, spec, ses, 1);
    const auto threaded = walk_forward(values, dates, spec, ses, 4);
    ASSERT_EQ(serial.size(), threaded.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
        EXPECT_EQ(serial[i].window, threaded[i].window);
        EXPECT_EQ(serial[i].predictions, threaded[i].predictions);
    }
}

TEST(WalkForward, FirstFailingFoldErrorPropagates) {
    const auto values = index_series(20);
    const auto dates = weekdays(20);
    auto failing = [](std::span<const double> train, int h) -> std::vector<double> {
        if (train.back() >= 7.0) throw Error(ErrorKind::FitFailure, "fold at " + std::to_string(train.back()));
        return std::vector<double>(static_cast<std::size_t>(h), 0.0);
    };
    try {
        (void)walk_forward(values, dates, {WindowMode::Sliding, 5, 1, 1}, failing, 3);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::FitFailure);
        EXPECT_NE(std::string(e.what()).find("fold at 7"), std::string::npos);
    }
}

TEST(WalkForward, WrongForecastLengthIsShapeError) {
    const auto values = index_series(10);
    const auto dates = weekdays(10);
    auto short_forecast = [](std::span<const double>, int) { return std::vector<double>{}; };
    EXPECT_THROW((void)walk_forward(values, dates, {WindowMode::Sliding, 5, 2, 1}, short_forecast),
                 Error);
}

TEST(WalkForward, CsvHasOneRowPerFold) {
    const auto values = index_series(12);
    const auto dates = weekdays(12);
    std::vector<std::vector<double>> seen;
    const auto folds = walk_forward(values, dates, {WindowMode::Sliding, 4, 3, 3}, Recorder{&seen});
    std::ostringstream out;
    write_folds_csv(out, folds);
    const auto text = out.str();
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), static_cast<long>(folds.size() + 1));
    EXPECT_EQ(text.rfind("fold,train_first", 0), 0u);
}

TEST(Evaluate, PerfectForecastIsZero) {
    const std::vector<double> a{1, 2, 3, 4};
    const auto m = evaluate(a, a);
    EXPECT_EQ(m.rmse, 0.0);
    EXPECT_EQ(m.mae, 0.0);
    EXPECT_EQ(*m.mape, 0.0);
    EXPECT_EQ(*m.rmse_over_mean, 0.0);
}

TEST(Evaluate, ConstantOffset) {
    const std::vector<double> actual(5, 10.0);
    const std::vector<double> pred(5, 12.0);
    const auto m = evaluate(pred, actual);
    EXPECT_DOUBLE_EQ(m.rmse, 2.0);
    EXPECT_DOUBLE_EQ(m.mae, 2.0);
    EXPECT_DOUBLE_EQ(*m.rmse_over_mean, 20.0);
    EXPECT_DOUBLE_EQ(*m.mape, 20.0);
}

TEST(Evaluate, ZeroMeanLeavesRatioUndefined) {
    const std::vector<double> actual{-1.0, 1.0};
    const std::vector<double> pred{0.0, 0.0};
    const auto m = evaluate(pred, actual);
    EXPECT_DOUBLE_EQ(m.rmse, 1.0);
    EXPECT_FALSE(m.rmse_over_mean.has_value());
    EXPECT_TRUE(m.mape.has_value());
    nlohmann::json j = m;
    EXPECT_TRUE(j["rmse_over_mean"].is_null());
}

TEST(Evaluate, ZeroActualLeavesMapeUndefined) {
    const std::vector<double> actual{0.0, 2.0};
    const std::vector<double> pred{1.0, 2.0};
    EXPECT_FALSE(evaluate(pred, actual).mape.has_value());
}

TEST(Evaluate, LengthMismatchIsShapeError) {
    const std::vector<double> a{1, 2};
    const std::vector<double> b{1};
    try {
        (void)evaluate(a, b);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Shape);
    }
    EXPECT_THROW((void)evaluate(std::vector<double>{}, std::vector<double>{}), Error);
}

TEST(Evaluate, PermutationEquivariantAndRmseAtLeastMae) {
    fixtures::Gaussian g(21);
    std::vector<double> pred(50);
    std::vector<double> act(50);
    for (std::size_t i = 0; i < 50; ++i) {
        act[i] = 50.0 + 5.0 * g.normal();
        pred[i] = act[i] + g.normal();
    }
    const auto base = evaluate(pred, act);
    EXPECT_GE(base.rmse, base.mae);
    std::vector<std::size_t> perm(50);
    std::iota(perm.begin(), perm.end(), 0);
    std::mt19937_64 rng(3);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<double> p2(50);
    std::vector<double> a2(50);
    for (std::size_t i = 0; i < 50; ++i) {
        p2[i] = pred[perm[i]];
        a2[i] = act[perm[i]];
    }
    const auto shuffled = evaluate(p2, a2);
    EXPECT_NEAR(shuffled.rmse, base.rmse, 1e-12);
    EXPECT_NEAR(shuffled.mae, base.mae, 1e-12);
    EXPECT_NEAR(*shuffled.mape, *base.mape, 1e-12);
}

}  // namespace
}  // namespace stockcast::validation
