#include "stockcast/data/transform.hpp"

#include "stockcast/error.hpp"

#include <cmath>

namespace stockcast::data {

namespace {

void check_calendar(const PriceSeries& series, std::span<const Date> calendar) {
    if (calendar.empty()) {
        throw Error(ErrorKind::Parameter, "calendar is empty");
    }
    if (series.empty()) {
        throw Error(ErrorKind::InsufficientData, series.symbol + ": no bars to align");
    }
    if (calendar.front() < series.bars.front().date) {
        throw Error(ErrorKind::Range, series.symbol + ": calendar day " +
                                          calendar.front().to_string() +
                                          " precedes the first observation " +
                                          series.bars.front().date.to_string() +
                                          " (uncoverable gap)");
    }
}

}  // namespace

PriceSeries align_calendar(const PriceSeries& series, std::span<const Date> calendar) {
    check_calendar(series, calendar);
    PriceSeries out{series.symbol, {}};
    out.bars.reserve(calendar.size());
    std::size_t next = 0;  // first bar not yet consumed
    const Bar* last = nullptr;
    for (const Date day : calendar) {
        while (next < series.bars.size() && series.bars[next].date <= day) {
            last = &series.bars[next];
            ++next;
        }
        // check_calendar guarantees at least one bar on or before every day.
        Bar bar = *last;
        if (bar.date != day) {
            bar.date = day;
            bar.volume = 0;
        }
        out.bars.push_back(bar);
    }
    return out;
}

std::size_t count_missing(const PriceSeries& series, std::span<const Date> calendar) {
    std::size_t missing = 0;
    std::size_t i = 0;
    for (const Date day : calendar) {
        while (i < series.bars.size() && series.bars[i].date < day) {
            ++i;
        }
        if (i == series.bars.size() || series.bars[i].date != day) {
            ++missing;
        }
    }
    return missing;
}

std::pair<PriceSeries, PriceSeries> split_train_test(const PriceSeries& series, Date split_date) {
    if (series.empty() || split_date < series.bars.front().date ||
        !(split_date < series.bars.back().date)) {
        throw Error(ErrorKind::Range,
                    series.symbol + ": split date " + split_date.to_string() +
                        " is not inside the series range" +
                        (series.empty() ? std::string{}
                                        : " [" + series.bars.front().date.to_string() + ", " +
                                              series.bars.back().date.to_string() + ")"));
    }
    PriceSeries train{series.symbol, {}};
    PriceSeries test{series.symbol, {}};
    for (const auto& bar : series.bars) {
        (bar.date <= split_date ? train : test).bars.push_back(bar);
    }
    return {std::move(train), std::move(test)};
}

PriceSeries concat(const PriceSeries& head, const PriceSeries& tail) {
    PriceSeries out = head;
    out.bars.insert(out.bars.end(), tail.bars.begin(), tail.bars.end());
    validate(out);
    return out;
}

ReturnSeries returns(const PriceSeries& series, ReturnKind kind) {
    if (series.size() < 2) {
        throw Error(ErrorKind::InsufficientData,
                    series.symbol + ": returns need at least 2 bars, got " +
                        std::to_string(series.size()));
    }
    ReturnSeries out{series.symbol, kind, {}, {}};
    out.dates.reserve(series.size() - 1);
    out.values.reserve(series.size() - 1);
    for (std::size_t t = 1; t < series.size(); ++t) {
        const double prev = series.bars[t - 1].close;
        const double cur = series.bars[t].close;
        if (!(prev > 0.0) || !(cur > 0.0)) {
            throw Error(ErrorKind::Validation,
                        series.symbol + " " + series.bars[t].date.to_string() +
                            ": returns need positive closes");
        }
        out.dates.push_back(series.bars[t].date);
        out.values.push_back(kind == ReturnKind::Simple ? cur / prev - 1.0 : std::log(cur / prev));
    }
    return out;
}

}  // namespace stockcast::data
