#include "stockcast/validation/walk_forward.hpp"

#include "stockcast/data/series.hpp"
#include "stockcast/error.hpp"
#include "stockcast/format.hpp"
#include "stockcast/validation/metrics.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <ostream>
#include <thread>

namespace stockcast::validation {

std::string to_string(WindowMode mode) {
    return mode == WindowMode::Rolling ? "rolling" : "sliding";
}

std::optional<WindowMode> parse_window_mode(std::string_view text) {
    if (text == "rolling") return WindowMode::Rolling;
    if (text == "sliding") return WindowMode::Sliding;
    return std::nullopt;
}

void WindowSpec::validate() const {
    if (train_size < 2) {
        throw Error(ErrorKind::Parameter, "window train_size must be >= 2, got " + std::to_string(train_size));
    }
    if (test_size < 1) {
        throw Error(ErrorKind::Parameter, "window test_size must be >= 1");
    }
    if (step < 1) {
        throw Error(ErrorKind::Parameter, "window step must be >= 1");
    }
}

std::vector<FoldWindow> fold_windows(std::size_t n, const WindowSpec& spec) {
    spec.validate();
    if (n < spec.train_size + spec.test_size) {
        throw Error(ErrorKind::InsufficientData,
                    "walk-forward needs at least train_size + test_size = " +
                        std::to_string(spec.train_size + spec.test_size) + " bars, got " +
                        std::to_string(n));
    }
    std::vector<FoldWindow> out;
    for (std::size_t i = 0;; ++i) {
        FoldWindow w;
        w.fold_index = i;
        w.train_begin = spec.mode == WindowMode::Rolling ? 0 : i * spec.step;
        w.train_end = i * spec.step + spec.train_size;
        if (w.train_end >= n) {
            break;
        }
        w.test_begin = w.train_end;
        w.test_end = std::min(w.train_end + spec.test_size, n);
        w.partial = w.test_end - w.test_begin < spec.test_size;
        out.push_back(w);
    }
    return out;
}

std::vector<FoldResult> walk_forward(std::span<const double> values, std::span<const Date> dates,
                                     const WindowSpec& spec, const Forecaster& forecaster,
                                     unsigned threads) {
    if (values.size() != dates.size()) {
        throw Error(ErrorKind::Shape, "walk_forward: values and dates differ in length");
    }
    const auto windows = fold_windows(values.size(), spec);
    std::vector<FoldResult> results(windows.size());
    std::vector<std::exception_ptr> errors(windows.size());

    auto run_fold = [&](std::size_t i) {
        const auto& w = windows[i];
        FoldResult r;
        r.window = w;
        r.train_first = dates[w.train_begin];
        r.train_last = dates[w.train_end - 1];
        r.test_first = dates[w.test_begin];
        r.test_last = dates[w.test_end - 1];
        // The forecaster only ever sees the training slice.
        const auto train = values.subspan(w.train_begin, w.train_end - w.train_begin);
        const auto horizon = static_cast<int>(w.test_end - w.test_begin);
        r.predictions = forecaster(train, horizon);
        if (r.predictions.size() != static_cast<std::size_t>(horizon)) {
            throw Error(ErrorKind::Shape, "forecaster returned " +
                                              std::to_string(r.predictions.size()) +
                                              " values for horizon " + std::to_string(horizon));
        }
        r.actuals.assign(values.begin() + static_cast<std::ptrdiff_t>(w.test_begin),
                         values.begin() + static_cast<std::ptrdiff_t>(w.test_end));
        results[i] = std::move(r);
    };

    const unsigned workers =
        std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(windows.size())));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < windows.size(); i = next++) {
            try {
                run_fold(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < workers; ++t) pool.emplace_back(worker);
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return results;
}

std::vector<FoldResult> walk_forward(const data::PriceSeries& series, const WindowSpec& spec,
                                     const Forecaster& forecaster, unsigned threads) {
    const auto closes = series.closes();
    const auto dates = series.dates();
    return walk_forward(closes, dates, spec, forecaster, threads);
}

void write_folds_csv(std::ostream& out, std::span<const FoldResult> folds) {
    out << "fold,train_first,train_last,test_first,test_last,train_bars,test_bars,partial,"
           "rmse,mae,mape,rmse_over_mean\n";
    auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string{}; };
    for (const auto& f : folds) {
        const auto m = evaluate(f.predictions, f.actuals);
        out << f.window.fold_index << ',' << f.train_first.to_string() << ','
            << f.train_last.to_string() << ',' << f.test_first.to_string() << ','
            << f.test_last.to_string() << ',' << f.window.train_end - f.window.train_begin << ','
            << f.window.test_end - f.window.test_begin << ',' << (f.window.partial ? 1 : 0) << ','
            << format_double(m.rmse) << ',' << format_double(m.mae) << ',' << opt(m.mape) << ','
            << opt(m.rmse_over_mean) << '\n';
    }
}

}  // namespace stockcast::validation
