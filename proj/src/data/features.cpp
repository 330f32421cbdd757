#include "stockcast/data/features.hpp"

#include "stockcast/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace stockcast::data {

FeatureColumn rsi(const PriceSeries& series, int period) {
    const auto n = series.size();
    if (period <= 0 || static_cast<std::size_t>(period) >= n) {
        throw Error(ErrorKind::Parameter, "rsi period must be in [1, " + std::to_string(n) +
                                              "), got " + std::to_string(period));
    }
    const auto p = static_cast<std::size_t>(period);
    FeatureColumn col{"rsi_" + std::to_string(period), p, {}};
    col.values.reserve(n - p);
    for (std::size_t t = p; t < n; ++t) {
        double gain = 0.0;
        double loss = 0.0;
        for (std::size_t j = t + 1 - p; j <= t; ++j) {
            const double d = series.bars[j].close - series.bars[j - 1].close;
            if (d > 0.0) {
                gain += d;
            } else {
                loss -= d;
            }
        }
        gain /= static_cast<double>(p);
        loss /= static_cast<double>(p);
        double value = 0.0;
        if (gain == 0.0 && loss == 0.0) {
            value = 50.0;  // flat window: no directional pressure
        } else if (loss == 0.0) {
            value = 100.0;
        } else if (gain == 0.0) {
            value = 0.0;
        } else {
            value = 100.0 - 100.0 / (1.0 + gain / loss);
        }
        col.values.push_back(value);
    }
    return col;
}

FeatureColumn moving_average(const PriceSeries& series, int window) {
    const auto n = series.size();
    if (window <= 0 || static_cast<std::size_t>(window) > n) {
        throw Error(ErrorKind::Parameter, "moving average window must be in [1, " +
                                              std::to_string(n) + "], got " +
                                              std::to_string(window));
    }
    const auto w = static_cast<std::size_t>(window);
    FeatureColumn col{"ma_" + std::to_string(window), w - 1, {}};
    col.values.reserve(n - w + 1);
    for (std::size_t t = w - 1; t < n; ++t) {
        double sum = 0.0;
        for (std::size_t j = t + 1 - w; j <= t; ++j) {
            sum += series.bars[j].close;
        }
        col.values.push_back(sum / static_cast<double>(w));
    }
    return col;
}

bool FeatureConfig::empty() const {
    return !open && !high && !low && !close && !volume && return_lags.empty() &&
           !rsi_period.has_value() && ma_windows.empty();
}

FeatureMatrix build_dataset(const PriceSeries& series, const FeatureConfig& config, Target target) {
    if (config.empty()) {
        throw Error(ErrorKind::Config, "feature configuration selects no features");
    }
    const auto n = series.size();
    if (n < 2) {
        throw Error(ErrorKind::InsufficientData, "dataset needs at least 2 bars");
    }

    // Warm-up needed by each configured feature, checked before computing so
    // the error names the requirement rather than an inner parameter check.
    std::size_t warmup = 0;
    for (int lag : config.return_lags) {
        if (lag <= 0) {
            throw Error(ErrorKind::Config, "return lag must be positive");
        }
        warmup = std::max(warmup, static_cast<std::size_t>(lag));
    }
    if (config.rsi_period) {
        if (*config.rsi_period <= 0) {
            throw Error(ErrorKind::Config, "rsi period must be positive");
        }
        warmup = std::max(warmup, static_cast<std::size_t>(*config.rsi_period));
    }
    for (int w : config.ma_windows) {
        if (w <= 0) {
            throw Error(ErrorKind::Config, "moving average window must be positive");
        }
        warmup = std::max(warmup, static_cast<std::size_t>(w) - 1);
    }
    if (warmup + 2 > n) {
        throw Error(ErrorKind::InsufficientData,
                    series.symbol + ": " + std::to_string(n) +
                        " bars cannot cover a warm-up of " + std::to_string(warmup) +
                        " bars plus a next-day label");
    }

    std::vector<FeatureColumn> derived;
    for (int lag : config.return_lags) {
        FeatureColumn col{"ret_lag" + std::to_string(lag), static_cast<std::size_t>(lag), {}};
        for (std::size_t t = col.offset; t < n; ++t) {
            const std::size_t end = t + 1 - static_cast<std::size_t>(lag);
            col.values.push_back(series.bars[end].close / series.bars[end - 1].close - 1.0);
        }
        derived.push_back(std::move(col));
    }
    if (config.rsi_period) {
        derived.push_back(rsi(series, *config.rsi_period));
    }
    for (int w : config.ma_windows) {
        derived.push_back(moving_average(series, w));
    }

    FeatureMatrix out;
    if (config.open) out.feature_names.push_back("open");
    if (config.high) out.feature_names.push_back("high");
    if (config.low) out.feature_names.push_back("low");
    if (config.close) out.feature_names.push_back("close");
    if (config.volume) out.feature_names.push_back("volume");
    for (const auto& col : derived) {
        out.feature_names.push_back(col.name);
    }

    for (std::size_t t = warmup; t + 1 < n; ++t) {
        const Bar& bar = series.bars[t];
        std::vector<double> row;
        row.reserve(out.feature_names.size());
        if (config.open) row.push_back(bar.open);
        if (config.high) row.push_back(bar.high);
        if (config.low) row.push_back(bar.low);
        if (config.close) row.push_back(bar.close);
        if (config.volume) row.push_back(static_cast<double>(bar.volume));
        for (const auto& col : derived) {
            row.push_back(col.at(t));
        }
        if (!std::all_of(row.begin(), row.end(), [](double v) { return std::isfinite(v); })) {
            continue;
        }
        const double next = series.bars[t + 1].close;
        out.dates.push_back(bar.date);
        out.rows.push_back(std::move(row));
        out.labels.push_back(target == Target::NextClose ? next : (next > bar.close ? 1.0 : 0.0));
    }
    return out;
}

}  // namespace stockcast::data
