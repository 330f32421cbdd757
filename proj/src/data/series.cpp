#include "stockcast/data/series.hpp"

#include "stockcast/error.hpp"

#include <cmath>

namespace stockcast::data {

std::optional<std::string> bar_violation(const Bar& bar) {
    const bool finite = std::isfinite(bar.open) && std::isfinite(bar.high) &&
                        std::isfinite(bar.low) && std::isfinite(bar.close);
    if (!finite) {
        return "non-finite price";
    }
    if (bar.open <= 0.0 || bar.high <= 0.0 || bar.low <= 0.0 || bar.close <= 0.0) {
        return "non-positive price";
    }
    if (bar.low > bar.high) {
        return "high below low";
    }
    if (bar.open < bar.low || bar.open > bar.high) {
        return "open outside [low, high]";
    }
    if (bar.close < bar.low || bar.close > bar.high) {
        return "close outside [low, high]";
    }
    if (bar.volume < 0) {
        return "negative volume";
    }
    return std::nullopt;
}

std::vector<double> PriceSeries::closes() const {
    std::vector<double> out;
    out.reserve(bars.size());
    for (const auto& b : bars) {
        out.push_back(b.close);
    }
    return out;
}

std::vector<Date> PriceSeries::dates() const {
    std::vector<Date> out;
    out.reserve(bars.size());
    for (const auto& b : bars) {
        out.push_back(b.date);
    }
    return out;
}

void validate(const PriceSeries& series) {
    for (std::size_t i = 0; i < series.bars.size(); ++i) {
        const Bar& bar = series.bars[i];
        if (auto why = bar_violation(bar)) {
            throw Error(ErrorKind::Validation,
                        series.symbol + " " + bar.date.to_string() + ": " + *why);
        }
        if (i > 0 && !(series.bars[i - 1].date < bar.date)) {
            throw Error(ErrorKind::Validation, series.symbol + " " + bar.date.to_string() +
                                                   ": dates not strictly increasing");
        }
    }
}

}  // namespace stockcast::data
