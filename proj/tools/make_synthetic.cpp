// Writes the bundled six-symbol dataset: one OHLCV CSV per ticker, a trading
// calendar, and a run configuration. Output depends only on the seed.

#include "stockcast/data/io.hpp"
#include "stockcast/data/series.hpp"
#include "stockcast/random.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

namespace {

using stockcast::Date;
using stockcast::data::Bar;
using stockcast::data::PriceSeries;

struct Spec {
    const char* symbol;
    double start;
    double drift;      ///< annual log drift
    double vol;        ///< annual idiosyncratic volatility
    double beta;       ///< loading on the shared market factor
    double weekly;     ///< amplitude of the 5-day log-price cycle
};

constexpr Spec kSpecs[] = {
    {"BANKA", 420.0, 0.10, 0.22, 0.9, 0.004},
    {"BANKB", 95.0, 0.04, 0.28, 1.1, 0.003},
    {"TECHA", 1250.0, 0.16, 0.20, 0.8, 0.002},
    {"TECHB", 310.0, 0.12, 0.26, 1.0, 0.005},
    {"PHRMA", 640.0, 0.07, 0.18, 0.5, 0.003},
    {"PHRMB", 150.0, 0.02, 0.30, 0.6, 0.006},
};

double gaussian(std::mt19937_64& rng) {
    const double u1 = 1.0 - stockcast::uniform01(rng);
    const double u2 = stockcast::uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double round2(double v) { return std::round(v * 100.0) / 100.0; }

std::vector<Date> trading_calendar() {
    std::vector<Date> days;
    for (Date d(2017, 1, 2); d <= Date(2021, 12, 31); d = d.plus_days(1)) {
        if (d.is_weekend()) continue;
        const auto ymd = std::chrono::year_month_day{d.days()};
        const unsigned m = static_cast<unsigned>(ymd.month());
        const unsigned day = static_cast<unsigned>(ymd.day());
        const bool holiday = (m == 1 && day == 26) || (m == 8 && day == 15) ||
                             (m == 10 && day == 2) || (m == 12 && day == 25) ||
                             (m == 5 && day == 1);
        if (!holiday) days.push_back(d);
    }
    return days;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: make_synthetic <output-dir>\n";
        return 2;
    }
    const std::filesystem::path dir = argv[1];
    std::filesystem::create_directories(dir);
    const auto calendar = trading_calendar();
    {
        std::ofstream out(dir / "calendar.csv");
        for (const Date d : calendar) out << d.to_string() << '\n';
    }

    std::mt19937_64 market_rng(stockcast::splitmix64(20170102));
    std::vector<double> market(calendar.size());
    for (auto& m : market) m = gaussian(market_rng) * 0.15 / std::sqrt(250.0);

    for (std::size_t s = 0; s < std::size(kSpecs); ++s) {
        const Spec& spec = kSpecs[s];
        std::mt19937_64 rng(stockcast::splitmix64(20170102 + s + 1));
        PriceSeries series{spec.symbol, {}};
        double log_price = std::log(spec.start);
        double prev_close = spec.start;
        for (std::size_t t = 0; t < calendar.size(); ++t) {
            const double daily = spec.drift / 250.0 + spec.beta * market[t] +
                                 gaussian(rng) * spec.vol / std::sqrt(250.0);
            log_price += daily;
            const double cycle = spec.weekly * std::sin(2.0 * std::numbers::pi * static_cast<double>(t % 5) / 5.0);
            const double close = round2(std::exp(log_price + cycle));
            const double open = round2(prev_close * (1.0 + 0.004 * gaussian(rng)));
            const double wick_up = 0.006 * stockcast::uniform01(rng);
            const double wick_down = 0.006 * stockcast::uniform01(rng);
            const double high = round2(std::max(open, close) * (1.0 + wick_up));
            const double low = round2(std::min(open, close) * (1.0 - wick_down));
            const auto volume = static_cast<std::int64_t>(
                std::round(2.0e5 * std::exp(0.4 * gaussian(rng)) * (1.0 + 0.5 * std::abs(daily) * 50.0)));
            prev_close = close;
            // About 1% of sessions are absent from the raw file and get forward filled.
            const bool dropped = t > 0 && stockcast::uniform01(rng) < 0.01;
            if (!dropped) series.bars.push_back(Bar{calendar[t], open, high, low, close, volume});
        }
        stockcast::data::validate(series);
        std::ofstream out(dir / (std::string(spec.symbol) + ".csv"));
        stockcast::data::write_csv(out, series);
    }

    std::ofstream cfg(dir / "config.ini");
    cfg << "; Bundled synthetic universe: six tickers in three sectors, 2017-2021.\n"
           "[data]\n"
           "dir = .\n"
           "calendar = calendar.csv\n"
           "split_date = 2021-01-01\n"
           "\n"
           "[universe]\n"
           "banking = BANKA, BANKB\n"
           "technology = TECHA, TECHB\n"
           "pharma = PHRMA, PHRMB\n"
           "\n"
           "[forecast]\n"
           "model = hw_additive\n"
           "horizon = 30\n"
           "season_length = 5\n"
           "max_p = 3\n"
           "max_q = 3\n"
           "max_d = 2\n"
           "\n"
           "[walkforward]\n"
           "model = holt\n"
           "mode = sliding\n"
           "train = 1000\n"
           "test = 5\n"
           "step = 5\n"
           "\n"
           "[ml]\n"
           "regressor = random_forest\n"
           "classifier = logistic\n"
           "n_trees = 50\n"
           "max_depth = 8\n"
           "\n"
           "[portfolio]\n"
           "kind = max_sharpe\n"
           "budget = 100000\n"
           "risk_free_rate = 0.01\n"
           "long_only = true\n"
           "samples = 10000\n"
           "\n"
           "[run]\n"
           "seed = 42\n"
           "threads = 1\n";
    return 0;
}
