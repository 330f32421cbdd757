#include "commands.hpp"

#include "output.hpp"

#include "stockcast/data/features.hpp"
#include "stockcast/data/io.hpp"
#include "stockcast/data/transform.hpp"
#include "stockcast/error.hpp"
#include "stockcast/format.hpp"
#include "stockcast/ml/roc.hpp"
#include "stockcast/ml/serialize.hpp"
#include "stockcast/ts/decompose.hpp"
#include "stockcast/ts/serialize.hpp"
#include "stockcast/validation/metrics.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

namespace stockcast::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// Fan-out

struct SymbolOutcome {
    std::optional<json> summary;
    std::string error;
};

/// Runs `task` once per symbol on up to config.threads workers. Messages are
/// reported in symbol order once every task has finished.
using SymbolTask = std::function<json(const std::string& symbol, unsigned inner_threads)>;

std::vector<SymbolOutcome> fan_out(const Context& ctx, const std::vector<std::string>& symbols,
                                   const SymbolTask& task) {
    std::vector<SymbolOutcome> outcomes(symbols.size());
    const unsigned threads = ctx.config.threads;
    const unsigned workers =
        static_cast<unsigned>(std::min<std::size_t>(std::max(threads, 1U), symbols.size()));
    const unsigned inner = symbols.size() > 1 ? 1U : threads;
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < symbols.size(); i = next++) {
            try {
                outcomes[i].summary = task(symbols[i], inner);
            } catch (const std::exception& e) {
                outcomes[i].error = e.what();
            }
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    for (std::size_t i = 0; i < symbols.size(); ++i) {
        if (outcomes[i].error.empty()) {
            *ctx.log << symbols[i] << ": ok\n";
        } else {
            *ctx.err << "error: " << symbols[i] << ": " << outcomes[i].error << '\n';
        }
    }
    return outcomes;
}

int worst_status(const std::vector<SymbolOutcome>& outcomes) {
    return std::ranges::any_of(outcomes, [](const auto& o) { return !o.error.empty(); }) ? 1 : 0;
}

// ---------------------------------------------------------------------------
// Shared helpers

fs::path prepared_path(const Context& ctx, const std::string& symbol) {
    return ctx.out / "prepared" / (symbol + ".csv");
}

data::PriceSeries load_prepared(const Context& ctx, const std::string& symbol) {
    const auto path = prepared_path(ctx, symbol);
    if (!fs::is_regular_file(path)) {
        throw Error(ErrorKind::Io, "no prepared data at " + path.string() + " (run prepare first)");
    }
    return data::load_csv(path, {}, symbol);
}

json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Data, path.string() + ": " + e.what());
    }
}

json metrics_json(const validation::MetricReport& report) {
    json j;
    validation::to_json(j, report);
    return j;
}

std::string cell(double v) { return std::isfinite(v) ? format_double(v) : std::string{}; }

std::vector<double> iota_d(std::size_t from, std::size_t n) {
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = static_cast<double>(from + i);
    return x;
}

void write_svg(const fs::path& path, const std::string& svg) {
    write_atomic(path, [&](std::ostream& out) { out << svg; });
}

ts::ForecastModel fit_forecast(const std::string& name, std::span<const double> y,
                               const RunConfig& config) {
    if (name == "ses") return ts::ses_fit(y, ts::SmoothingGrid::standard_axis());
    if (name == "holt") return ts::holt_fit(y, ts::SmoothingGrid::standard());
    if (name == "hw_additive") {
        return ts::hw_fit(y, config.season_length, ts::SeasonKind::Additive,
                          ts::SmoothingGrid::standard());
    }
    if (name == "hw_multiplicative") {
        return ts::hw_fit(y, config.season_length, ts::SeasonKind::Multiplicative,
                          ts::SmoothingGrid::standard());
    }
    if (name == "arima") return ts::arima_auto_fit(y, config.arima);
    throw Error(ErrorKind::Config, "unknown forecast model '" + name + "'");
}

// ---------------------------------------------------------------------------
// ML datasets

struct MlSplit {
    data::FeatureMatrix train;
    data::FeatureMatrix test;
};

/// Training rows must have their label (the next bar) before the split date,
/// so no test-period price reaches the fit.
MlSplit split_features(const data::PriceSeries& series, const data::FeatureMatrix& fm,
                       Date split) {
    std::map<Date, std::size_t> index;
    for (std::size_t i = 0; i < series.bars.size(); ++i) index.emplace(series.bars[i].date, i);
    MlSplit s;
    for (auto* part : {&s.train, &s.test}) part->feature_names = fm.feature_names;
    for (std::size_t r = 0; r < fm.size(); ++r) {
        const std::size_t bar = index.at(fm.dates[r]);
        const Date label_date = series.bars.at(bar + 1).date;
        data::FeatureMatrix* part = nullptr;
        if (label_date < split) part = &s.train;
        else if (fm.dates[r] >= split) part = &s.test;
        if (part == nullptr) continue;
        part->dates.push_back(fm.dates[r]);
        part->rows.push_back(fm.rows[r]);
        part->labels.push_back(fm.labels[r]);
    }
    if (s.train.size() == 0 || s.test.size() == 0) {
        throw Error(ErrorKind::InsufficientData,
                    "feature rows on one side of the split date are empty (train " +
                        std::to_string(s.train.size()) + ", test " +
                        std::to_string(s.test.size()) + ")");
    }
    return s;
}

std::string ml_stem(const std::string& symbol, ml::ModelKind kind) {
    return symbol + "_" + ml::to_string(kind);
}

// ---------------------------------------------------------------------------
// Portfolio helpers

portfolio::AssetPanel load_panel(const Context& ctx, const std::vector<std::string>& symbols) {
    std::vector<data::PriceSeries> series;
    series.reserve(symbols.size());
    for (const auto& s : symbols) series.push_back(load_prepared(ctx, s));
    return portfolio::make_panel(series);
}

std::vector<double> row_of(const Eigen::MatrixXd& m, Eigen::Index r) {
    std::vector<double> v(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index c = 0; c < m.cols(); ++c) v[static_cast<std::size_t>(c)] = m(r, c);
    return v;
}

std::vector<double> to_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

json optional_number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

// ---------------------------------------------------------------------------

int cmd_prepare(const Context& ctx) {
    const auto& c = ctx.config;
    std::vector<Date> calendar;
    if (!c.calendar.empty()) calendar = data::load_calendar(c.calendar);
    auto outcomes = fan_out(ctx, ctx.symbols, [&](const std::string& symbol, unsigned) {
        const auto raw = data::load_csv(c.data_dir / (symbol + ".csv"), {}, symbol);
        std::size_t filled = 0;
        auto series = raw;
        if (!calendar.empty()) {
            filled = data::count_missing(raw, calendar);
            series = data::align_calendar(raw, calendar);
        }
        write_atomic(prepared_path(ctx, symbol),
                     [&](std::ostream& out) { data::write_csv(out, series); });
        const auto [train, test] = data::split_train_test(series, c.split_date);
        return json{{"symbol", symbol},
                    {"sector", c.sector_of(symbol)},
                    {"raw_bars", raw.size()},
                    {"bars", series.size()},
                    {"filled", filled},
                    {"first_date", series.bars.front().date.to_string()},
                    {"last_date", series.bars.back().date.to_string()},
                    {"train_bars", train.size()},
                    {"test_bars", test.size()}};
    });
    json summary{{"split_date", c.split_date.to_string()},
                 {"calendar", c.calendar.empty() ? json(nullptr) : json(c.calendar.filename().string())},
                 {"symbols", json::array()}};
    for (const auto& o : outcomes) {
        if (o.summary) summary["symbols"].push_back(*o.summary);
    }
    write_json(ctx.out / "prepared" / "summary.json", summary);
    return worst_status(outcomes);
}

int cmd_decompose(const Context& ctx, const DecomposeOptions& options) {
    const int period = options.period.value_or(ctx.config.season_length);
    auto outcomes = fan_out(ctx, ctx.symbols, [&](const std::string& symbol, unsigned) {
        const auto series = load_prepared(ctx, symbol);
        const auto closes = series.closes();
        const auto d = ts::decompose(closes, period);
        const auto dir = ctx.out / "decompose";
        write_atomic(dir / (symbol + ".csv"), [&](std::ostream& out) {
            out << "date,close,trend,seasonal,residual\n";
            for (std::size_t i = 0; i < closes.size(); ++i) {
                out << series.bars[i].date.to_string() << ',' << format_double(closes[i]) << ','
                    << cell(d.trend[i]) << ',' << format_double(d.seasonal[i]) << ','
                    << cell(d.residual[i]) << '\n';
            }
        });
        json j{{"symbol", symbol}, {"period", period}, {"pattern", d.pattern},
               {"bars", closes.size()}};
        write_json(dir / (symbol + ".json"), j);
        const auto x = iota_d(0, closes.size());
        write_svg(dir / (symbol + ".svg"),
                  svg_chart(symbol + " decomposition (period " + std::to_string(period) + ")",
                            "bar", "price",
                            {{"close", x, closes, "#1f77b4", false},
                             {"trend", x, d.trend, "#d62728", false}}));
        return j;
    });
    return worst_status(outcomes);
}

int cmd_forecast(const Context& ctx) {
    const auto& c = ctx.config;
    const auto& name = c.forecast_model;
    const int h = c.horizon;
    auto outcomes = fan_out(ctx, ctx.symbols, [&](const std::string& symbol, unsigned) {
        const auto series = load_prepared(ctx, symbol);
        const auto [train, test] = data::split_train_test(series, c.split_date);
        if (train.empty()) throw Error(ErrorKind::InsufficientData, "no bars before the split date");
        const auto y = train.closes();
        const auto model = fit_forecast(name, y, c);
        const auto fc = ts::forecast(model, h);
        const auto actual = test.closes();
        const std::size_t overlap = std::min<std::size_t>(fc.size(), actual.size());

        const auto dir = ctx.out / "forecast";
        const auto stem = symbol + "_" + name;
        write_atomic(dir / (stem + ".csv"), [&](std::ostream& out) {
            out << "step,date,forecast,actual\n";
            for (std::size_t i = 0; i < fc.size(); ++i) {
                out << i + 1 << ',';
                if (i < overlap) out << test.bars[i].date.to_string();
                out << ',' << format_double(fc[i]) << ',';
                if (i < overlap) out << format_double(actual[i]);
                out << '\n';
            }
        });
        json j{{"symbol", symbol},
               {"model", model},
               {"horizon", h},
               {"train_bars", y.size()},
               {"train_first", train.bars.front().date.to_string()},
               {"train_last", train.bars.back().date.to_string()},
               {"overlap", overlap},
               {"metrics", nullptr}};
        if (overlap > 0) {
            j["metrics"] = metrics_json(validation::evaluate(
                std::span(fc).first(overlap), std::span(actual).first(overlap)));
        }
        write_json(dir / (stem + ".json"), j);

        const std::size_t tail = std::min<std::size_t>(y.size(), 250);
        const std::size_t base = y.size() - tail;
        write_svg(dir / (stem + ".svg"),
                  svg_chart(symbol + " " + name + " forecast", "bar", "close",
                            {{"train", iota_d(base, tail), {y.end() - static_cast<long>(tail), y.end()}, "#1f77b4", false},
                             {"actual", iota_d(y.size(), overlap), {actual.begin(), actual.begin() + static_cast<long>(overlap)}, "#2ca02c", false},
                             {"forecast", iota_d(y.size(), fc.size()), fc, "#d62728", false}}));
        return j;
    });
    return worst_status(outcomes);
}

int cmd_walkforward(const Context& ctx) {
    const auto& c = ctx.config;
    const auto& name = c.walkforward_model;
    auto outcomes = fan_out(ctx, ctx.symbols, [&](const std::string& symbol, unsigned inner) {
        const auto series = load_prepared(ctx, symbol);
        const validation::Forecaster forecaster = [&](std::span<const double> train, int horizon) {
            return ts::forecast(fit_forecast(name, train, c), horizon);
        };
        const auto folds = validation::walk_forward(series, c.window, forecaster, inner);
        const auto dir = ctx.out / "walkforward";
        const auto stem = symbol + "_" + name;
        write_atomic(dir / (stem + "_folds.csv"),
                     [&](std::ostream& out) { validation::write_folds_csv(out, folds); });
        json j{{"symbol", symbol},
               {"model", name},
               {"window",
                {{"mode", validation::to_string(c.window.mode)},
                 {"train", c.window.train_size},
                 {"test", c.window.test_size},
                 {"step", c.window.step}}},
               {"folds", folds.size()},
               {"metrics", metrics_json(validation::evaluate(folds))}};
        write_json(dir / (stem + "_metrics.json"), j);
        return j;
    });
    return worst_status(outcomes);
}

int cmd_train(const Context& ctx) {
    const auto& c = ctx.config;
    auto outcomes = fan_out(ctx, ctx.symbols, [&](const std::string& symbol, unsigned inner) {
        const auto series = load_prepared(ctx, symbol);
        const auto fm = data::build_dataset(series, c.features, data::Target::NextClose);
        const auto split = split_features(series, fm, c.split_date);
        auto hp = c.hyperparameters;
        hp.threads = inner;
        const auto train = ml::to_dataset(split.train);
        const auto test = ml::to_dataset(split.test);
        const auto model = ml::fit_regressor(train, c.regressor, hp, c.seed);
        const Eigen::VectorXd pred = ml::predict_regressor(model, test.features);
        const auto predictions = to_vector(pred);
        const auto& actual = split.test.labels;

        const auto dir = ctx.out / "ml" / "regression";
        const auto stem = ml_stem(symbol, c.regressor);
        write_atomic(dir / (stem + "_predictions.csv"), [&](std::ostream& out) {
            out << "date,prediction,actual\n";
            for (std::size_t i = 0; i < predictions.size(); ++i) {
                out << split.test.dates[i].to_string() << ',' << format_double(predictions[i]) << ','
                    << format_double(actual[i]) << '\n';
            }
        });
        json model_json = model;
        write_json(dir / (stem + "_model.json"), model_json);
        json j{{"symbol", symbol},
               {"model", ml::to_string(c.regressor)},
               {"task", "regression"},
               {"features", split.train.feature_names},
               {"train_rows", split.train.size()},
               {"test_rows", split.test.size()},
               {"seed", c.seed},
               {"metrics", metrics_json(validation::evaluate(predictions, actual))}};
        write_json(dir / (stem + "_metrics.json"), j);
        const auto x = iota_d(0, predictions.size());
        write_svg(dir / (stem + ".svg"),
                  svg_chart(symbol + " " + ml::to_string(c.regressor) + " next-close", "test row",
                            "close",
                            {{"actual", x, actual, "#1f77b4", false},
                             {"prediction", x, predictions, "#d62728", false}}));
        return j;
    });
    return worst_status(outcomes);
}

int cmd_classify(const Context& ctx) {
    const auto& c = ctx.config;
    auto outcomes = fan_out(ctx, ctx.symbols, [&](const std::string& symbol, unsigned inner) {
        const auto series = load_prepared(ctx, symbol);
        const auto fm = data::build_dataset(series, c.features, data::Target::NextDirection);
        const auto split = split_features(series, fm, c.split_date);
        auto hp = c.hyperparameters;
        hp.threads = inner;
        const auto train = ml::to_dataset(split.train);
        const auto test = ml::to_dataset(split.test);
        const auto model = ml::fit_classifier(train, c.classifier, hp, c.seed);
        const auto scores = to_vector(ml::predict_scores(model, test.features));
        const auto predicted = ml::predict_labels(model, test.features);
        std::vector<int> labels(split.test.labels.size());
        std::ranges::transform(split.test.labels, labels.begin(),
                               [](double v) { return static_cast<int>(v); });
        const double area = ml::auc(scores, labels);
        const auto curve = ml::roc_curve(scores, labels);
        std::size_t correct = 0;
        for (std::size_t i = 0; i < labels.size(); ++i) correct += predicted[i] == labels[i] ? 1 : 0;

        const auto dir = ctx.out / "ml" / "classification";
        const auto stem = ml_stem(symbol, c.classifier);
        write_atomic(dir / (stem + "_scores.csv"), [&](std::ostream& out) {
            out << "date,score,predicted,label\n";
            for (std::size_t i = 0; i < scores.size(); ++i) {
                out << split.test.dates[i].to_string() << ',' << format_double(scores[i]) << ','
                    << predicted[i] << ',' << labels[i] << '\n';
            }
        });
        write_atomic(dir / (stem + "_roc.csv"),
                     [&](std::ostream& out) { ml::write_roc_csv(out, curve); });
        json model_json = model;
        write_json(dir / (stem + "_model.json"), model_json);
        json j{{"symbol", symbol},
               {"model", ml::to_string(c.classifier)},
               {"task", "classification"},
               {"train_rows", split.train.size()},
               {"test_rows", split.test.size()},
               {"seed", c.seed},
               {"auc", area},
               {"roc_area", ml::trapezoid_area(curve)},
               {"accuracy", static_cast<double>(correct) / static_cast<double>(labels.size())}};
        write_json(dir / (stem + "_auc.json"), j);
        std::vector<double> fpr;
        std::vector<double> tpr;
        for (const auto& p : curve) {
            fpr.push_back(p.fpr);
            tpr.push_back(p.tpr);
        }
        write_svg(dir / (stem + "_roc.svg"),
                  svg_chart(symbol + " ROC (AUC " + format_fixed(area, 3) + ")",
                            "false positive rate", "true positive rate",
                            {{"roc", fpr, tpr, "#d62728", false},
                             {"chance", {0.0, 1.0}, {0.0, 1.0}, "#999999", false}}));
        return j;
    });
    return worst_status(outcomes);
}

int cmd_portfolio(const Context& ctx) {
    const auto& c = ctx.config;
    const auto panel = load_panel(ctx, ctx.symbols);
    const auto [train, test] = portfolio::split_panel(panel, c.split_date);
    const auto stats = portfolio::compute_stats(train);
    auto options = c.optimizer;
    options.seed = c.seed;
    options.threads = c.threads;

    Eigen::VectorXd weights;
    bool degenerate = false;
    switch (c.portfolio_kind) {
        case PortfolioKind::EqualWeight:
            weights = portfolio::equal_weight(ctx.symbols.size());
            break;
        case PortfolioKind::MinVariance: {
            const auto p = portfolio::min_variance(stats, options);
            weights = p.weights;
            break;
        }
        case PortfolioKind::MaxSharpe: {
            const auto p = portfolio::max_sharpe(stats, options);
            weights = p.weights;
            degenerate = p.degenerate;
            break;
        }
    }
    const auto rr = portfolio::portfolio_stats(weights, stats);
    const double sharpe = rr.volatility > 0.0
                              ? portfolio::sharpe_ratio(rr.expected_return, options.risk_free_rate, rr.volatility)
                              : std::numeric_limits<double>::quiet_NaN();

    const bool has_test = test.dates.size() > 0;
    const auto& buy_panel = has_test ? test : train;
    const Eigen::Index buy_row = has_test ? 0 : static_cast<Eigen::Index>(train.dates.size()) - 1;
    const auto prices = row_of(buy_panel.closes, buy_row);
    const auto allocation = portfolio::allocate_shares(c.budget, weights, prices);

    const auto frontier = portfolio::monte_carlo_frontier(stats, options.mc_samples,
                                                          options.risk_free_rate, c.seed, c.threads);

    const auto dir = ctx.out / "portfolio";
    const auto stem = to_string(c.portfolio_kind);
    write_atomic(dir / (stem + "_weights.csv"), [&](std::ostream& out) {
        portfolio::write_weights_csv(out, ctx.symbols, weights, allocation);
    });
    write_atomic(dir / (stem + "_frontier.csv"),
                 [&](std::ostream& out) { portfolio::write_frontier_csv(out, frontier); });

    std::vector<double> money_prices;
    for (const auto& p : allocation.prices) money_prices.push_back(p.value());
    json j{{"kind", stem},
           {"symbols", ctx.symbols},
           {"weights", to_vector(weights)},
           {"expected_return", rr.expected_return},
           {"volatility", rr.volatility},
           {"sharpe", optional_number(sharpe)},
           {"degenerate", degenerate},
           {"risk_free_rate", options.risk_free_rate},
           {"long_only", options.long_only},
           {"seed", c.seed},
           {"samples", options.mc_samples},
           {"split_date", c.split_date.to_string()},
           {"buy_date", buy_panel.dates[static_cast<std::size_t>(buy_row)].to_string()},
           {"budget", allocation.budget.value()},
           {"prices", money_prices},
           {"shares", allocation.shares},
           {"spent", allocation.spent.value()},
           {"residual", allocation.residual.value()},
           {"empty_allocation", allocation.empty},
           {"annual_return", to_vector(stats.annual_return)},
           {"annual_volatility", to_vector(stats.annual_volatility)}};
    write_json(dir / (stem + "_summary.json"), j);

    std::vector<double> vx;
    std::vector<double> vy;
    for (const auto& s : frontier) {
        vx.push_back(s.volatility);
        vy.push_back(s.expected_return);
    }
    write_svg(dir / (stem + "_frontier.svg"),
              svg_chart("Monte Carlo frontier", "annual volatility", "annual return",
                        {{"samples", vx, vy, "#1f77b4", true},
                         {stem, {rr.volatility}, {rr.expected_return}, "#d62728", true}}));
    *ctx.log << stem << ": spent " << format_fixed(allocation.spent.value(), 2) << " of "
             << format_fixed(allocation.budget.value(), 2) << '\n';
    return 0;
}

int cmd_backtest(const Context& ctx) {
    const auto& c = ctx.config;
    const auto stem = to_string(c.portfolio_kind);
    const auto summary_path = ctx.out / "portfolio" / (stem + "_summary.json");
    if (!fs::is_regular_file(summary_path)) {
        throw Error(ErrorKind::Io,
                    "no portfolio at " + summary_path.string() + " (run portfolio first)");
    }
    const auto summary = read_json(summary_path);
    std::vector<std::string> symbols;
    portfolio::Allocation allocation;
    try {
        symbols = summary.at("symbols").get<std::vector<std::string>>();
        allocation.shares = summary.at("shares").get<std::vector<std::int64_t>>();
        for (double p : summary.at("prices").get<std::vector<double>>()) {
            allocation.prices.push_back(portfolio::Money::from(p));
        }
        allocation.budget = portfolio::Money::from(summary.at("budget").get<double>());
        allocation.spent = portfolio::Money::from(summary.at("spent").get<double>());
        allocation.residual = portfolio::Money::from(summary.at("residual").get<double>());
        allocation.empty = summary.at("empty_allocation").get<bool>();
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Data, summary_path.string() + ": " + e.what());
    }
    if (allocation.shares.size() != symbols.size() || allocation.prices.size() != symbols.size()) {
        throw Error(ErrorKind::Data, summary_path.string() + ": shares and symbols differ in length");
    }
    const auto panel = load_panel(ctx, symbols);
    const auto test = portfolio::split_panel(panel, c.split_date).second;
    const auto report = portfolio::backtest(allocation, symbols, test);

    const auto dir = ctx.out / "backtest";
    write_atomic(dir / (stem + "_values.csv"),
                 [&](std::ostream& out) { portfolio::write_backtest_csv(out, report); });
    json j{{"kind", stem},
           {"symbols", symbols},
           {"start", report.dates.front().to_string()},
           {"end", report.dates.back().to_string()},
           {"days", report.dates.size()},
           {"spent", report.spent},
           {"residual", report.residual},
           {"final_value", report.value.back()},
           {"total_return", report.total_return},
           {"total_return_pct", report.total_return_pct},
           {"max_drawdown_pct", report.max_drawdown_pct}};
    write_json(dir / (stem + "_summary.json"), j);
    write_svg(dir / (stem + "_value.svg"),
              svg_chart(stem + " portfolio value", "test day", "value",
                        {{"value", iota_d(0, report.value.size()), report.value, "#1f77b4", false}}));
    *ctx.log << stem << ": return " << format_fixed(report.total_return_pct, 2) << "%\n";
    return 0;
}

namespace {

std::string md_number(const json& v, int decimals) {
    return v.is_number() ? format_fixed(v.get<double>(), decimals) : std::string("n/a");
}

}  // namespace

int cmd_report(const Context& ctx) {
    static const char* const kSections[] = {"prepared", "decompose", "forecast", "walkforward",
                                            "ml", "portfolio", "backtest"};
    std::vector<fs::path> files;
    for (const char* section : kSections) {
        const auto dir = ctx.out / section;
        if (!fs::is_directory(dir)) continue;
        for (const auto& entry : fs::recursive_directory_iterator(dir)) {
            if (entry.is_regular_file() && entry.path().extension() == ".json") {
                files.push_back(entry.path());
            }
        }
    }
    if (files.empty()) {
        throw Error(ErrorKind::Io, "no artifacts under " + ctx.out.string() + " to report on");
    }
    std::ranges::sort(files);
    json all = json::object();
    for (const auto& f : files) {
        all[fs::relative(f, ctx.out).generic_string()] = read_json(f);
    }
    write_json(ctx.out / "report" / "summary.json", all);

    std::ostringstream md;
    md << "# Run summary\n\n";
    auto table = [&](const std::string& title, const std::string& prefix,
                     const std::vector<std::string>& header,
                     const std::function<std::vector<std::string>(const json&)>& row) {
        std::vector<std::vector<std::string>> rows;
        for (const auto& [path, value] : all.items()) {
            if (path.rfind(prefix, 0) == 0 && !path.ends_with("_model.json")) rows.push_back(row(value));
        }
        if (rows.empty()) return;
        md << "## " << title << "\n\n|";
        for (const auto& h : header) md << ' ' << h << " |";
        md << "\n|";
        for (std::size_t i = 0; i < header.size(); ++i) md << " --- |";
        md << '\n';
        for (const auto& r : rows) {
            md << '|';
            for (const auto& cell_text : r) md << ' ' << cell_text << " |";
            md << '\n';
        }
        md << '\n';
    };
    auto metric = [](const json& v, const char* key, int decimals) {
        return v.contains("metrics") && v["metrics"].is_object() && v["metrics"].contains(key)
                   ? md_number(v["metrics"][key], decimals)
                   : std::string("n/a");
    };
    table("Forecasts", "forecast/", {"symbol", "model", "horizon", "rmse", "rmse/mean %"},
          [&](const json& v) {
              return std::vector<std::string>{v.value("symbol", ""), v["model"].value("kind", ""),
                                              std::to_string(v.value("horizon", 0)),
                                              metric(v, "rmse", 4), metric(v, "rmse_over_mean", 4)};
          });
    table("Walk-forward", "walkforward/", {"symbol", "model", "folds", "rmse", "mape %", "rmse/mean %"},
          [&](const json& v) {
              return std::vector<std::string>{v.value("symbol", ""), v.value("model", ""),
                                              std::to_string(v.value("folds", 0)),
                                              metric(v, "rmse", 4), metric(v, "mape", 4),
                                              metric(v, "rmse_over_mean", 4)};
          });
    table("Regression", "ml/regression/", {"symbol", "model", "test rows", "rmse", "rmse/mean %"},
          [&](const json& v) {
              return std::vector<std::string>{v.value("symbol", ""), v.value("model", ""),
                                              std::to_string(v.value("test_rows", 0)),
                                              metric(v, "rmse", 4), metric(v, "rmse_over_mean", 4)};
          });
    table("Classification", "ml/classification/", {"symbol", "model", "auc", "accuracy"},
          [&](const json& v) {
              return std::vector<std::string>{v.value("symbol", ""), v.value("model", ""),
                                              md_number(v.value("auc", json()), 4),
                                              md_number(v.value("accuracy", json()), 4)};
          });
    table("Portfolios", "portfolio/", {"kind", "return", "volatility", "sharpe", "spent", "residual"},
          [&](const json& v) {
              return std::vector<std::string>{v.value("kind", ""),
                                              md_number(v.value("expected_return", json()), 4),
                                              md_number(v.value("volatility", json()), 4),
                                              md_number(v.value("sharpe", json()), 4),
                                              md_number(v.value("spent", json()), 2),
                                              md_number(v.value("residual", json()), 2)};
          });
    table("Backtests", "backtest/", {"kind", "start", "end", "spent", "final value", "return %", "max drawdown %"},
          [&](const json& v) {
              return std::vector<std::string>{v.value("kind", ""), v.value("start", ""),
                                              v.value("end", ""),
                                              md_number(v.value("spent", json()), 2),
                                              md_number(v.value("final_value", json()), 2),
                                              md_number(v.value("total_return_pct", json()), 2),
                                              md_number(v.value("max_drawdown_pct", json()), 2)};
          });
    const auto text = md.str();
    write_atomic(ctx.out / "report" / "summary.md", [&](std::ostream& out) { out << text; });
    *ctx.log << "report: " << files.size() << " artifacts\n";
    return 0;
}

}  // namespace stockcast::cli
