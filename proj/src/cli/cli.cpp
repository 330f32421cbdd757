#include "stockcast/cli/cli.hpp"

#include "commands.hpp"

#include "stockcast/error.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <ostream>

namespace stockcast::cli {

namespace {

struct Flags {
    std::string config;
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    std::vector<std::string> symbols;

    std::optional<std::string> model;
    std::optional<int> horizon;
    std::optional<int> period;
    std::optional<std::string> mode;
    std::optional<std::size_t> train;
    std::optional<std::size_t> test;
    std::optional<std::size_t> step;
    std::optional<std::string> kind;
    std::optional<double> budget;
    std::optional<std::size_t> samples;
    std::optional<double> risk_free_rate;
    bool allow_short = false;
};

[[noreturn]] void config_error(const std::string& message) {
    throw Error(ErrorKind::Config, message);
}

ml::ModelKind ml_kind(const std::string& text) {
    const auto kind = ml::parse_model_kind(text);
    if (!kind) config_error("unknown ml model '" + text + "'");
    return *kind;
}

/// Flag > environment > config file > built-in default.
void apply_overrides(RunConfig& c, const Flags& f, const std::string& command) {
    if (f.out) {
        c.output_dir = *f.out;
    } else if (const char* env = std::getenv(kOutputDirEnv); env != nullptr && *env != '\0') {
        c.output_dir = env;
    }
    if (f.seed) c.seed = *f.seed;
    if (f.threads) c.threads = *f.threads;
    if (f.model) {
        if (command == "forecast") c.forecast_model = *f.model;
        else if (command == "walkforward") c.walkforward_model = *f.model;
        else if (command == "train") c.regressor = ml_kind(*f.model);
        else if (command == "classify") c.classifier = ml_kind(*f.model);
    }
    if (f.horizon) c.horizon = *f.horizon;
    if (f.mode) {
        const auto mode = validation::parse_window_mode(*f.mode);
        if (!mode) config_error("--mode: expected rolling or sliding, got '" + *f.mode + "'");
        c.window.mode = *mode;
    }
    if (f.train) c.window.train_size = *f.train;
    if (f.test) c.window.test_size = *f.test;
    if (f.step) c.window.step = *f.step;
    if (f.kind) {
        const auto kind = parse_portfolio_kind(*f.kind);
        if (!kind) config_error("--kind: unknown portfolio kind '" + *f.kind + "'");
        c.portfolio_kind = *kind;
    }
    if (f.budget) c.budget = *f.budget;
    if (f.samples) c.optimizer.mc_samples = *f.samples;
    if (f.risk_free_rate) c.optimizer.risk_free_rate = *f.risk_free_rate;
    if (f.allow_short) c.optimizer.long_only = false;
    c.optimizer.seed = c.seed;
    c.optimizer.threads = c.threads;
    c.hyperparameters.threads = c.threads;
}

std::vector<std::string> select_symbols(const RunConfig& c, const std::vector<std::string>& wanted) {
    const auto all = c.symbols();
    if (wanted.empty()) return all;
    for (const auto& s : wanted) {
        if (std::ranges::find(all, s) == all.end()) {
            config_error("symbol '" + s + "' is not in the configured universe");
        }
    }
    return wanted;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"stockcast: time-series forecasting, ML scoring and portfolio construction"};
    app.name("stockcast");
    app.require_subcommand(1, 1);
    app.fallthrough();
    Flags f;
    app.add_option("-c,--config", f.config, "run configuration file")->required();
    app.add_option("-o,--out", f.out, "output directory (overrides " + std::string(kOutputDirEnv) + ")");
    app.add_option("--seed", f.seed, "random seed for every stochastic step");
    app.add_option("--threads", f.threads, "worker threads")->check(CLI::PositiveNumber);

    auto symbol_option = [&](CLI::App* sub) {
        sub->add_option("-s,--symbol", f.symbols, "restrict to these tickers");
    };
    auto* prepare = app.add_subcommand("prepare", "align raw bars to the calendar");
    symbol_option(prepare);
    auto* decompose = app.add_subcommand("decompose", "classical additive decomposition");
    symbol_option(decompose);
    decompose->add_option("--period", f.period, "season length in bars")->check(CLI::Range(2, 100000));
    auto* forecast = app.add_subcommand("forecast", "fit on the training span and forecast");
    forecast->set_help_flag("--help", "print this help message and exit");
    symbol_option(forecast);
    forecast->add_option("-m,--model", f.model, "ses, holt, hw_additive, hw_multiplicative, arima");
    forecast->add_option("--h,--horizon", f.horizon, "forecast horizon in bars")->check(CLI::PositiveNumber);
    auto* walkforward = app.add_subcommand("walkforward", "walk-forward validation");
    symbol_option(walkforward);
    walkforward->add_option("-m,--model", f.model, "forecast model");
    walkforward->add_option("--mode", f.mode, "rolling or sliding");
    walkforward->add_option("--train", f.train, "training window in bars");
    walkforward->add_option("--test", f.test, "test window in bars");
    walkforward->add_option("--step", f.step, "bars between fold starts");
    auto* train = app.add_subcommand("train", "fit a next-close regressor");
    symbol_option(train);
    train->add_option("-m,--model", f.model, "ols, knn, tree, random_forest, gradient_boost");
    auto* classify = app.add_subcommand("classify", "fit a next-direction classifier");
    symbol_option(classify);
    classify->add_option("-m,--model", f.model,
                         "knn, tree, random_forest, gradient_boost, gaussian_nb, logistic");
    auto* portfolio = app.add_subcommand("portfolio", "optimise weights and allocate shares");
    symbol_option(portfolio);
    portfolio->add_option("--kind", f.kind, "equal_weight, min_variance, max_sharpe");
    portfolio->add_option("--budget", f.budget, "cash to invest")->check(CLI::PositiveNumber);
    portfolio->add_option("--samples", f.samples, "Monte Carlo frontier samples")->check(CLI::PositiveNumber);
    portfolio->add_option("--rf", f.risk_free_rate, "annual risk-free rate");
    portfolio->add_flag("--allow-short", f.allow_short, "drop the long-only constraint");
    auto* backtest = app.add_subcommand("backtest", "buy and hold a saved portfolio over the test span");
    backtest->add_option("--kind", f.kind, "which saved portfolio");
    app.add_subcommand("report", "aggregate existing JSON artifacts");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success)) {
            out << app.help();
            return 0;
        }
        err << "usage error: " << e.what() << '\n' << "run with --help for usage\n";
        return 2;
    }
    const std::string command = app.get_subcommands().front()->get_name();

    try {
        Context ctx;
        ctx.config = load_config(f.config);
        apply_overrides(ctx.config, f, command);
        ctx.config.validate();
        ctx.out = ctx.config.output_dir;
        ctx.symbols = select_symbols(ctx.config, f.symbols);
        ctx.log = &out;
        ctx.err = &err;
        if (command == "prepare") return cmd_prepare(ctx);
        if (command == "decompose") return cmd_decompose(ctx, {f.period});
        if (command == "forecast") return cmd_forecast(ctx);
        if (command == "walkforward") return cmd_walkforward(ctx);
        if (command == "train") return cmd_train(ctx);
        if (command == "classify") return cmd_classify(ctx);
        if (command == "portfolio") return cmd_portfolio(ctx);
        if (command == "backtest") return cmd_backtest(ctx);
        if (command == "report") return cmd_report(ctx);
        err << "usage error: unknown command " << command << '\n';
        return 2;
    } catch (const Error& e) {
        err << "error: " << to_string(e.kind()) << ": " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace stockcast::cli
