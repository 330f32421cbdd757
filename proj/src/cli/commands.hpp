#pragma once

#include "stockcast/cli/config.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace stockcast::cli {

struct Context {
    RunConfig config;
    std::filesystem::path out;
    std::vector<std::string> symbols;  ///< selection for per-symbol commands
    std::ostream* log = nullptr;
    std::ostream* err = nullptr;
};

struct DecomposeOptions {
    std::optional<int> period;
};

int cmd_prepare(const Context& ctx);
int cmd_decompose(const Context& ctx, const DecomposeOptions& options);
int cmd_forecast(const Context& ctx);
int cmd_walkforward(const Context& ctx);
int cmd_train(const Context& ctx);
int cmd_classify(const Context& ctx);
int cmd_portfolio(const Context& ctx);
int cmd_backtest(const Context& ctx);
int cmd_report(const Context& ctx);

}  // namespace stockcast::cli
