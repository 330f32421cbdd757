#pragma once

#include "stockcast/data/features.hpp"
#include "stockcast/date.hpp"
#include "stockcast/ml/model.hpp"
#include "stockcast/portfolio/portfolio.hpp"
#include "stockcast/ts/arima.hpp"
#include "stockcast/validation/walk_forward.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace stockcast::cli {

struct Sector {
    std::string name;
    std::vector<std::string> symbols;
};

enum class PortfolioKind { EqualWeight, MinVariance, MaxSharpe };

[[nodiscard]] std::string to_string(PortfolioKind kind);
[[nodiscard]] std::optional<PortfolioKind> parse_portfolio_kind(std::string_view text);

/// Every field is populated after loading; nothing is looked up later.
struct RunConfig {
    std::filesystem::path data_dir;
    std::filesystem::path calendar;  ///< empty: bars are used as listed
    std::vector<Sector> universe;
    Date split_date;

    std::string forecast_model = "ses";
    int horizon = 30;
    int season_length = 5;
    ts::ArimaSearch arima;

    std::string walkforward_model = "ses";
    validation::WindowSpec window;

    ml::ModelKind regressor = ml::ModelKind::RandomForest;
    ml::ModelKind classifier = ml::ModelKind::Logistic;
    ml::Hyperparameters hyperparameters;
    data::FeatureConfig features;

    PortfolioKind portfolio_kind = PortfolioKind::MaxSharpe;
    double budget = 100000.0;
    portfolio::OptimizerOptions optimizer;

    std::uint64_t seed = 42;
    unsigned threads = 1;
    std::filesystem::path output_dir = "out";

    [[nodiscard]] std::vector<std::string> symbols() const;
    [[nodiscard]] std::string sector_of(const std::string& symbol) const;

    /// Throws Config on any inconsistency, including missing paths.
    void validate() const;
};

/// Sectioned key-value file. Relative paths resolve against the file's
/// directory. Unknown sections or keys are rejected.
[[nodiscard]] RunConfig load_config(const std::filesystem::path& path);
[[nodiscard]] RunConfig parse_config(std::istream& in, const std::filesystem::path& base_dir);

/// Forecast model names accepted by forecast and walkforward.
[[nodiscard]] bool is_forecast_model(std::string_view name);

}  // namespace stockcast::cli
