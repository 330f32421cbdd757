#pragma once

#include "stockcast/date.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace stockcast::data {
struct PriceSeries;
}

namespace stockcast::portfolio {

inline constexpr double kTradingDaysPerYear = 250.0;

/// Closes on a calendar shared by every symbol: rows are dates, columns symbols.
struct AssetPanel {
    std::vector<std::string> symbols;
    std::vector<Date> dates;
    Eigen::MatrixXd closes;

    /// Throws Data on shape mismatch, unsorted dates or non-positive closes.
    void validate() const;
};

/// Throws Data unless every series has the same dates.
[[nodiscard]] AssetPanel make_panel(std::span<const data::PriceSeries> series);

/// Rows with date < split and rows with date >= split.
[[nodiscard]] std::pair<AssetPanel, AssetPanel> split_panel(const AssetPanel& panel, Date split);

struct AssetStats {
    std::vector<std::string> symbols;
    Eigen::VectorXd annual_return;      ///< mean calendar-year return
    Eigen::VectorXd annual_volatility;  ///< daily sample sd x sqrt(250)
    Eigen::MatrixXd covariance;         ///< daily sample covariance x 250
};

/// A calendar year's return runs from the previous year's last close (the
/// panel's first close for the first year) to the year's last close.
[[nodiscard]] AssetStats compute_stats(const AssetPanel& panel);

[[nodiscard]] Eigen::VectorXd equal_weight(std::size_t n);

struct RiskReturn {
    double expected_return = 0.0;
    double volatility = 0.0;
};
[[nodiscard]] RiskReturn portfolio_stats(const Eigen::VectorXd& weights, const AssetStats& stats);

/// Throws UndefinedMetric when volatility is not positive.
[[nodiscard]] double sharpe_ratio(double portfolio_return, double risk_free_rate,
                                  double volatility);

struct OptimizerOptions {
    bool long_only = true;
    std::size_t mc_samples = 10000;
    std::uint64_t seed = 42;
    double risk_free_rate = 0.01;
    double step = 1e-4;        ///< coarsest local move; refined tenfold down to min_step
    double min_step = 1e-9;
    std::size_t max_passes = 1000;  ///< per step size
    unsigned threads = 1;
};

struct OptimizedPortfolio {
    Eigen::VectorXd weights;
    double expected_return = 0.0;
    double volatility = 0.0;
    bool degenerate = false;  ///< max-Sharpe with no asset above the risk-free rate
};

/// Unconstrained: Sigma^-1 1 / (1' Sigma^-1 1). Long-only: the best of equal
/// weights and the Monte Carlo samples, then pairwise weight transfers while
/// any improves the objective, then the closed form on the surviving assets
/// when that is long-only and no worse. Throws Numeric on a singular
/// unconstrained system.
[[nodiscard]] OptimizedPortfolio min_variance(const AssetStats& stats,
                                              const OptimizerOptions& options = {});

/// Unconstrained: Sigma^-1 (mu - rf 1), normalised to sum 1.
[[nodiscard]] OptimizedPortfolio max_sharpe(const AssetStats& stats,
                                            const OptimizerOptions& options = {});

struct FrontierSample {
    Eigen::VectorXd weights;
    double expected_return = 0.0;
    double volatility = 0.0;
    double sharpe = 0.0;  ///< NaN when volatility is zero
};

/// Weights uniform on the simplex by normalised exponentials. Samples are
/// drawn in fixed blocks with their own seeded streams, so output does not
/// depend on `threads`.
[[nodiscard]] std::vector<FrontierSample> monte_carlo_frontier(const AssetStats& stats,
                                                               std::size_t n_samples,
                                                               double risk_free_rate,
                                                               std::uint64_t seed,
                                                               unsigned threads = 1);

/// Fixed-point currency in ten-thousandths, so cash arithmetic is exact.
struct Money {
    std::int64_t ticks = 0;

    static constexpr double kTicksPerUnit = 10000.0;
    [[nodiscard]] static Money from(double amount);
    [[nodiscard]] double value() const { return static_cast<double>(ticks) / kTicksPerUnit; }
    friend auto operator<=>(const Money&, const Money&) = default;
    friend Money operator+(Money a, Money b) { return {a.ticks + b.ticks}; }
    friend Money operator-(Money a, Money b) { return {a.ticks - b.ticks}; }
};

struct Allocation {
    std::vector<std::int64_t> shares;
    std::vector<Money> prices;  ///< buy prices, rounded to ticks
    Money budget;
    Money spent;
    Money residual;
    bool empty = false;  ///< budget buys no shares at all
};

/// Floors budget * w_i / price_i, then buys single shares of the
/// positive-weight asset furthest below its target while any is affordable,
/// so on return residual < every positive-weight price.
[[nodiscard]] Allocation allocate_shares(double budget, const Eigen::VectorXd& weights,
                                         std::span<const double> prices);

struct BacktestReport {
    std::vector<Date> dates;
    std::vector<double> holdings_value;  ///< sum of shares x close
    std::vector<double> value;           ///< holdings plus residual cash
    double spent = 0.0;
    double residual = 0.0;
    double total_return = 0.0;       ///< final value - first value
    double total_return_pct = 0.0;   ///< relative to spent
    double max_drawdown_pct = 0.0;   ///< largest peak-to-trough fall of value
};

/// Buy-and-hold over the panel. Allocation columns follow `symbols`; each
/// must appear in the panel.
[[nodiscard]] BacktestReport backtest(const Allocation& allocation,
                                      std::span<const std::string> symbols,
                                      const AssetPanel& test_panel);

void write_weights_csv(std::ostream& out, std::span<const std::string> symbols,
                       const Eigen::VectorXd& weights, const Allocation& allocation);
void write_backtest_csv(std::ostream& out, const BacktestReport& report);
void write_frontier_csv(std::ostream& out, std::span<const FrontierSample> samples);

}  // namespace stockcast::portfolio
