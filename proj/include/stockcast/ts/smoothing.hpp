#pragma once

#include <span>
#include <vector>

namespace stockcast::ts {

/// Candidate values searched for each smoothing parameter.
struct SmoothingGrid {
    std::vector<double> alpha;
    std::vector<double> beta;
    std::vector<double> gamma;

    /// 0.01, 0.06, ..., 0.96, 0.99 for every parameter.
    [[nodiscard]] static SmoothingGrid standard();
    [[nodiscard]] static std::vector<double> standard_axis();
};

// ---------------------------------------------------------------------------
// Simple exponential smoothing: F_{t+1} = alpha * y_t + (1 - alpha) * F_t,
// started from F_1 = y_1.

struct SesModel {
    double alpha = 0.0;
    double initial_forecast = 0.0;  ///< F_1
    double last_forecast = 0.0;     ///< F_{n+1}
    double mse = 0.0;               ///< in-sample one-step MSE over t = 2..n
    std::size_t n_obs = 0;
};

/// One-step forecasts F_1 .. F_{n+1} for a fixed alpha.
[[nodiscard]] std::vector<double> ses_filter(std::span<const double> y, double alpha);

/// Picks the grid alpha with the smallest in-sample one-step MSE; exact ties
/// go to the smaller alpha.
[[nodiscard]] SesModel ses_fit(std::span<const double> train, std::span<const double> alpha_grid);
[[nodiscard]] std::vector<double> ses_forecast(const SesModel& model, int h);

// ---------------------------------------------------------------------------
// Holt linear trend, started from level = y_1 and trend = y_2 - y_1.

struct HoltModel {
    double alpha = 0.0;
    double beta = 0.0;
    double level = 0.0;
    double trend = 0.0;
    double mse = 0.0;  ///< in-sample one-step MSE over t = 2..n
    std::size_t n_obs = 0;
};

/// One-step forecasts for t = 2..n (index 0 holds the forecast of y_2).
[[nodiscard]] std::vector<double> holt_one_step(std::span<const double> y, double alpha,
                                                double beta);
[[nodiscard]] HoltModel holt_fit(std::span<const double> train, const SmoothingGrid& grid);
[[nodiscard]] std::vector<double> holt_forecast(const HoltModel& model, int h);

// ---------------------------------------------------------------------------
// Holt-Winters with additive or multiplicative seasonality.

enum class SeasonKind { Additive, Multiplicative };

struct HoltWintersModel {
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
    int season_length = 0;
    SeasonKind kind = SeasonKind::Additive;
    double level = 0.0;
    double trend = 0.0;
    std::vector<double> seasonal;  ///< s_{n-m+1} .. s_n, oldest first
    double mse = 0.0;              ///< in-sample one-step MSE over t = m+1..n
    std::size_t n_obs = 0;
};

/// Which stored seasonal term a horizon-h forecast uses: the term at time
/// n + offset, where offset = h - m(k+1) and k = floor((h-1)/m).
struct SeasonalIndex {
    int k = 0;
    int offset = 0;    ///< relative to the last observation n, always in [-(m-1), 0]
    int position = 0;  ///< index into HoltWintersModel::seasonal
};
[[nodiscard]] SeasonalIndex seasonal_index(int h, int season_length);

/// Runs the recursions for fixed parameters and returns the final state with
/// its in-sample MSE. Initial state comes from the first two seasons: the
/// trend is the difference of their means over m, and level and seasonal
/// terms are measured against that trend line through the first season.
[[nodiscard]] HoltWintersModel hw_filter(std::span<const double> y, int season_length,
                                         SeasonKind kind, double alpha, double beta,
                                         double gamma);
[[nodiscard]] HoltWintersModel hw_fit(std::span<const double> train, int season_length,
                                      SeasonKind kind, const SmoothingGrid& grid);
[[nodiscard]] std::vector<double> hw_forecast(const HoltWintersModel& model, int h);

}  // namespace stockcast::ts
