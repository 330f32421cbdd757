#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace stockcast::ts {

struct AdfResult {
    double statistic = 0.0;            ///< t-ratio of the lagged level coefficient
    double critical_value_5pct = 0.0;
    bool is_stationary = false;        ///< statistic < critical_value_5pct
    std::size_t lags = 0;              ///< lagged differences in the final regression
    std::size_t n_obs = 0;             ///< observations in the final regression
};

/// Augmented Dickey-Fuller test with a constant and no trend:
///
///   dy_t = c + phi * y_{t-1} + sum_{i=1..k} psi_i * dy_{t-i} + e_t
///
/// k is chosen in [0, max_lags] by AIC on a common sample, then the
/// regression is refitted on every observation available for that k.
[[nodiscard]] AdfResult adf_test(std::span<const double> series, std::size_t max_lags);

/// Schwert's rule 12 * (n/100)^(1/4), clipped so that adf_test's length
/// precondition holds.
[[nodiscard]] std::size_t default_adf_lags(std::size_t n);

/// MacKinnon (2010) response-surface 5% critical value for the constant-only
/// regression with `n_obs` observations.
[[nodiscard]] double adf_critical_value_5pct(std::size_t n_obs);

enum class CorrelogramKind { Acf, Pacf };

/// Values for lags 0..n_lags. The ACF uses the biased (divide by n)
/// autocovariance; the PACF is obtained from it by Durbin-Levinson.
[[nodiscard]] std::vector<double> correlogram(std::span<const double> series, std::size_t n_lags,
                                              CorrelogramKind kind);

/// Durbin-Levinson recursion on an autocorrelation sequence r[0..K].
[[nodiscard]] std::vector<double> pacf_from_acf(std::span<const double> acf);

}  // namespace stockcast::ts
