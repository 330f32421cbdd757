#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace stockcast::ts {

struct ArimaOrder {
    int p = 0;
    int d = 0;
    int q = 0;

    friend bool operator==(const ArimaOrder&, const ArimaOrder&) = default;
};

/// ARMA(p, q) on the d-times differenced series w:
///
///   w_t = intercept + sum phi_i w_{t-i} + e_t + sum theta_j e_{t-j}
///
/// The intercept is estimated only when d = 0.
struct ArimaModel {
    ArimaOrder order;
    std::vector<double> ar;
    std::vector<double> ma;
    double intercept = 0.0;
    double sigma2 = 0.0;   ///< conditional-sum-of-squares residual variance
    double aic = 0.0;
    std::size_t n_obs = 0; ///< residuals entering the CSS objective
    std::vector<double> context;  ///< training tail kept for forecasting
};

struct ArimaSearch {
    int max_p = 3;
    int max_q = 3;
    int max_d = 2;
};

/// Differences the series `d` times.
[[nodiscard]] std::vector<double> difference(std::span<const double> y, int d);

/// Roots of 1 - c_1 z - ... - c_k z^k all lie outside the unit circle by
/// more than `tolerance`.
[[nodiscard]] bool roots_outside_unit_circle(std::span<const double> coefficients,
                                             double tolerance = 1e-6);

/// Fits one order by Hannan-Rissanen initialisation followed by Nelder-Mead
/// on the conditional sum of squares. `condition_on` is the number of leading
/// differenced observations used only as lags; it must be at least p, and a
/// search passes max_p so that AIC values are comparable across orders.
/// Throws FitFailure if no stationary and invertible estimate is found.
[[nodiscard]] ArimaModel arima_fit(std::span<const double> y, ArimaOrder order,
                                   int condition_on = -1);

/// Why a fit is excluded from order selection, if it is: an AR or MA root
/// within modulus 1.01 of the unit circle, or an AR and an MA reciprocal root
/// within 0.1 of each other (a near-common factor, so the order is redundant).
[[nodiscard]] std::optional<std::string> selection_veto(const ArimaModel& model);

/// Chooses d by repeated ADF testing, then (p, q) by minimum AIC among fits
/// without a selection_veto, ties going to smaller p + q and then smaller p.
[[nodiscard]] ArimaModel arima_auto_fit(std::span<const double> train,
                                        const ArimaSearch& search = {});

/// Residual recursion over `observations`, then the ARMA recursion with
/// future shocks at zero, then d-fold integration.
[[nodiscard]] std::vector<double> arima_forecast(const ArimaModel& model,
                                                 std::span<const double> observations, int h);

/// Forecast from the training tail stored in the model.
[[nodiscard]] std::vector<double> arima_forecast(const ArimaModel& model, int h);

}  // namespace stockcast::ts
