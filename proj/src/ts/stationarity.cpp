#include "stockcast/ts/stationarity.hpp"

#include "linalg.hpp"
#include "stockcast/error.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace stockcast::ts {

namespace {

struct AdfRegression {
    double phi = 0.0;
    double se_phi = 0.0;
    double ssr = 0.0;
    std::size_t n_obs = 0;
};

// Rows are dy[i] for i in [first, dy.size()), regressors 1, y[i], dy[i-1..i-lags].
AdfRegression adf_regression(std::span<const double> y, std::span<const double> dy,
                             std::size_t lags, std::size_t first) {
    const auto rows = static_cast<Eigen::Index>(dy.size() - first);
    const auto cols = static_cast<Eigen::Index>(2 + lags);
    Eigen::MatrixXd x(rows, cols);
    Eigen::VectorXd target(rows);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const std::size_t i = first + static_cast<std::size_t>(r);
        target(r) = dy[i];
        x(r, 0) = 1.0;
        x(r, 1) = y[i];
        for (std::size_t j = 1; j <= lags; ++j) {
            x(r, static_cast<Eigen::Index>(1 + j)) = dy[i - j];
        }
    }
    const auto fit = detail::least_squares(x, target);
    if (fit.rank < cols) {
        throw Error(ErrorKind::Numeric, "adf regression is collinear (constant series?)");
    }
    AdfRegression out;
    out.phi = fit.beta(1);
    out.ssr = fit.ssr;
    out.n_obs = static_cast<std::size_t>(rows);
    const double dof = static_cast<double>(rows - cols);
    const double sigma2 = fit.ssr / dof;
    const Eigen::MatrixXd xtx_inv =
        (x.transpose() * x).ldlt().solve(Eigen::MatrixXd::Identity(cols, cols));
    out.se_phi = std::sqrt(sigma2 * xtx_inv(1, 1));
    return out;
}

}  // namespace

double adf_critical_value_5pct(std::size_t n_obs) {
    // MacKinnon (2010), constant, no trend, one variable, 5% level.
    constexpr double b_inf = -2.86154;
    constexpr double b1 = -2.8903;
    constexpr double b2 = -4.234;
    constexpr double b3 = -40.040;
    const double t = static_cast<double>(n_obs);
    return b_inf + b1 / t + b2 / (t * t) + b3 / (t * t * t);
}

std::size_t default_adf_lags(std::size_t n) {
    if (n < 26) {
        return 0;
    }
    const auto schwert =
        static_cast<std::size_t>(std::floor(12.0 * std::pow(static_cast<double>(n) / 100.0, 0.25)));
    return std::min(schwert, n - 25);
}

AdfResult adf_test(std::span<const double> series, std::size_t max_lags) {
    const std::size_t n = series.size();
    if (n < 25 + max_lags) {
        throw Error(ErrorKind::InsufficientData, "adf test with " + std::to_string(max_lags) +
                                                     " lags needs at least " +
                                                     std::to_string(25 + max_lags) +
                                                     " observations, got " + std::to_string(n));
    }
    for (double v : series) {
        if (!std::isfinite(v)) {
            throw Error(ErrorKind::Parameter, "adf test: series contains non-finite values");
        }
    }
    // y_lag[i] = y_i pairs with dy[i] = y_{i+1} - y_i.
    std::vector<double> dy(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        dy[i] = series[i + 1] - series[i];
    }
    const auto y_lag = series.first(n - 1);

    // Lag order by AIC on the sample shared by every candidate.
    std::size_t best_lags = 0;
    double best_aic = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k <= max_lags; ++k) {
        const auto reg = adf_regression(y_lag, dy, k, max_lags);
        const double nobs = static_cast<double>(reg.n_obs);
        const double aic = nobs * std::log(reg.ssr / nobs) + 2.0 * static_cast<double>(k + 2);
        if (aic < best_aic) {
            best_aic = aic;
            best_lags = k;
        }
    }

    const auto reg = adf_regression(y_lag, dy, best_lags, best_lags);
    if (!(reg.se_phi > 0.0) || !std::isfinite(reg.se_phi)) {
        throw Error(ErrorKind::Numeric, "adf regression fits exactly; statistic undefined");
    }
    AdfResult out;
    out.statistic = reg.phi / reg.se_phi;
    out.lags = best_lags;
    out.n_obs = reg.n_obs;
    out.critical_value_5pct = adf_critical_value_5pct(reg.n_obs);
    out.is_stationary = out.statistic < out.critical_value_5pct;
    return out;
}

std::vector<double> pacf_from_acf(std::span<const double> acf) {
    const std::size_t max_lag = acf.empty() ? 0 : acf.size() - 1;
    std::vector<double> out(max_lag + 1, 0.0);
    if (acf.empty()) {
        return out;
    }
    out[0] = 1.0;
    std::vector<double> phi;  // phi_{k-1, 1..k-1}
    for (std::size_t k = 1; k <= max_lag; ++k) {
        double num = acf[k];
        double den = 1.0;
        for (std::size_t j = 1; j < k; ++j) {
            num -= phi[j - 1] * acf[k - j];
            den -= phi[j - 1] * acf[j];
        }
        const double phi_kk = num / den;
        std::vector<double> next(k);
        for (std::size_t j = 1; j < k; ++j) {
            next[j - 1] = phi[j - 1] - phi_kk * phi[k - j - 1];
        }
        next[k - 1] = phi_kk;
        phi = std::move(next);
        out[k] = phi_kk;
    }
    return out;
}

std::vector<double> correlogram(std::span<const double> series, std::size_t n_lags,
                                CorrelogramKind kind) {
    const std::size_t n = series.size();
    if (n_lags >= n) {
        throw Error(ErrorKind::Parameter, "correlogram: n_lags (" + std::to_string(n_lags) +
                                              ") must be below the series length (" +
                                              std::to_string(n) + ")");
    }
    double mean = 0.0;
    for (double v : series) {
        mean += v;
    }
    mean /= static_cast<double>(n);
    double c0 = 0.0;
    for (double v : series) {
        c0 += (v - mean) * (v - mean);
    }
    if (!(c0 > 0.0)) {
        throw Error(ErrorKind::Parameter, "correlogram: series has zero variance");
    }
    std::vector<double> acf(n_lags + 1);
    acf[0] = 1.0;
    for (std::size_t k = 1; k <= n_lags; ++k) {
        double ck = 0.0;
        for (std::size_t t = 0; t + k < n; ++t) {
            ck += (series[t] - mean) * (series[t + k] - mean);
        }
        acf[k] = ck / c0;
    }
    return kind == CorrelogramKind::Acf ? acf : pacf_from_acf(acf);
}

}  // namespace stockcast::ts
