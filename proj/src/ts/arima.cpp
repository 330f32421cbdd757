#include "stockcast/ts/arima.hpp"

#include "linalg.hpp"
#include "nelder_mead.hpp"
#include "stockcast/error.hpp"
#include "stockcast/format.hpp"
#include "stockcast/ts/stationarity.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <utility>

namespace stockcast::ts {

namespace {

constexpr std::size_t kContextLength = 500;

std::string order_name(int p, int d, int q) {
    return "(" + std::to_string(p) + "," + std::to_string(d) + "," + std::to_string(q) + ")";
}

/// Parameter vector layout: [intercept?] phi_1..phi_p theta_1..theta_q.
struct Layout {
    int p;
    int q;
    bool intercept;

    [[nodiscard]] std::size_t size() const {
        return static_cast<std::size_t>(p + q) + (intercept ? 1 : 0);
    }
    [[nodiscard]] double c(const std::vector<double>& x) const { return intercept ? x[0] : 0.0; }
    [[nodiscard]] std::span<const double> ar(const std::vector<double>& x) const {
        return std::span<const double>(x).subspan(intercept ? 1 : 0, static_cast<std::size_t>(p));
    }
    [[nodiscard]] std::span<const double> ma(const std::vector<double>& x) const {
        return std::span<const double>(x).subspan((intercept ? 1 : 0) + static_cast<std::size_t>(p),
                                                  static_cast<std::size_t>(q));
    }
};

bool invertible_ma(std::span<const double> ma) {
    std::vector<double> neg(ma.begin(), ma.end());
    for (auto& v : neg) v = -v;
    return roots_outside_unit_circle(neg);
}

bool admissible(const Layout& layout, const std::vector<double>& x) {
    return roots_outside_unit_circle(layout.ar(x)) && invertible_ma(layout.ma(x));
}

/// Conditional sum of squares with residuals before `start` fixed at zero.
double css(std::span<const double> w, const Layout& layout, const std::vector<double>& x,
           std::size_t start, std::vector<double>& e) {
    const double c = layout.c(x);
    const auto ar = layout.ar(x);
    const auto ma = layout.ma(x);
    e.assign(w.size(), 0.0);
    double sse = 0.0;
    for (std::size_t t = start; t < w.size(); ++t) {
        double pred = c;
        for (std::size_t i = 0; i < ar.size(); ++i) {
            pred += ar[i] * w[t - i - 1];
        }
        for (std::size_t j = 0; j < ma.size() && j < t; ++j) {
            pred += ma[j] * e[t - j - 1];
        }
        e[t] = w[t] - pred;
        sse += e[t] * e[t];
    }
    return sse;
}

/// OLS of w_t on [1?, w_{t-1..t-p}, extra_{t-1..t-q}] for t in [start, n).
std::optional<std::vector<double>> lagged_regression(std::span<const double> w,
                                                     std::span<const double> extra,
                                                     const Layout& layout, std::size_t start) {
    const auto rows = static_cast<Eigen::Index>(w.size() - start);
    const auto cols = static_cast<Eigen::Index>(layout.size());
    if (rows <= cols) {
        return std::nullopt;
    }
    if (cols == 0) {
        return std::vector<double>{};
    }
    Eigen::MatrixXd x(rows, cols);
    Eigen::VectorXd y(rows);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const std::size_t t = start + static_cast<std::size_t>(r);
        Eigen::Index c = 0;
        y(r) = w[t];
        if (layout.intercept) x(r, c++) = 1.0;
        for (int i = 1; i <= layout.p; ++i) x(r, c++) = w[t - static_cast<std::size_t>(i)];
        for (int j = 1; j <= layout.q; ++j) x(r, c++) = extra[t - static_cast<std::size_t>(j)];
    }
    const auto fit = stockcast::detail::least_squares(x, y);
    if (fit.rank < cols) {
        return std::nullopt;
    }
    return std::vector<double>(fit.beta.data(), fit.beta.data() + cols);
}

/// Hannan-Rissanen: a long autoregression supplies innovation estimates, which
/// then enter an OLS regression as stand-ins for the MA lags.
std::vector<double> hannan_rissanen(std::span<const double> w, const Layout& layout,
                                    std::size_t start) {
    if (layout.q == 0) {
        if (auto beta = lagged_regression(w, {}, layout, start)) {
            return *beta;
        }
        return std::vector<double>(layout.size(), 0.0);
    }
    const std::size_t n = w.size();
    const auto log_rule = static_cast<std::size_t>(std::floor(10.0 * std::log10(static_cast<double>(n))));
    const std::size_t m = std::clamp<std::size_t>(std::max<std::size_t>(log_rule, layout.p + layout.q),
                                                  1, std::max<std::size_t>(n / 4, 1));
    const Layout long_ar{static_cast<int>(m), 0, layout.intercept};
    std::vector<double> innovations(n, 0.0);
    if (auto beta = lagged_regression(w, {}, long_ar, m)) {
        std::vector<double> e;
        (void)css(w, long_ar, *beta, m, e);
        innovations = e;
    }
    const std::size_t hr_start = std::max(start, m + static_cast<std::size_t>(layout.q));
    if (hr_start < n) {
        if (auto beta = lagged_regression(w, innovations, layout, hr_start)) {
            return *beta;
        }
    }
    return std::vector<double>(layout.size(), 0.0);
}

}  // namespace

std::vector<double> difference(std::span<const double> y, int d) {
    if (d < 0) {
        throw Error(ErrorKind::Parameter, "differencing order must be >= 0");
    }
    std::vector<double> out(y.begin(), y.end());
    for (int k = 0; k < d; ++k) {
        if (out.empty()) break;
        for (std::size_t i = 0; i + 1 < out.size(); ++i) {
            out[i] = out[i + 1] - out[i];
        }
        out.pop_back();
    }
    return out;
}

namespace {

/// Reciprocal roots of 1 - c_1 z - ... - c_k z^k, as companion eigenvalues.
/// Trailing zero coefficients are dropped. Empty when no coefficient remains;
/// nullopt when the coefficients are not finite or the solver fails.
std::optional<std::vector<std::complex<double>>> inverse_roots(std::span<const double> coefficients) {
    std::size_t k = coefficients.size();
    while (k > 0 && coefficients[k - 1] == 0.0) {
        --k;
    }
    for (std::size_t i = 0; i < k; ++i) {
        if (!std::isfinite(coefficients[i])) return std::nullopt;
    }
    if (k <= 1) {
        return k == 0 ? std::vector<std::complex<double>>{}
                      : std::vector<std::complex<double>>{coefficients[0]};
    }
    const auto kk = static_cast<Eigen::Index>(k);
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(kk, kk);
    for (Eigen::Index j = 0; j < kk; ++j) {
        companion(0, j) = coefficients[static_cast<std::size_t>(j)];
    }
    for (Eigen::Index i = 1; i < kk; ++i) {
        companion(i, i - 1) = 1.0;
    }
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
    if (solver.info() != Eigen::Success) {
        return std::nullopt;
    }
    const auto ev = solver.eigenvalues();
    return std::vector<std::complex<double>>(ev.data(), ev.data() + ev.size());
}

}  // namespace

bool roots_outside_unit_circle(std::span<const double> coefficients, double tolerance) {
    const auto roots = inverse_roots(coefficients);
    if (!roots) {
        return false;
    }
    const double limit = 1.0 / (1.0 + tolerance);
    return std::ranges::all_of(*roots, [&](std::complex<double> r) { return std::abs(r) < limit; });
}

ArimaModel arima_fit(std::span<const double> y, ArimaOrder order, int condition_on) {
    if (order.p < 0 || order.d < 0 || order.q < 0) {
        throw Error(ErrorKind::Parameter, "arima orders must be nonnegative");
    }
    const auto w = difference(y, order.d);
    const Layout layout{order.p, order.q, order.d == 0};
    const std::size_t start =
        condition_on < 0 ? static_cast<std::size_t>(order.p) : static_cast<std::size_t>(condition_on);
    if (start < static_cast<std::size_t>(order.p)) {
        throw Error(ErrorKind::Parameter, "conditioning window shorter than the AR order");
    }
    const std::size_t min_resid = layout.size() + 10;
    if (w.size() < start + min_resid) {
        throw Error(ErrorKind::InsufficientData,
                    "arima " + order_name(order.p, order.d, order.q) + " needs at least " +
                        std::to_string(start + min_resid + static_cast<std::size_t>(order.d)) +
                        " observations");
    }

    std::vector<double> x = hannan_rissanen(w, layout, start);
    // Pull an inadmissible starting point back towards zero.
    for (int shrink = 0; shrink < 60 && !admissible(layout, x); ++shrink) {
        for (std::size_t i = layout.intercept ? 1 : 0; i < x.size(); ++i) {
            x[i] *= 0.5;
        }
    }
    if (!admissible(layout, x)) {
        for (std::size_t i = layout.intercept ? 1 : 0; i < x.size(); ++i) x[i] = 0.0;
    }

    std::vector<double> scratch;
    auto objective = [&](const std::vector<double>& params) {
        if (!admissible(layout, params)) {
            return std::numeric_limits<double>::infinity();
        }
        const double sse = css(w, layout, params, start, scratch);
        return std::isfinite(sse) ? sse : std::numeric_limits<double>::infinity();
    };

    // With no MA terms the OLS start already minimises the CSS exactly.
    if (order.q > 0 && !x.empty()) {
        const int dim = static_cast<int>(x.size());
        auto result = detail::nelder_mead(objective, x, 0.1, 1e-12, 400 * (dim + 1));
        // A restart from the optimum guards against premature simplex collapse.
        result = detail::nelder_mead(objective, result.x, 0.05, 1e-12, 400 * (dim + 1));
        x = result.x;
    }

    const double sse = objective(x);
    if (!std::isfinite(sse)) {
        throw Error(ErrorKind::FitFailure, "arima " + order_name(order.p, order.d, order.q) +
                                               ": estimate is not stationary and invertible");
    }
    const std::size_t n_eff = w.size() - start;
    const double sigma2 = sse / static_cast<double>(n_eff);
    if (!(sigma2 > 0.0)) {
        throw Error(ErrorKind::FitFailure, "arima " + order_name(order.p, order.d, order.q) +
                                               ": zero residual variance");
    }

    ArimaModel model;
    model.order = order;
    model.intercept = layout.c(x);
    const auto ar = layout.ar(x);
    const auto ma = layout.ma(x);
    model.ar.assign(ar.begin(), ar.end());
    model.ma.assign(ma.begin(), ma.end());
    model.sigma2 = sigma2;
    model.n_obs = n_eff;
    const double k = static_cast<double>(layout.size() + 1);
    model.aic = static_cast<double>(n_eff) *
                    (std::log(2.0 * std::numbers::pi * sigma2) + 1.0) +
                2.0 * k;
    const std::size_t keep = std::min(y.size(), kContextLength);
    model.context.assign(y.end() - static_cast<std::ptrdiff_t>(keep), y.end());
    return model;
}

namespace {

// Order selection skips two kinds of fit. One has an AR or MA root inside
// modulus 1 + kSelectionRootMargin, on the admissibility boundary of the CSS
// objective. The other has an AR and an MA reciprocal root closer than
// kCommonFactorDistance: the factors nearly cancel, so the parameters are not
// identified and the fit restates a smaller order.
constexpr double kSelectionRootMargin = 0.01;
constexpr double kCommonFactorDistance = 0.1;

std::vector<double> negated(const std::vector<double>& v) {
    std::vector<double> out(v.size());
    std::transform(v.begin(), v.end(), out.begin(), [](double t) { return -t; });
    return out;
}

}  // namespace

std::optional<std::string> selection_veto(const ArimaModel& m) {
    const auto ma = negated(m.ma);
    if (!roots_outside_unit_circle(m.ar, kSelectionRootMargin) ||
        !roots_outside_unit_circle(ma, kSelectionRootMargin)) {
        return "root within " + format_double(kSelectionRootMargin) + " of the unit circle";
    }
    const auto ar_roots = inverse_roots(m.ar);
    const auto ma_roots = inverse_roots(ma);
    if (!ar_roots || !ma_roots) {
        return "root computation failed";
    }
    for (const auto a : *ar_roots) {
        for (const auto b : *ma_roots) {
            if (std::abs(a - b) < kCommonFactorDistance) {
                return "near-common AR/MA factor (redundant parameters)";
            }
        }
    }
    return std::nullopt;
}

ArimaModel arima_auto_fit(std::span<const double> train, const ArimaSearch& search) {
    if (search.max_p < 0 || search.max_q < 0 || search.max_d < 0) {
        throw Error(ErrorKind::Parameter, "arima search bounds must be nonnegative");
    }
    if (train.size() < 50) {
        throw Error(ErrorKind::InsufficientData,
                    "arima_auto_fit needs at least 50 observations, got " +
                        std::to_string(train.size()));
    }
    for (double v : train) {
        if (!std::isfinite(v)) {
            throw Error(ErrorKind::Parameter, "arima: series contains non-finite values");
        }
    }
    if (std::all_of(train.begin(), train.end(), [&](double v) { return v == train[0]; })) {
        throw Error(ErrorKind::FitFailure, "arima: series is constant; no model to estimate");
    }

    int d = search.max_d;
    for (int candidate = 0; candidate <= search.max_d; ++candidate) {
        const auto w = difference(train, candidate);
        try {
            if (adf_test(w, default_adf_lags(w.size())).is_stationary) {
                d = candidate;
                break;
            }
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::Numeric && e.kind() != ErrorKind::InsufficientData) {
                throw;
            }
            throw Error(ErrorKind::FitFailure, "arima: differencing order " +
                                                   std::to_string(candidate) +
                                                   " gives a degenerate series (" + e.what() + ")");
        }
    }

    std::optional<ArimaModel> best;
    std::string attempts;
    for (int p = 0; p <= search.max_p; ++p) {
        for (int q = 0; q <= search.max_q; ++q) {
            try {
                auto model = arima_fit(train, {p, d, q}, search.max_p);
                if (const auto veto = selection_veto(model)) {
                    attempts += "\n  " + order_name(p, d, q) + ": " + *veto;
                    continue;
                }
                const bool wins =
                    !best || model.aic < best->aic ||
                    (model.aic == best->aic &&
                     std::pair{p + q, p} < std::pair{best->order.p + best->order.q, best->order.p});
                if (wins) {
                    best = std::move(model);
                }
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::FitFailure && e.kind() != ErrorKind::InsufficientData &&
                    e.kind() != ErrorKind::Numeric) {
                    throw;
                }
                attempts += "\n  " + order_name(p, d, q) + ": " + e.what();
            }
        }
    }
    if (!best) {
        throw Error(ErrorKind::FitFailure, "arima: no admissible (p, q) fit; attempts:" + attempts);
    }
    return *best;
}

std::vector<double> arima_forecast(const ArimaModel& model, std::span<const double> observations,
                                   int h) {
    if (h <= 0) {
        throw Error(ErrorKind::Parameter, "forecast horizon must be >= 1, got " + std::to_string(h));
    }
    const auto [p, d, q] = model.order;
    if (model.ar.size() != static_cast<std::size_t>(p) ||
        model.ma.size() != static_cast<std::size_t>(q)) {
        throw Error(ErrorKind::Parameter, "arima model coefficients do not match its orders");
    }
    const std::size_t need = static_cast<std::size_t>(d + p + q) + (d > 0 ? 1 : 0);
    if (observations.size() < std::max<std::size_t>(need, 1)) {
        throw Error(ErrorKind::Parameter, "arima forecast needs at least " +
                                              std::to_string(std::max<std::size_t>(need, 1)) +
                                              " trailing observations, got " +
                                              std::to_string(observations.size()));
    }

    // Keep every differencing level so the forecasts can be integrated back.
    std::vector<std::vector<double>> levels{{observations.begin(), observations.end()}};
    for (int k = 0; k < d; ++k) {
        levels.push_back(difference(levels.back(), 1));
    }
    std::vector<double> w = levels.back();

    std::vector<double> params;
    const Layout layout{p, q, true};
    params.push_back(model.intercept);
    params.insert(params.end(), model.ar.begin(), model.ar.end());
    params.insert(params.end(), model.ma.begin(), model.ma.end());
    std::vector<double> e;
    (void)css(w, layout, params, static_cast<std::size_t>(p), e);

    const std::size_t n = w.size();
    for (int step = 0; step < h; ++step) {
        const std::size_t t = w.size();
        double value = model.intercept;
        for (std::size_t i = 0; i < model.ar.size(); ++i) {
            value += model.ar[i] * w[t - i - 1];
        }
        for (std::size_t j = 0; j < model.ma.size(); ++j) {
            if (t - j - 1 < n) {
                value += model.ma[j] * e[t - j - 1];
            }
        }
        w.push_back(value);
    }
    std::vector<double> out(w.begin() + static_cast<std::ptrdiff_t>(n), w.end());
    for (int k = d - 1; k >= 0; --k) {
        double last = levels[static_cast<std::size_t>(k)].back();
        for (double& v : out) {
            last += v;
            v = last;
        }
    }
    return out;
}

std::vector<double> arima_forecast(const ArimaModel& model, int h) {
    return arima_forecast(model, model.context, h);
}

}  // namespace stockcast::ts
