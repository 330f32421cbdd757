#include "stockcast/ts/smoothing.hpp"

#include "stockcast/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <tuple>

namespace stockcast::ts {

namespace {

void check_unit(double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) {
        throw Error(ErrorKind::Parameter,
                    std::string(name) + " must lie in [0, 1], got " + std::to_string(v));
    }
}

void check_grid(std::span<const double> axis, const char* name) {
    if (axis.empty()) {
        throw Error(ErrorKind::Parameter, std::string(name) + " grid is empty");
    }
    for (double v : axis) {
        check_unit(v, name);
    }
}

void check_horizon(int h) {
    if (h <= 0) {
        throw Error(ErrorKind::Parameter, "forecast horizon must be >= 1, got " + std::to_string(h));
    }
}

void check_finite(std::span<const double> y) {
    if (!std::all_of(y.begin(), y.end(), [](double v) { return std::isfinite(v); })) {
        throw Error(ErrorKind::Parameter, "series contains non-finite values");
    }
}

// Strictly better MSE wins; an exact tie keeps the lexicographically smaller
// parameter tuple.
template <class Tuple>
bool better(double mse, const Tuple& params, double best_mse, const Tuple& best_params) {
    if (!std::isfinite(mse)) {
        return false;
    }
    if (mse < best_mse) {
        return true;
    }
    return mse == best_mse && params < best_params;
}

}  // namespace

std::vector<double> SmoothingGrid::standard_axis() {
    std::vector<double> axis;
    for (int k = 0; 0.01 + 0.05 * k <= 0.99 + 1e-12; ++k) {
        axis.push_back(0.01 + 0.05 * k);
    }
    if (axis.back() < 0.99 - 1e-12) {
        axis.push_back(0.99);
    }
    return axis;
}

SmoothingGrid SmoothingGrid::standard() {
    const auto axis = standard_axis();
    return {axis, axis, axis};
}

// --- SES --------------------------------------------------------------------

std::vector<double> ses_filter(std::span<const double> y, double alpha) {
    check_unit(alpha, "alpha");
    if (y.empty()) {
        throw Error(ErrorKind::Parameter, "ses needs a nonempty series");
    }
    std::vector<double> f(y.size() + 1);
    f[0] = y[0];
    for (std::size_t t = 0; t < y.size(); ++t) {
        f[t + 1] = alpha * y[t] + (1.0 - alpha) * f[t];
    }
    return f;
}

SesModel ses_fit(std::span<const double> train, std::span<const double> alpha_grid) {
    if (train.size() < 2) {
        throw Error(ErrorKind::Parameter, "ses_fit needs at least 2 observations");
    }
    check_grid(alpha_grid, "alpha");
    check_finite(train);

    SesModel best;
    double best_mse = std::numeric_limits<double>::infinity();
    std::tuple<double> best_key{std::numeric_limits<double>::infinity()};
    for (double alpha : alpha_grid) {
        const auto f = ses_filter(train, alpha);
        double sse = 0.0;
        for (std::size_t t = 1; t < train.size(); ++t) {
            const double e = train[t] - f[t];
            sse += e * e;
        }
        const double mse = sse / static_cast<double>(train.size() - 1);
        if (better(mse, std::tuple{alpha}, best_mse, best_key)) {
            best_mse = mse;
            best_key = std::tuple{alpha};
            best = SesModel{alpha, f.front(), f.back(), mse, train.size()};
        }
    }
    if (!std::isfinite(best_mse)) {
        throw Error(ErrorKind::Numeric, "ses_fit: no grid value gives a finite MSE");
    }
    return best;
}

std::vector<double> ses_forecast(const SesModel& model, int h) {
    check_horizon(h);
    return std::vector<double>(static_cast<std::size_t>(h), model.last_forecast);
}

// --- Holt -------------------------------------------------------------------

namespace {

struct HoltRun {
    double level;
    double trend;
    double sse;
};

HoltRun holt_run(std::span<const double> y, double alpha, double beta,
                 std::vector<double>* one_step) {
    double level = y[0];
    double trend = y[1] - y[0];
    double sse = 0.0;
    for (std::size_t t = 1; t < y.size(); ++t) {
        const double forecast = level + trend;
        const double e = y[t] - forecast;
        sse += e * e;
        if (one_step != nullptr) {
            one_step->push_back(forecast);
        }
        const double prev_level = level;
        level = alpha * y[t] + (1.0 - alpha) * forecast;
        trend = beta * (level - prev_level) + (1.0 - beta) * trend;
    }
    return {level, trend, sse};
}

void check_holt_input(std::span<const double> y) {
    if (y.size() < 3) {
        throw Error(ErrorKind::InsufficientData,
                    "holt needs at least 3 observations, got " + std::to_string(y.size()));
    }
    check_finite(y);
}

}  // namespace

std::vector<double> holt_one_step(std::span<const double> y, double alpha, double beta) {
    check_holt_input(y);
    check_unit(alpha, "alpha");
    check_unit(beta, "beta");
    std::vector<double> out;
    out.reserve(y.size() - 1);
    (void)holt_run(y, alpha, beta, &out);
    return out;
}

HoltModel holt_fit(std::span<const double> train, const SmoothingGrid& grid) {
    check_holt_input(train);
    check_grid(grid.alpha, "alpha");
    check_grid(grid.beta, "beta");

    HoltModel best;
    double best_mse = std::numeric_limits<double>::infinity();
    std::tuple<double, double> best_key{std::numeric_limits<double>::infinity(), 0.0};
    const double denom = static_cast<double>(train.size() - 1);
    for (double alpha : grid.alpha) {
        for (double beta : grid.beta) {
            const auto run = holt_run(train, alpha, beta, nullptr);
            const double mse = run.sse / denom;
            if (better(mse, std::tuple{alpha, beta}, best_mse, best_key)) {
                best_mse = mse;
                best_key = std::tuple{alpha, beta};
                best = HoltModel{alpha, beta, run.level, run.trend, mse, train.size()};
            }
        }
    }
    if (!std::isfinite(best_mse)) {
        throw Error(ErrorKind::Numeric, "holt_fit: no grid point gives a finite MSE");
    }
    return best;
}

std::vector<double> holt_forecast(const HoltModel& model, int h) {
    check_horizon(h);
    std::vector<double> out(static_cast<std::size_t>(h));
    for (int i = 1; i <= h; ++i) {
        out[static_cast<std::size_t>(i - 1)] = model.level + i * model.trend;
    }
    return out;
}

// --- Holt-Winters -----------------------------------------------------------

SeasonalIndex seasonal_index(int h, int season_length) {
    check_horizon(h);
    if (season_length < 1) {
        throw Error(ErrorKind::Parameter, "season length must be positive");
    }
    const int k = (h - 1) / season_length;
    const int offset = h - season_length * (k + 1);
    return {k, offset, offset + season_length - 1};
}

namespace {

void check_hw_input(std::span<const double> y, int m, SeasonKind kind) {
    if (m < 2) {
        throw Error(ErrorKind::Parameter, "season length must be >= 2, got " + std::to_string(m));
    }
    const auto need = 2 * static_cast<std::size_t>(m) + 2;
    if (y.size() < need) {
        throw Error(ErrorKind::InsufficientData,
                    "holt-winters with season length " + std::to_string(m) + " needs at least " +
                        std::to_string(need) + " observations, got " + std::to_string(y.size()));
    }
    check_finite(y);
    if (kind == SeasonKind::Multiplicative &&
        !std::all_of(y.begin(), y.end(), [](double v) { return v > 0.0; })) {
        throw Error(ErrorKind::Parameter, "multiplicative seasonality needs a positive series");
    }
}

struct HwState {
    double level;
    double trend;
    std::vector<double> seasonal;  // ring indexed by t mod m
};

HwState hw_initial(std::span<const double> y, int m, SeasonKind kind) {
    const auto mm = static_cast<std::size_t>(m);
    double mean1 = 0.0;
    double mean2 = 0.0;
    for (std::size_t i = 0; i < mm; ++i) {
        mean1 += y[i];
        mean2 += y[mm + i];
    }
    mean1 /= m;
    mean2 /= m;
    const double trend = (mean2 - mean1) / m;
    const double centre = (m - 1) / 2.0;
    HwState s{mean1 + trend * centre, trend, std::vector<double>(mm)};
    for (std::size_t i = 0; i < mm; ++i) {
        const double line = mean1 + trend * (static_cast<double>(i) - centre);
        s.seasonal[i] = kind == SeasonKind::Additive ? y[i] - line : y[i] / line;
    }
    return s;
}

double hw_run(std::span<const double> y, int m, SeasonKind kind, double alpha, double beta,
              double gamma, HwState& s) {
    const auto mm = static_cast<std::size_t>(m);
    double sse = 0.0;
    for (std::size_t t = mm; t < y.size(); ++t) {
        double& season = s.seasonal[t % mm];  // holds s_{t-m}
        const double base = s.level + s.trend;
        const double forecast = kind == SeasonKind::Additive ? base + season : base * season;
        const double e = y[t] - forecast;
        sse += e * e;
        const double prev_level = s.level;
        if (kind == SeasonKind::Additive) {
            s.level = alpha * (y[t] - season) + (1.0 - alpha) * base;
            season = gamma * (y[t] - base) + (1.0 - gamma) * season;
        } else {
            s.level = alpha * (y[t] / season) + (1.0 - alpha) * base;
            season = gamma * (y[t] / base) + (1.0 - gamma) * season;
        }
        s.trend = beta * (s.level - prev_level) + (1.0 - beta) * s.trend;
    }
    return sse / static_cast<double>(y.size() - mm);
}

HoltWintersModel hw_model(std::span<const double> y, int m, SeasonKind kind, double alpha,
                          double beta, double gamma, const HwState& s, double mse) {
    const auto mm = static_cast<std::size_t>(m);
    const std::size_t n = y.size();
    HoltWintersModel model{alpha, beta, gamma, m, kind, s.level, s.trend, {}, mse, n};
    model.seasonal.reserve(mm);
    for (std::size_t j = 0; j < mm; ++j) {
        model.seasonal.push_back(s.seasonal[(n - mm + j) % mm]);
    }
    return model;
}

}  // namespace

HoltWintersModel hw_filter(std::span<const double> y, int season_length, SeasonKind kind,
                           double alpha, double beta, double gamma) {
    check_hw_input(y, season_length, kind);
    check_unit(alpha, "alpha");
    check_unit(beta, "beta");
    check_unit(gamma, "gamma");
    auto state = hw_initial(y, season_length, kind);
    const double mse = hw_run(y, season_length, kind, alpha, beta, gamma, state);
    return hw_model(y, season_length, kind, alpha, beta, gamma, state, mse);
}

HoltWintersModel hw_fit(std::span<const double> train, int season_length, SeasonKind kind,
                        const SmoothingGrid& grid) {
    check_hw_input(train, season_length, kind);
    check_grid(grid.alpha, "alpha");
    check_grid(grid.beta, "beta");
    check_grid(grid.gamma, "gamma");

    const auto init = hw_initial(train, season_length, kind);
    double best_mse = std::numeric_limits<double>::infinity();
    std::tuple<double, double, double> best_key{std::numeric_limits<double>::infinity(), 0.0,
                                                0.0};
    HoltWintersModel best;
    HwState state = init;
    for (double alpha : grid.alpha) {
        for (double beta : grid.beta) {
            for (double gamma : grid.gamma) {
                state = init;
                const double mse = hw_run(train, season_length, kind, alpha, beta, gamma, state);
                if (better(mse, std::tuple{alpha, beta, gamma}, best_mse, best_key)) {
                    best_mse = mse;
                    best_key = std::tuple{alpha, beta, gamma};
                    best = hw_model(train, season_length, kind, alpha, beta, gamma, state, mse);
                }
            }
        }
    }
    if (!std::isfinite(best_mse)) {
        throw Error(ErrorKind::Numeric, "hw_fit: no grid point gives a finite MSE");
    }
    return best;
}

std::vector<double> hw_forecast(const HoltWintersModel& model, int h) {
    check_horizon(h);
    if (model.season_length < 2 ||
        model.seasonal.size() != static_cast<std::size_t>(model.season_length)) {
        throw Error(ErrorKind::Parameter, "holt-winters model has inconsistent seasonal state");
    }
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(h));
    for (int i = 1; i <= h; ++i) {
        const auto idx = seasonal_index(i, model.season_length);
        const double season = model.seasonal[static_cast<std::size_t>(idx.position)];
        const double base = model.level + i * model.trend;
        out.push_back(model.kind == SeasonKind::Additive ? base + season : base * season);
    }
    return out;
}

}  // namespace stockcast::ts
