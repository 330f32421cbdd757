#include "stockcast/portfolio/portfolio.hpp"

#include "stockcast/data/series.hpp"
#include "stockcast/error.hpp"
#include "stockcast/format.hpp"
#include "stockcast/random.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <thread>

namespace stockcast::portfolio {

namespace {

constexpr std::size_t kFrontierBlock = 1024;

void check_stats(const AssetStats& stats) {
    const auto n = static_cast<Eigen::Index>(stats.symbols.size());
    if (n == 0) {
        throw Error(ErrorKind::Parameter, "portfolio needs at least one asset");
    }
    if (stats.annual_return.size() != n || stats.covariance.rows() != n ||
        stats.covariance.cols() != n) {
        throw Error(ErrorKind::Shape, "asset stats dimensions disagree");
    }
}

void check_weights(const Eigen::VectorXd& w, const AssetStats& stats) {
    if (w.size() != stats.annual_return.size()) {
        throw Error(ErrorKind::Shape, "weights have " + std::to_string(w.size()) +
                                          " entries for " +
                                          std::to_string(stats.annual_return.size()) + " assets");
    }
}

double excess_sharpe(double ret, double rf, double vol) {
    return vol > 0.0 ? (ret - rf) / vol : -std::numeric_limits<double>::infinity();
}

OptimizedPortfolio finish(Eigen::VectorXd w, const AssetStats& stats) {
    OptimizedPortfolio out;
    const auto rr = portfolio_stats(w, stats);
    out.weights = std::move(w);
    out.expected_return = rr.expected_return;
    out.volatility = rr.volatility;
    return out;
}

Eigen::VectorXd solve_closed_form(const Eigen::MatrixXd& sigma, const Eigen::VectorXd& rhs) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sigma);
    if (eig.info() != Eigen::Success) {
        throw Error(ErrorKind::Numeric, "covariance eigendecomposition failed");
    }
    const auto& lambda = eig.eigenvalues();
    if (!(lambda.minCoeff() > 1e-12 * lambda.cwiseAbs().maxCoeff())) {
        throw Error(ErrorKind::Numeric, "covariance matrix is singular or indefinite");
    }
    return sigma.ldlt().solve(rhs);
}

/// Tracks w, Sigma w, w' Sigma w and w' mu so a transfer of delta from asset
/// j to asset i is priced in O(1).
class PairSearch {
public:
    enum class Goal { MinVariance, MaxSharpe };

    PairSearch(const AssetStats& stats, Goal goal, double rf)
        : mu_(stats.annual_return), sigma_(stats.covariance), goal_(goal), rf_(rf) {}

    double objective(double variance, double ret) const {
        if (goal_ == Goal::MinVariance) {
            return variance;
        }
        return -excess_sharpe(ret, rf_, std::sqrt(std::max(variance, 0.0)));
    }

    double objective(const Eigen::VectorXd& w) const {
        return objective(w.dot(sigma_ * w), w.dot(mu_));
    }

    Eigen::VectorXd improve(Eigen::VectorXd w, const OptimizerOptions& options) const {
        const auto n = w.size();
        Eigen::VectorXd sw = sigma_ * w;
        double variance = w.dot(sw);
        double ret = w.dot(mu_);
        double current = objective(variance, ret);
        for (double step = options.step; step >= options.min_step * (1.0 - 1e-9); step /= 10.0) {
            for (std::size_t pass = 0; pass < options.max_passes; ++pass) {
                bool moved = false;
                for (Eigen::Index i = 0; i < n; ++i) {
                    for (Eigen::Index j = 0; j < n; ++j) {
                        if (i == j || w(j) <= 0.0) continue;
                        const double delta = std::min(step, w(j));
                        const double dv = 2.0 * delta * (sw(i) - sw(j)) +
                                          delta * delta *
                                              (sigma_(i, i) + sigma_(j, j) - 2.0 * sigma_(i, j));
                        const double dr = delta * (mu_(i) - mu_(j));
                        const double candidate = objective(variance + dv, ret + dr);
                        // The relative margin keeps exact ties, e.g. identical
                        // assets, at their starting weights.
                        if (candidate < current - 1e-12 * std::max(std::abs(current), 1e-300)) {
                            w(i) += delta;
                            w(j) -= delta;
                            if (w(j) < 0.0) w(j) = 0.0;
                            sw += delta * (sigma_.col(i) - sigma_.col(j));
                            variance += dv;
                            ret += dr;
                            current = candidate;
                            moved = true;
                        }
                    }
                }
                if (!moved) break;
                // Re-anchor the running sums against drift.
                sw = sigma_ * w;
                variance = w.dot(sw);
                ret = w.dot(mu_);
                current = objective(variance, ret);
            }
        }
        return w / w.sum();
    }

private:
    const Eigen::VectorXd& mu_;
    const Eigen::MatrixXd& sigma_;
    Goal goal_;
    double rf_;
};

/// Closed form restricted to the assets the local search kept. The local
/// search stops where objective gains fall below its margin, which leaves
/// weights about 1e-6 from the optimum; on the right support the closed form
/// is exact. Returns nullopt when the restricted solution is not long-only.
std::optional<Eigen::VectorXd> polish_on_support(const AssetStats& stats, const Eigen::VectorXd& w,
                                                 PairSearch::Goal goal, double rf) {
    std::vector<Eigen::Index> support;
    for (Eigen::Index i = 0; i < w.size(); ++i) {
        if (w(i) > 0.0) support.push_back(i);
    }
    const auto k = static_cast<Eigen::Index>(support.size());
    Eigen::MatrixXd sigma(k, k);
    Eigen::VectorXd rhs(k);
    for (Eigen::Index a = 0; a < k; ++a) {
        for (Eigen::Index b = 0; b < k; ++b) sigma(a, b) = stats.covariance(support[a], support[b]);
        rhs(a) = goal == PairSearch::Goal::MinVariance ? 1.0 : stats.annual_return(support[a]) - rf;
    }
    Eigen::VectorXd sub;
    try {
        sub = solve_closed_form(sigma, rhs);
    } catch (const Error&) {
        return std::nullopt;
    }
    const double total = sub.sum();
    if (!(total > 0.0)) return std::nullopt;
    sub /= total;
    if (!(sub.minCoeff() >= 0.0)) return std::nullopt;
    Eigen::VectorXd out = Eigen::VectorXd::Zero(w.size());
    for (Eigen::Index a = 0; a < k; ++a) out(support[a]) = sub(a);
    return out;
}

OptimizedPortfolio long_only(const AssetStats& stats, const OptimizerOptions& options,
                             PairSearch::Goal goal) {
    const PairSearch search(stats, goal, options.risk_free_rate);
    Eigen::VectorXd best = equal_weight(stats.symbols.size());
    double best_value = search.objective(best);
    if (options.mc_samples > 0) {
        const auto samples = monte_carlo_frontier(stats, options.mc_samples, options.risk_free_rate,
                                                  options.seed, options.threads);
        for (const auto& s : samples) {
            const double v = search.objective(s.weights);
            if (v < best_value) {
                best_value = v;
                best = s.weights;
            }
        }
    }
    auto w = search.improve(std::move(best), options);
    if (auto polished = polish_on_support(stats, w, goal, options.risk_free_rate);
        polished && search.objective(*polished) <= search.objective(w)) {
        w = std::move(*polished);
    }
    return finish(std::move(w), stats);
}

double drawdown_pct(std::span<const double> values) {
    double peak = -std::numeric_limits<double>::infinity();
    double worst = 0.0;
    for (double v : values) {
        peak = std::max(peak, v);
        if (peak > 0.0) worst = std::max(worst, (peak - v) / peak);
    }
    return 100.0 * worst;
}

}  // namespace

void AssetPanel::validate() const {
    if (closes.rows() != static_cast<Eigen::Index>(dates.size()) ||
        closes.cols() != static_cast<Eigen::Index>(symbols.size())) {
        throw Error(ErrorKind::Data, "asset panel shape does not match its dates and symbols");
    }
    for (std::size_t i = 1; i < dates.size(); ++i) {
        if (!(dates[i - 1] < dates[i])) {
            throw Error(ErrorKind::Data, "asset panel dates are not strictly increasing at " +
                                             dates[i].to_string());
        }
    }
    for (Eigen::Index r = 0; r < closes.rows(); ++r) {
        for (Eigen::Index c = 0; c < closes.cols(); ++c) {
            if (!(closes(r, c) > 0.0) || !std::isfinite(closes(r, c))) {
                throw Error(ErrorKind::Data, "non-positive close for " +
                                                 symbols[static_cast<std::size_t>(c)] + " on " +
                                                 dates[static_cast<std::size_t>(r)].to_string());
            }
        }
    }
}

AssetPanel make_panel(std::span<const data::PriceSeries> series) {
    if (series.empty()) {
        throw Error(ErrorKind::Data, "asset panel needs at least one series");
    }
    AssetPanel panel;
    panel.dates = series.front().dates();
    panel.closes.resize(static_cast<Eigen::Index>(panel.dates.size()),
                        static_cast<Eigen::Index>(series.size()));
    for (std::size_t c = 0; c < series.size(); ++c) {
        const auto& s = series[c];
        if (s.dates() != panel.dates) {
            throw Error(ErrorKind::Data, "series " + s.symbol + " is not on the calendar of " +
                                             series.front().symbol + "; align it first");
        }
        panel.symbols.push_back(s.symbol);
        for (std::size_t r = 0; r < s.bars.size(); ++r) {
            panel.closes(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = s.bars[r].close;
        }
    }
    panel.validate();
    return panel;
}

std::pair<AssetPanel, AssetPanel> split_panel(const AssetPanel& panel, Date split) {
    const auto cut = static_cast<std::size_t>(
        std::lower_bound(panel.dates.begin(), panel.dates.end(), split) - panel.dates.begin());
    AssetPanel head{panel.symbols, {panel.dates.begin(), panel.dates.begin() + static_cast<std::ptrdiff_t>(cut)},
                    panel.closes.topRows(static_cast<Eigen::Index>(cut))};
    AssetPanel tail{panel.symbols, {panel.dates.begin() + static_cast<std::ptrdiff_t>(cut), panel.dates.end()},
                    panel.closes.bottomRows(static_cast<Eigen::Index>(panel.dates.size() - cut))};
    return {std::move(head), std::move(tail)};
}

AssetStats compute_stats(const AssetPanel& panel) {
    panel.validate();
    const auto t = panel.closes.rows();
    const auto n = panel.closes.cols();
    if (t < 3) {
        throw Error(ErrorKind::InsufficientData,
                    "asset stats need at least 3 dates for a sample covariance, got " + std::to_string(t));
    }
    const Eigen::MatrixXd returns =
        (panel.closes.bottomRows(t - 1).array() / panel.closes.topRows(t - 1).array()) - 1.0;
    const Eigen::RowVectorXd mean = returns.colwise().mean();
    const Eigen::MatrixXd centred = returns.rowwise() - mean;
    AssetStats out;
    out.symbols = panel.symbols;
    out.covariance = (centred.transpose() * centred) / static_cast<double>(t - 2) * kTradingDaysPerYear;
    // Exact symmetry regardless of summation order.
    out.covariance = (0.5 * (out.covariance + out.covariance.transpose())).eval();
    out.annual_volatility = (centred.array().square().colwise().sum() / static_cast<double>(t - 2))
                                .sqrt()
                                .transpose() *
                            std::sqrt(kTradingDaysPerYear);

    // Last row index of each calendar year.
    std::map<int, Eigen::Index> year_end;
    for (Eigen::Index r = 0; r < t; ++r) {
        year_end[panel.dates[static_cast<std::size_t>(r)].year()] = r;
    }
    out.annual_return = Eigen::VectorXd::Zero(n);
    Eigen::Index start = 0;
    for (const auto& [year, end] : year_end) {
        out.annual_return += (panel.closes.row(end).array() / panel.closes.row(start).array() - 1.0)
                                 .matrix()
                                 .transpose();
        start = end;
    }
    out.annual_return /= static_cast<double>(year_end.size());
    return out;
}

Eigen::VectorXd equal_weight(std::size_t n) {
    if (n == 0) {
        throw Error(ErrorKind::Parameter, "equal_weight needs at least one asset");
    }
    return Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), 1.0 / static_cast<double>(n));
}

RiskReturn portfolio_stats(const Eigen::VectorXd& weights, const AssetStats& stats) {
    check_stats(stats);
    check_weights(weights, stats);
    const double variance = weights.dot(stats.covariance * weights);
    return {weights.dot(stats.annual_return), std::sqrt(std::max(variance, 0.0))};
}

double sharpe_ratio(double portfolio_return, double risk_free_rate, double volatility) {
    if (!(volatility > 0.0)) {
        throw Error(ErrorKind::UndefinedMetric, "Sharpe ratio needs positive volatility");
    }
    return (portfolio_return - risk_free_rate) / volatility;
}

OptimizedPortfolio min_variance(const AssetStats& stats, const OptimizerOptions& options) {
    check_stats(stats);
    const auto n = stats.annual_return.size();
    if (n == 1) {
        return finish(Eigen::VectorXd::Ones(1), stats);
    }
    if (options.long_only) {
        return long_only(stats, options, PairSearch::Goal::MinVariance);
    }
    const Eigen::VectorXd x = solve_closed_form(stats.covariance, Eigen::VectorXd::Ones(n));
    return finish(x / x.sum(), stats);
}

OptimizedPortfolio max_sharpe(const AssetStats& stats, const OptimizerOptions& options) {
    check_stats(stats);
    const auto n = stats.annual_return.size();
    const bool degenerate = (stats.annual_return.array() <= options.risk_free_rate).all();
    OptimizedPortfolio out;
    if (n == 1) {
        out = finish(Eigen::VectorXd::Ones(1), stats);
    } else if (options.long_only) {
        out = long_only(stats, options, PairSearch::Goal::MaxSharpe);
    } else {
        const Eigen::VectorXd excess =
            stats.annual_return - Eigen::VectorXd::Constant(n, options.risk_free_rate);
        const Eigen::VectorXd x = solve_closed_form(stats.covariance, excess);
        const double total = x.sum();
        if (!(std::abs(total) > 1e-300)) {
            throw Error(ErrorKind::Numeric, "tangency weights sum to zero; no normalised portfolio");
        }
        out = finish(x / total, stats);
        out.degenerate = total < 0.0;
    }
    out.degenerate = out.degenerate || degenerate;
    return out;
}

std::vector<FrontierSample> monte_carlo_frontier(const AssetStats& stats, std::size_t n_samples,
                                                 double risk_free_rate, std::uint64_t seed,
                                                 unsigned threads) {
    check_stats(stats);
    if (n_samples == 0) {
        throw Error(ErrorKind::Parameter, "monte_carlo_frontier needs at least one sample");
    }
    const auto n = stats.annual_return.size();
    std::vector<FrontierSample> out(n_samples);
    const std::size_t blocks = (n_samples + kFrontierBlock - 1) / kFrontierBlock;

    auto run_block = [&](std::size_t b) {
        std::mt19937_64 rng(splitmix64(seed ^ splitmix64(b)));
        const std::size_t end = std::min(n_samples, (b + 1) * kFrontierBlock);
        for (std::size_t i = b * kFrontierBlock; i < end; ++i) {
            Eigen::VectorXd w(n);
            // 1 - U lies in (0, 1], so every draw is finite and nonnegative.
            for (Eigen::Index k = 0; k < n; ++k) w(k) = -std::log(1.0 - uniform01(rng));
            w /= w.sum();
            auto& s = out[i];
            const auto rr = portfolio_stats(w, stats);
            s.weights = std::move(w);
            s.expected_return = rr.expected_return;
            s.volatility = rr.volatility;
            s.sharpe = rr.volatility > 0.0 ? (rr.expected_return - risk_free_rate) / rr.volatility
                                           : std::numeric_limits<double>::quiet_NaN();
        }
    };
    const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(blocks)));
    if (workers == 1) {
        for (std::size_t b = 0; b < blocks; ++b) run_block(b);
        return out;
    }
    std::vector<std::exception_ptr> errors(workers);
    {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t b = w; b < blocks; b += workers) run_block(b);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return out;
}

Money Money::from(double amount) {
    if (!std::isfinite(amount) || std::abs(amount) > 9e14) {
        throw Error(ErrorKind::Range, "currency amount out of range: " + format_double(amount));
    }
    return {static_cast<std::int64_t>(std::llround(amount * kTicksPerUnit))};
}

Allocation allocate_shares(double budget, const Eigen::VectorXd& weights,
                           std::span<const double> prices) {
    if (!(budget > 0.0)) {
        throw Error(ErrorKind::Parameter, "budget must be positive");
    }
    const auto n = static_cast<std::size_t>(weights.size());
    if (prices.size() != n || n == 0) {
        throw Error(ErrorKind::Shape, "allocation needs one price per weight");
    }
    double weight_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = weights(static_cast<Eigen::Index>(i));
        if (!(w >= 0.0) || !std::isfinite(w)) {
            throw Error(ErrorKind::Parameter, "allocation weights must be finite and nonnegative");
        }
        weight_sum += w;
    }
    if (std::abs(weight_sum - 1.0) > 1e-9) {
        throw Error(ErrorKind::Parameter, "allocation weights must sum to 1, got " + format_double(weight_sum));
    }

    Allocation out;
    out.budget = Money::from(budget);
    out.shares.assign(n, 0);
    out.prices.resize(n);
    std::vector<double> target(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.prices[i] = Money::from(prices[i]);
        if (out.prices[i].ticks <= 0) {
            throw Error(ErrorKind::Parameter, "prices must be positive");
        }
        target[i] = static_cast<double>(out.budget.ticks) * weights(static_cast<Eigen::Index>(i));
        out.shares[i] = static_cast<std::int64_t>(
            std::floor(target[i] / static_cast<double>(out.prices[i].ticks)));
    }
    auto cost = [&] {
        std::int64_t total = 0;
        for (std::size_t i = 0; i < n; ++i) total += out.shares[i] * out.prices[i].ticks;
        return total;
    };
    // Rounding in the weight product can overshoot by a share; undo it.
    for (std::int64_t spent = cost(); spent > out.budget.ticks; spent = cost()) {
        std::size_t worst = n;
        for (std::size_t i = 0; i < n; ++i) {
            if (out.shares[i] > 0 && (worst == n || out.prices[i] > out.prices[worst])) worst = i;
        }
        --out.shares[worst];
    }

    std::int64_t residual = out.budget.ticks - cost();
    for (;;) {
        std::size_t pick = n;
        double pick_gap = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (!(weights(static_cast<Eigen::Index>(i)) > 0.0) || out.prices[i].ticks > residual) continue;
            const double gap = target[i] - static_cast<double>(out.shares[i] * out.prices[i].ticks);
            if (pick == n || gap > pick_gap) {
                pick = i;
                pick_gap = gap;
            }
        }
        if (pick == n) break;
        ++out.shares[pick];
        residual -= out.prices[pick].ticks;
    }
    out.spent = Money{out.budget.ticks - residual};
    out.residual = Money{residual};
    out.empty = std::all_of(out.shares.begin(), out.shares.end(), [](std::int64_t s) { return s == 0; });
    return out;
}

BacktestReport backtest(const Allocation& allocation, std::span<const std::string> symbols,
                        const AssetPanel& test_panel) {
    test_panel.validate();
    if (symbols.size() != allocation.shares.size()) {
        throw Error(ErrorKind::Shape, "backtest needs one symbol per allocated position");
    }
    if (test_panel.dates.empty()) {
        throw Error(ErrorKind::InsufficientData, "backtest panel has no dates");
    }
    std::vector<Eigen::Index> column(symbols.size());
    for (std::size_t i = 0; i < symbols.size(); ++i) {
        const auto it = std::find(test_panel.symbols.begin(), test_panel.symbols.end(), symbols[i]);
        if (it == test_panel.symbols.end()) {
            throw Error(ErrorKind::Data, "backtest panel has no prices for " + symbols[i]);
        }
        column[i] = it - test_panel.symbols.begin();
    }
    BacktestReport out;
    out.dates = test_panel.dates;
    out.spent = allocation.spent.value();
    out.residual = allocation.residual.value();
    for (Eigen::Index r = 0; r < test_panel.closes.rows(); ++r) {
        double holdings = 0.0;
        for (std::size_t i = 0; i < symbols.size(); ++i) {
            holdings += static_cast<double>(allocation.shares[i]) * test_panel.closes(r, column[i]);
        }
        out.holdings_value.push_back(holdings);
        out.value.push_back(holdings + out.residual);
    }
    out.total_return = out.value.back() - out.value.front();
    out.total_return_pct = out.spent > 0.0 ? 100.0 * out.total_return / out.spent : 0.0;
    out.max_drawdown_pct = drawdown_pct(out.value);
    return out;
}

void write_weights_csv(std::ostream& out, std::span<const std::string> symbols,
                       const Eigen::VectorXd& weights, const Allocation& allocation) {
    out << "symbol,weight,price,shares,spent\n";
    for (std::size_t i = 0; i < symbols.size(); ++i) {
        const Money spent{allocation.shares[i] * allocation.prices[i].ticks};
        out << symbols[i] << ',' << format_double(weights(static_cast<Eigen::Index>(i))) << ','
            << format_fixed(allocation.prices[i].value(), 4) << ',' << allocation.shares[i] << ','
            << format_fixed(spent.value(), 4) << '\n';
    }
}

void write_backtest_csv(std::ostream& out, const BacktestReport& report) {
    out << "date,holdings_value,value\n";
    for (std::size_t i = 0; i < report.dates.size(); ++i) {
        out << report.dates[i].to_string() << ',' << format_double(report.holdings_value[i]) << ','
            << format_double(report.value[i]) << '\n';
    }
}

void write_frontier_csv(std::ostream& out, std::span<const FrontierSample> samples) {
    out << "sample,expected_return,volatility,sharpe";
    const auto n = samples.empty() ? 0 : samples.front().weights.size();
    for (Eigen::Index k = 0; k < n; ++k) out << ",w" << k;
    out << '\n';
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto& s = samples[i];
        out << i << ',' << format_double(s.expected_return) << ',' << format_double(s.volatility)
            << ',' << format_double(s.sharpe);
        for (Eigen::Index k = 0; k < n; ++k) out << ',' << format_double(s.weights(k));
        out << '\n';
    }
}

}  // namespace stockcast::portfolio
