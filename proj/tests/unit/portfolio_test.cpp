#include "stockcast/error.hpp"
#include "stockcast/portfolio/portfolio.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

namespace stockcast::portfolio {
namespace {

using fixtures::Gaussian;

AssetStats make_stats(const Eigen::VectorXd& mu, const Eigen::MatrixXd& sigma) {
    AssetStats s;
    for (Eigen::Index i = 0; i < mu.size(); ++i) s.symbols.push_back("A" + std::to_string(i));
    s.annual_return = mu;
    s.covariance = sigma;
    s.annual_volatility = sigma.diagonal().cwiseSqrt();
    return s;
}

AssetStats random_stats(Eigen::Index n, std::uint64_t seed) {
    Gaussian g(seed);
    Eigen::MatrixXd a(n, n + 3);
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = 0.1 * g.normal();
    Eigen::VectorXd mu(n);
    for (Eigen::Index i = 0; i < n; ++i) mu(i) = 0.05 + 0.1 * g.uniform();
    return make_stats(mu, a * a.transpose() / 3.0 + 0.001 * Eigen::MatrixXd::Identity(n, n));
}

AssetPanel random_panel(std::size_t days, std::size_t assets, std::uint64_t seed) {
    Gaussian g(seed);
    AssetPanel p;
    Date d(2017, 1, 2);
    while (p.dates.size() < days) {
        if (!d.is_weekend()) p.dates.push_back(d);
        d = d.plus_days(1);
    }
    p.closes.resize(static_cast<Eigen::Index>(days), static_cast<Eigen::Index>(assets));
    for (std::size_t c = 0; c < assets; ++c) {
        p.symbols.push_back("S" + std::to_string(c));
        double price = 100.0;
        for (std::size_t r = 0; r < days; ++r) {
            price *= 1.0 + 0.0004 + 0.012 * g.normal();
            p.closes(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = price;
        }
    }
    return p;
}

double brute_variance(const Eigen::VectorXd& w, const Eigen::MatrixXd& s) {
    double v = 0.0;
    for (Eigen::Index i = 0; i < w.size(); ++i)
        for (Eigen::Index j = 0; j < w.size(); ++j) v += w(i) * w(j) * s(i, j);
    return v;
}

TEST(Stats, DailyVolatilityAnnualisesBySqrt250) {
    // Alternating +1% / -1% returns have sample sd just above 0.01.
    AssetPanel p;
    p.symbols = {"X"};
    Date d(2020, 1, 6);
    std::vector<double> closes{100.0};
    for (int i = 0; i < 4000; ++i) closes.push_back(closes.back() * (i % 2 == 0 ? 1.01 : 0.99));
    p.closes.resize(static_cast<Eigen::Index>(closes.size()), 1);
    for (std::size_t i = 0; i < closes.size(); ++i) {
        p.dates.push_back(d);
        d = d.plus_days(1);
        p.closes(static_cast<Eigen::Index>(i), 0) = closes[i];
    }
    const auto s = compute_stats(p);
    EXPECT_NEAR(s.annual_volatility(0), 0.01 * std::sqrt(250.0), 1e-4);
    EXPECT_NEAR(0.01 * std::sqrt(250.0), 0.1581, 1e-4);
}

TEST(Stats, IdenticalColumnsAreFullyCorrelated) {
    auto p = random_panel(300, 2, 1);
    p.closes.col(1) = p.closes.col(0);
    const auto s = compute_stats(p);
    const double corr = s.covariance(0, 1) / std::sqrt(s.covariance(0, 0) * s.covariance(1, 1));
    EXPECT_NEAR(corr, 1.0, 1e-12);
}

TEST(Stats, ConstantPricesGiveZeroRisk) {
    auto p = random_panel(50, 3, 2);
    p.closes.setConstant(42.0);
    const auto s = compute_stats(p);
    EXPECT_EQ(s.covariance.norm(), 0.0);
    EXPECT_EQ(s.annual_volatility.norm(), 0.0);
    EXPECT_EQ(s.annual_return.norm(), 0.0);
}

TEST(Stats, CovarianceInvariants) {
    const auto s = compute_stats(random_panel(600, 5, 3));
    EXPECT_EQ(s.covariance, s.covariance.transpose());
    for (Eigen::Index i = 0; i < 5; ++i) {
        EXPECT_NEAR(s.covariance(i, i), s.annual_volatility(i) * s.annual_volatility(i), 1e-9);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s.covariance);
    EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-8);
}

TEST(Stats, AnnualReturnIsMeanOfCalendarYearReturns) {
    AssetPanel p;
    p.symbols = {"X"};
    p.dates = {Date(2019, 3, 1), Date(2019, 12, 31), Date(2020, 6, 1), Date(2020, 12, 31),
               Date(2021, 12, 30)};
    p.closes.resize(5, 1);
    p.closes << 100, 110, 90, 121, 133.1;
    // 2019: 110/100, 2020: 121/110, 2021: 133.1/121.
    const auto s = compute_stats(p);
    EXPECT_NEAR(s.annual_return(0), (0.1 + 0.1 + 0.1) / 3.0, 1e-12);
}

TEST(Stats, RejectsShortPanels) {
    const auto p = random_panel(2, 2, 4);
    EXPECT_THROW((void)compute_stats(p), Error);
}

TEST(EqualWeight, Examples) {
    for (double w : equal_weight(25)) EXPECT_DOUBLE_EQ(w, 0.04);
    EXPECT_EQ(equal_weight(1)(0), 1.0);
    for (double w : equal_weight(4)) EXPECT_EQ(w, 0.25);
    EXPECT_THROW((void)equal_weight(0), Error);
}

TEST(PortfolioStats, IdentityDiversificationAndBruteForce) {
    const auto single = make_stats(Eigen::VectorXd::Constant(1, 0.1), Eigen::MatrixXd::Constant(1, 1, 0.04));
    const auto rr = portfolio_stats(Eigen::VectorXd::Ones(1), single);
    EXPECT_DOUBLE_EQ(rr.expected_return, 0.1);
    EXPECT_DOUBLE_EQ(rr.volatility, 0.2);

    const auto two = make_stats(Eigen::Vector2d(0.1, 0.1), Eigen::Vector2d(0.04, 0.04).asDiagonal());
    EXPECT_NEAR(portfolio_stats(Eigen::Vector2d(0.5, 0.5), two).volatility, 0.2 / std::sqrt(2.0), 1e-15);

    const auto s = random_stats(5, 5);
    Gaussian g(6);
    Eigen::VectorXd w(5);
    for (Eigen::Index i = 0; i < 5; ++i) w(i) = g.uniform();
    w /= w.sum();
    const auto got = portfolio_stats(w, s);
    EXPECT_NEAR(got.volatility * got.volatility, brute_variance(w, s.covariance), 1e-12);
    EXPECT_THROW((void)portfolio_stats(Eigen::VectorXd::Ones(3), s), Error);
}

TEST(Sharpe, Examples) {
    EXPECT_NEAR(sharpe_ratio(0.12, 0.01, 0.2), 0.55, 1e-15);
    EXPECT_EQ(sharpe_ratio(0.05, 0.05, 0.3), 0.0);
    EXPECT_NEAR(sharpe_ratio(0.21, 0.01, 0.2), 2.0 * sharpe_ratio(0.11, 0.01, 0.2), 1e-15);
    try {
        (void)sharpe_ratio(0.1, 0.0, 0.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::UndefinedMetric);
    }
}

TEST(MinVariance, TwoAssetClosedForm) {
    const auto s = make_stats(Eigen::Vector2d(0.1, 0.1), Eigen::Vector2d(1.0, 4.0).asDiagonal());
    OptimizerOptions unconstrained;
    unconstrained.long_only = false;
    const auto w = min_variance(s, unconstrained).weights;
    EXPECT_NEAR(w(0), 0.8, 1e-6);
    EXPECT_NEAR(w(1), 0.2, 1e-6);
    const auto lo = min_variance(s).weights;
    EXPECT_NEAR(lo(0), 0.8, 1e-6);
    const auto sym = min_variance(make_stats(Eigen::Vector2d(0.1, 0.2), Eigen::Matrix2d::Identity()));
    EXPECT_NEAR(sym.weights(0), 0.5, 1e-6);
}

TEST(MinVariance, FirstOrderConditionHolds) {
    OptimizerOptions o;
    o.long_only = false;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto s = random_stats(6, seed);
        const auto w = min_variance(s, o).weights;
        const Eigen::VectorXd g = s.covariance * w;
        const double lambda = g.mean();
        EXPECT_LT((g.array() - lambda).abs().maxCoeff(), 1e-8);
        EXPECT_NEAR(w.sum(), 1.0, 1e-12);
    }
}

TEST(MinVariance, LongOnlyBeatsEqualWeightAndSamples) {
    OptimizerOptions o;
    o.mc_samples = 2000;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto s = random_stats(5, seed + 10);
        const auto best = min_variance(s, o);
        EXPECT_GE(best.weights.minCoeff(), 0.0);
        EXPECT_NEAR(best.weights.sum(), 1.0, 1e-9);
        EXPECT_LE(best.volatility, portfolio_stats(equal_weight(5), s).volatility);
        for (const auto& sample : monte_carlo_frontier(s, o.mc_samples, o.risk_free_rate, o.seed)) {
            EXPECT_LE(best.volatility, sample.volatility + 1e-6);
        }
    }
}

TEST(MinVariance, SingularCovarianceIsNumericErrorUnconstrained) {
    const auto s = make_stats(Eigen::Vector2d(0.1, 0.1), Eigen::Matrix2d::Ones());
    OptimizerOptions o;
    o.long_only = false;
    try {
        (void)min_variance(s, o);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Numeric);
    }
}

// Fine grid over w1 in [0, 1] as an independent optimum for two assets.
double grid_best_sharpe(const AssetStats& s, double rf) {
    double best = -1e300;
    for (int k = 0; k <= 100000; ++k) {
        const double w1 = k / 100000.0;
        const Eigen::Vector2d w(w1, 1.0 - w1);
        const auto rr = portfolio_stats(w, s);
        best = std::max(best, (rr.expected_return - rf) / rr.volatility);
    }
    return best;
}

TEST(MaxSharpe, TwoAssetAgreesWithGridOracle) {
    const auto s = make_stats(Eigen::Vector2d(0.2, 0.05), Eigen::Vector2d(0.04, 0.04).asDiagonal());
    OptimizerOptions o;
    o.risk_free_rate = 0.0;
    const auto best = max_sharpe(s, o);
    EXPECT_GT(best.weights(0), best.weights(1));
    const double sharpe = best.expected_return / best.volatility;
    EXPECT_NEAR(sharpe, grid_best_sharpe(s, 0.0), 1e-8);
    EXPECT_GE(sharpe, portfolio_stats(equal_weight(2), s).expected_return /
                          portfolio_stats(equal_weight(2), s).volatility);
}

TEST(MaxSharpe, TangencyMatchesLongOnlyWhenInterior) {
    const auto s = make_stats(Eigen::Vector3d(0.12, 0.10, 0.08),
                              Eigen::Vector3d(0.04, 0.03, 0.02).asDiagonal());
    OptimizerOptions unconstrained;
    unconstrained.long_only = false;
    const auto closed = max_sharpe(s, unconstrained);
    EXPECT_GT(closed.weights.minCoeff(), 0.0);
    const auto lo = max_sharpe(s);
    EXPECT_LT((lo.weights - closed.weights).cwiseAbs().maxCoeff(), 1e-5);
}

TEST(MaxSharpe, SingleAndIdenticalAssets) {
    const auto one = make_stats(Eigen::VectorXd::Constant(1, 0.1), Eigen::MatrixXd::Constant(1, 1, 0.04));
    EXPECT_EQ(max_sharpe(one).weights(0), 1.0);
    Eigen::MatrixXd sigma = Eigen::MatrixXd::Constant(4, 4, 0.01);
    sigma.diagonal().setConstant(0.04);
    const auto same = make_stats(Eigen::VectorXd::Constant(4, 0.1), sigma);
    const auto w = max_sharpe(same).weights;
    for (Eigen::Index i = 0; i < 4; ++i) EXPECT_DOUBLE_EQ(w(i), 0.25);
}

TEST(MaxSharpe, AllReturnsBelowRiskFreeIsFlagged) {
    const auto s = make_stats(Eigen::Vector2d(0.0, -0.02), Eigen::Vector2d(0.04, 0.09).asDiagonal());
    EXPECT_TRUE(max_sharpe(s).degenerate);
    EXPECT_FALSE(max_sharpe(make_stats(Eigen::Vector2d(0.2, -0.02), Eigen::Vector2d(0.04, 0.09).asDiagonal())).degenerate);
}

TEST(MaxSharpe, BeatsEqualWeightAndMinVariance) {
    OptimizerOptions o;
    o.mc_samples = 2000;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto s = random_stats(5, seed + 20);
        auto sharpe = [&](const Eigen::VectorXd& w) {
            const auto rr = portfolio_stats(w, s);
            return sharpe_ratio(rr.expected_return, o.risk_free_rate, rr.volatility);
        };
        const double best = sharpe(max_sharpe(s, o).weights);
        EXPECT_GE(best, sharpe(equal_weight(5)));
        EXPECT_GE(best, sharpe(min_variance(s, o).weights));
    }
}

TEST(Frontier, SimplexDeterminismAndClosedFormBound) {
    const auto s = random_stats(5, 30);
    const auto a = monte_carlo_frontier(s, 3000, 0.01, 9);
    const auto b = monte_carlo_frontier(s, 3000, 0.01, 9, 4);
    OptimizerOptions o;
    o.long_only = false;
    const double floor_vol = min_variance(s, o).volatility;
    ASSERT_EQ(a.size(), 3000u);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_GE(a[i].weights.minCoeff(), 0.0);
        EXPECT_NEAR(a[i].weights.sum(), 1.0, 1e-12);
        EXPECT_EQ(a[i].weights, b[i].weights);
        EXPECT_EQ(a[i].sharpe, b[i].sharpe);
        EXPECT_GE(a[i].volatility, floor_vol);
    }
    EXPECT_THROW((void)monte_carlo_frontier(s, 0, 0.01, 9), Error);
}

TEST(Allocation, FloorExample) {
    const auto a = allocate_shares(100000.0, Eigen::VectorXd::Ones(1), std::vector<double>{300.0});
    EXPECT_EQ(a.shares[0], 333);
    EXPECT_EQ(a.spent, Money::from(99900.0));
    EXPECT_EQ(a.residual, Money::from(100.0));
}

TEST(Allocation, ZeroWeightGetsNoShares) {
    const auto a = allocate_shares(10000.0, Eigen::Vector3d(0.5, 0.0, 0.5), std::vector<double>{7.0, 1.0, 13.0});
    EXPECT_EQ(a.shares[1], 0);
    EXPECT_LT(a.residual.value(), 7.0);
}

TEST(Allocation, TinyBudgetIsFlaggedEmpty) {
    const auto a = allocate_shares(5.0, Eigen::Vector2d(0.5, 0.5), std::vector<double>{10.0, 20.0});
    EXPECT_TRUE(a.empty);
    EXPECT_EQ(a.spent.ticks, 0);
    EXPECT_EQ(a.residual, a.budget);
}

TEST(Allocation, ArithmeticInvariantsOnRandomInstances) {
    Gaussian g(40);
    for (int trial = 0; trial < 300; ++trial) {
        const auto n = 1 + static_cast<Eigen::Index>(g.uniform() * 8);
        Eigen::VectorXd w(n);
        std::vector<double> prices(static_cast<std::size_t>(n));
        for (Eigen::Index i = 0; i < n; ++i) {
            w(i) = g.uniform() < 0.2 ? 0.0 : g.uniform();
            prices[static_cast<std::size_t>(i)] = std::round(100.0 * (1.0 + 2000.0 * g.uniform())) / 100.0;
        }
        if (w.sum() == 0.0) w(0) = 1.0;
        w /= w.sum();
        const double budget = std::round(100.0 * (1000.0 + 200000.0 * g.uniform())) / 100.0;
        const auto a = allocate_shares(budget, w, prices);
        std::int64_t spent = 0;
        for (Eigen::Index i = 0; i < n; ++i) {
            spent += a.shares[static_cast<std::size_t>(i)] * a.prices[static_cast<std::size_t>(i)].ticks;
            if (w(i) == 0.0) EXPECT_EQ(a.shares[static_cast<std::size_t>(i)], 0);
        }
        EXPECT_EQ(spent, a.spent.ticks);
        EXPECT_LE(a.spent, a.budget);
        EXPECT_EQ(a.spent + a.residual, a.budget);
        for (Eigen::Index i = 0; i < n; ++i) {
            if (w(i) > 0.0) EXPECT_LT(a.residual.ticks, a.prices[static_cast<std::size_t>(i)].ticks);
        }
    }
}

TEST(Allocation, RejectsBadInput) {
    EXPECT_THROW((void)allocate_shares(0.0, Eigen::VectorXd::Ones(1), std::vector<double>{1.0}), Error);
    EXPECT_THROW((void)allocate_shares(10.0, Eigen::Vector2d(0.7, 0.7), std::vector<double>{1.0, 1.0}), Error);
    EXPECT_THROW((void)allocate_shares(10.0, Eigen::VectorXd::Ones(1), std::vector<double>{0.0}), Error);
    EXPECT_THROW((void)allocate_shares(10.0, Eigen::VectorXd::Ones(1), std::vector<double>{1.0, 2.0}), Error);
}

TEST(Backtest, FlatDoublingAndLinearity) {
    auto panel = random_panel(20, 2, 50);
    panel.closes.col(0).setConstant(10.0);
    panel.closes.col(1).setConstant(25.0);
    const std::vector<std::string> symbols{"S1", "S0"};
    const Eigen::Vector2d w(0.5, 0.5);
    const auto alloc = allocate_shares(1000.0, w, std::vector<double>{25.0, 10.0});
    const auto flat = backtest(alloc, symbols, panel);
    EXPECT_EQ(flat.total_return, 0.0);
    EXPECT_EQ(flat.value.size(), 20u);
    EXPECT_DOUBLE_EQ(flat.value.front(), alloc.spent.value() + alloc.residual.value());
    EXPECT_EQ(flat.max_drawdown_pct, 0.0);

    panel.closes.bottomRows(10) *= 2.0;
    const auto doubled = backtest(alloc, symbols, panel);
    EXPECT_NEAR(doubled.total_return, alloc.spent.value(), 1e-9);
    EXPECT_NEAR(doubled.total_return_pct, 100.0, 1e-9);

    auto twice = alloc;
    for (auto& s : twice.shares) s *= 2;
    const auto a = backtest(alloc, symbols, panel);
    const auto b = backtest(twice, symbols, panel);
    for (std::size_t i = 0; i < a.value.size(); ++i) {
        EXPECT_EQ(b.value[i] - b.residual, 2.0 * (a.value[i] - a.residual));
    }
}

TEST(Backtest, DrawdownAndMissingSymbol) {
    AssetPanel p;
    p.symbols = {"X"};
    p.dates = {Date(2021, 1, 4), Date(2021, 1, 5), Date(2021, 1, 6), Date(2021, 1, 7)};
    p.closes.resize(4, 1);
    p.closes << 100, 120, 90, 110;
    const auto alloc = allocate_shares(1000.0, Eigen::VectorXd::Ones(1), std::vector<double>{100.0});
    const std::vector<std::string> sym{"X"};
    const auto r = backtest(alloc, sym, p);
    EXPECT_NEAR(r.max_drawdown_pct, 25.0, 1e-12);
    const std::vector<std::string> missing{"Y"};
    try {
        (void)backtest(alloc, missing, p);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Data);
    }
}

TEST(Panel, SplitAndCsv) {
    const auto p = random_panel(30, 2, 60);
    const auto [head, tail] = split_panel(p, p.dates[10]);
    EXPECT_EQ(head.dates.size(), 10u);
    EXPECT_EQ(tail.dates.front(), p.dates[10]);
    EXPECT_EQ(tail.closes.rows(), 20);
    const auto alloc = allocate_shares(5000.0, equal_weight(2), std::vector<double>{tail.closes(0, 0), tail.closes(0, 1)});
    std::ostringstream out;
    write_weights_csv(out, p.symbols, equal_weight(2), alloc);
    EXPECT_EQ(out.str().rfind("symbol,weight,price,shares,spent\n", 0), 0u);
}

}  // namespace
}  // namespace stockcast::portfolio
