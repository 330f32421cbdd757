#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

namespace stockcast::ts::detail {

struct SimplexResult {
    std::vector<double> x;
    double value = 0.0;
    int iterations = 0;
};

/// Nelder-Mead downhill simplex with the standard coefficients (reflection 1,
/// expansion 2, contraction 1/2, shrink 1/2). Deterministic: ties in vertex
/// ordering keep insertion order.
template <class F>
SimplexResult nelder_mead(F&& f, std::vector<double> x0, double step, double tol,
                          int max_iter) {
    const std::size_t n = x0.size();
    std::vector<std::vector<double>> pts(n + 1, x0);
    for (std::size_t i = 0; i < n; ++i) {
        const double h = x0[i] != 0.0 ? step * std::max(std::abs(x0[i]), 0.1) : step;
        pts[i + 1][i] += h;
    }
    std::vector<double> vals(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        vals[i] = f(pts[i]);
    }
    std::vector<std::size_t> order(n + 1);
    std::vector<double> centroid(n);
    std::vector<double> trial(n);
    std::vector<double> trial2(n);

    auto blend = [&](const std::vector<double>& from, double t, std::vector<double>& out) {
        // out = centroid + t * (from - centroid)
        for (std::size_t j = 0; j < n; ++j) {
            out[j] = centroid[j] + t * (from[j] - centroid[j]);
        }
    };

    int iter = 0;
    for (; iter < max_iter; ++iter) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
        const std::size_t best = order.front();
        const std::size_t worst = order.back();
        const std::size_t second = order[n - 1];

        double spread = 0.0;
        for (std::size_t i = 0; i <= n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                spread = std::max(spread, std::abs(pts[i][j] - pts[best][j]));
            }
        }
        if (std::isfinite(vals[worst]) &&
            std::abs(vals[worst] - vals[best]) <= tol * (std::abs(vals[best]) + tol) &&
            spread <= std::sqrt(tol)) {
            break;
        }

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == worst) continue;
            for (std::size_t j = 0; j < n; ++j) {
                centroid[j] += pts[i][j] / static_cast<double>(n);
            }
        }

        blend(pts[worst], -1.0, trial);
        const double fr = f(trial);
        if (fr < vals[best]) {
            blend(pts[worst], -2.0, trial2);
            const double fe = f(trial2);
            if (fe < fr) {
                pts[worst] = trial2;
                vals[worst] = fe;
            } else {
                pts[worst] = trial;
                vals[worst] = fr;
            }
            continue;
        }
        if (fr < vals[second]) {
            pts[worst] = trial;
            vals[worst] = fr;
            continue;
        }
        // Contraction: outside if the reflection helped at all, else inside.
        const bool outside = fr < vals[worst];
        blend(outside ? trial : pts[worst], 0.5, trial2);
        const double fc = f(trial2);
        if (fc < (outside ? fr : vals[worst])) {
            pts[worst] = trial2;
            vals[worst] = fc;
            continue;
        }
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == best) continue;
            for (std::size_t j = 0; j < n; ++j) {
                pts[i][j] = pts[best][j] + 0.5 * (pts[i][j] - pts[best][j]);
            }
            vals[i] = f(pts[i]);
        }
    }
    const auto it = std::min_element(vals.begin(), vals.end());
    const auto idx = static_cast<std::size_t>(it - vals.begin());
    return {pts[idx], vals[idx], iter};
}

}  // namespace stockcast::ts::detail
