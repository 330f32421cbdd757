#pragma once

#include "stockcast/data/series.hpp"

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace stockcast::fixtures {

// Box-Muller over mt19937_64 so generated fixtures do not depend on the
// standard library's distribution implementations.
class Gaussian {
public:
    explicit Gaussian(std::uint64_t seed) : rng_(seed) {}

    double uniform() { return (static_cast<double>(rng_() >> 11) + 0.5) * 0x1.0p-53; }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * M_PI * u2);
        has_spare_ = true;
        return r * std::cos(2.0 * M_PI * u2);
    }

    std::uint64_t bits() { return rng_(); }

private:
    std::mt19937_64 rng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

inline std::vector<double> white_noise(std::size_t n, std::uint64_t seed, double sd = 1.0) {
    Gaussian g(seed);
    std::vector<double> out(n);
    for (auto& v : out) {
        v = sd * g.normal();
    }
    return out;
}

inline std::vector<double> random_walk(std::size_t n, std::uint64_t seed, double start = 0.0) {
    auto steps = white_noise(n, seed);
    std::vector<double> out(n);
    double level = start;
    for (std::size_t i = 0; i < n; ++i) {
        level += steps[i];
        out[i] = level;
    }
    return out;
}

inline std::vector<double> ar1(std::size_t n, double phi, std::uint64_t seed,
                               std::size_t burn_in = 200) {
    auto eps = white_noise(n + burn_in, seed);
    std::vector<double> out;
    out.reserve(n);
    double x = 0.0;
    for (std::size_t i = 0; i < n + burn_in; ++i) {
        x = phi * x + eps[i];
        if (i >= burn_in) {
            out.push_back(x);
        }
    }
    return out;
}

/// Weekday-dated series with the given closes; open = close, high/low
/// bracket it by 1%.
inline data::PriceSeries series_from_closes(const std::vector<double>& closes,
                                            std::string symbol = "TEST",
                                            Date start = Date(2020, 1, 6)) {
    data::PriceSeries s{std::move(symbol), {}};
    Date d = start;
    for (double c : closes) {
        while (d.is_weekend()) {
            d = d.plus_days(1);
        }
        s.bars.push_back({d, c, c * 1.01, c * 0.99, c, 1000});
        d = d.plus_days(1);
    }
    return s;
}

inline data::PriceSeries random_price_series(std::size_t n, std::uint64_t seed,
                                             std::string symbol = "TEST") {
    Gaussian g(seed);
    std::vector<double> closes;
    double price = 100.0;
    for (std::size_t i = 0; i < n; ++i) {
        price *= std::exp(0.01 * g.normal());
        closes.push_back(price);
    }
    auto s = series_from_closes(closes, std::move(symbol));
    for (auto& b : s.bars) {
        b.volume = static_cast<std::int64_t>(g.bits() % 100000);
    }
    return s;
}

}  // namespace stockcast::fixtures
