#include "stockcast/ts/decompose.hpp"

#include "stockcast/error.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace stockcast::ts {

DecompositionResult decompose(std::span<const double> series, int period) {
    if (period < 2) {
        throw Error(ErrorKind::Parameter, "decompose: period must be >= 2, got " + std::to_string(period));
    }
    const auto m = static_cast<std::size_t>(period);
    const std::size_t n = series.size();
    if (n < 2 * m) {
        throw Error(ErrorKind::InsufficientData, "decompose: need at least two full periods (" +
                                                     std::to_string(2 * m) + " values), got " +
                                                     std::to_string(n));
    }
    for (double v : series) {
        if (!std::isfinite(v)) {
            throw Error(ErrorKind::Parameter, "decompose: series contains non-finite values");
        }
    }

    const double nan = std::numeric_limits<double>::quiet_NaN();
    DecompositionResult out;
    out.period = period;
    out.trend.assign(n, nan);
    out.residual.assign(n, nan);
    const std::size_t half = m / 2;
    out.first_defined = half;
    out.last_defined = n - half;

    // Even periods use the 2 x m average: end points carry half weight.
    for (std::size_t t = half; t < n - half; ++t) {
        double sum = 0.0;
        if (m % 2 == 1) {
            for (std::size_t j = t - half; j <= t + half; ++j) sum += series[j];
        } else {
            sum = 0.5 * (series[t - half] + series[t + half]);
            for (std::size_t j = t - half + 1; j < t + half; ++j) sum += series[j];
        }
        out.trend[t] = sum / static_cast<double>(m);
    }

    std::vector<double> phase_sum(m, 0.0);
    std::vector<std::size_t> phase_count(m, 0);
    for (std::size_t t = out.first_defined; t < out.last_defined; ++t) {
        phase_sum[t % m] += series[t] - out.trend[t];
        ++phase_count[t % m];
    }
    out.pattern.resize(m);
    double centre = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        out.pattern[k] = phase_sum[k] / static_cast<double>(phase_count[k]);
        centre += out.pattern[k];
    }
    centre /= static_cast<double>(m);
    for (double& v : out.pattern) v -= centre;

    out.seasonal.resize(n);
    for (std::size_t t = 0; t < n; ++t) {
        out.seasonal[t] = out.pattern[t % m];
        if (out.defined(t)) {
            out.residual[t] = series[t] - out.trend[t] - out.seasonal[t];
        }
    }
    return out;
}

}  // namespace stockcast::ts
