#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

namespace lpdp {

// log(sum_i exp(v[i])) with the usual max-shift; empty input yields -inf.
inline double log_sum_exp(std::span<const double> values) {
    if (values.empty()) {
        return -std::numeric_limits<double>::infinity();
    }
    const double m = *std::max_element(values.begin(), values.end());
    if (!std::isfinite(m)) {
        return m;
    }
    double sum = 0.0;
    for (double v : values) {
        sum += std::exp(v - m);
    }
    return m + std::log(sum);
}

// tau * log(sum_i exp(v[i] / tau)). The shift keeps the result >= max(v)
// exactly in floating point, which downstream monotonicity checks rely on.
inline double log_sum_exp_tempered(std::span<const double> values, double tau) {
    if (values.empty()) {
        return -std::numeric_limits<double>::infinity();
    }
    const double m = *std::max_element(values.begin(), values.end());
    if (!std::isfinite(m)) {
        return m;
    }
    double sum = 0.0;
    for (double v : values) {
        sum += std::exp((v - m) / tau);
    }
    return m + tau * std::log(sum);
}

}  // namespace lpdp
