#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include <boost/math/distributions/beta.hpp>

#include "hypwalk/model.hpp"

namespace hypwalk {

/// Exact binomial (Clopper-Pearson) interval for k successes in n trials.
inline std::pair<double, double> clopper_pearson(std::size_t k, std::size_t n, double confidence = 0.95) {
    if (n == 0) throw precondition_error("clopper_pearson: no trials");
    if (!(confidence > 0.0 && confidence < 1.0)) throw precondition_error("confidence must be in (0, 1)");
    const double alpha = 1.0 - confidence;
    const double kd = static_cast<double>(k), nd = static_cast<double>(n);
    double lo = 0.0, hi = 1.0;
    if (k > 0) lo = boost::math::quantile(boost::math::beta_distribution<>(kd, nd - kd + 1.0), alpha / 2.0);
    if (k < n) hi = boost::math::quantile(boost::math::beta_distribution<>(kd + 1.0, nd - kd), 1.0 - alpha / 2.0);
    return {lo, hi};
}

/// Empirical event frequencies indexed by x (a threshold, n, or r), with
/// per-point Clopper-Pearson bounds.
struct TailEstimate {
    std::vector<double> thresholds;
    std::vector<double> probabilities;
    std::vector<double> ci_low;
    std::vector<double> ci_high;
    std::vector<std::size_t> counts;
    std::size_t sample_count = 0;

    std::size_t size() const { return thresholds.size(); }

    void push(double x, std::size_t hits, std::size_t trials, double confidence = 0.95) {
        auto [lo, hi] = clopper_pearson(hits, trials, confidence);
        thresholds.push_back(x);
        probabilities.push_back(static_cast<double>(hits) / static_cast<double>(trials));
        ci_low.push_back(lo);
        ci_high.push_back(hi);
        counts.push_back(hits);
        sample_count = std::max(sample_count, trials);
    }

    std::vector<std::pair<double, double>> series() const {
        std::vector<std::pair<double, double>> s;
        for (std::size_t i = 0; i < size(); ++i) s.emplace_back(thresholds[i], probabilities[i]);
        return s;
    }
};

/// P(value >= t) for each ascending threshold t.
inline TailEstimate empirical_tail(std::span<const double> values, std::span<const double> thresholds,
                                   double confidence = 0.95) {
    if (values.empty()) throw precondition_error("empirical_tail: values must be non-empty");
    if (!std::is_sorted(thresholds.begin(), thresholds.end()))
        throw precondition_error("empirical_tail: thresholds must be ascending");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    TailEstimate tail;
    for (double t : thresholds) {
        const auto first = std::lower_bound(sorted.begin(), sorted.end(), t);
        tail.push(t, static_cast<std::size_t>(sorted.end() - first), sorted.size(), confidence);
    }
    return tail;
}

/// p ~ K c^x from a least-squares line through (x, log p).
struct DecayFit {
    double slope = 0.0;
    double intercept = 0.0;
    double c = 1.0;
    double K = 1.0;
    double r_squared = 0.0;
    std::size_t points_used = 0;
    std::size_t points_excluded = 0;  // zero-probability bins
};

inline DecayFit fit_exponential_decay(std::span<const std::pair<double, double>> series) {
    std::vector<double> xs, ys;
    for (const auto& [x, p] : series) {
        if (p > 0.0) {
            xs.push_back(x);
            ys.push_back(std::log(p));
        }
    }
    if (xs.size() < 3) throw precondition_error("fit_exponential_decay: need at least 3 points with p > 0");
    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (sxx == 0.0) throw precondition_error("fit_exponential_decay: x values must not all coincide");
    DecayFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.c = std::exp(fit.slope);
    fit.K = std::exp(fit.intercept);
    double ss_res = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double e = ys[i] - (fit.intercept + fit.slope * xs[i]);
        ss_res += e * e;
    }
    fit.r_squared = syy == 0.0 ? 1.0 : std::clamp(1.0 - ss_res / syy, 0.0, 1.0);
    fit.points_used = xs.size();
    fit.points_excluded = series.size() - xs.size();
    return fit;
}

inline DecayFit fit_exponential_decay(const TailEstimate& tail) {
    const auto s = tail.series();
    return fit_exponential_decay(std::span<const std::pair<double, double>>(s));
}

/// Rate of escape d(1, w_n) / n with a normal-approximation interval.
struct DriftEstimate {
    double rate = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::size_t n = 0;
    std::size_t samples = 0;
};

inline DriftEstimate drift_from_distances(std::span<const double> distances, std::size_t n) {
    if (distances.size() < 2) throw precondition_error("drift: need at least 2 samples");
    const double count = static_cast<double>(distances.size());
    double mean = 0.0;
    for (double d : distances) mean += d / static_cast<double>(n);
    mean /= count;
    double var = 0.0;
    for (double d : distances) {
        const double e = d / static_cast<double>(n) - mean;
        var += e * e;
    }
    var /= (count - 1.0);
    const double half = 1.959963984540054 * std::sqrt(var / count);
    return {mean, mean - half, mean + half, n, distances.size()};
}

/// ((1 + t) / e^t)^n, the Chernoff bound for sums of i.i.d. exponentials.
inline double chernoff_bound(double t, std::size_t n) {
    if (t < 0.0) throw precondition_error("chernoff_bound: t must be non-negative");
    if (n == 0) throw precondition_error("chernoff_bound: n must be >= 1");
    return std::pow((1.0 + t) / std::exp(t), static_cast<double>(n));
}

}  // namespace hypwalk
