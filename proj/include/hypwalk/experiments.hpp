#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "hypwalk/farey.hpp"
#include "hypwalk/hypgeom.hpp"
#include "hypwalk/parallel.hpp"
#include "hypwalk/stats.hpp"
#include "hypwalk/walk.hpp"

namespace hypwalk {

// Monte Carlo estimators. Sample i of grid point j always uses stream
// stream_id(j, i) under the master seed, so results are independent of the
// worker count.

struct RunOptions {
    std::uint64_t seed = 1;
    std::size_t samples = 1000;
    std::size_t threads = 1;
    double confidence = 0.95;
};

/// An estimated probability series and its exponential fit, when one exists.
struct DecayExperiment {
    TailEstimate series;
    std::optional<DecayFit> fit;
    std::string fit_error;

    void refit() {
        try {
            fit = fit_exponential_decay(series);
            fit_error.clear();
        } catch (const precondition_error& e) {
            fit.reset();
            fit_error = e.what();
        }
    }
};

namespace detail {

template <class Fn>
std::size_t count_hits(std::size_t samples, std::size_t threads, Fn&& event) {
    const auto hits = parallel_map(samples, threads, [&](std::size_t i) -> std::uint8_t { return event(i) ? 1 : 0; });
    std::size_t total = 0;
    for (auto h : hits) total += h;
    return total;
}

}  // namespace detail

/// Mean of d(1, w_n) / n.
template <GroupModel M, class E = typename M::element_type>
DriftEstimate drift(const M& model, const StepDistribution<E>& dist, std::size_t n, const RunOptions& opt) {
    if (n == 0) throw precondition_error("drift: n must be >= 1");
    if (opt.samples < 2) throw precondition_error("drift: need at least 2 samples");
    const auto d = parallel_map(opt.samples, opt.threads, [&](std::size_t i) {
        StreamRng rng(opt.seed, stream_id(0, i));
        return model.norm(walk_endpoint(model, dist, n, rng));
    });
    return drift_from_distances(d, n);
}

/// P(d(1, w_n) <= L n) for each n.
template <GroupModel M, class E = typename M::element_type>
DecayExperiment linear_progress_decay(const M& model, const StepDistribution<E>& dist, double L,
                                      std::span<const std::size_t> n_grid, const RunOptions& opt) {
    DecayExperiment out;
    for (std::size_t j = 0; j < n_grid.size(); ++j) {
        const std::size_t n = n_grid[j];
        const std::size_t hits = detail::count_hits(opt.samples, opt.threads, [&](std::size_t i) {
            StreamRng rng(opt.seed, stream_id(j, i));
            return model.norm(walk_endpoint(model, dist, n, rng)) <= L * static_cast<double>(n);
        });
        out.series.push(static_cast<double>(n), hits, opt.samples, opt.confidence);
    }
    out.refit();
    return out;
}

/// Whether tau(g) <= B; `stabilized` is false when the estimate was a
/// finite-horizon average (such samples count as tau <= B).
struct TranslationEvent {
    bool at_most = false;
    bool stabilized = true;
};

template <GroupModel M, class E = typename M::element_type>
TranslationEvent translation_at_most(const M& model, const E& g, double B, std::size_t horizon) {
    if constexpr (std::is_same_v<M, FareyModel>) {
        if (B == 0.0) return {farey_classify(g) != FareyClass::pseudo_anosov, true};
    }
    const TranslationLength t = model.translation_length(g, horizon);
    if (!t.stabilized) return {true, false};
    return {t.value <= B, true};
}

struct TranslationDecay {
    DecayExperiment decay;
    std::vector<std::size_t> non_stabilized;  // per n
};

/// P(tau(w_n) <= B) for each n.
template <GroupModel M, class E = typename M::element_type>
TranslationDecay translation_decay(const M& model, const StepDistribution<E>& dist, double B,
                                   std::span<const std::size_t> n_grid, const RunOptions& opt,
                                   std::size_t horizon = 64) {
    if (B < 0.0) throw precondition_error("translation_decay: B must be non-negative");
    TranslationDecay out;
    for (std::size_t j = 0; j < n_grid.size(); ++j) {
        const std::size_t n = n_grid[j];
        const auto events = parallel_map(opt.samples, opt.threads, [&](std::size_t i) {
            StreamRng rng(opt.seed, stream_id(j, i));
            return translation_at_most(model, walk_endpoint(model, dist, n, rng), B, horizon);
        });
        std::size_t hits = 0, unstable = 0;
        for (const auto& e : events) {
            hits += e.at_most ? 1 : 0;
            unstable += e.stabilized ? 0 : 1;
        }
        out.decay.series.push(static_cast<double>(n), hits, opt.samples, opt.confidence);
        out.non_stabilized.push_back(unstable);
    }
    out.decay.refit();
    return out;
}

struct ShadowDecay {
    DecayExperiment decay;
    std::vector<bool> empty_shadow;  // per r: r > d(1, x) + 2 delta
};

/// P(w_n in S_1(x, r)) for each r.
template <GroupModel M, class E = typename M::element_type>
ShadowDecay shadow_measure_decay(const M& model, const StepDistribution<E>& dist, std::size_t n, const E& center,
                                 std::span<const double> r_grid, const RunOptions& opt) {
    const E one = model.identity();
    const auto products = parallel_map(opt.samples, opt.threads, [&](std::size_t i) {
        StreamRng rng(opt.seed, stream_id(0, i));
        return gromov_product(model, one, center, walk_endpoint(model, dist, n, rng));
    });
    ShadowDecay out;
    out.decay.series = empirical_tail(products, r_grid, opt.confidence);
    const double reach = model.norm(center) + 2.0 * model.space().delta;
    for (double r : r_grid) out.empty_shadow.push_back(r > reach);
    out.decay.refit();
    return out;
}

struct ShadowSweep {
    std::vector<std::size_t> n_grid;
    std::vector<ShadowDecay> per_n;
    double convergence = 0.0;  // max |P_N - P_N'| over r, last two N
};

// The law of w_N at the largest N in the sweep stands in for harmonic measure.
template <GroupModel M, class E = typename M::element_type>
ShadowSweep shadow_measure_sweep(const M& model, const StepDistribution<E>& dist, std::span<const std::size_t> n_grid,
                                 const E& center, std::span<const double> r_grid, const RunOptions& opt) {
    ShadowSweep out;
    out.n_grid.assign(n_grid.begin(), n_grid.end());
    for (std::size_t j = 0; j < n_grid.size(); ++j) {
        RunOptions o = opt;
        o.seed = opt.seed + j;
        out.per_n.push_back(shadow_measure_decay(model, dist, n_grid[j], center, r_grid, o));
    }
    if (out.per_n.size() >= 2) {
        const auto& a = out.per_n[out.per_n.size() - 2].decay.series.probabilities;
        const auto& b = out.per_n.back().decay.series.probabilities;
        for (std::size_t i = 0; i < a.size(); ++i) out.convergence = std::max(out.convergence, std::abs(a[i] - b[i]));
    }
    return out;
}

namespace detail {

// Y^k_i and Z^k_i for i = 1..n along one walk of k n steps. Y is the norm of
// the block product s_{(i-1)k+1} ... s_{ik}, which equals d(w^k_{i-1}, w^k_i).
struct IteratedIncrements {
    std::vector<double> y;
    std::vector<double> z;
};

template <GroupModel M, class E>
IteratedIncrements iterated_increments(const M& model, const StepDistribution<E>& dist, std::size_t k,
                                       std::size_t n, StreamRng& rng) {
    IteratedIncrements out;
    out.y.reserve(n);
    out.z.reserve(n);
    E block = model.identity();
    double prev_norm = 0.0;
    run_walk(model, dist, k * n, rng, [&](std::size_t i, const E& s, const E& at) {
        model.right_multiply(block, s);
        if (i % k != 0) return;
        const double y = model.norm(block);
        const double norm = model.norm(at);
        out.y.push_back(y);
        out.z.push_back(y - (norm - prev_norm));
        prev_norm = norm;
        block = model.identity();
    });
    return out;
}

}  // namespace detail

struct BacktrackTail {
    DecayExperiment decay;
    double mean_z = 0.0;
    double mean_y = 0.0;
    std::size_t increments = 0;
};

/// Pooled tail P(Z^k_i >= r) over all increments of `samples` walks of k n steps.
template <GroupModel M, class E = typename M::element_type>
BacktrackTail backtrack_tail(const M& model, const StepDistribution<E>& dist, std::size_t k, std::size_t n,
                             std::span<const double> r_grid, const RunOptions& opt) {
    if (k == 0) throw precondition_error("backtrack_tail: k must be >= 1");
    const auto per_sample = parallel_map(opt.samples, opt.threads, [&](std::size_t i) {
        StreamRng rng(opt.seed, stream_id(0, i));
        return detail::iterated_increments(model, dist, k, n, rng);
    });
    std::vector<double> pooled;
    pooled.reserve(opt.samples * n);
    BacktrackTail out;
    for (const auto& inc : per_sample) {
        pooled.insert(pooled.end(), inc.z.begin(), inc.z.end());
        for (double y : inc.y) out.mean_y += y;
    }
    out.increments = pooled.size();
    for (double z : pooled) out.mean_z += z;
    out.mean_z /= static_cast<double>(std::max<std::size_t>(pooled.size(), 1));
    out.mean_y /= static_cast<double>(std::max<std::size_t>(pooled.size(), 1));
    out.decay.series = empirical_tail(pooled, r_grid, opt.confidence);
    // Fit only the strictly positive thresholds: r <= 0 is the whole space.
    TailEstimate positive;
    for (std::size_t j = 0; j < r_grid.size(); ++j)
        if (r_grid[j] > 0.0) positive.push(r_grid[j], out.decay.series.counts[j], pooled.size(), opt.confidence);
    try {
        out.decay.fit = fit_exponential_decay(positive);
    } catch (const precondition_error& e) {
        out.decay.fit_error = e.what();
    }
    return out;
}

struct KSweepRow {
    std::size_t k = 0;
    double mean_y = 0.0;
    double mean_z = 0.0;
    std::optional<DecayFit> fit;
};

struct KSweep {
    std::vector<KSweepRow> rows;
    std::optional<std::size_t> smallest_k;  // first k with E[Y^k] > E[Z^k]
};

/// Runs backtrack_tail for each k and records the mean block length E[Y^k]
/// against the mean backtrack E[Z^k].
template <GroupModel M, class E = typename M::element_type>
KSweep k_sweep(const M& model, const StepDistribution<E>& dist, std::span<const std::size_t> k_grid, std::size_t n,
               std::span<const double> r_grid, const RunOptions& opt) {
    KSweep out;
    for (std::size_t k : k_grid) {
        const auto tail = backtrack_tail(model, dist, k, n, r_grid, opt);
        out.rows.push_back({k, tail.mean_y, tail.mean_z, tail.decay.fit});
        if (!out.smallest_k && tail.mean_y > tail.mean_z) out.smallest_k = k;
    }
    return out;
}

/// P(Z^k_1 + ... + Z^k_n >= L n) for each n.
template <GroupModel M, class E = typename M::element_type>
DecayExperiment z_sum_deviation(const M& model, const StepDistribution<E>& dist, std::size_t k, double L,
                                std::span<const std::size_t> n_grid, const RunOptions& opt) {
    if (k == 0) throw precondition_error("z_sum_deviation: k must be >= 1");
    DecayExperiment out;
    for (std::size_t j = 0; j < n_grid.size(); ++j) {
        const std::size_t n = n_grid[j];
        const std::size_t hits = detail::count_hits(opt.samples, opt.threads, [&](std::size_t i) {
            StreamRng rng(opt.seed, stream_id(j, i));
            double sum = 0.0;
            for (double z : detail::iterated_increments(model, dist, k, n, rng).z) sum += z;
            return sum >= L * static_cast<double>(n);
        });
        out.series.push(static_cast<double>(n), hits, opt.samples, opt.confidence);
    }
    out.refit();
    return out;
}

/// Mean of Y^k = d(1, w_k) from `samples` independent k-step walks.
template <GroupModel M, class E = typename M::element_type>
double iterated_step_mean(const M& model, const StepDistribution<E>& dist, std::size_t k, std::size_t samples,
                          std::uint64_t seed, std::size_t threads) {
    const auto y = parallel_map(samples, threads, [&](std::size_t i) {
        StreamRng rng(seed, stream_id(0, i));
        return model.norm(walk_endpoint(model, dist, k, rng));
    });
    double mean = 0.0;
    for (double v : y) mean += v;
    return mean / static_cast<double>(samples);
}

struct BernsteinCheck {
    DecayExperiment decay;
    double mean_y = 0.0;
};

/// P(|Y^k_1 + ... + Y^k_n - n E[Y^k]| >= epsilon n) for each n. E[Y^k] is
/// taken from `mean_y` when given, else from a pilot run on a separate seed.
template <GroupModel M, class E = typename M::element_type>
BernsteinCheck bernstein_check(const M& model, const StepDistribution<E>& dist, std::size_t k, double epsilon,
                               std::span<const std::size_t> n_grid, const RunOptions& opt,
                               std::optional<double> mean_y = std::nullopt, std::size_t pilot_samples = 200000) {
    if (!(epsilon > 0.0)) throw precondition_error("bernstein_check: epsilon must be positive");
    if (k == 0) throw precondition_error("bernstein_check: k must be >= 1");
    BernsteinCheck out;
    out.mean_y = mean_y ? *mean_y : iterated_step_mean(model, dist, k, pilot_samples, opt.seed ^ 0x5bd1e995ULL, opt.threads);
    for (std::size_t j = 0; j < n_grid.size(); ++j) {
        const std::size_t n = n_grid[j];
        const std::size_t hits = detail::count_hits(opt.samples, opt.threads, [&](std::size_t i) {
            StreamRng rng(opt.seed, stream_id(j, i));
            double sum = 0.0;
            for (double y : detail::iterated_increments(model, dist, k, n, rng).y) sum += y;
            return std::abs(sum - static_cast<double>(n) * out.mean_y) >= epsilon * static_cast<double>(n);
        });
        out.decay.series.push(static_cast<double>(n), hits, opt.samples, opt.confidence);
    }
    out.decay.refit();
    return out;
}

struct ChernoffCell {
    double t = 0.0;
    std::size_t n = 0;
    double empirical = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    double bound = 1.0;
};

/// Empirical P(A_1 + ... + A_n >= (1 + t) n mean) for i.i.d. exponentials
/// of the given mean, next to the closed-form bound.
inline ChernoffCell chernoff_empirical(double rate_mean, double t, std::size_t n, const RunOptions& opt) {
    if (!(rate_mean > 0.0)) throw precondition_error("chernoff_empirical: rate_mean must be positive");
    ChernoffCell cell;
    cell.t = t;
    cell.n = n;
    cell.bound = chernoff_bound(t, n);
    const double level = (1.0 + t) * static_cast<double>(n) * rate_mean;
    const std::size_t hits = detail::count_hits(opt.samples, opt.threads, [&](std::size_t i) {
        StreamRng rng(opt.seed, stream_id(0, i));
        double sum = 0.0;
        for (std::size_t j = 0; j < n; ++j) sum += rng.exponential(rate_mean);
        return sum >= level;
    });
    cell.empirical = static_cast<double>(hits) / static_cast<double>(opt.samples);
    std::tie(cell.ci_low, cell.ci_high) = clopper_pearson(hits, opt.samples, opt.confidence);
    return cell;
}

/// P(w_2n not in S_1(w_n, d(1, w_n) / 2)) for each entry 2n of the grid.
template <GroupModel M, class E = typename M::element_type>
DecayExperiment midpoint_failure(const M& model, const StepDistribution<E>& dist,
                                 std::span<const std::size_t> two_n_grid, const RunOptions& opt) {
    DecayExperiment out;
    const E one = model.identity();
    for (std::size_t j = 0; j < two_n_grid.size(); ++j) {
        const std::size_t two_n = two_n_grid[j];
        if (two_n % 2 != 0) throw precondition_error("midpoint: walk lengths must be even");
        const std::size_t half = two_n / 2;
        const std::size_t hits = detail::count_hits(opt.samples, opt.threads, [&](std::size_t i) {
            StreamRng rng(opt.seed, stream_id(j, i));
            E mid = model.identity();
            E end = run_walk(model, dist, two_n, rng, [&](std::size_t step, const E&, const E& at) {
                if (step == half) mid = at;
            });
            return gromov_product(model, one, mid, end) < 0.5 * model.norm(mid);
        });
        out.series.push(static_cast<double>(two_n), hits, opt.samples, opt.confidence);
    }
    out.refit();
    return out;
}

/// P((v_n . w_n)_1 >= r - 2 delta) for v_n ~ mu^n, w_n ~ reflected mu^n, per r.
template <GroupModel M, class E = typename M::element_type>
DecayExperiment diagonal_decay(const M& model, const StepDistribution<E>& dist, std::size_t n,
                               std::span<const double> r_grid, const RunOptions& opt) {
    const E one = model.identity();
    const auto mirror = reflected(model, dist);
    const double two_delta = 2.0 * model.space().delta;
    const auto shifted = parallel_map(opt.samples, opt.threads, [&](std::size_t i) {
        StreamRng rv(opt.seed, stream_id(0, i));
        StreamRng rw(opt.seed, stream_id(1, i));
        const E v = walk_endpoint(model, dist, n, rv);
        const E w = walk_endpoint(model, mirror, n, rw);
        return gromov_product(model, one, v, w) + two_delta;
    });
    DecayExperiment out;
    out.series = empirical_tail(shifted, r_grid, opt.confidence);
    TailEstimate positive;
    // Below 2 delta every pair qualifies; only the decaying part is fitted.
    for (std::size_t j = 0; j < r_grid.size(); ++j)
        if (r_grid[j] > two_delta) positive.push(r_grid[j], out.series.counts[j], opt.samples, opt.confidence);
    try {
        out.fit = fit_exponential_decay(positive);
    } catch (const precondition_error& e) {
        out.fit_error = e.what();
    }
    return out;
}

}  // namespace hypwalk
