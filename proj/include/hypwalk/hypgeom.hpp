#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "hypwalk/model.hpp"
#include "hypwalk/rng.hpp"

namespace hypwalk {

// Coarse geometry computed purely from the orbit metric of a GroupModel.

/// (x . y)_z = (d(z, x) + d(z, y) - d(x, y)) / 2.
template <GroupModel M, class E = typename M::element_type>
double gromov_product(const M& model, const E& z, const E& x, const E& y) {
    return 0.5 * (model.distance(z, x) + model.distance(z, y) - model.distance(x, y));
}

/// S_z(x, r) = { y : (x . y)_z >= r }. Closed: ties at r are members.
template <class E>
struct Shadow {
    E viewpoint;
    E center;
    double radius = 0.0;
};

template <GroupModel M, class E = typename M::element_type>
bool in_shadow(const M& model, const Shadow<E>& s, const E& y) {
    if (s.radius <= 0.0) return true;
    return gromov_product(model, s.viewpoint, s.center, y) >= s.radius;
}

// Shadow of a finite set: the union of the shadows of its points.
template <GroupModel M, class E = typename M::element_type>
bool in_set_shadow(const M& model, const E& viewpoint, std::span<const E> centers, double r,
                   const E& y) {
    return std::any_of(centers.begin(), centers.end(), [&](const E& t) {
        return in_shadow(model, Shadow<E>{viewpoint, t, r}, y);
    });
}

/// Two members of one shadow have product at least r - 2 delta.
template <GroupModel M, class E = typename M::element_type>
bool shadow_product_bound_check(const M& model, const Shadow<E>& s, const E& y, const E& z2) {
    if (!in_shadow(model, s, y) || !in_shadow(model, s, z2))
        throw precondition_error("shadow_product_bound_check: both points must lie in the shadow");
    return gromov_product(model, s.viewpoint, y, z2) >= s.radius - 2.0 * model.space().delta;
}

/// A point within D of some witness in S_1(T, r) lies in S_1(T, r - D).
template <GroupModel M, class E = typename M::element_type>
bool verify_metric_nest(const M& model, std::span<const E> centers, double r, double D,
                        const E& witness, const E& probe) {
    const E one = model.identity();
    if (D < 0.0) throw precondition_error("verify_metric_nest: D must be non-negative");
    if (!in_set_shadow(model, one, centers, r, witness) || model.distance(witness, probe) > D)
        throw precondition_error("verify_metric_nest: probe must be within D of a shadow member");
    return in_set_shadow(model, one, centers, r - D, probe);
}

template <GroupModel M, class E = typename M::element_type>
bool nested_separation_applies(const M& model, const E& z, const E& x, double r, double A,
                               const E& a_pt, const E& b_pt, double K2) {
    return model.distance(x, z) >= A + r + 2.0 * K2 && in_shadow(model, Shadow<E>{z, x, r}, a_pt) &&
           !in_shadow(model, Shadow<E>{z, x, r - A - K2}, b_pt);
}

/// a in S_z(x, r) and b outside S_z(x, r - A - K2) are at least A apart.
template <GroupModel M, class E = typename M::element_type>
bool verify_nested_shadow_separation(const M& model, const E& z, const E& x, double r, double A,
                                     const E& a_pt, const E& b_pt, double K2) {
    if (model.distance(x, z) < A + r + 2.0 * K2)
        throw precondition_error("verify_nested_shadow_separation: unsatisfiable, d(x, z) < A + r + 2 K2");
    if (!nested_separation_applies(model, z, x, r, A, a_pt, b_pt, K2))
        throw precondition_error("verify_nested_shadow_separation: points do not satisfy the hypotheses");
    return model.distance(a_pt, b_pt) >= A;
}

template <GroupModel M, class E = typename M::element_type>
bool basepoint_change_applies(const M& model, const E& x, const E& y, const E& z, double r,
                              const E& probe, double K3) {
    return gromov_product(model, z, x, y) <= r - K3 && in_shadow(model, Shadow<E>{z, x, r}, probe);
}

/// S_z(x, r) is inside S_y(x, d(x, y) - d(x, z) + r - K4) when (x . y)_z <= r - K3.
template <GroupModel M, class E = typename M::element_type>
bool verify_basepoint_change(const M& model, const E& x, const E& y, const E& z, double r,
                             const E& probe, double K3, double K4) {
    if (gromov_product(model, z, x, y) > r - K3)
        throw precondition_error("verify_basepoint_change: unsatisfiable, (x . y)_z > r - K3");
    if (!in_shadow(model, Shadow<E>{z, x, r}, probe))
        throw precondition_error("verify_basepoint_change: probe is not in S_z(x, r)");
    const double s = model.distance(x, y) - model.distance(x, z) + r - K4;
    return in_shadow(model, Shadow<E>{y, x, s}, probe);
}

template <GroupModel M, class E = typename M::element_type>
bool shadow_complement_applies(const M& model, const E& x, const E& z, double r, double K5) {
    return r >= K5 && model.distance(x, z) >= r + 2.0 * K5;
}

/// S_x(z, d - r + K5) is inside the complement of S_z(x, r), which is inside
/// S_x(z, d - r - K5), d = d(x, z). Checks whichever inclusion the probe exercises.
template <GroupModel M, class E = typename M::element_type>
bool verify_shadow_complement(const M& model, const E& x, const E& z, double r, const E& probe,
                              double K5) {
    if (!shadow_complement_applies(model, x, z, r, K5))
        throw precondition_error("verify_shadow_complement: unsatisfiable, need r >= K5 and d(x, z) >= r + 2 K5");
    const double d = model.distance(x, z);
    const bool inside = in_shadow(model, Shadow<E>{z, x, r}, probe);
    if (in_shadow(model, Shadow<E>{x, z, d - r + K5}, probe) && inside) return false;
    if (!inside && !in_shadow(model, Shadow<E>{x, z, d - r - K5}, probe)) return false;
    return true;
}

/// S_1(S_1(T, s), r) is inside S_1(T, min(r, s) - 2 delta); `witness` is the
/// member of S_1(T, s) whose r-shadow contains the probe.
template <GroupModel M, class E = typename M::element_type>
bool shadow_composition_check(const M& model, std::span<const E> centers, double s, double r,
                              const E& witness, const E& probe) {
    const E one = model.identity();
    if (!in_set_shadow(model, one, centers, s, witness) ||
        !in_shadow(model, Shadow<E>{one, witness, r}, probe))
        throw precondition_error("shadow_composition_check: probe must lie in an r-shadow of a member of S_1(T, s)");
    return in_set_shadow(model, one, centers, std::min(r, s) - 2.0 * model.space().delta, probe);
}

/// Multiplicative and additive quasi-isometry constants.
struct QuasiGeodesicParams {
    double K = 1.0;
    double c = 0.0;
};

/// The path is parameterised by cumulative distance between consecutive
/// points; every pair must satisfy |s-t|/K - c <= d <= K|s-t| + c.
template <GroupModel M, class E = typename M::element_type>
bool quasigeodesic_check(const M& model, std::span<const E> path, QuasiGeodesicParams params) {
    if (path.empty()) throw precondition_error("quasigeodesic_check: path must be non-empty");
    if (params.K < 1.0 || params.c < 0.0)
        throw precondition_error("quasigeodesic_check: need K >= 1 and c >= 0");
    std::vector<double> t(path.size(), 0.0);
    for (std::size_t i = 1; i < path.size(); ++i) t[i] = t[i - 1] + model.distance(path[i - 1], path[i]);
    for (std::size_t i = 0; i < path.size(); ++i) {
        for (std::size_t j = i + 1; j < path.size(); ++j) {
            const double gap = t[j] - t[i];
            const double d = model.distance(path[i], path[j]);
            if (d < gap / params.K - params.c || d > params.K * gap + params.c) return false;
        }
    }
    return true;
}

/// Random product of at most `radius` generators (length uniform in [0, radius]).
template <GroupModel M, class E = typename M::element_type>
E random_element(const M& model, std::span<const E> gens, std::size_t radius, StreamRng& rng) {
    E g = model.identity();
    const std::size_t len = rng.below(radius + 1);
    for (std::size_t i = 0; i < len; ++i) model.right_multiply(g, gens[rng.below(gens.size())]);
    return g;
}

/// Largest four-point defect min((x.z)_w, (y.z)_w) - (x.y)_w over
/// `sample_count` quadruples drawn from a pool of `sample_count` random
/// elements within `radius` generators of the identity.
template <GroupModel M>
double estimate_delta(const M& model, std::size_t sample_count, std::size_t radius, std::uint64_t seed) {
    using E = typename M::element_type;
    if (sample_count == 0 || radius == 0)
        throw precondition_error("estimate_delta: sample_count and radius must be positive");
    const auto gens = model.generators();
    std::vector<E> pool;
    pool.reserve(sample_count);
    for (std::size_t i = 0; i < sample_count; ++i) {
        StreamRng rng(seed, stream_id(0, i));
        pool.push_back(random_element(model, std::span<const E>(gens), radius, rng));
    }
    StreamRng pick(seed, stream_id(1, 0));
    double worst = 0.0;
    for (std::size_t i = 0; i < sample_count; ++i) {
        const E& x = pool[pick.below(pool.size())];
        const E& y = pool[pick.below(pool.size())];
        const E& z = pool[pick.below(pool.size())];
        const E& w = pool[pick.below(pool.size())];
        const double defect = std::min(gromov_product(model, w, x, z), gromov_product(model, w, y, z)) -
                              gromov_product(model, w, x, y);
        worst = std::max(worst, defect);
    }
    return worst;
}

/// Outcome of a calibration search over ascending candidate constants.
struct Calibration {
    std::optional<double> constant;  // smallest candidate with no counterexample
    std::size_t applicable = 0;      // instances meeting the hypotheses at that constant
    std::size_t counterexamples_below = 0;  // failures seen at the rejected candidates
};

// `trial(K, rng)` returns nullopt when the random instance does not satisfy
// the hypotheses at K, else whether the predicate held. Each candidate sees
// the same instance stream.
template <class Trial>
Calibration calibrate_constant(std::span<const double> candidates, std::size_t trials,
                               std::uint64_t seed, Trial&& trial) {
    Calibration result;
    for (double K : candidates) {
        std::size_t applicable = 0, failures = 0;
        for (std::size_t i = 0; i < trials; ++i) {
            StreamRng rng(seed, stream_id(0, i));
            std::optional<bool> outcome = trial(K, rng);
            if (!outcome) continue;
            ++applicable;
            if (!*outcome) ++failures;
        }
        if (failures == 0 && applicable > 0) {
            result.constant = K;
            result.applicable = applicable;
            return result;
        }
        result.counterexamples_below += failures;
    }
    return result;
}

/// Ascending grid 0, step, 2 step, ..., max.
inline std::vector<double> constant_grid(double max, double step = 0.5) {
    std::vector<double> grid;
    for (int i = 0; i * step <= max + 1e-12; ++i) grid.push_back(i * step);
    return grid;
}

}  // namespace hypwalk
