#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hypwalk/conjugacy.hpp"
#include "hypwalk/farey.hpp"
#include "hypwalk/free_group.hpp"
#include "hypwalk/hypgeom.hpp"
#include "hypwalk/rng.hpp"

namespace hypwalk {

// Randomised property suites for the coarse-geometry predicates. Each suite
// draws instances from a fixed seed; constants that are only known to
// exist are first calibrated on one seed and then checked on another.

struct SuiteResult {
    SuiteResult(std::string name_ = {}, std::size_t instances_ = 0, std::size_t applicable_ = 0,
                std::size_t failures_ = 0, std::optional<double> constant_ = {}, std::string note_ = {})
        : name(std::move(name_)), instances(instances_), applicable(applicable_), failures(failures_),
          constant(constant_), note(std::move(note_)) {}

    std::string name;
    std::size_t instances = 0;
    std::size_t applicable = 0;
    std::size_t failures = 0;
    std::optional<double> constant;
    std::string note;

    bool passed() const { return failures == 0 && applicable > 0; }
};

/// Smallest constants with no counterexample on the calibration seed.
struct ShadowConstants {
    double K2 = 0.0;  // nested shadows are metrically nested
    double K3 = 0.0;  // change of basepoint: hypothesis slack
    double K4 = 0.0;  // change of basepoint: radius loss
    double K5 = 0.0;  // complement of a shadow
};

namespace detail {

template <GroupModel M, class E = typename M::element_type>
std::vector<E> random_path(const M& model, std::span<const E> gens, std::size_t len, StreamRng& rng) {
    std::vector<E> path{model.identity()};
    path.reserve(len + 1);
    for (std::size_t i = 0; i < len; ++i) path.push_back(model.multiply(path.back(), gens[rng.below(gens.size())]));
    return path;
}

// A point that follows `path` for a random while, then wanders off; the
// branch index is drawn from [lo, hi].
template <GroupModel M, class E = typename M::element_type>
E branch_off(const M& model, std::span<const E> gens, const std::vector<E>& path, std::size_t lo, std::size_t hi,
             std::size_t radius, StreamRng& rng) {
    hi = std::min(hi, path.size() - 1);
    lo = std::min(lo, hi);
    const std::size_t j = lo + rng.below(hi - lo + 1);
    const std::size_t room = radius > j ? radius - j : 0;
    return model.multiply(path[j], random_element(model, gens, room, rng));
}

}  // namespace detail

/// Exact metric identities: Gromov product symmetry and bounds, triangle
/// inequality, isometry invariance, and the four-point condition at the
/// model's delta.
template <GroupModel M>
std::vector<SuiteResult> metric_suite(const M& model, std::size_t instances, std::size_t radius, std::uint64_t seed) {
    using E = typename M::element_type;
    const auto gens = model.generators();
    const std::span<const E> g(gens);
    const double delta = model.space().delta;
    SuiteResult sym{"gromov_product_symmetry_and_bounds"}, tri{"triangle_inequality"}, iso{"isometry_invariance"},
        hyp{"hyperbolicity_inequality"}, mono{"shadow_monotonicity"};
    for (std::size_t i = 0; i < instances; ++i) {
        StreamRng rng(seed, stream_id(0, i));
        const auto path = detail::random_path(model, g, radius, rng);
        const E x = detail::branch_off(model, g, path, 0, radius, radius, rng);
        const E y = detail::branch_off(model, g, path, 0, radius, radius, rng);
        const E z = detail::branch_off(model, g, path, 0, radius, radius, rng);
        const E w = random_element(model, g, radius / 2, rng);
        const E h = random_element(model, g, radius, rng);

        const double pxy = gromov_product(model, z, x, y), pyx = gromov_product(model, z, y, x);
        ++sym.instances;
        ++sym.applicable;
        if (pxy != pyx || pxy < 0.0 || pxy > std::min(model.distance(z, x), model.distance(z, y))) ++sym.failures;

        ++tri.instances;
        ++tri.applicable;
        if (model.distance(x, y) > model.distance(x, z) + model.distance(z, y)) ++tri.failures;

        ++iso.instances;
        ++iso.applicable;
        if (model.distance(model.multiply(h, x), model.multiply(h, y)) != model.distance(x, y)) ++iso.failures;

        ++hyp.instances;
        ++hyp.applicable;
        if (gromov_product(model, w, x, y) <
            std::min(gromov_product(model, w, x, z), gromov_product(model, w, y, z)) - 2.0 * delta)
            ++hyp.failures;

        // r' <= r: members of S(w, x, r) are members of S(w, x, r').
        const double r = static_cast<double>(rng.below(radius + 1));
        const double r2 = r - static_cast<double>(rng.below(radius + 1));
        ++mono.instances;
        ++mono.applicable;
        if (in_shadow(model, Shadow<E>{w, x, r}, y) && !in_shadow(model, Shadow<E>{w, x, r2}, y)) ++mono.failures;
    }
    return {sym, tri, iso, hyp, mono};
}

/// Predicates whose only constant is delta: product bound, metric nest,
/// nested neighbourhoods.
template <GroupModel M>
std::vector<SuiteResult> delta_shadow_suite(const M& model, std::size_t instances, std::size_t radius,
                                            std::uint64_t seed) {
    using E = typename M::element_type;
    const auto gens = model.generators();
    const std::span<const E> g(gens);
    SuiteResult bound{"shadow_product_bound"}, nest{"metric_nest"}, comp{"nested_neighbourhoods"};
    const E one = model.identity();
    for (std::size_t i = 0; i < instances; ++i) {
        StreamRng rng(seed, stream_id(1, i));
        const std::size_t len = 1 + rng.below(radius);
        const auto path = detail::random_path(model, g, len, rng);
        const E viewpoint = random_element(model, g, radius / 2, rng);

        // Product bound, viewed from a random basepoint.
        {
            const double r = static_cast<double>(rng.below(len + 1));
            const std::size_t lo = static_cast<std::size_t>(r);
            const E y = model.multiply(viewpoint, detail::branch_off(model, g, path, lo, len, radius, rng));
            const E z2 = model.multiply(viewpoint, detail::branch_off(model, g, path, lo, len, radius, rng));
            const Shadow<E> s{viewpoint, model.multiply(viewpoint, path.back()), r};
            ++bound.instances;
            if (in_shadow(model, s, y) && in_shadow(model, s, z2)) {
                ++bound.applicable;
                if (!shadow_product_bound_check(model, s, y, z2)) ++bound.failures;
            }
        }
        // Metric nest: a probe within D of a witness in S_1(T, r).
        {
            const std::vector<E> T{path.back(), detail::branch_off(model, g, path, 0, len, radius, rng)};
            const double r = static_cast<double>(rng.below(len + 1));
            const double D = static_cast<double>(rng.below(6));
            const E witness = detail::branch_off(model, g, path, static_cast<std::size_t>(r), len, radius, rng);
            const E probe = model.multiply(witness, random_element(model, g, static_cast<std::size_t>(D), rng));
            ++nest.instances;
            if (in_set_shadow(model, one, std::span<const E>(T), r, witness) && model.distance(witness, probe) <= D) {
                ++nest.applicable;
                if (!verify_metric_nest(model, std::span<const E>(T), r, D, witness, probe)) ++nest.failures;
            }
        }
        // r-shadow of an s-shadow.
        {
            const std::vector<E> T{path.back()};
            const double s = static_cast<double>(rng.below(len + 1));
            const double r = static_cast<double>(rng.below(len + 1)) - 1.0;
            const E witness = detail::branch_off(model, g, path, static_cast<std::size_t>(s), len, radius, rng);
            const E probe = model.multiply(witness, random_element(model, g, radius, rng));
            const E probe2 = detail::branch_off(model, g, path, static_cast<std::size_t>(std::max(r, 0.0)), len, radius, rng);
            for (const E* p : {&probe, &probe2}) {
                ++comp.instances;
                if (in_set_shadow(model, one, std::span<const E>(T), s, witness) &&
                    in_shadow(model, Shadow<E>{one, witness, r}, *p)) {
                    ++comp.applicable;
                    if (!shadow_composition_check(model, std::span<const E>(T), s, r, witness, *p)) ++comp.failures;
                }
            }
        }
    }
    return {bound, nest, comp};
}

namespace detail {

// One random instance of each constant-dependent shadow lemma. Each returns
// nullopt when the drawn points miss the lemma's hypotheses.
template <GroupModel M, class E = typename M::element_type>
std::optional<bool> nested_separation_trial(const M& model, std::span<const E> g, std::size_t radius, double K2,
                                            StreamRng& rng) {
    const E z = random_element(model, g, radius / 2, rng);
    const std::size_t len = radius / 2 + rng.below(radius / 2 + 1);
    const auto path = random_path(model, g, len, rng);
    const double r = static_cast<double>(1 + rng.below(len));
    const double A = static_cast<double>(rng.below(len + 1));
    const E x = model.multiply(z, path.back());
    const E a = model.multiply(z, branch_off(model, g, path, static_cast<std::size_t>(r), len, radius, rng));
    const E b = model.multiply(z, branch_off(model, g, path, 0, len, radius, rng));
    if (!nested_separation_applies(model, z, x, r, A, a, b, K2)) return std::nullopt;
    return verify_nested_shadow_separation(model, z, x, r, A, a, b, K2);
}

template <GroupModel M, class E = typename M::element_type>
std::optional<bool> basepoint_change_trial(const M& model, std::span<const E> g, std::size_t radius, double K3,
                                           double K4, StreamRng& rng) {
    const E z = random_element(model, g, radius / 2, rng);
    const std::size_t len = 1 + rng.below(radius);
    const auto path = random_path(model, g, len, rng);
    const double r = static_cast<double>(rng.below(len + 1));
    const E x = model.multiply(z, path.back());
    const E y = model.multiply(z, branch_off(model, g, path, 0, len, radius, rng));
    const E probe = model.multiply(z, branch_off(model, g, path, static_cast<std::size_t>(r), len, radius, rng));
    if (!basepoint_change_applies(model, x, y, z, r, probe, K3)) return std::nullopt;
    return verify_basepoint_change(model, x, y, z, r, probe, K3, K4);
}

template <GroupModel M, class E = typename M::element_type>
std::optional<bool> shadow_complement_trial(const M& model, std::span<const E> g, std::size_t radius, double K5,
                                            StreamRng& rng) {
    const E z = random_element(model, g, radius / 2, rng);
    const std::size_t len = 1 + rng.below(radius);
    const auto path = random_path(model, g, len, rng);
    const double r = static_cast<double>(rng.below(len + 1));
    const E x = model.multiply(z, path.back());
    const E probe = model.multiply(z, branch_off(model, g, path, 0, len, radius, rng));
    if (!shadow_complement_applies(model, x, z, r, K5)) return std::nullopt;
    return verify_shadow_complement(model, x, z, r, probe, K5);
}

}  // namespace detail

/// Smallest grid constants for the three shadow lemmas with no
/// counterexample over `trials` random instances.
template <GroupModel M>
std::pair<ShadowConstants, std::vector<SuiteResult>> calibrate_shadow_constants(const M& model, std::size_t trials,
                                                                                std::size_t radius, std::uint64_t seed,
                                                                                double max_constant = 4.0) {
    using E = typename M::element_type;
    const auto gens = model.generators();
    const std::span<const E> g(gens);
    const auto grid = constant_grid(max_constant);
    ShadowConstants k;
    std::vector<SuiteResult> report;

    auto record = [&](const std::string& name, const Calibration& c, double& slot) {
        SuiteResult s{name, trials, c.applicable, std::size_t{c.constant ? 0u : 1u}, c.constant, {}};
        s.note = std::to_string(c.counterexamples_below) + " counterexamples below the calibrated value";
        if (c.constant) slot = *c.constant;
        report.push_back(std::move(s));
    };

    record("calibrate_K2_nested_separation",
           calibrate_constant(std::span<const double>(grid), trials, seed,
                              [&](double K, StreamRng& rng) { return detail::nested_separation_trial(model, g, radius, K, rng); }),
           k.K2);
    record("calibrate_K5_shadow_complement",
           calibrate_constant(std::span<const double>(grid), trials, seed ^ 0x55,
                              [&](double K, StreamRng& rng) { return detail::shadow_complement_trial(model, g, radius, K, rng); }),
           k.K5);

    // (K3, K4) jointly: smallest K3 + K4, then smallest K4.
    std::vector<std::pair<double, double>> pairs;
    for (double a : grid)
        for (double b : grid) pairs.emplace_back(a, b);
    std::stable_sort(pairs.begin(), pairs.end(), [](const auto& l, const auto& r) {
        return std::pair{l.first + l.second, l.second} < std::pair{r.first + r.second, r.second};
    });
    SuiteResult joint{"calibrate_K3_K4_basepoint_change", trials};
    joint.failures = 1;
    std::size_t below = 0;
    for (const auto& [K3, K4] : pairs) {
        std::size_t applicable = 0, failures = 0;
        for (std::size_t i = 0; i < trials; ++i) {
            StreamRng rng(seed ^ 0x77, stream_id(0, i));
            auto outcome = detail::basepoint_change_trial(model, g, radius, K3, K4, rng);
            if (!outcome) continue;
            ++applicable;
            failures += *outcome ? 0 : 1;
        }
        if (failures == 0 && applicable > 0) {
            k.K3 = K3;
            k.K4 = K4;
            joint.applicable = applicable;
            joint.failures = 0;
            joint.constant = K3 + K4;
            joint.note = "K3=" + std::to_string(K3) + " K4=" + std::to_string(K4) + ", " + std::to_string(below) +
                         " counterexamples below";
            break;
        }
        below += failures;
    }
    report.push_back(std::move(joint));
    return {k, report};
}

/// The three shadow lemmas at fixed constants on fresh instances.
template <GroupModel M>
std::vector<SuiteResult> shadow_lemma_suite(const M& model, const ShadowConstants& k, std::size_t instances,
                                            std::size_t radius, std::uint64_t seed) {
    using E = typename M::element_type;
    const auto gens = model.generators();
    const std::span<const E> g(gens);
    SuiteResult nested{"nested_shadow_separation", instances, 0, 0, k.K2};
    SuiteResult base{"basepoint_change", instances, 0, 0, k.K3 + k.K4};
    SuiteResult compl_{"shadow_complement", instances, 0, 0, k.K5};
    base.note = "K3=" + std::to_string(k.K3) + " K4=" + std::to_string(k.K4);
    auto tally = [](SuiteResult& s, std::optional<bool> o) {
        if (!o) return;
        ++s.applicable;
        if (!*o) ++s.failures;
    };
    for (std::size_t i = 0; i < instances; ++i) {
        StreamRng r1(seed, stream_id(2, i)), r2(seed, stream_id(3, i)), r3(seed, stream_id(4, i));
        tally(nested, detail::nested_separation_trial(model, g, radius, k.K2, r1));
        tally(base, detail::basepoint_change_trial(model, g, radius, k.K3, k.K4, r2));
        tally(compl_, detail::shadow_complement_trial(model, g, radius, k.K5, r3));
    }
    return {nested, base, compl_};
}

/// A random free word of exactly `len` letters, freely reduced.
inline FreeWord random_reduced_word(std::size_t len, StreamRng& rng) {
    static constexpr Letter letters[] = {1, 2, -1, -2};
    std::vector<Letter> out;
    out.reserve(len);
    while (out.size() < len) {
        const Letter l = letters[rng.below(4)];
        if (!out.empty() && out.back() == -l) continue;
        out.push_back(l);
    }
    return FreeWord(std::move(out));
}

/// Translation length against conjugacy-minimal length in the tree. The
/// reference value is the eventual increment d(1, g^4) - d(1, g^3), which
/// is computed from powers rather than from the cyclic reduction.
inline std::vector<SuiteResult> free_translation_suite(std::size_t instances, std::size_t max_len, std::uint64_t seed) {
    const FreeGroupModel model;
    SuiteResult eq{"translation_equals_conjugacy_length", instances, instances};
    SuiteResult pow{"translation_of_powers", instances, instances};
    for (std::size_t i = 0; i < instances; ++i) {
        StreamRng rng(seed, stream_id(5, i));
        const FreeWord g = random_reduced_word(rng.below(max_len + 1), rng);
        const double tau = model.translation_length(g, 1).value;
        const double conj = model.conjugacy_min_length(g).first;
        FreeWord p3 = g * g * g;
        const double increment = model.norm(p3 * g) - model.norm(p3);
        if (tau != conj || tau != increment) ++eq.failures;
        FreeWord gn;
        for (int n = 1; n <= 5; ++n) {
            gn = gn * g;
            if (model.translation_length(gn, 1).value != n * tau) {
                ++pow.failures;
                break;
            }
        }
    }
    return {eq, pow};
}

/// Conditions on shortest conjugators of g = v s v^-1, |s| <= 3, |v| <= 20,
/// and the quasi-geodesic path v, s, v^-1. Calibrates K9 and the additive
/// quasi-geodesic constant (with K = 1) on `seed`, then checks them on
/// `verify_seed`.
inline std::vector<SuiteResult> free_conjugator_suite(std::size_t instances, std::uint64_t seed,
                                                      std::uint64_t verify_seed, double max_constant = 4.0) {
    const FreeGroupModel model;
    struct Instance {
        FreeWord g, v, s;
    };
    auto draw = [&model](std::uint64_t sd, std::size_t i) {
        StreamRng rng(sd, stream_id(6, i));
        const FreeWord s0 = random_reduced_word(rng.below(4), rng);
        const FreeWord v0 = random_reduced_word(rng.below(21), rng);
        const FreeWord g = v0 * s0 * v0.inverse();
        auto [len, v] = model.conjugacy_min_length(g);
        FreeWord s = v.inverse() * g * v;
        return Instance{g, v, s};
    };
    const auto grid = constant_grid(max_constant);

    std::optional<double> k9, qc;
    std::size_t k9_below = 0, qc_below = 0;
    for (double K : grid) {
        std::size_t fails = 0;
        for (std::size_t i = 0; i < instances; ++i) {
            const Instance in = draw(seed, i);
            fails += check_conjugacy_shadow_conditions(model, in.g, in.v, in.s, K).all() ? 0 : 1;
        }
        if (fails == 0) {
            k9 = K;
            break;
        }
        k9_below += fails;
    }
    for (double c : grid) {
        std::size_t fails = 0;
        for (std::size_t i = 0; i < instances; ++i) {
            const Instance in = draw(seed, i);
            const auto path = conjugate_path(in.v, in.s);
            fails += quasigeodesic_check(model, std::span<const FreeWord>(path), {1.0, c}) ? 0 : 1;
        }
        if (fails == 0) {
            qc = c;
            break;
        }
        qc_below += fails;
    }

    SuiteResult cond{"conjugator_shadow_conditions", instances, instances, 0, k9};
    SuiteResult qg{"conjugate_path_quasigeodesic", instances, instances, 0, qc};
    cond.note = std::to_string(k9_below) + " counterexamples below the calibrated K9";
    qg.note = "K=1; " + std::to_string(qc_below) + " counterexamples below the calibrated c";
    if (!k9) cond.failures = instances;
    if (!qc) qg.failures = instances;
    for (std::size_t i = 0; i < instances && k9 && qc; ++i) {
        const Instance in = draw(verify_seed, i);
        if (!check_conjugacy_shadow_conditions(model, in.g, in.v, in.s, *k9).all()) ++cond.failures;
        const auto path = conjugate_path(in.v, in.s);
        if (!quasigeodesic_check(model, std::span<const FreeWord>(path), {1.0, *qc})) ++qg.failures;
    }
    return {cond, qg};
}

/// Farey-specific exact checks: the slope metric on small denominators,
/// determinant preservation, and tau > 0 iff |trace| > 2.
inline std::vector<SuiteResult> farey_model_suite(std::size_t instances, std::uint64_t seed) {
    const FareyModel model;
    const auto gens = model.generators();
    const std::span<const FareyElement> g(gens);
    SuiteResult metric{"slope_metric_axioms", instances, instances};
    SuiteResult det{"determinant_preserved", instances, instances};
    SuiteResult classify{"translation_positive_iff_pseudo_anosov", instances};
    SuiteResult left{"left_invariance", instances, instances};
    auto random_slope = [](StreamRng& rng) {
        for (;;) {
            const long q = static_cast<long>(rng.below(51));
            const long p = static_cast<long>(rng.below(201)) - 100;
            if (q == 0) return Slope::infinity();
            if (std::gcd(std::labs(p), q) == 1) return Slope(p, q);
        }
    };
    for (std::size_t i = 0; i < instances; ++i) {
        StreamRng rng(seed, stream_id(7, i));
        const Slope a = random_slope(rng), b = random_slope(rng), c = random_slope(rng);
        const auto ab = farey_slope_distance(a, b), ba = farey_slope_distance(b, a);
        const auto ac = farey_slope_distance(a, c), cb = farey_slope_distance(c, b);
        if (ab != ba || ab > ac + cb || ((ab == 0) != (a == b))) ++metric.failures;

        const FareyElement x = random_element(model, g, 12, rng);
        const FareyElement y = random_element(model, g, 12, rng);
        FareyElement prod = model.multiply(model.invert(x), model.multiply(y, x));
        if (prod.determinant() != 1) ++det.failures;
        if (model.distance(x, y) != model.norm(model.multiply(model.invert(x), y))) ++left.failures;

        const auto t = model.translation_length(x, 64);
        if (t.stabilized) {
            ++classify.applicable;
            if ((t.value > 0.0) != (farey_classify(x) == FareyClass::pseudo_anosov)) ++classify.failures;
        }
    }
    return {metric, det, left, classify};
}

}  // namespace hypwalk
