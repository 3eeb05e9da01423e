#pragma once

#include <algorithm>
#include <cstdio>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hypwalk/config.hpp"
#include "hypwalk/experiments.hpp"
#include "hypwalk/farey.hpp"
#include "hypwalk/free_group.hpp"
#include "hypwalk/props.hpp"
#include "hypwalk/walk.hpp"

#ifndef HYPWALK_VERSION
#define HYPWALK_VERSION "0.1.0"
#endif

namespace hypwalk {

inline constexpr std::string_view version = HYPWALK_VERSION;

/// Thrown for configs that parse but cannot drive the chosen subcommand.
struct config_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Everything a subcommand produces. `summary` never holds wall time or the
/// thread count, so it is byte-stable across runs.
struct RunOutput {
    std::string csv;
    nlohmann::json summary;
    std::vector<std::string> assertion_failures;
};

/// Column layout of series.csv for each subcommand.
inline std::string_view csv_schema(std::string_view subcommand) {
    if (subcommand == "drift") return "n,rate,ci_low,ci_high,samples";
    if (subcommand == "translation-decay") return "x,p,ci_low,ci_high,count,non_stabilized";
    if (subcommand == "shadow-decay") return "n,x,p,ci_low,ci_high,count,empty_shadow";
    if (subcommand == "chernoff") return "t,n,empirical,ci_low,ci_high,bound";
    if (subcommand == "props" || subcommand == "calibrate") return "suite,instances,applicable,failures,constant";
    return "x,p,ci_low,ci_high,count";
}

namespace detail {

inline std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void tail_rows(std::string& csv, const TailEstimate& t, const std::string& prefix = {},
                      const std::vector<std::string>& suffix = {}) {
    for (std::size_t i = 0; i < t.size(); ++i) {
        csv += prefix + num(t.thresholds[i]) + "," + num(t.probabilities[i]) + "," + num(t.ci_low[i]) + "," +
               num(t.ci_high[i]) + "," + std::to_string(t.counts[i]);
        if (i < suffix.size()) csv += "," + suffix[i];
        csv += "\n";
    }
}

inline nlohmann::json fit_json(const DecayExperiment& d) {
    if (!d.fit) return nullptr;
    const DecayFit& f = *d.fit;
    return {{"slope", f.slope},           {"intercept", f.intercept},     {"c", f.c},
            {"K", f.K},                   {"r_squared", f.r_squared},     {"points_used", f.points_used},
            {"points_excluded", f.points_excluded}};
}

inline nlohmann::json series_json(const DecayExperiment& d) {
    nlohmann::json j{{"fit", fit_json(d)}, {"counts", d.series.counts}, {"sample_count", d.series.sample_count}};
    if (!d.fit) j["fit_error"] = d.fit_error;
    return j;
}

inline bool strictly_decreasing(const std::vector<double>& p) {
    for (std::size_t i = 1; i < p.size(); ++i)
        if (!(p[i] < p[i - 1])) return false;
    return true;
}

// Log-linear acceptance: a fit exists, slope < 0, R^2 at least `min_r2`.
inline void expect_decay(std::vector<std::string>& fails, const std::string& what, const DecayExperiment& d,
                         std::optional<double> min_r2) {
    if (!d.fit) {
        fails.push_back(what + ": no fit (" + d.fit_error + ")");
        return;
    }
    if (!(d.fit->slope < 0.0)) fails.push_back(what + ": fitted slope " + num(d.fit->slope) + " is not negative");
    if (min_r2 && d.fit->r_squared < *min_r2)
        fails.push_back(what + ": R^2 " + num(d.fit->r_squared) + " below " + num(*min_r2));
}

inline void suite_rows(std::string& csv, nlohmann::json& suites, const std::vector<SuiteResult>& results) {
    for (const auto& s : results) {
        csv += s.name + "," + std::to_string(s.instances) + "," + std::to_string(s.applicable) + "," +
               std::to_string(s.failures) + "," + (s.constant ? num(*s.constant) : std::string{}) + "\n";
        nlohmann::json j{{"name", s.name},         {"instances", s.instances}, {"applicable", s.applicable},
                         {"failures", s.failures}, {"passed", s.passed()}};
        j["constant"] = s.constant ? nlohmann::json(*s.constant) : nlohmann::json(nullptr);
        if (!s.note.empty()) j["note"] = s.note;
        suites.push_back(std::move(j));
    }
}

template <GroupModel M, class E = typename M::element_type>
StepDistribution<E> build_distribution(const M& model, const ExperimentConfig& cfg) {
    std::vector<E> support;
    std::vector<double> weights;
    for (const auto& e : cfg.distribution) {
        support.push_back(model.parse(e.element));
        weights.push_back(e.weight);
    }
    return StepDistribution<E>(std::move(support), std::move(weights));
}

template <GroupModel M>
RunOutput run_props(const M& model, const ExperimentConfig& cfg, bool calibrate_only) {
    const std::size_t radius = cfg.radius.value_or(model.name() == "free" ? 20 : 12);
    const std::size_t instances = cfg.samples;
    RunOutput out;
    std::string& csv = out.csv;
    nlohmann::json suites = nlohmann::json::array();
    auto [constants, calibration] = calibrate_shadow_constants(model, 2 * instances, radius, cfg.seed);
    suite_rows(csv, suites, calibration);
    std::vector<SuiteResult> all = calibration;
    auto add = [&](const std::vector<SuiteResult>& r) {
        suite_rows(csv, suites, r);
        all.insert(all.end(), r.begin(), r.end());
    };
    if constexpr (std::is_same_v<M, FreeGroupModel>) {
        auto conj = free_conjugator_suite(instances, cfg.seed + 5, cfg.seed + 6);
        if (calibrate_only) {
            add(conj);
        } else {
            add(metric_suite(model, instances, radius, cfg.seed + 1));
            add(delta_shadow_suite(model, instances, radius, cfg.seed + 2));
            add(shadow_lemma_suite(model, constants, instances, radius, cfg.seed + 3));
            add(free_translation_suite(instances, 40, cfg.seed + 4));
            add(conj);
        }
    } else {
        if (!calibrate_only) {
            add(metric_suite(model, instances, radius, cfg.seed + 1));
            add(delta_shadow_suite(model, instances, radius, cfg.seed + 2));
            add(shadow_lemma_suite(model, constants, instances, radius, cfg.seed + 3));
            add(farey_model_suite(instances, cfg.seed + 4));
        }
    }
    out.summary["suites"] = suites;
    out.summary["radius"] = radius;
    out.summary["constants"] = {{"K2", constants.K2}, {"K3", constants.K3}, {"K4", constants.K4}, {"K5", constants.K5}};
    if (calibrate_only) {
        const double delta_hat = estimate_delta(model, instances, radius, cfg.seed + 7);
        out.summary["delta_estimate"] = delta_hat;
        out.summary["delta_configured"] = model.space().delta;
        csv += "delta_estimate," + std::to_string(instances) + "," + std::to_string(instances) + ",0," +
               num(delta_hat) + "\n";
    }
    bool passed = true;
    for (const auto& s : all) passed = passed && s.passed();
    out.summary["passed"] = passed;
    for (const auto& s : all)
        if (!s.passed())
            out.assertion_failures.push_back(s.name + ": " + std::to_string(s.failures) + " failures in " +
                                             std::to_string(s.applicable) + " applicable instances");
    return out;
}

template <GroupModel M>
RunOutput run_walk_command(const M& model, std::string_view sc, const ExperimentConfig& cfg, std::size_t threads) {
    using E = typename M::element_type;
    const auto dist = build_distribution(model, cfg);
    const auto report = check_non_elementary(model, dist);
    if (!report.non_elementary) throw precondition_error("non-elementary check failed: " + report.diagnostic);

    const RunOptions opt{cfg.seed, cfg.samples, threads, 0.95};
    const std::span<const std::size_t> ns(cfg.n_grid);
    RunOutput out;
    std::string& csv = out.csv;
    auto& fails = out.assertion_failures;
    nlohmann::json& s = out.summary;
    s["witnesses"] = {model.format(report.witnesses->first), model.format(report.witnesses->second)};

    if (sc == "drift") {
        nlohmann::json rows = nlohmann::json::array();
        for (std::size_t j = 0; j < ns.size(); ++j) {
            RunOptions o = opt;
            o.seed = opt.seed + j;
            const auto d = drift(model, dist, ns[j], o);
            csv += std::to_string(d.n) + "," + num(d.rate) + "," + num(d.ci_low) + "," + num(d.ci_high) + "," +
                   std::to_string(d.samples) + "\n";
            rows.push_back({{"n", d.n}, {"rate", d.rate}, {"ci_low", d.ci_low}, {"ci_high", d.ci_high}});
            if (!(d.rate > 0.0)) fails.push_back("drift at n=" + std::to_string(d.n) + " is not positive");
            if (cfg.expected_rate && std::abs(d.rate - *cfg.expected_rate) > *cfg.rate_tolerance)
                fails.push_back("drift at n=" + std::to_string(d.n) + " is " + num(d.rate) + ", outside " +
                                num(*cfg.expected_rate) + " +/- " + num(*cfg.rate_tolerance));
        }
        s["drift"] = rows;
    } else if (sc == "linear-progress") {
        const auto d = linear_progress_decay(model, dist, *cfg.L, ns, opt);
        tail_rows(csv, d.series);
        s["decay"] = series_json(d);
        expect_decay(fails, "linear-progress", d, 0.9);
        if (d.fit && !(d.fit->c < 1.0)) fails.push_back("linear-progress: fitted c is not below 1");
    } else if (sc == "translation-decay") {
        const auto t = translation_decay(model, dist, *cfg.B, ns, opt, cfg.horizon.value_or(64));
        std::vector<std::string> extra;
        for (auto u : t.non_stabilized) extra.push_back(std::to_string(u));
        tail_rows(csv, t.decay.series, {}, extra);
        s["decay"] = series_json(t.decay);
        s["non_stabilized"] = t.non_stabilized;
        if (!strictly_decreasing(t.decay.series.probabilities))
            fails.push_back("translation-decay: frequencies are not strictly decreasing in n");
        expect_decay(fails, "translation-decay", t.decay, 0.9);
    } else if (sc == "shadow-decay") {
        const E center = model.parse(*cfg.center);
        const auto sweep = shadow_measure_sweep(model, dist, ns, center, std::span<const double>(*cfg.r_grid), opt);
        nlohmann::json per_n = nlohmann::json::array();
        std::vector<double> cs;
        for (std::size_t j = 0; j < sweep.per_n.size(); ++j) {
            const auto& d = sweep.per_n[j];
            std::vector<std::string> extra;
            for (bool e : d.empty_shadow) extra.push_back(e ? "1" : "0");
            tail_rows(csv, d.decay.series, std::to_string(ns[j]) + ",", extra);
            auto js = series_json(d.decay);
            js["n"] = ns[j];
            per_n.push_back(js);
            const std::string what = "shadow-decay n=" + std::to_string(ns[j]);
            expect_decay(fails, what, d.decay, 0.9);
            if (d.decay.fit) {
                if (!(d.decay.fit->c < 1.0)) fails.push_back(what + ": fitted c is not below 1");
                cs.push_back(d.decay.fit->c);
            }
        }
        s["per_n"] = per_n;
        s["center"] = model.format(center);
        s["convergence"] = sweep.convergence;
        if (cs.size() >= 2) {
            const double ratio = *std::max_element(cs.begin(), cs.end()) / *std::min_element(cs.begin(), cs.end());
            s["c_ratio"] = ratio;
            if (ratio > 2.0) fails.push_back("shadow-decay: fitted c differs across n by more than a factor of 2");
        }
    } else if (sc == "backtrack") {
        const auto b = backtrack_tail(model, dist, *cfg.k, ns.front(), std::span<const double>(*cfg.r_grid), opt);
        tail_rows(csv, b.decay.series);
        s["decay"] = series_json(b.decay);
        s["mean_z"] = b.mean_z;
        s["mean_y"] = b.mean_y;
        s["increments"] = b.increments;
        s["k"] = *cfg.k;
        expect_decay(fails, "backtrack", b.decay, std::nullopt);
        if (b.decay.fit && !(b.decay.fit->c < 1.0)) fails.push_back("backtrack: fitted c is not below 1");
    } else if (sc == "z-sum") {
        const auto d = z_sum_deviation(model, dist, *cfg.k, *cfg.L, ns, opt);
        tail_rows(csv, d.series);
        s["decay"] = series_json(d);
        s["k"] = *cfg.k;
        expect_decay(fails, "z-sum", d, 0.85);
    } else if (sc == "bernstein") {
        const auto b = bernstein_check(model, dist, *cfg.k, *cfg.epsilon, ns, opt);
        tail_rows(csv, b.decay.series);
        s["decay"] = series_json(b.decay);
        s["mean_y"] = b.mean_y;
        s["k"] = *cfg.k;
        expect_decay(fails, "bernstein", b.decay, std::nullopt);
    } else if (sc == "midpoint") {
        const auto d = midpoint_failure(model, dist, ns, opt);
        tail_rows(csv, d.series);
        s["decay"] = series_json(d);
        if (!strictly_decreasing(d.series.probabilities))
            fails.push_back("midpoint: failure frequencies are not strictly decreasing in n");
        expect_decay(fails, "midpoint", d, std::nullopt);
    } else if (sc == "diagonal") {
        const auto d = diagonal_decay(model, dist, ns.front(), std::span<const double>(*cfg.r_grid), opt);
        tail_rows(csv, d.series);
        s["decay"] = series_json(d);
        expect_decay(fails, "diagonal", d, std::nullopt);
    } else {
        throw config_error("subcommand: unknown \"" + std::string(sc) + "\"");
    }
    return out;
}

inline RunOutput run_chernoff(const ExperimentConfig& cfg, std::size_t threads) {
    RunOutput out;
    const double mean = cfg.rate_mean.value_or(1.0);
    nlohmann::json cells = nlohmann::json::array();
    std::size_t cell_index = 0;
    for (double t : *cfg.t_grid) {
        for (std::size_t n : cfg.n_grid) {
            RunOptions opt{cfg.seed + cell_index++, cfg.samples, threads, 0.95};
            const auto c = chernoff_empirical(mean, t, n, opt);
            out.csv += num(c.t) + "," + std::to_string(c.n) + "," + num(c.empirical) + "," + num(c.ci_low) + "," +
                       num(c.ci_high) + "," + num(c.bound) + "\n";
            cells.push_back({{"t", c.t}, {"n", c.n}, {"empirical", c.empirical}, {"bound", c.bound}});
            if (c.empirical > c.bound)
                out.assertion_failures.push_back("chernoff: empirical " + num(c.empirical) + " exceeds bound " +
                                                 num(c.bound) + " at t=" + num(t) + ", n=" + std::to_string(n));
        }
    }
    out.summary["cells"] = cells;
    out.summary["rate_mean"] = mean;
    return out;
}

}  // namespace detail

/// Runs one subcommand. Throws config_error for configs the subcommand
/// cannot use and precondition_error when a precondition (such as
/// non-elementarity) fails.
inline RunOutput run_subcommand(std::string_view sc, const ExperimentConfig& cfg, std::size_t threads) {
    RunOutput out;
    if (sc == "chernoff") {
        out = detail::run_chernoff(cfg, threads);
    } else if (cfg.model == "free") {
        const FreeGroupModel model;
        if (cfg.delta && *cfg.delta != 0.0) throw config_error("delta: the free model is a tree, delta must be 0");
        out = (sc == "props" || sc == "calibrate") ? detail::run_props(model, cfg, sc == "calibrate")
                                                   : detail::run_walk_command(model, sc, cfg, threads);
    } else if (cfg.model == "farey") {
        const FareyModel model(cfg.delta.value_or(1.0));
        out = (sc == "props" || sc == "calibrate") ? detail::run_props(model, cfg, sc == "calibrate")
                                                   : detail::run_walk_command(model, sc, cfg, threads);
    } else {
        throw config_error("model: unknown model \"" + cfg.model + "\"");
    }
    out.csv = std::string(csv_schema(sc)) + "\n" + out.csv;
    out.summary["subcommand"] = sc;
    out.summary["model"] = cfg.model;
    out.summary["seed"] = cfg.seed;
    out.summary["samples"] = cfg.samples;
    out.summary["config_digest"] = config_digest(cfg);
    out.summary["version"] = version;
    out.summary["assertions"] = {{"passed", out.assertion_failures.empty()},
                                 {"failures", out.assertion_failures}};
    return out;
}

}  // namespace hypwalk
