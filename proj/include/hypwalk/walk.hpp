#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hypwalk/hypgeom.hpp"
#include "hypwalk/model.hpp"
#include "hypwalk/rng.hpp"

namespace hypwalk {

/// Finitely supported step law mu, sampled with an alias table.
template <class E>
class StepDistribution {
public:
    StepDistribution() = default;

    StepDistribution(std::vector<E> support, std::vector<double> weights)
        : support_(std::move(support)), weights_(std::move(weights)) {
        if (support_.empty()) throw precondition_error("step distribution: support must be non-empty");
        if (support_.size() != weights_.size())
            throw precondition_error("step distribution: one weight per support element");
        double total = 0.0;
        for (double w : weights_) {
            if (!(w > 0.0)) throw precondition_error("step distribution: weights must be strictly positive");
            total += w;
        }
        if (std::abs(total - 1.0) > 1e-12) throw precondition_error("weights must sum to 1");
        table_ = AliasTable(weights_);
    }

    static StepDistribution uniform(std::vector<E> support) {
        std::vector<double> w(support.size(), 1.0 / static_cast<double>(support.size()));
        return StepDistribution(std::move(support), std::move(w));
    }

    const std::vector<E>& support() const { return support_; }
    const std::vector<double>& weights() const { return weights_; }

    const E& draw(StreamRng& rng) const { return support_[table_(rng)]; }

private:
    std::vector<E> support_;
    std::vector<double> weights_;
    AliasTable table_;
};

/// mu~(g) = mu(g^-1): same weights on the inverted support.
template <GroupModel M, class E = typename M::element_type>
StepDistribution<E> reflected(const M& model, const StepDistribution<E>& dist) {
    std::vector<E> support;
    support.reserve(dist.support().size());
    for (const E& g : dist.support()) support.push_back(model.invert(g));
    return StepDistribution<E>(std::move(support), dist.weights());
}

/// Largest d(1, s) over the support.
template <GroupModel M, class E = typename M::element_type>
double max_step_displacement(const M& model, const StepDistribution<E>& dist) {
    double best = 0.0;
    for (const E& g : dist.support()) best = std::max(best, model.norm(g));
    return best;
}

/// One realisation s_1..s_n with locations w_i = s_1 ... s_i and d(1, w_i).
template <class E>
struct WalkSample {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    std::vector<E> steps;
    std::vector<E> locations;   // n + 1 entries, locations[0] = identity
    std::vector<double> norms;  // d(1, locations[i])

    std::size_t length() const { return steps.size(); }
};

// Drives one walk of n steps from the identity, calling
// visit(i, step, location) after step i (1-based).
template <GroupModel M, class E, class Visit>
E run_walk(const M& model, const StepDistribution<E>& dist, std::size_t n, StreamRng& rng, Visit&& visit) {
    E at = model.identity();
    for (std::size_t i = 1; i <= n; ++i) {
        const E& s = dist.draw(rng);
        model.right_multiply(at, s);
        visit(i, s, static_cast<const E&>(at));
    }
    return at;
}

template <GroupModel M, class E>
E walk_endpoint(const M& model, const StepDistribution<E>& dist, std::size_t n, StreamRng& rng) {
    return run_walk(model, dist, n, rng, [](std::size_t, const E&, const E&) {});
}

template <GroupModel M, class E = typename M::element_type>
WalkSample<E> sample_walk(const M& model, const StepDistribution<E>& dist, std::size_t n,
                          std::uint64_t seed, std::uint64_t stream = 0) {
    WalkSample<E> w;
    w.seed = seed;
    w.stream = stream;
    w.steps.reserve(n);
    w.locations.reserve(n + 1);
    w.norms.reserve(n + 1);
    w.locations.push_back(model.identity());
    w.norms.push_back(0.0);
    StreamRng rng(seed, stream);
    run_walk(model, dist, n, rng, [&](std::size_t, const E& s, const E& at) {
        w.steps.push_back(s);
        w.locations.push_back(at);
        w.norms.push_back(model.norm(at));
    });
    return w;
}

/// Appends rows "sample_id,i,step,d(1,w_i)" for i = 1..n.
template <GroupModel M, class E = typename M::element_type>
void append_walk_rows(const M& model, const WalkSample<E>& w, std::size_t sample_id, std::string& csv) {
    for (std::size_t i = 1; i <= w.length(); ++i) {
        csv += std::to_string(sample_id) + "," + std::to_string(i) + "," + model.format(w.steps[i - 1]) + "," +
               std::to_string(static_cast<long long>(w.norms[i])) + "\n";
    }
}

/// X_i = Y_i - Z_i for the k-iterated walk w^k_i = w_{ik}.
struct IteratedDecomposition {
    std::size_t k = 1;
    std::vector<double> X;  // d(1, w^k_i) - d(1, w^k_{i-1})
    std::vector<double> Y;  // d(w^k_{i-1}, w^k_i)
    std::vector<double> Z;  // 2 (1 . w^k_i)_{w^k_{i-1}}
};

// Trailing steps beyond the last multiple of k are ignored.
template <GroupModel M, class E = typename M::element_type>
IteratedDecomposition iterated_decomposition(const M& model, const WalkSample<E>& w, std::size_t k) {
    if (k == 0) throw precondition_error("iterated_decomposition: k must be >= 1");
    IteratedDecomposition out;
    out.k = k;
    const std::size_t blocks = w.length() / k;
    for (std::size_t i = 1; i <= blocks; ++i) {
        const E& prev = w.locations[(i - 1) * k];
        const E& cur = w.locations[i * k];
        const double y = model.distance(prev, cur);
        const double x = w.norms[i * k] - w.norms[(i - 1) * k];
        out.Y.push_back(y);
        out.X.push_back(x);
        out.Z.push_back(y - x);
    }
    return out;
}

/// w_2n in S_1(w_n, d(1, w_n) / 2).
template <GroupModel M, class E = typename M::element_type>
bool midpoint_shadow_event(const M& model, const WalkSample<E>& w) {
    if (w.length() % 2 != 0) throw precondition_error("midpoint_shadow_event: walk length must be even");
    const std::size_t n = w.length() / 2;
    const E one = model.identity();
    return gromov_product(model, one, w.locations[n], w.locations[2 * n]) >= 0.5 * w.norms[n];
}

/// (v_n . w_n)_1 >= r - 2 delta, the checkable consequence of (v_n, w_n)
/// lying in the r-shadow of the diagonal.
template <GroupModel M, class E = typename M::element_type>
bool diagonal_shadow_event(const M& model, const WalkSample<E>& v_walk, const WalkSample<E>& w_walk, double r) {
    if (v_walk.length() != w_walk.length())
        throw precondition_error("diagonal_shadow_event: walks must have the same length");
    const double bound = r - 2.0 * model.space().delta;
    if (bound <= 0.0) return true;
    return gromov_product(model, model.identity(), v_walk.locations.back(), w_walk.locations.back()) >= bound;
}

/// Witness pair for non-elementarity, or the reason none was found.
template <class E>
struct ElementarityReport {
    bool non_elementary = false;
    std::optional<std::pair<E, E>> witnesses;
    std::string diagnostic;
};

// Searches products of support elements up to `max_length` for two
// loxodromic elements with distinct fixed points.
template <GroupModel M, class E = typename M::element_type>
ElementarityReport<E> check_non_elementary(const M& model, const StepDistribution<E>& dist,
                                           std::size_t max_length = 6, std::size_t word_budget = 20000) {
    ElementarityReport<E> report;
    const auto& support = dist.support();
    std::vector<E> loxodromics;
    std::vector<E> layer{model.identity()};
    std::size_t visited = 0;
    for (std::size_t len = 1; len <= max_length && visited < word_budget; ++len) {
        std::vector<E> next;
        for (const E& prefix : layer) {
            for (const E& s : support) {
                if (++visited > word_budget) break;
                E g = model.multiply(prefix, s);
                if (model.loxodromic(g)) {
                    for (const E& h : loxodromics) {
                        if (!model.shares_fixed_points(g, h)) {
                            report.non_elementary = true;
                            report.witnesses = std::pair{h, g};
                            return report;
                        }
                    }
                    if (loxodromics.size() < 64) loxodromics.push_back(g);
                }
                next.push_back(std::move(g));
            }
        }
        layer = std::move(next);
    }
    report.diagnostic = loxodromics.empty()
        ? "no loxodromic element among products of up to " + std::to_string(max_length) + " support elements; the support generates an elementary subgroup"
        : "all loxodromic products of up to " + std::to_string(max_length) + " support elements share fixed points; the support generates an elementary subgroup";
    return report;
}

}  // namespace hypwalk
