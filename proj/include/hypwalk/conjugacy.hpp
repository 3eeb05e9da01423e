#pragma once

#include <algorithm>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "hypwalk/free_group.hpp"
#include "hypwalk/hypgeom.hpp"

namespace hypwalk {

struct ConjugacyConditions {
    bool c1 = false;  // d(1, v) >= d(1, g) / 2 - K9
    bool c2 = false;  // g in S_1(v, d(1, v) - K9)
    bool c3 = false;  // 1 in S_g(g v, d(1, v) - K9)

    bool all() const { return c1 && c2 && c3; }
};

/// Shadow conditions satisfied by a conjugator v of g = v s v^-1.
template <GroupModel M, class E = typename M::element_type>
ConjugacyConditions check_conjugacy_shadow_conditions(const M& model, const E& g, const E& v,
                                                      const E& s, double K9) {
    if (!(model.multiply(model.multiply(v, s), model.invert(v)) == g))
        throw precondition_error("check_conjugacy_shadow_conditions: g != v s v^-1");
    const E one = model.identity();
    const double dv = model.norm(v);
    ConjugacyConditions out;
    out.c1 = dv >= 0.5 * model.norm(g) - K9;
    out.c2 = in_shadow(model, Shadow<E>{one, v, dv - K9}, g);
    out.c3 = in_shadow(model, Shadow<E>{g, model.multiply(g, v), dv - K9}, one);
    return out;
}

/// Upper bound on [g] from the cyclic rotations of a word for g:
/// min over prefixes p of d(1, p^-1 g p), with the minimising prefix.
template <GroupModel M, class E = typename M::element_type>
std::pair<double, E> conjugacy_length_bound(const M& model, std::span<const E> word) {
    E g = model.identity();
    for (const E& s : word) model.right_multiply(g, s);
    double best = model.norm(g);
    E best_conj = model.identity();
    E prefix = model.identity();
    for (std::size_t i = 0; i + 1 < word.size(); ++i) {
        model.right_multiply(prefix, word[i]);
        const E conj = model.multiply(model.multiply(model.invert(prefix), g), prefix);
        const double len = model.norm(conj);
        if (len < best) {
            best = len;
            best_conj = prefix;
        }
    }
    return {best, best_conj};
}

/// Vertices of the path spelled by v, then s, then v^-1, one letter at a time.
inline std::vector<FreeWord> conjugate_path(const FreeWord& v, const FreeWord& s) {
    std::vector<FreeWord> path{FreeWord{}};
    FreeWord at;
    for (const FreeWord* part : {&v, &s}) {
        for (Letter l : part->letters()) {
            at.push(l);
            path.push_back(at);
        }
    }
    const FreeWord back = v.inverse();
    for (Letter l : back.letters()) {
        at.push(l);
        path.push_back(at);
    }
    return path;
}

}  // namespace hypwalk
