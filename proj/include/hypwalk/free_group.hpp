#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hypwalk/model.hpp"

namespace hypwalk {

// Letters of F2 = <a, b>: a = 1, b = 2, a^-1 = -1, b^-1 = -2.
using Letter = std::int8_t;

/// Freely reduced word in F2. The empty word is the identity.
class FreeWord {
public:
    FreeWord() = default;

    // Reduces as it builds, so any letter sequence is accepted.
    explicit FreeWord(std::vector<Letter> letters) {
        for (Letter l : letters) push(l);
    }

    static FreeWord power(Letter l, std::size_t n) {
        FreeWord w;
        w.letters_.assign(n, l);
        return w;
    }

    const std::vector<Letter>& letters() const { return letters_; }
    std::size_t size() const { return letters_.size(); }
    bool empty() const { return letters_.empty(); }

    // Right-multiply by a single letter.
    void push(Letter l) {
        if (!letters_.empty() && letters_.back() == -l)
            letters_.pop_back();
        else
            letters_.push_back(l);
    }

    void append(const FreeWord& w) {
        for (Letter l : w.letters_) push(l);
    }

    FreeWord inverse() const {
        FreeWord r;
        r.letters_.reserve(letters_.size());
        for (auto it = letters_.rbegin(); it != letters_.rend(); ++it) r.letters_.push_back(-*it);
        return r;
    }

    // Common prefix length, which is the Gromov product based at 1 in the tree.
    std::size_t common_prefix(const FreeWord& other) const {
        auto [a, b] = std::mismatch(letters_.begin(), letters_.end(), other.letters_.begin(),
                                    other.letters_.end());
        return static_cast<std::size_t>(a - letters_.begin());
    }

    friend bool operator==(const FreeWord&, const FreeWord&) = default;
    friend auto operator<=>(const FreeWord&, const FreeWord&) = default;

private:
    std::vector<Letter> letters_;
};

inline FreeWord operator*(const FreeWord& g, const FreeWord& h) {
    FreeWord r = g;
    r.append(h);
    return r;
}

/// Cyclic reduction g = v s v^-1 with s cyclically reduced and v shortest.
struct CyclicReduction {
    FreeWord conjugator;
    FreeWord core;
};

inline CyclicReduction cyclic_reduction(const FreeWord& g) {
    const auto& l = g.letters();
    std::size_t i = 0, j = l.size();
    while (j - i >= 2 && l[i] == -l[j - 1]) {
        ++i;
        --j;
    }
    return {FreeWord(std::vector<Letter>(l.begin(), l.begin() + static_cast<std::ptrdiff_t>(i))),
            FreeWord(std::vector<Letter>(l.begin() + static_cast<std::ptrdiff_t>(i),
                                         l.begin() + static_cast<std::ptrdiff_t>(j)))};
}

/// F2 acting on its Cayley tree (the 4-regular tree), basepoint the identity vertex.
class FreeGroupModel {
public:
    using element_type = FreeWord;

    std::string_view name() const { return "free"; }
    SpaceDescriptor space() const { return {0.0, "1"}; }

    FreeWord identity() const { return {}; }
    FreeWord multiply(const FreeWord& g, const FreeWord& h) const { return g * h; }
    FreeWord invert(const FreeWord& g) const { return g.inverse(); }
    void right_multiply(FreeWord& acc, const FreeWord& s) const { acc.append(s); }

    double distance(const FreeWord& g, const FreeWord& h) const {
        const std::size_t p = g.common_prefix(h);
        return static_cast<double>(g.size() + h.size() - 2 * p);
    }
    double norm(const FreeWord& g) const { return static_cast<double>(g.size()); }

    std::vector<FreeWord> generators() const {
        return {FreeWord({1}), FreeWord({2}), FreeWord({-1}), FreeWord({-2})};
    }

    // In a tree the translation length is the cyclically reduced length.
    TranslationLength translation_length(const FreeWord& g, std::size_t horizon) const {
        if (horizon == 0) throw precondition_error("translation_length: horizon must be >= 1");
        return {static_cast<double>(cyclic_reduction(g).core.size()), true};
    }

    /// ([g], v) with g = v s v^-1, d(1, s) = [g] and v of minimal length.
    std::pair<double, FreeWord> conjugacy_min_length(const FreeWord& g) const {
        auto red = cyclic_reduction(g);
        return {static_cast<double>(red.core.size()), std::move(red.conjugator)};
    }

    bool loxodromic(const FreeWord& g) const { return !g.empty(); }

    // Two non-trivial elements of a free group have the same axis iff they commute.
    bool shares_fixed_points(const FreeWord& g, const FreeWord& h) const {
        return g * h == h * g;
    }

    std::string format(const FreeWord& g) const {
        if (g.empty()) return "1";
        std::string s;
        s.reserve(g.size());
        for (Letter l : g.letters()) s.push_back("BA?ab"[l + 2]);
        return s;
    }

    FreeWord parse(std::string_view text) const {
        if (text == "1" || text.empty()) return {};
        std::vector<Letter> letters;
        letters.reserve(text.size());
        for (char c : text) {
            switch (c) {
                case 'a': letters.push_back(1); break;
                case 'b': letters.push_back(2); break;
                case 'A': letters.push_back(-1); break;
                case 'B': letters.push_back(-2); break;
                default:
                    throw parse_error("free word: unexpected character '" + std::string(1, c) +
                                      "' in \"" + std::string(text) + "\" (allowed: a b A B, or 1)");
            }
        }
        return FreeWord(std::move(letters));
    }
};

}  // namespace hypwalk
