#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <limits>
#include <queue>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "hypwalk/model.hpp"

namespace hypwalk {

using BigInt = boost::multiprecision::cpp_int;

namespace detail {

// Floor division for signed big integers (cpp_int truncates toward zero).
inline BigInt floor_div(const BigInt& p, const BigInt& q) {
    BigInt quot, rem;
    boost::multiprecision::divide_qr(p, q, quot, rem);
    if (rem != 0 && ((rem < 0) != (q < 0))) --quot;
    return quot;
}

// Returns (x, y) with p x + q y = gcd(p, q).
inline std::pair<BigInt, BigInt> extended_gcd(BigInt p, BigInt q) {
    BigInt x0 = 1, y0 = 0, x1 = 0, y1 = 1;
    while (q != 0) {
        BigInt t = floor_div(p, q);
        BigInt r = p - t * q;
        p = std::move(q);
        q = std::move(r);
        BigInt x2 = x0 - t * x1;
        BigInt y2 = y0 - t * y1;
        x0 = std::move(x1);
        y0 = std::move(y1);
        x1 = std::move(x2);
        y1 = std::move(y2);
    }
    if (p < 0) {
        x0 = -x0;
        y0 = -y0;
    }
    return {x0, y0};
}

}  // namespace detail

/// Rational slope p/q in lowest terms with q >= 0; 1/0 is the slope at infinity.
class Slope {
public:
    Slope() : p_(1), q_(0) {}

    Slope(BigInt p, BigInt q) : p_(std::move(p)), q_(std::move(q)) {
        if (q_ < 0) {
            p_ = -p_;
            q_ = -q_;
        }
        if (q_ == 0) {
            if (p_ == 0) throw precondition_error("slope 0/0 is undefined");
            p_ = 1;
            return;
        }
        if (boost::multiprecision::gcd(p_, q_) != 1)
            throw precondition_error("slope must be in lowest terms: " + p_.str() + "/" + q_.str());
    }

    static Slope infinity() { return {}; }

    // Reduces instead of rejecting.
    static Slope reduced(BigInt p, BigInt q) {
        if (q == 0) return infinity();
        BigInt g = boost::multiprecision::gcd(p, q);
        return Slope(p / g, q / g);
    }

    const BigInt& p() const { return p_; }
    const BigInt& q() const { return q_; }
    bool is_infinity() const { return q_ == 0; }

    std::string str() const { return p_.str() + "/" + q_.str(); }

    static Slope parse(std::string_view text) {
        auto slash = text.find('/');
        if (slash == std::string_view::npos) throw parse_error("slope: expected p/q, got \"" + std::string(text) + "\"");
        try {
            return Slope(BigInt(std::string(text.substr(0, slash))),
                         BigInt(std::string(text.substr(slash + 1))));
        } catch (const std::runtime_error&) {
            throw parse_error("slope: bad integer in \"" + std::string(text) + "\"");
        }
    }

    friend bool operator==(const Slope&, const Slope&) = default;

private:
    BigInt p_, q_;
};

// Farey distance from 1/0 to p/q, q > 0, gcd 1.
//
// Every geodesic from infinity to x stays inside the ladder of Farey
// triangles crossed by the hyperbolic geodesic from infinity to x. The
// ladder is a chain of fans: fan k has pivot c_k (the k-th convergent) and
// a rim path c_{k-1}, c_{k-1} + c_k, ..., c_{k+1} of a_{k+1} edges. Interior
// rim vertices only matter through their endpoints, so each fan keeps its
// first and last rim vertex and the rest becomes one edge of weight
// min(a - 2, 2). Shortest path on that compressed strip is exact.
inline std::size_t farey_distance_from_infinity(const BigInt& p, const BigInt& q) {
    if (q == 0) return 0;
    if (q == 1) return 1;

    std::vector<BigInt> quotients;
    {
        BigInt num = p, den = q;
        while (den != 0) {
            BigInt a = detail::floor_div(num, den);
            BigInt r = num - a * den;
            quotients.push_back(std::move(a));
            num = std::move(den);
            den = std::move(r);
        }
    }
    const std::size_t m = quotients.size() - 1;  // x = [a0; a1, ..., am]

    // Node i + 1 is convergent c_i for i = -1..m; fan rim nodes follow.
    struct Edge {
        std::size_t to;
        unsigned weight;
    };
    const std::size_t convergents = m + 2;
    std::vector<std::vector<Edge>> adj(convergents);
    auto link = [&adj](std::size_t u, std::size_t v, unsigned w) {
        adj[u].push_back({v, w});
        adj[v].push_back({u, w});
    };
    auto add_node = [&adj]() {
        adj.emplace_back();
        return adj.size() - 1;
    };

    for (std::size_t i = 0; i + 1 < convergents; ++i) link(i, i + 1, 1);

    for (std::size_t k = 0; k < m; ++k) {
        const std::size_t prev = k, pivot = k + 1, next = k + 2;
        const BigInt& a = quotients[k + 1];
        if (a == 1) {
            link(prev, next, 1);
            continue;
        }
        const std::size_t first = add_node();
        link(prev, first, 1);
        link(pivot, first, 1);
        std::size_t last = first;
        if (a > 2) {
            last = add_node();
            link(pivot, last, 1);
            link(first, last, a == 3 ? 1u : 2u);
        }
        link(last, next, 1);
    }

    const std::size_t target = convergents - 1;
    constexpr std::size_t inf = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> dist(adj.size(), inf);
    using Item = std::pair<std::size_t, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    dist[0] = 0;
    pq.push({0, 0});
    while (!pq.empty()) {
        auto [d, u] = pq.top();
        pq.pop();
        if (d != dist[u]) continue;
        if (u == target) return d;
        for (const Edge& e : adj[u]) {
            if (d + e.weight < dist[e.to]) {
                dist[e.to] = d + e.weight;
                pq.push({dist[e.to], e.to});
            }
        }
    }
    return dist[target];
}

/// Graph distance between two slopes in the Farey graph.
inline std::size_t farey_slope_distance(const Slope& u, const Slope& v) {
    if (u == v) return 0;
    if (u.is_infinity()) return farey_distance_from_infinity(v.p(), v.q());
    // M = [[s, -r], [-q, p]] with p s - q r = 1 sends u = p/q to infinity.
    auto [x, y] = detail::extended_gcd(u.p(), u.q());
    const BigInt& s = x;
    const BigInt r = -y;
    BigInt num = s * v.p() - r * v.q();
    BigInt den = -u.q() * v.p() + u.p() * v.q();
    if (den < 0) {
        num = -num;
        den = -den;
    }
    return farey_distance_from_infinity(num, den);
}

enum class FareyClass { pseudo_anosov, reducible_parabolic, periodic_elliptic, identity };

inline std::string_view to_string(FareyClass c) {
    switch (c) {
        case FareyClass::pseudo_anosov: return "pseudo_anosov";
        case FareyClass::reducible_parabolic: return "reducible_parabolic";
        case FareyClass::periodic_elliptic: return "periodic_elliptic";
        case FareyClass::identity: return "identity";
    }
    return "?";
}

/// Element of SL(2, Z) as [[a, b], [c, d]], ad - bc = 1.
struct FareyElement {
    BigInt a = 1, b = 0, c = 0, d = 1;

    FareyElement() = default;
    FareyElement(BigInt a_, BigInt b_, BigInt c_, BigInt d_)
        : a(std::move(a_)), b(std::move(b_)), c(std::move(c_)), d(std::move(d_)) {
        if (a * d - b * c != 1) throw precondition_error("Farey element must have determinant 1");
    }

    BigInt trace() const { return a + d; }
    BigInt determinant() const { return a * d - b * c; }
    bool is_plus_minus_identity() const { return b == 0 && c == 0 && (a == d) && (a == 1 || a == -1); }

    FareyElement inverse() const { return unchecked(d, -b, -c, a); }

    FareyElement negated() const { return unchecked(-a, -b, -c, -d); }

    // g . infinity = a/c.
    Slope image_of_infinity() const { return Slope(a, c); }

    friend bool operator==(const FareyElement&, const FareyElement&) = default;

    static FareyElement unchecked(BigInt a_, BigInt b_, BigInt c_, BigInt d_) {
        FareyElement m;
        m.a = std::move(a_);
        m.b = std::move(b_);
        m.c = std::move(c_);
        m.d = std::move(d_);
        return m;
    }
};

inline FareyElement operator*(const FareyElement& g, const FareyElement& h) {
    return FareyElement::unchecked(g.a * h.a + g.b * h.c, g.a * h.b + g.b * h.d,
                                   g.c * h.a + g.d * h.c, g.c * h.b + g.d * h.d);
}

inline FareyClass farey_classify(const FareyElement& m) {
    if (m.is_plus_minus_identity()) return FareyClass::identity;
    BigInt t = boost::multiprecision::abs(m.trace());
    if (t > 2) return FareyClass::pseudo_anosov;
    if (t == 2) return FareyClass::reducible_parabolic;
    return FareyClass::periodic_elliptic;
}

/// SL(2, Z) acting on the Farey graph (curve complex of the once-punctured
/// torus) with basepoint x0 = 1/0. The orbit metric is improper: the
/// stabiliser of infinity is {+-R^k}.
class FareyModel {
public:
    using element_type = FareyElement;

    FareyModel() = default;
    explicit FareyModel(double delta) : delta_(delta) {}

    static FareyElement R() { return FareyElement::unchecked(1, 1, 0, 1); }
    static FareyElement L() { return FareyElement::unchecked(1, 0, 1, 1); }

    std::string_view name() const { return "farey"; }
    SpaceDescriptor space() const { return {delta_, "1/0"}; }

    FareyElement identity() const { return {}; }
    FareyElement multiply(const FareyElement& g, const FareyElement& h) const { return g * h; }
    FareyElement invert(const FareyElement& g) const { return g.inverse(); }
    void right_multiply(FareyElement& acc, const FareyElement& s) const { acc = acc * s; }

    double distance(const FareyElement& g, const FareyElement& h) const {
        // First column of g^-1 h is (g^-1 h) . infinity.
        BigInt num = g.d * h.a - g.b * h.c;
        BigInt den = -g.c * h.a + g.a * h.c;
        if (den < 0) {
            num = -num;
            den = -den;
        }
        return static_cast<double>(farey_distance_from_infinity(num, den));
    }

    double norm(const FareyElement& g) const {
        if (g.c < 0) return static_cast<double>(farey_distance_from_infinity(-g.a, -g.c));
        return static_cast<double>(farey_distance_from_infinity(g.a, g.c));
    }

    std::vector<FareyElement> generators() const { return {R(), L(), R().inverse(), L().inverse()}; }

    // Stabilised increment of d(1, g^m), else d(1, g^horizon) / horizon.
    TranslationLength translation_length(const FareyElement& g, std::size_t horizon) const {
        if (horizon == 0) throw precondition_error("translation_length: horizon must be >= 1");
        std::vector<double> norms;
        norms.reserve(horizon + 1);
        FareyElement power;
        norms.push_back(0.0);
        for (std::size_t m = 1; m <= horizon; ++m) {
            power = power * g;
            norms.push_back(norm(power));
        }
        const std::size_t window = std::max<std::size_t>(8, horizon / 4);
        if (window < horizon) {
            const double step = norms[horizon] - norms[horizon - 1];
            bool constant = true;
            for (std::size_t m = horizon - window + 1; m <= horizon && constant; ++m)
                constant = (norms[m] - norms[m - 1]) == step;
            if (constant) return {step, true};
        }
        return {norms[horizon] / static_cast<double>(horizon), false};
    }

    bool loxodromic(const FareyElement& g) const {
        return farey_classify(g) == FareyClass::pseudo_anosov;
    }

    // Hyperbolic elements of SL(2, R) share their fixed points iff they commute up to sign.
    bool shares_fixed_points(const FareyElement& g, const FareyElement& h) const {
        FareyElement gh = g * h, hg = h * g;
        return gh == hg || gh == hg.negated();
    }

    std::string format(const FareyElement& g) const {
        return "[[" + g.a.str() + "," + g.b.str() + "],[" + g.c.str() + "," + g.d.str() + "]]";
    }

    FareyElement parse(std::string_view text) const {
        std::string compact;
        for (char ch : text)
            if (!std::isspace(static_cast<unsigned char>(ch))) compact.push_back(ch);
        auto fail = [&text](const std::string& why) {
            return parse_error("farey element \"" + std::string(text) + "\": " + why);
        };
        if (compact.size() < 13 || compact.rfind("[[", 0) != 0 ||
            compact.substr(compact.size() - 2) != "]]")
            throw fail("expected [[a,b],[c,d]]");
        std::string body = compact.substr(2, compact.size() - 4);
        auto mid = body.find("],[");
        if (mid == std::string::npos) throw fail("expected [[a,b],[c,d]]");
        auto split_pair = [&](const std::string& s) {
            auto comma = s.find(',');
            if (comma == std::string::npos || s.find(',', comma + 1) != std::string::npos)
                throw fail("expected two entries per row");
            return std::pair{s.substr(0, comma), s.substr(comma + 1)};
        };
        auto [sa, sb] = split_pair(body.substr(0, mid));
        auto [sc, sd] = split_pair(body.substr(mid + 3));
        auto to_int = [&](const std::string& s) {
            if (s.empty()) throw fail("empty entry");
            std::size_t start = (s[0] == '-' || s[0] == '+') ? 1 : 0;
            if (start == s.size()) throw fail("bad integer '" + s + "'");
            for (std::size_t i = start; i < s.size(); ++i)
                if (!std::isdigit(static_cast<unsigned char>(s[i]))) throw fail("bad integer '" + s + "'");
            return BigInt(s[0] == '+' ? s.substr(1) : s);
        };
        FareyElement m = FareyElement::unchecked(to_int(sa), to_int(sb), to_int(sc), to_int(sd));
        if (m.determinant() != 1) throw fail("determinant must be 1");
        return m;
    }

private:
    double delta_ = 1.0;
};

}  // namespace hypwalk
