#include <gtest/gtest.h>

#include "hypwalk/farey.hpp"
#include "hypwalk/free_group.hpp"
#include "hypwalk/hypgeom.hpp"
#include "hypwalk/props.hpp"
#include "oracles.hpp"

using namespace hypwalk;

namespace {
const FreeGroupModel F;
const FreeWord one;
FreeWord w(const char* s) { return F.parse(s); }
FreeWord a(std::size_t n) { return FreeWord::power(1, n); }
}  // namespace

TEST(GromovProduct, TreeExamples) {
    EXPECT_EQ(gromov_product(F, one, w("aab"), w("aaba")), 3.0);
    EXPECT_EQ(gromov_product(F, one, w("aab"), w("aab")), 3.0);
    EXPECT_DOUBLE_EQ(gromov_product(F, w("b"), w("aab"), w("aaB")),
                     oracle::tree_gromov_product("b", "aab", "aaB"));
}

TEST(Shadow, Membership) {
    EXPECT_TRUE(in_shadow(F, Shadow<FreeWord>{one, a(5), 3}, w("aaab")));
    EXPECT_FALSE(in_shadow(F, Shadow<FreeWord>{one, a(5), 3}, w("bbbb")));
    EXPECT_TRUE(in_shadow(F, Shadow<FreeWord>{w("ab"), w("B"), -1}, w("AAAA")));
    // Closed at the boundary: product exactly r is a member.
    EXPECT_TRUE(in_shadow(F, Shadow<FreeWord>{one, a(5), 3}, a(3)));
}

TEST(Shadow, ProductBound) {
    EXPECT_TRUE(shadow_product_bound_check(F, Shadow<FreeWord>{one, a(5), 3}, w("aaab"), a(4)));
    EXPECT_TRUE(shadow_product_bound_check(F, Shadow<FreeWord>{one, a(5), 0}, w("b"), w("B")));
    EXPECT_THROW(shadow_product_bound_check(F, Shadow<FreeWord>{one, a(5), 3}, w("b"), a(4)), precondition_error);
}

TEST(Shadow, MetricNest) {
    const std::vector<FreeWord> T{a(6)};
    const std::span<const FreeWord> t(T);
    // a^3 b is two steps from a^4, which lies in S_1(a^6, 4).
    EXPECT_EQ(F.distance(a(4), w("aaab")), 2.0);
    EXPECT_TRUE(verify_metric_nest(F, t, 4, 2, a(4), w("aaab")));
    EXPECT_TRUE(verify_metric_nest(F, t, 4, 1, a(4), w("aaaab")));
    // D = 0 is plain membership.
    EXPECT_TRUE(verify_metric_nest(F, t, 4, 0, a(5), a(5)));
    EXPECT_THROW(verify_metric_nest(F, t, 4, 1, a(4), w("aaab")), precondition_error);
}

TEST(Shadow, NestedSeparation) {
    EXPECT_TRUE(verify_nested_shadow_separation(F, one, a(10), 6, 2, a(7), a(3), 0.0));
    EXPECT_EQ(F.distance(a(7), a(3)), 4.0);
    // A = 0: any admissible pair is at distance >= 0.
    EXPECT_TRUE(verify_nested_shadow_separation(F, one, a(10), 6, 0, a(7), w("b"), 0.0));
    EXPECT_THROW(verify_nested_shadow_separation(F, one, a(4), 6, 2, a(7), a(3), 0.0), precondition_error);
}

TEST(Shadow, BasepointChange) {
    EXPECT_TRUE(verify_basepoint_change(F, a(10), a(2), one, 8, a(9), 0.0, 0.0));
    // y = z: the new radius is r - K4.
    EXPECT_TRUE(verify_basepoint_change(F, a(10), one, one, 8, a(9), 0.0, 0.0));
    EXPECT_THROW(verify_basepoint_change(F, a(10), a(9), one, 8, a(9), 0.0, 0.0), precondition_error);
}

TEST(Shadow, Complement) {
    // a^3 is outside S_1(a^10, 4) and inside S_{a^10}(1, 6): (1 . a^3)_{a^10} = 7.
    EXPECT_DOUBLE_EQ(oracle::tree_gromov_product("aaaaaaaaaa", "", "aaa"), 7.0);
    EXPECT_TRUE(verify_shadow_complement(F, a(10), one, 4, a(3), 0.0));
    // A probe exactly r along the geodesic lies in both closed shadows, so
    // K5 = 0 flags it and any positive K5 accepts it.
    EXPECT_FALSE(verify_shadow_complement(F, a(10), one, 4, a(4), 0.0));
    EXPECT_TRUE(verify_shadow_complement(F, a(10), one, 4, a(4), 0.5));
    EXPECT_THROW(verify_shadow_complement(F, a(3), one, 4, a(3), 0.0), precondition_error);
}

TEST(Shadow, Composition) {
    const std::vector<FreeWord> T{a(8)};
    const std::span<const FreeWord> t(T);
    EXPECT_TRUE(shadow_composition_check(F, t, 5, 3, a(6), w("aaab")));
    EXPECT_TRUE(shadow_composition_check(F, t, 5, -1, a(6), w("B")));
}

TEST(QuasiGeodesic, Examples) {
    std::vector<FreeWord> ray;
    for (std::size_t i = 0; i <= 5; ++i) ray.push_back(a(i));
    EXPECT_TRUE(quasigeodesic_check(F, std::span<const FreeWord>(ray), {1.0, 0.0}));
    const std::vector<FreeWord> back{one, a(1), one, a(1), one};
    EXPECT_FALSE(quasigeodesic_check(F, std::span<const FreeWord>(back), {1.0, 0.0}));
    EXPECT_THROW(quasigeodesic_check(F, std::span<const FreeWord>(ray), {0.5, 0.0}), precondition_error);
}

TEST(EstimateDelta, TreeIsZero) {
    EXPECT_EQ(estimate_delta(F, 2000, 12, 1), 0.0);
    EXPECT_EQ(estimate_delta(F, 1, 12, 1), 0.0);
    EXPECT_THROW(estimate_delta(F, 0, 12, 1), precondition_error);
}

TEST(EstimateDelta, FareyIsSmallAndStable) {
    const FareyModel M;
    const double d1 = estimate_delta(M, 10000, 8, 3);
    const double d2 = estimate_delta(M, 20000, 8, 3);
    EXPECT_GT(d1, 0.0);
    EXPECT_LE(d1, 2.0 * M.space().delta);
    EXPECT_EQ(d1, d2);
    EXPECT_EQ(estimate_delta(M, 1, 8, 3), 0.0);
}

TEST(Calibration, PicksSmallestCleanCandidate) {
    const auto grid = constant_grid(2.0);
    EXPECT_EQ(grid.size(), 5u);
    const auto c = calibrate_constant(std::span<const double>(grid), 100, 1,
                                      [](double K, StreamRng& rng) -> std::optional<bool> {
                                          const double x = rng.uniform();
                                          if (x < 0.1) return std::nullopt;
                                          return x < 0.5 + K;
                                      });
    ASSERT_TRUE(c.constant.has_value());
    EXPECT_EQ(*c.constant, 0.5);
    EXPECT_GT(c.counterexamples_below, 0u);
}

template <class M>
void expect_suites_pass(const M& model, std::size_t radius) {
    for (const auto& r : metric_suite(model, 2000, radius, 5)) EXPECT_TRUE(r.passed()) << r.name;
    for (const auto& r : delta_shadow_suite(model, 2000, radius, 6)) EXPECT_TRUE(r.passed()) << r.name;
    auto [k, cal] = calibrate_shadow_constants(model, 20000, radius, 7);
    for (const auto& r : cal) EXPECT_TRUE(r.passed()) << r.name;
    for (const auto& r : shadow_lemma_suite(model, k, 5000, radius, 8)) EXPECT_TRUE(r.passed()) << r.name;
}

TEST(PropertySuites, FreeGroup) {
    expect_suites_pass(F, 20);
    auto [k, cal] = calibrate_shadow_constants(F, 20000, 20, 7);
    EXPECT_EQ(k.K2, 0.0);
    EXPECT_LE(k.K5, 0.5);
}

TEST(PropertySuites, Farey) { expect_suites_pass(FareyModel{}, 12); }
