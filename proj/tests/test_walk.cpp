#include <gtest/gtest.h>

#include "hypwalk/farey.hpp"
#include "hypwalk/free_group.hpp"
#include "hypwalk/walk.hpp"

using namespace hypwalk;

namespace {
const FreeGroupModel F;
FreeWord w(const char* s) { return F.parse(s); }
StepDistribution<FreeWord> uniform_free() { return StepDistribution<FreeWord>::uniform(F.generators()); }
StepDistribution<FreeWord> only(const char* s) { return StepDistribution<FreeWord>({w(s)}, {1.0}); }

// A walk with prescribed steps.
WalkSample<FreeWord> scripted(const std::vector<const char*>& steps) {
    WalkSample<FreeWord> s;
    s.locations.push_back(F.identity());
    s.norms.push_back(0.0);
    for (const char* t : steps) {
        s.steps.push_back(w(t));
        s.locations.push_back(s.locations.back() * w(t));
        s.norms.push_back(F.norm(s.locations.back()));
    }
    return s;
}
}  // namespace

TEST(StepDistribution, Validation) {
    EXPECT_THROW(StepDistribution<FreeWord>({w("a"), w("b")}, {0.5, 0.499}), precondition_error);
    try {
        StepDistribution<FreeWord>({w("a"), w("b")}, {0.5, 0.499});
    } catch (const precondition_error& e) {
        EXPECT_STREQ(e.what(), "weights must sum to 1");
    }
    EXPECT_THROW(StepDistribution<FreeWord>({w("a"), w("b")}, {1.0, 0.0}), precondition_error);
    EXPECT_THROW(StepDistribution<FreeWord>({}, {}), precondition_error);
    EXPECT_THROW(StepDistribution<FreeWord>({w("a")}, {0.5, 0.5}), precondition_error);
    EXPECT_NO_THROW(StepDistribution<FreeWord>({w("a"), w("b"), w("A")}, {0.1, 0.2, 0.7}));
}

TEST(SampleWalk, DeterministicDistribution) {
    const auto s = sample_walk(F, only("a"), 5, 1);
    ASSERT_EQ(s.locations.size(), 6u);
    for (std::size_t i = 0; i <= 5; ++i) EXPECT_EQ(s.locations[i], FreeWord::power(1, i));
    const auto z = sample_walk(F, only("a"), 0, 1);
    ASSERT_EQ(z.locations.size(), 1u);
    EXPECT_EQ(z.locations[0], F.identity());
}

TEST(SampleWalk, TreeSpeedIsOneHalf) {
    const auto s = sample_walk(F, uniform_free(), 10000, 12345);
    EXPECT_NEAR(s.norms.back() / 10000.0, 0.5, 0.05);
}

TEST(SampleWalk, Reproducible) {
    const auto a = sample_walk(F, uniform_free(), 500, 9, 3);
    const auto b = sample_walk(F, uniform_free(), 500, 9, 3);
    const auto c = sample_walk(F, uniform_free(), 500, 9, 4);
    EXPECT_EQ(a.locations, b.locations);
    EXPECT_EQ(a.norms, b.norms);
    EXPECT_NE(a.steps, c.steps);
}

TEST(SampleWalk, TriangleBoundOnEveryStep) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto s = sample_walk(F, uniform_free(), 200, seed);
        for (std::size_t i = 0; i + 1 < s.locations.size(); ++i)
            ASSERT_LE(s.norms[i + 1], s.norms[i] + F.distance(s.locations[i], s.locations[i + 1]));
    }
}

TEST(Reflected, InvertsSupportKeepsWeights) {
    const StepDistribution<FreeWord> d({w("a"), w("b")}, {0.7, 0.3});
    const auto r = reflected(F, d);
    EXPECT_EQ(r.support(), (std::vector<FreeWord>{w("A"), w("B")}));
    EXPECT_EQ(r.weights(), d.weights());
    const auto rr = reflected(F, r);
    EXPECT_EQ(rr.support(), d.support());
    EXPECT_EQ(rr.weights(), d.weights());

    auto sym = reflected(F, uniform_free()).support();
    auto orig = uniform_free().support();
    std::sort(sym.begin(), sym.end());
    std::sort(orig.begin(), orig.end());
    EXPECT_EQ(sym, orig);
}

TEST(IteratedDecomposition, ForcedByDefinitions) {
    const auto d = iterated_decomposition(F, scripted({"a", "A"}), 1);
    EXPECT_EQ(d.Y, (std::vector<double>{1, 1}));
    EXPECT_EQ(d.X, (std::vector<double>{1, -1}));
    EXPECT_EQ(d.Z, (std::vector<double>{0, 2}));
    EXPECT_THROW(iterated_decomposition(F, scripted({"a"}), 0), precondition_error);
}

TEST(IteratedDecomposition, GeodesicRayHasNoBacktracking) {
    const auto s = sample_walk(F, only("a"), 40, 1);
    for (std::size_t k : {1u, 3u, 5u}) {
        const auto d = iterated_decomposition(F, s, k);
        for (std::size_t i = 0; i < d.Z.size(); ++i) {
            EXPECT_EQ(d.Z[i], 0.0);
            EXPECT_EQ(d.X[i], static_cast<double>(k));
            EXPECT_EQ(d.Y[i], static_cast<double>(k));
        }
    }
}

TEST(IteratedDecomposition, TelescopesAndZIsNonNegative) {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const auto s = sample_walk(F, uniform_free(), 300, seed);
        for (std::size_t k : {1u, 5u, 10u, 20u}) {
            const auto d = iterated_decomposition(F, s, k);
            double sum = 0.0;
            for (std::size_t i = 0; i < d.X.size(); ++i) {
                sum += d.X[i];
                ASSERT_GE(d.Z[i], 0.0);
                ASSERT_EQ(d.Y[i], d.X[i] + d.Z[i]);
            }
            ASSERT_EQ(sum, s.norms[(300 / k) * k]);
        }
    }
}

TEST(MidpointEvent, Examples) {
    EXPECT_TRUE(midpoint_shadow_event(F, sample_walk(F, only("a"), 20, 1)));
    EXPECT_FALSE(midpoint_shadow_event(F, scripted({"a", "A"})));
    EXPECT_THROW(midpoint_shadow_event(F, scripted({"a"})), precondition_error);
}

TEST(MidpointEvent, MostlyHoldsForLongWalks) {
    std::size_t hits = 0;
    for (std::uint64_t i = 0; i < 10000; ++i) hits += midpoint_shadow_event(F, sample_walk(F, uniform_free(), 200, 77, i));
    EXPECT_GE(hits, 9900u);
}

TEST(DiagonalEvent, Examples) {
    const auto v = sample_walk(F, uniform_free(), 10, 1, 0);
    const auto u = sample_walk(F, uniform_free(), 10, 1, 1);
    EXPECT_TRUE(diagonal_shadow_event(F, v, u, 0.0));
    EXPECT_TRUE(diagonal_shadow_event(F, v, u, -3.0));
    const auto ray = sample_walk(F, only("a"), 12, 1);
    EXPECT_TRUE(diagonal_shadow_event(F, ray, ray, 12.0));
    EXPECT_FALSE(diagonal_shadow_event(F, ray, ray, 13.0));
    EXPECT_THROW(diagonal_shadow_event(F, ray, v, 1.0), precondition_error);
}

TEST(NonElementary, FreeGroup) {
    const auto ok = check_non_elementary(F, uniform_free());
    EXPECT_TRUE(ok.non_elementary);
    ASSERT_TRUE(ok.witnesses.has_value());
    EXPECT_FALSE(F.shares_fixed_points(ok.witnesses->first, ok.witnesses->second));

    const auto cyclic = check_non_elementary(F, StepDistribution<FreeWord>({w("a"), w("A")}, {0.5, 0.5}));
    EXPECT_FALSE(cyclic.non_elementary);
    EXPECT_FALSE(cyclic.diagnostic.empty());
}

TEST(NonElementary, Farey) {
    const FareyModel M;
    EXPECT_TRUE(check_non_elementary(M, StepDistribution<FareyElement>::uniform(M.generators())).non_elementary);
    const auto parabolic = check_non_elementary(M, StepDistribution<FareyElement>({FareyElement(1, 1, 0, 1)}, {1.0}));
    EXPECT_FALSE(parabolic.non_elementary);
    EXPECT_NE(parabolic.diagnostic.find("no loxodromic"), std::string::npos);
}

TEST(WalkDump, RowsPerStep) {
    std::string csv;
    append_walk_rows(F, scripted({"a", "b", "B"}), 4, csv);
    EXPECT_EQ(csv, "4,1,a,1\n4,2,b,2\n4,3,B,1\n");
}
