#include <gtest/gtest.h>

#include "hypwalk/farey.hpp"
#include "hypwalk/hypgeom.hpp"
#include "hypwalk/props.hpp"
#include "oracles.hpp"

using namespace hypwalk;

namespace {
const FareyModel M;
const FareyElement R(1, 1, 0, 1);
const FareyElement L(1, 0, 1, 1);
}  // namespace

TEST(Farey, ElementParseAndFormat) {
    EXPECT_EQ(M.parse("[[1,1],[0,1]]"), R);
    EXPECT_EQ(M.parse(" [ [1, 0] , [1, 1] ] "), L);
    EXPECT_EQ(M.format(R), "[[1,1],[0,1]]");
    EXPECT_THROW(M.parse("[[1,1],[1,1]]"), std::invalid_argument);
    EXPECT_THROW(M.parse("[[1,1],[0]]"), parse_error);
}

TEST(Farey, SlopeParseAndNormalise) {
    EXPECT_EQ(Slope::parse("2/5"), Slope(2, 5));
    EXPECT_EQ(Slope::parse("-2/-5"), Slope(2, 5));
    EXPECT_EQ(Slope::parse("3/0").str(), "1/0");
    EXPECT_EQ(Slope(-1, 0), Slope::infinity());
    EXPECT_THROW(Slope(2, 4), precondition_error);
    EXPECT_THROW(Slope::parse("x"), parse_error);
}

TEST(Farey, Multiply) {
    EXPECT_EQ(M.multiply(R, L), FareyElement(2, 1, 1, 1));
    EXPECT_EQ(M.multiply(R, M.invert(R)), M.identity());
}

TEST(Farey, Invert) {
    EXPECT_EQ(M.invert(FareyElement(2, 1, 1, 1)), FareyElement(1, -1, -1, 2));
    EXPECT_EQ(M.invert(M.identity()), M.identity());
}

TEST(Farey, ImproperMetricAtInfinity) {
    EXPECT_EQ(M.distance(M.identity(), L), 1.0);
    EXPECT_EQ(M.distance(M.identity(), R), 0.0);
    EXPECT_EQ(gromov_product(M, M.identity(), R, M.multiply(R, R)), 0.0);
}

TEST(Farey, SlopeDistanceExamples) {
    EXPECT_EQ(farey_slope_distance(Slope::infinity(), Slope(0, 1)), 1u);
    EXPECT_EQ(farey_slope_distance(Slope::infinity(), Slope(1, 1)), 1u);
    EXPECT_EQ(farey_slope_distance(Slope::infinity(), Slope(2, 5)), 3u);
    EXPECT_EQ(farey_slope_distance(Slope(2, 5), Slope(2, 5)), 0u);

    oracle::BoundedFareyGraph g(10, 2);
    EXPECT_EQ(g.distance_in(g.bfs(1, 0), 2, 5), 3);
}

TEST(Farey, DistanceFromInfinityMatchesBfsOracle) {
    oracle::BoundedFareyGraph g(24, 3);
    const auto dist = g.bfs(1, 0);
    for (const auto& [p, q] : g.vertices()) {
        if (q == 0 || std::labs(p) > 2 * q) continue;
        ASSERT_EQ(static_cast<int>(farey_slope_distance(Slope::infinity(), Slope(p, q))), g.distance_in(dist, p, q))
            << p << "/" << q;
    }
}

TEST(Farey, PairDistancesMatchBfsOracle) {
    oracle::BoundedFareyGraph g(24, 3);
    const std::vector<std::pair<long, long>> sources{{0, 1}, {1, 2}, {2, 5}, {-3, 7}, {5, 12}, {11, 19}};
    for (const auto& [sp, sq] : sources) {
        const auto dist = g.bfs(sp, sq);
        for (const auto& [p, q] : g.vertices()) {
            if (q != 0 && std::labs(p) > q) continue;
            ASSERT_EQ(static_cast<int>(farey_slope_distance(Slope(sp, sq), Slope(p, q))), g.distance_in(dist, p, q))
                << sp << "/" << sq << " -> " << p << "/" << q;
        }
    }
}

TEST(Farey, LargeEntriesDoNotOverflow) {
    FareyElement g;
    const FareyElement RL = M.multiply(R, L);
    for (int i = 0; i < 200; ++i) g = M.multiply(g, RL);
    EXPECT_EQ(g.determinant(), 1);
    EXPECT_EQ(M.norm(g), 200.0);
}

TEST(Farey, Classify) {
    EXPECT_EQ(farey_classify(FareyElement(2, 1, 1, 1)), FareyClass::pseudo_anosov);
    EXPECT_EQ(farey_classify(R), FareyClass::reducible_parabolic);
    EXPECT_EQ(farey_classify(FareyElement(0, -1, 1, 0)), FareyClass::periodic_elliptic);
    EXPECT_EQ(farey_classify(M.identity()), FareyClass::identity);
    EXPECT_EQ(farey_classify(FareyElement(-1, 0, 0, -1)), FareyClass::identity);
    EXPECT_EQ(farey_classify(FareyElement(-1, 1, 0, -1)), FareyClass::reducible_parabolic);
}

TEST(Farey, TranslationLength) {
    EXPECT_EQ(M.translation_length(R, 64).value, 0.0);
    EXPECT_TRUE(M.translation_length(R, 64).stabilized);

    // Reference: successive distances d(inf, g^m inf) from the BFS oracle.
    const FareyElement g(2, 1, 1, 1);
    oracle::BoundedFareyGraph graph(150, 3);
    const auto dist = graph.bfs(1, 0);
    FareyElement p;
    std::vector<int> d;
    for (int m = 1; m <= 6; ++m) {
        p = M.multiply(p, g);
        d.push_back(graph.distance_in(dist, static_cast<long>(p.a), static_cast<long>(p.c)));
    }
    const double oracle_tau = d[5] - d[4];
    ASSERT_EQ(d[4] - d[3], oracle_tau);
    const auto t = M.translation_length(g, 64);
    EXPECT_TRUE(t.stabilized);
    EXPECT_GT(t.value, 0.0);
    EXPECT_EQ(t.value, oracle_tau);
}

TEST(Farey, ElementaryAndLoxodromic) {
    EXPECT_FALSE(M.loxodromic(R));
    EXPECT_TRUE(M.loxodromic(FareyElement(2, 1, 1, 1)));
    const FareyElement a(2, 1, 1, 1), b(1, 1, 1, 2);
    EXPECT_TRUE(M.shares_fixed_points(a, M.multiply(a, a)));
    EXPECT_TRUE(M.shares_fixed_points(a, a.negated()));
    EXPECT_FALSE(M.shares_fixed_points(a, b));
}

TEST(Farey, ModelInvariants) {
    for (const auto& r : farey_model_suite(1000, 31)) {
        EXPECT_TRUE(r.passed()) << r.name << ": " << r.failures << " failures";
    }
}
