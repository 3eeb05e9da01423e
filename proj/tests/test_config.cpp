#include <gtest/gtest.h>

#include <algorithm>

#include "hypwalk/config.hpp"

using namespace hypwalk;

namespace {
bool has_error(const ConfigResult& r, std::string_view prefix, std::string_view needle) {
    return std::any_of(r.errors.begin(), r.errors.end(), [&](const std::string& e) {
        return e.starts_with(prefix) && e.find(needle) != std::string::npos;
    });
}

const char* drift_cfg = R"({
  "model": "free",
  "distribution": [{"element": "a", "weight": 0.25}, {"element": "A", "weight": 0.25},
                   {"element": "b", "weight": 0.25}, {"element": "B", "weight": 0.25}],
  "seed": 42, "samples": 100, "n_grid": [10, 20], "output_path": "out/x"
})";
}  // namespace

TEST(Config, AcceptsValidConfig) {
    const auto r = validate_config(drift_cfg, "drift");
    ASSERT_TRUE(r.ok()) << r.errors.front();
    EXPECT_EQ(r.config->model, "free");
    EXPECT_EQ(r.config->seed, 42u);
    EXPECT_EQ(r.config->n_grid, (std::vector<std::size_t>{10, 20}));
    EXPECT_EQ(r.config->distribution.size(), 4u);
}

TEST(Config, ReportsEveryViolation) {
    const auto r = validate_config(R"({
      "model": "hyperbolic",
      "distribution": [{"element": "a", "weight": 0.5}, {"element": "b", "weight": 0.499}],
      "seed": 1, "samples": 100, "n_grid": [], "output_path": "o", "colour": 3
    })", "drift");
    EXPECT_FALSE(r.ok());
    EXPECT_TRUE(has_error(r, "model", "expected one of {free, farey}"));
    EXPECT_TRUE(has_error(r, "distribution", "weights must sum to 1"));
    EXPECT_TRUE(has_error(r, "n_grid", ""));
    EXPECT_TRUE(has_error(r, "colour", "unknown field"));
    EXPECT_GE(r.errors.size(), 4u);
}

TEST(Config, GridsMustBeStrictlyAscending) {
    const auto r = validate_config(R"({"model": "free", "distribution": [{"element": "a", "weight": 1}],
      "seed": 1, "samples": 1, "n_grid": [10, 10], "output_path": "o"})", "drift");
    EXPECT_TRUE(has_error(r, "n_grid", ""));
    const auto r2 = validate_config(R"({"model": "free", "distribution": [{"element": "a", "weight": 1}],
      "seed": 1, "samples": 1, "n_grid": [20, 10], "output_path": "o"})", "drift");
    EXPECT_TRUE(has_error(r2, "n_grid", ""));
}

TEST(Config, WeightsPositiveAndElementsParse) {
    const auto r = validate_config(R"({"model": "free",
      "distribution": [{"element": "a", "weight": 1.5}, {"element": "xq", "weight": -0.5}],
      "seed": 1, "samples": 1, "n_grid": [1], "output_path": "o"})", "drift");
    EXPECT_TRUE(has_error(r, "distribution[1]", "weight must be positive"));
    EXPECT_TRUE(has_error(r, "distribution[1]", "malformed element"));
}

TEST(Config, MalformedJson) {
    const auto r = validate_config("{\"model\": ", "drift");
    ASSERT_EQ(r.errors.size(), 1u);
    EXPECT_TRUE(has_error(r, "config", "malformed JSON"));
}

TEST(Config, SubcommandRequirements) {
    EXPECT_TRUE(has_error(validate_config(drift_cfg, "linear-progress"), "L", "required"));
    EXPECT_TRUE(has_error(validate_config(drift_cfg, "translation-decay"), "B", "required"));
    EXPECT_TRUE(has_error(validate_config(drift_cfg, "shadow-decay"), "center", "required"));
    EXPECT_TRUE(has_error(validate_config(drift_cfg, "backtrack"), "k", "required"));
    EXPECT_TRUE(has_error(validate_config(drift_cfg, "backtrack"), "n_grid", "single"));
    EXPECT_TRUE(has_error(validate_config(drift_cfg, "bernstein"), "epsilon", "required"));
    EXPECT_TRUE(has_error(validate_config(drift_cfg, "chernoff"), "t_grid", "required"));
    EXPECT_TRUE(has_error(validate_config(drift_cfg, "frobnicate"), "subcommand", "unknown"));
    EXPECT_TRUE(validate_config(R"({"model": "free", "seed": 1, "samples": 5, "output_path": "o"})", "props").ok());
    EXPECT_TRUE(has_error(validate_config(R"({"model": "free", "distribution": [{"element": "a", "weight": 1}],
      "seed": 1, "samples": 1, "n_grid": [3], "output_path": "o"})", "midpoint"), "n_grid", "even"));
}

TEST(Config, CanonicalElements) {
    EXPECT_EQ(canonical_element("free", "aAb"), "b");
    EXPECT_EQ(canonical_element("free", "1"), "1");
    EXPECT_THROW(canonical_element("free", "c"), std::invalid_argument);
    EXPECT_EQ(canonical_element("farey", "[[ 1, +1 ], [0, 1]]"), "[[1,1],[0,1]]");
    EXPECT_THROW(canonical_element("farey", "[[2,0],[0,1]]"), std::invalid_argument);
}

TEST(Config, DigestIgnoresLayoutAndKeyOrder) {
    const auto a = validate_config(drift_cfg, "drift");
    const auto b = validate_config(R"({"output_path":"out/x","n_grid":[10,20],"samples":100,"seed":42,
      "distribution":[{"weight":0.25,"element":"a"},{"weight":0.25,"element":"A"},
      {"weight":0.25,"element":"b"},{"weight":0.25,"element":"B"}],"model":"free"})", "drift");
    ASSERT_TRUE(a.ok());
    ASSERT_TRUE(b.ok());
    EXPECT_EQ(canonical_text(*a.config), canonical_text(*b.config));
    EXPECT_EQ(config_digest(*a.config), config_digest(*b.config));
    auto c = *a.config;
    c.seed = 43;
    EXPECT_NE(config_digest(c), config_digest(*a.config));
    EXPECT_EQ(config_digest(*a.config).size(), 64u);
}

TEST(Config, Sha256KnownVectors) {
    EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}
