#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <set>
#include <string>
#include <stdexcept>
#include <string_view>
#include <type_traits>
#include <vector>

#include <json.hpp>
#include <openssl/evp.h>

#include "hypwalk/farey.hpp"
#include "hypwalk/free_group.hpp"
#include "hypwalk/model.hpp"

namespace hypwalk {

// Experiment configuration: a single JSON object. Element text is stored in
// canonical form so that equivalent configs serialise identically.

struct DistributionEntry {
    std::string element;
    double weight = 0.0;
};

struct ExperimentConfig {
    std::string model;
    std::vector<DistributionEntry> distribution;
    std::uint64_t seed = 0;
    std::size_t samples = 0;
    std::vector<std::size_t> n_grid;
    std::optional<std::size_t> k;
    std::optional<double> B;
    std::optional<double> L;
    std::optional<std::vector<double>> r_grid;
    std::string output_path;

    // Subcommand-specific extras.
    std::optional<std::vector<double>> t_grid;  // chernoff deviations
    std::optional<double> rate_mean;            // chernoff exponential mean
    std::optional<double> epsilon;              // bernstein deviation
    std::optional<std::string> center;          // shadow-decay centre
    std::optional<std::size_t> horizon;         // translation-length horizon
    std::optional<double> delta;                // override the model's delta
    std::optional<std::size_t> radius;          // props / calibrate instance radius
    std::optional<double> expected_rate;        // drift --assert target
    std::optional<double> rate_tolerance;       // drift --assert tolerance
};

inline const std::vector<std::string>& known_models() {
    static const std::vector<std::string> m{"free", "farey"};
    return m;
}

inline const std::vector<std::string>& known_subcommands() {
    static const std::vector<std::string> s{"drift",    "linear-progress", "translation-decay", "shadow-decay",
                                            "backtrack", "z-sum",           "bernstein",         "chernoff",
                                            "midpoint", "diagonal",        "props",             "calibrate"};
    return s;
}

struct ConfigResult {
    std::optional<ExperimentConfig> config;
    std::vector<std::string> errors;

    bool ok() const { return errors.empty() && config.has_value(); }
};

/// Canonical text of an element in the named model.
inline std::string canonical_element(std::string_view model, std::string_view text) {
    if (model == "free") {
        const FreeGroupModel m;
        return m.format(m.parse(text));
    }
    if (model == "farey") {
        const FareyModel m;
        return m.format(m.parse(text));
    }
    throw parse_error("unknown model \"" + std::string(model) + "\"");
}

namespace detail {

inline std::string join(const std::vector<std::string>& items, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += sep;
        out += items[i];
    }
    return out;
}

// Field readers: each appends "<field>: <problem>" on failure.
class Reader {
public:
    Reader(const nlohmann::json& doc, std::vector<std::string>& errors) : doc_(doc), errors_(errors) {}

    bool has(const char* key) const { return doc_.contains(key); }

    void fail(const std::string& field, const std::string& why) { errors_.push_back(field + ": " + why); }

    std::optional<std::string> text(const char* key) {
        if (!has(key)) return std::nullopt;
        const auto& v = doc_.at(key);
        if (!v.is_string()) {
            fail(key, "must be a string");
            return std::nullopt;
        }
        return v.get<std::string>();
    }

    std::optional<double> real(const char* key) {
        if (!has(key)) return std::nullopt;
        const auto& v = doc_.at(key);
        if (!v.is_number() || !std::isfinite(v.get<double>())) {
            fail(key, "must be a finite number");
            return std::nullopt;
        }
        return v.get<double>();
    }

    std::optional<std::uint64_t> count(const char* key) {
        if (!has(key)) return std::nullopt;
        const auto& v = doc_.at(key);
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
            fail(key, "must be a non-negative integer");
            return std::nullopt;
        }
        return v.get<std::uint64_t>();
    }

    template <class T>
    std::optional<std::vector<T>> grid(const char* key) {
        if (!has(key)) return std::nullopt;
        const auto& v = doc_.at(key);
        if (!v.is_array()) {
            fail(key, "must be a list");
            return std::nullopt;
        }
        std::vector<T> out;
        for (const auto& e : v) {
            const bool good = std::is_integral_v<T> ? (e.is_number_unsigned() || (e.is_number_integer() && e.get<std::int64_t>() >= 0))
                                                    : e.is_number();
            if (!good) {
                fail(key, std::is_integral_v<T> ? "entries must be non-negative integers" : "entries must be numbers");
                return std::nullopt;
            }
            out.push_back(e.get<T>());
        }
        if (out.empty()) {
            fail(key, "grid must be non-empty");
            return std::nullopt;
        }
        for (std::size_t i = 1; i < out.size(); ++i) {
            if (!(out[i - 1] < out[i])) {
                fail(key, "grid must be strictly ascending");
                return std::nullopt;
            }
        }
        return out;
    }

private:
    const nlohmann::json& doc_;
    std::vector<std::string>& errors_;
};

}  // namespace detail

/// Parses and checks a config. With a subcommand, also checks that every
/// field it needs is present. All problems are reported, one per entry.
inline ConfigResult validate_config(std::string_view text, std::string_view subcommand = {}) {
    ConfigResult result;
    auto& errors = result.errors;
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        errors.push_back(std::string("config: malformed JSON: ") + e.what());
        return result;
    }
    if (!doc.is_object()) {
        errors.push_back("config: top level must be an object");
        return result;
    }

    static const std::set<std::string> allowed{
        "model", "distribution", "seed",    "samples", "n_grid",  "k",      "B",       "L",
        "r_grid", "output_path", "t_grid", "rate_mean", "epsilon", "center", "horizon", "delta",
        "radius", "expected_rate", "rate_tolerance"};
    for (const auto& [key, value] : doc.items())
        if (!allowed.contains(key)) errors.push_back(key + ": unknown field");

    if (!subcommand.empty()) {
        const auto& subs = known_subcommands();
        if (std::find(subs.begin(), subs.end(), subcommand) == subs.end())
            errors.push_back("subcommand: unknown \"" + std::string(subcommand) + "\", expected one of {" +
                             detail::join(subs, ", ") + "}");
    }

    detail::Reader in(doc, errors);
    ExperimentConfig cfg;

    if (auto m = in.text("model")) {
        const auto& models = known_models();
        if (std::find(models.begin(), models.end(), *m) == models.end())
            in.fail("model", "unknown model \"" + *m + "\", expected one of {" + detail::join(models, ", ") + "}");
        else
            cfg.model = *m;
    }

    if (in.has("distribution")) {
        const auto& d = doc.at("distribution");
        if (!d.is_array() || d.empty()) {
            in.fail("distribution", "must be a non-empty list of {element, weight}");
        } else {
            double total = 0.0;
            bool weights_ok = true;
            for (std::size_t i = 0; i < d.size(); ++i) {
                const auto& e = d[i];
                const std::string field = "distribution[" + std::to_string(i) + "]";
                if (!e.is_object() || !e.contains("element") || !e.contains("weight") || !e.at("element").is_string() ||
                    !e.at("weight").is_number()) {
                    in.fail(field, "must be {\"element\": text, \"weight\": number}");
                    weights_ok = false;
                    continue;
                }
                DistributionEntry entry{e.at("element").get<std::string>(), e.at("weight").get<double>()};
                if (!(entry.weight > 0.0)) {
                    in.fail(field, "weight must be positive");
                    weights_ok = false;
                }
                total += entry.weight;
                if (!cfg.model.empty()) {
                    try {
                        entry.element = canonical_element(cfg.model, entry.element);
                    } catch (const std::invalid_argument& ex) {
                        in.fail(field, std::string("malformed element: ") + ex.what());
                    }
                }
                cfg.distribution.push_back(std::move(entry));
            }
            if (weights_ok && std::abs(total - 1.0) > 1e-12) in.fail("distribution", "weights must sum to 1");
        }
    }

    if (auto s = in.count("seed")) cfg.seed = *s;
    if (auto s = in.count("samples")) {
        if (*s == 0) in.fail("samples", "must be at least 1");
        cfg.samples = static_cast<std::size_t>(*s);
    }
    if (auto g = in.grid<std::size_t>("n_grid")) {
        if (g->front() == 0) in.fail("n_grid", "walk lengths must be at least 1");
        cfg.n_grid = std::move(*g);
    }
    if (auto k = in.count("k")) {
        if (*k == 0) in.fail("k", "must be at least 1");
        cfg.k = static_cast<std::size_t>(*k);
    }
    cfg.B = in.real("B");
    cfg.L = in.real("L");
    cfg.r_grid = in.grid<double>("r_grid");
    if (auto p = in.text("output_path")) {
        if (p->empty()) in.fail("output_path", "must be non-empty");
        cfg.output_path = *p;
    }
    cfg.t_grid = in.grid<double>("t_grid");
    if (cfg.t_grid && cfg.t_grid->front() < 0.0) in.fail("t_grid", "deviations must be non-negative");
    cfg.rate_mean = in.real("rate_mean");
    if (cfg.rate_mean && !(*cfg.rate_mean > 0.0)) in.fail("rate_mean", "must be positive");
    cfg.epsilon = in.real("epsilon");
    if (cfg.epsilon && !(*cfg.epsilon > 0.0)) in.fail("epsilon", "must be positive");
    if (auto c = in.text("center")) {
        cfg.center = *c;
        if (!cfg.model.empty()) {
            try {
                cfg.center = canonical_element(cfg.model, *c);
            } catch (const std::invalid_argument& ex) {
                in.fail("center", std::string("malformed element: ") + ex.what());
            }
        }
    }
    if (auto h = in.count("horizon")) {
        if (*h == 0) in.fail("horizon", "must be at least 1");
        cfg.horizon = static_cast<std::size_t>(*h);
    }
    cfg.delta = in.real("delta");
    if (cfg.delta && *cfg.delta < 0.0) in.fail("delta", "must be non-negative");
    if (auto r = in.count("radius")) {
        if (*r == 0) in.fail("radius", "must be at least 1");
        cfg.radius = static_cast<std::size_t>(*r);
    }
    cfg.expected_rate = in.real("expected_rate");
    cfg.rate_tolerance = in.real("rate_tolerance");

    // Fields each subcommand reads.
    auto require = [&](const char* key) {
        if (!in.has(key)) in.fail(key, "required by " + std::string(subcommand));
    };
    const std::string_view sc = subcommand;
    if (!sc.empty()) {
        require("seed");
        require("samples");
        require("output_path");
        if (sc != "chernoff") require("model");
        if (sc != "chernoff" && sc != "props" && sc != "calibrate") require("distribution");
        if (sc != "props" && sc != "calibrate") require("n_grid");
        if (sc == "linear-progress") require("L");
        if (sc == "translation-decay") require("B");
        if (sc == "shadow-decay") {
            require("r_grid");
            require("center");
        }
        if (sc == "backtrack") {
            require("k");
            require("r_grid");
        }
        if (sc == "z-sum") {
            require("k");
            require("L");
        }
        if (sc == "bernstein") {
            require("k");
            require("epsilon");
        }
        if (sc == "chernoff") require("t_grid");
        if (sc == "diagonal") require("r_grid");
        if ((sc == "backtrack" || sc == "diagonal") && cfg.n_grid.size() > 1)
            in.fail("n_grid", "must hold a single walk length for " + std::string(sc));
        if (sc == "midpoint")
            for (std::size_t n : cfg.n_grid)
                if (n % 2 != 0) {
                    in.fail("n_grid", "midpoint walk lengths (2n) must be even");
                    break;
                }
        if (sc == "drift" && cfg.expected_rate.has_value() != cfg.rate_tolerance.has_value())
            in.fail("expected_rate", "expected_rate and rate_tolerance go together");
    }

    if (errors.empty()) result.config = std::move(cfg);
    return result;
}

/// Canonical JSON text: sorted keys, no whitespace, elements in canonical form.
inline std::string canonical_text(const ExperimentConfig& c) {
    nlohmann::json j = nlohmann::json::object();
    if (!c.model.empty()) j["model"] = c.model;
    if (!c.distribution.empty()) {
        nlohmann::json d = nlohmann::json::array();
        for (const auto& e : c.distribution) d.push_back({{"element", e.element}, {"weight", e.weight}});
        j["distribution"] = d;
    }
    j["seed"] = c.seed;
    j["samples"] = c.samples;
    if (!c.n_grid.empty()) j["n_grid"] = c.n_grid;
    if (c.k) j["k"] = *c.k;
    if (c.B) j["B"] = *c.B;
    if (c.L) j["L"] = *c.L;
    if (c.r_grid) j["r_grid"] = *c.r_grid;
    j["output_path"] = c.output_path;
    if (c.t_grid) j["t_grid"] = *c.t_grid;
    if (c.rate_mean) j["rate_mean"] = *c.rate_mean;
    if (c.epsilon) j["epsilon"] = *c.epsilon;
    if (c.center) j["center"] = *c.center;
    if (c.horizon) j["horizon"] = *c.horizon;
    if (c.delta) j["delta"] = *c.delta;
    if (c.radius) j["radius"] = *c.radius;
    if (c.expected_rate) j["expected_rate"] = *c.expected_rate;
    if (c.rate_tolerance) j["rate_tolerance"] = *c.rate_tolerance;
    return j.dump();
}

/// Lower-case hex SHA-256.
inline std::string sha256_hex(std::string_view data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256: digest failed");
    std::string hex;
    hex.reserve(2 * len);
    char buf[3];
    for (unsigned int i = 0; i < len; ++i) {
        std::snprintf(buf, sizeof buf, "%02x", md[i]);
        hex += buf;
    }
    return hex;
}

inline std::string config_digest(const ExperimentConfig& c) { return sha256_hex(canonical_text(c)); }

}  // namespace hypwalk
