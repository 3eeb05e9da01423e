#pragma once

#include <concepts>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hypwalk {

/// Raised when an operation is called outside its stated preconditions.
struct precondition_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Raised when a textual element or config cannot be parsed.
struct parse_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Hyperbolicity constant and basepoint of the space a model acts on.
struct SpaceDescriptor {
    double delta = 0.0;
    std::string basepoint_label;
};

/// Translation length estimate. `stabilized` is false when the value is a
/// finite-horizon average rather than a certified limit.
struct TranslationLength {
    double value = 0.0;
    bool stabilized = true;
};

// A group acting by isometries on a hyperbolic space, seen through the
// orbit of a basepoint: d(g, h) = d_space(g x0, h x0).
template <class M>
concept GroupModel = requires(const M& m, const typename M::element_type& g,
                              typename M::element_type& acc, std::string_view text) {
    typename M::element_type;
    { m.identity() } -> std::same_as<typename M::element_type>;
    { m.multiply(g, g) } -> std::same_as<typename M::element_type>;
    { m.invert(g) } -> std::same_as<typename M::element_type>;
    { m.right_multiply(acc, g) };
    { m.distance(g, g) } -> std::convertible_to<double>;
    { m.norm(g) } -> std::convertible_to<double>;
    { m.space() } -> std::convertible_to<SpaceDescriptor>;
    { m.generators() } -> std::convertible_to<std::vector<typename M::element_type>>;
    { m.translation_length(g, std::size_t{1}) } -> std::same_as<TranslationLength>;
    { m.loxodromic(g) } -> std::same_as<bool>;
    { m.shares_fixed_points(g, g) } -> std::same_as<bool>;
    { m.format(g) } -> std::same_as<std::string>;
    { m.parse(text) } -> std::same_as<typename M::element_type>;
    { m.name() } -> std::convertible_to<std::string_view>;
};

}  // namespace hypwalk
