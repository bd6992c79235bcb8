#pragma once

#include "finhom/entropy.hpp"
#include "finhom/group.hpp"
#include "finhom/length.hpp"
#include "finhom/metric_space.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace finhom {

struct IsometryOptions {
    /// Full enumeration is refused above this many points.
    std::size_t max_points = 200;
    std::size_t max_elements = 2'000'000;
    /// Search nodes per call before giving up.
    std::uint64_t node_budget = 50'000'000;
};

struct IsometryGroup {
    FiniteMetricSpace base;
    /// Sorted lexicographically, so the identity comes first.
    std::vector<Permutation> elements;
    std::vector<Permutation> generators;
    /// False when the search hit a budget; `elements` then holds only the
    /// isometries found so far.
    bool complete = true;
    std::string note;

    std::size_t order() const { return elements.size(); }
    std::optional<std::size_t> index_of(const Permutation& p) const;
    bool contains(const Permutation& p) const { return index_of(p).has_value(); }
};

/// Does `p` preserve every distance (within tolerance in approximate mode)?
bool is_isometry(const FiniteMetricSpace& space, const Permutation& p);

/// Colour refinement by multisets of (distance, colour) pairs, iterated to a
/// stable partition. Isometries preserve the colours.
std::vector<std::uint32_t> refine_colours(const FiniteMetricSpace& space);

/// All isometries by refinement plus backtracking.
IsometryGroup isometry_group(const FiniteMetricSpace& space, const IsometryOptions& options = {});

/// One isometry extending the given point assignments, if any. `exhausted`
/// is false when the node budget ran out first.
struct IsometrySearch {
    std::optional<Permutation> found;
    bool exhausted = true;
};
IsometrySearch find_isometry(const FiniteMetricSpace& space,
                             const std::vector<std::pair<std::size_t, std::size_t>>& fixed,
                             std::uint64_t node_budget = IsometryOptions{}.node_budget);
/// Same, reusing colours from refine_colours(space).
IsometrySearch find_isometry_coloured(const FiniteMetricSpace& space, const std::vector<std::uint32_t>& colours,
                                      const std::vector<std::pair<std::size_t, std::size_t>>& fixed,
                                      std::uint64_t node_budget = IsometryOptions{}.node_budget);

/// Single point orbit under the isometry group. Searches one isometry per
/// target instead of the whole group, so it works above max_points;
/// nullopt when a search ran out of budget.
std::optional<bool> is_homogeneous(const FiniteMetricSpace& space, const IsometryOptions& options = {});

/// Transitive on ordered pairs at each distance. Uses pair orbits of the
/// full group when it is available, else sphere searches at one base point
/// of a homogeneous space.
std::optional<bool> is_distance_transitive(const FiniteMetricSpace& space, const IsometryOptions& options = {});
std::optional<bool> is_distance_transitive(const IsometryGroup& group);

/// Does the stabilizer of x act transitively on the sphere of radius r about
/// x? Vacuously true for an empty sphere.
std::optional<bool> sphere_orbit_transitivity(const FiniteMetricSpace& space, std::size_t x, const Length& r,
                                              const IsometryOptions& options = {});
std::optional<bool> sphere_orbit_transitivity(const IsometryGroup& group, std::size_t x, const Length& r);

/// max_y d(g1 y, g2 y). Throws std::invalid_argument unless both are elements.
Length group_metric(const IsometryGroup& group, const Permutation& g1, const Permutation& g2);

inline constexpr std::size_t kMaxGroupSpace = 2000;

/// The group elements (in group order) under group_metric. Requires a
/// complete group of order at most kMaxGroupSpace.
FiniteMetricSpace group_as_metric_space(const IsometryGroup& group);

struct IsometryEntropyCheck {
    /// Packing of the isometry group at eps (lower bound when inexact).
    std::size_t lhs = 0;
    std::size_t lhs_upper = 0;
    /// E(eps/4)^E(eps/4), saturating at UINT64_MAX.
    std::uint64_t rhs = 0;
    bool holds = false;
    /// Group complete and both packings exact.
    bool exact = false;
};

/// Compares the packing number of Isom(X) at eps with E(eps/4)^E(eps/4).
/// When inexact, `holds` is still certified: it compares the upper bound of
/// the left side with the right side built from a certified lower count.
IsometryEntropyCheck verify_isometry_entropy_bound(const FiniteMetricSpace& space, const Length& eps,
                                                   const IsometryOptions& options = {});

/// b^b saturating at UINT64_MAX.
std::uint64_t self_power_saturating(std::uint64_t b);

} // namespace finhom
