#pragma once

#include "finhom/length.hpp"
#include "finhom/metric_space.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace finhom {

/// Spaces up to this size get exact packing/covering numbers by exhaustive
/// branch and bound.
inline constexpr std::size_t kExactEntropyLimit = 40;

enum class Exactness { exact, lower_bound, upper_bound };

struct PackingResult {
    /// Size of a certified packing (the exact value when `exact`).
    std::size_t count = 0;
    /// Certified upper bound on the packing number.
    std::size_t upper = 0;
    bool exact = false;
    /// Points of the best packing found.
    std::vector<std::size_t> witness;

    Exactness exactness() const { return exact ? Exactness::exact : Exactness::lower_bound; }
};

struct CoveringResult {
    std::size_t count = 0;
    bool exact = false;
    std::vector<std::size_t> centers;

    Exactness exactness() const { return exact ? Exactness::exact : Exactness::upper_bound; }
};

/// E(eps, X): the largest subset with all pairwise distances > eps.
///
/// Exact max-clique search for spaces with at most kExactEntropyLimit points.
/// Larger spaces get the better of two greedy packings, and are still
/// reported exact when it meets the smallest of a ball-weight bound, a
/// greedy clique-cover bound and, for homogeneous spaces of at most 512
/// points, n / |S| with S a largest set of diameter <= eps.
PackingResult packing_number(const FiniteMetricSpace& space, const Length& eps);

/// Fewest points whose closed eps-balls cover the space.
CoveringResult covering_number(const FiniteMetricSpace& space, const Length& eps);

/// Greedy farthest-point net from point 0 (ties to the lowest index): every
/// point lies within eps of the result, and the result is an eps-packing.
std::vector<std::size_t> epsilon_net(const FiniteMetricSpace& space, const Length& eps);

struct EntropyEntry {
    Length epsilon;
    PackingResult packing;
};

using EntropyProfile = std::vector<EntropyEntry>;

EntropyProfile entropy_profile(const FiniteMetricSpace& space, std::span<const Length> epsilons);

} // namespace finhom
