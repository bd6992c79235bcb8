#pragma once

#include "finhom/length.hpp"
#include "finhom/metric_space.hpp"
#include "finhom/model.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace finhom {

/// A relation between the points of X and Y, kept sorted and duplicate free.
struct Correspondence {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;

    static Correspondence from_pairs(std::vector<std::pair<std::size_t, std::size_t>> pairs);
    /// {(x, f(x))} together with {(g(y), y)}.
    static Correspondence from_maps(const std::vector<std::size_t>& f, const std::vector<std::size_t>& g);
    static Correspondence diagonal(std::size_t n);
    bool surjective(std::size_t nx, std::size_t ny) const;
};

/// max |d_X(a, a') - d_Y(b, b')| over related pairs. Throws unless the
/// relation is onto both point sets.
Length distortion(const Correspondence& corr, const FiniteMetricSpace& x, const FiniteMetricSpace& y);

struct GhLowerCertificate {
    enum class Kind { trivial, diameter, packing_transfer, search };
    Kind kind = Kind::trivial;
    /// Packing transfer: `from` (X when from_x) packs more than `packing_to`
    /// points for every eps below `eps`, while the other space packs at most
    /// `packing_to` points at `eps_prime`.
    bool from_x = true;
    Length eps;
    Length eps_prime;
    std::size_t packing_from = 0;
    std::size_t packing_to = 0;

    std::string describe() const;
};

struct GhBounds {
    Length lower;
    Length upper;
    GhLowerCertificate lower_certificate;
    /// Correspondence realizing 2 * upper (against the net for model targets).
    Correspondence upper_certificate;
    bool exact = false;
    std::uint64_t nodes = 0;
    /// Hausdorff bound of the model net already folded into lower and upper
    /// (zero between finite spaces).
    Length net_slack;
};

struct GhOptions {
    /// Branch nodes for gh_exact.
    std::uint64_t budget = 10'000'000;
    /// Distance levels per space used by the packing-transfer bound; larger
    /// level sets are thinned evenly (any subset still gives a valid bound).
    std::size_t transfer_levels = 64;
};

/// Half the least distortion over all correspondences, by branch and bound
/// over pairs of maps (f: X -> Y, g: Y -> X). Exact unless the node budget
/// runs out, in which case `lower < upper` may remain.
GhBounds gh_exact(const FiniteMetricSpace& x, const FiniteMetricSpace& y, const GhOptions& options = {});

struct GhLowerBound {
    Length value;
    GhLowerCertificate certificate;
};

/// max of half the diameter gap and the packing-transfer bound.
GhLowerBound gh_lower_bounds(const FiniteMetricSpace& x, const FiniteMetricSpace& y, const GhOptions& options = {});

struct MapBound {
    Length value;
    Correspondence corr;
};

/// Half the distortion of {(x, f(x))} plus, for each y missed by f, the pair
/// (x, y) with f(x) nearest to y.
MapBound gh_upper_from_map(const FiniteMetricSpace& x, const FiniteMetricSpace& y, const std::vector<std::size_t>& f);

/// Bounds against a model space through model_net(model, mesh), widened by
/// the net's Hausdorff bound h: lower - h and upper + h. `embedding` (model
/// coordinates of the points of X) gives the upper bound through nearest net
/// points; without it an anchored greedy map is used.
GhBounds gh_to_model(const FiniteMetricSpace& x, const ModelSpace& model, const Length& mesh,
                     const std::optional<std::vector<ModelPoint>>& embedding = std::nullopt,
                     const GhOptions& options = {});

struct EpsilonEquivalence {
    std::vector<std::size_t> f;
    std::vector<std::size_t> g;
    Length epsilon;
};

/// Maps picked from the correspondence (lowest related index) and
/// epsilon = distortion(corr).
EpsilonEquivalence epsilon_equivalence(const FiniteMetricSpace& x, const FiniteMetricSpace& y,
                                       const Correspondence& corr);

struct EquivalenceDefects {
    Length distortion_f;
    Length distortion_g;
    /// sup d(x, g(f(x))) and sup d(y, f(g(y))).
    Length displacement_gf;
    Length displacement_fg;
    Length worst() const;
};

EquivalenceDefects equivalence_defects(const FiniteMetricSpace& x, const FiniteMetricSpace& y,
                                       const std::vector<std::size_t>& f, const std::vector<std::size_t>& g);

} // namespace finhom
