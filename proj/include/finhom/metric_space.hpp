#pragma once

#include "finhom/length.hpp"
#include "finhom/rational.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace finhom {

enum class NumericMode { exact, approximate };

/// Distances of two spaces rescaled to integers over a shared denominator.
struct ScaledDistances {
    std::vector<std::int64_t> values;
    std::int64_t denominator = 1;
};

/// A finite metric space given by its full distance matrix.
///
/// Exact spaces keep rational distances; approximate spaces keep doubles and
/// compare them with a tolerance. Every space also carries a rank matrix
/// that maps each entry to the index of its distinct distance value, so
/// threshold queries ("is d(i,j) > eps") reduce to integer comparisons.
/// Construction only checks shape; the metric axioms are checked by
/// validate().
class FiniteMetricSpace {
public:
    FiniteMetricSpace();

    static FiniteMetricSpace exact(std::size_t n, std::vector<Rational> dist, std::string provenance = {});
    static FiniteMetricSpace approximate(std::size_t n, std::vector<double> dist,
                                         double tolerance = kDefaultTolerance, std::string provenance = {});
    /// Exact if every entry is exact, approximate otherwise.
    static FiniteMetricSpace from_lengths(std::size_t n, const std::vector<Length>& dist,
                                          std::string provenance = {});
    static FiniteMetricSpace point();

    std::size_t size() const { return n_; }
    NumericMode mode() const { return exact_.empty() ? NumericMode::approximate : NumericMode::exact; }
    bool is_exact() const { return mode() == NumericMode::exact; }
    double tolerance() const { return tol_; }

    Length distance(std::size_t i, std::size_t j) const;
    double value(std::size_t i, std::size_t j) const { return values_[i * n_ + j]; }
    /// Precondition: is_exact().
    const Rational& exact_distance(std::size_t i, std::size_t j) const { return exact_[i * n_ + j]; }

    /// Index of d(i,j) among the sorted distinct distance values.
    std::uint32_t rank(std::size_t i, std::size_t j) const { return rank_[i * n_ + j]; }
    std::span<const std::uint32_t> rank_row(std::size_t i) const { return {rank_.data() + i * n_, n_}; }
    /// Sorted distinct distance values (level 0 is the zero distance).
    const std::vector<Length>& levels() const { return levels_; }
    /// Smallest rank whose level is strictly greater than `eps` (beyond tolerance).
    std::uint32_t first_rank_above(const Length& eps) const;
    /// Rank of the level equal to `r` (within tolerance), if any.
    std::optional<std::uint32_t> rank_of(const Length& r) const;

    Length diameter() const { return levels_.back(); }

    const std::vector<std::string>& labels() const { return labels_; }
    void set_labels(std::vector<std::string> labels);
    const std::string& provenance() const { return provenance_; }
    void set_provenance(std::string provenance) { provenance_ = std::move(provenance); }

    /// Restriction to the given points, in the given order.
    FiniteMetricSpace subspace(std::span<const std::size_t> points) const;

    /// Integer matrix over the least common denominator; nullopt on overflow
    /// or in approximate mode.
    std::optional<ScaledDistances> scaled() const;

    /// Bitwise identical distance data (labels and provenance ignored).
    friend bool operator==(const FiniteMetricSpace& a, const FiniteMetricSpace& b);

private:
    FiniteMetricSpace(std::string provenance, std::size_t n);
    void build_levels();

    std::size_t n_ = 0;
    std::vector<double> values_;
    std::vector<Rational> exact_;
    double tol_ = 0.0;
    std::vector<Length> levels_;
    std::vector<std::uint32_t> rank_;
    std::vector<std::string> labels_;
    std::string provenance_;
};

enum class Axiom { diagonal, symmetry, positivity, triangle };

struct Violation {
    Axiom axiom;
    std::size_t i = 0;
    std::size_t j = 0;
    std::size_t k = 0;
};

struct ValidationReport {
    std::vector<Violation> violations;
    /// Total number of violations found; `violations` holds at most
    /// kMaxWitnesses of them.
    std::size_t total = 0;
    static constexpr std::size_t kMaxWitnesses = 1000;

    bool ok() const { return total == 0; }
};

ValidationReport validate(const FiniteMetricSpace& space);

std::string to_string(Axiom axiom);

/// Multiplies every distance by `factor` (> 0).
FiniteMetricSpace scale(const FiniteMetricSpace& space, const Length& factor);

/// Cartesian product with the max (sup) metric, points ordered
/// lexicographically with the first factor most significant.
FiniteMetricSpace sup_product(std::span<const FiniteMetricSpace> spaces);

/// Quotient whose points are the blocks, at Hausdorff distance from each other.
FiniteMetricSpace quotient_by_partition(const FiniteMetricSpace& space,
                                        const std::vector<std::vector<std::size_t>>& partition);

/// Hausdorff distance between two nonempty subsets of one space.
Length hausdorff_distance(const FiniteMetricSpace& space, std::span<const std::size_t> a,
                          std::span<const std::size_t> b);

} // namespace finhom
