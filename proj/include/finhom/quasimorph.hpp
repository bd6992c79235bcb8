#pragma once

#include "finhom/group.hpp"
#include "finhom/length.hpp"
#include "finhom/metric_space.hpp"
#include "finhom/model.hpp"

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace finhom {

/// Element of a MetricGroup: an index for finite carriers, coordinates in
/// [0, 1) for the abelian models.
struct GroupElement {
    std::uint32_t index = 0;
    std::vector<Rational> coords;

    friend bool operator==(const GroupElement&, const GroupElement&) = default;
};

/// A compact group with a bi-invariant metric: either a finite group with a
/// distance table, or one of the abelian models with exact coordinates mod 1.
///
/// Models: the circle of circumference 1 (arc metric), the torus (R/Z)^d
/// with the sup of coordinate arcs, and the solenoid truncation of a given
/// depth, a circle whose metric is sum_j w_j * arc(m_j * t).
class MetricGroup {
public:
    enum class Kind { finite, circle, torus, solenoid };

    /// `metric` indexes the group elements. Bi-invariance is not checked
    /// here; see bi_invariance_violation().
    static MetricGroup finite(FiniteGroup group, FiniteMetricSpace metric, std::string name = "finite");
    static MetricGroup circle();
    static MetricGroup torus(std::size_t d);
    static MetricGroup solenoid(int depth);

    Kind kind() const { return kind_; }
    bool is_finite() const { return kind_ == Kind::finite; }
    const std::string& name() const { return name_; }
    /// Coordinates per model element (0 for finite carriers).
    std::size_t dimension() const { return dim_; }

    /// Finite carriers only.
    const FiniteGroup& group() const;
    const FiniteMetricSpace& metric() const;
    /// Solenoid only.
    const SolenoidTruncation& levels() const { return solenoid_; }

    GroupElement identity() const;
    GroupElement multiply(const GroupElement& a, const GroupElement& b) const;
    GroupElement inverse(const GroupElement& a) const;
    Length distance(const GroupElement& a, const GroupElement& b) const;

    /// Checked constructors; model coordinates are reduced mod 1.
    GroupElement element(std::uint32_t index) const;
    GroupElement element(std::vector<Rational> coords) const;
    void check(const GroupElement& a) const;

    /// Uniform over the finite carrier, or over the grid (1/denominator)Z^d.
    GroupElement random_element(std::mt19937_64& rng, std::int64_t denominator) const;
    std::string str(const GroupElement& a) const;

private:
    Kind kind_ = Kind::circle;
    std::string name_;
    std::size_t dim_ = 1;
    std::shared_ptr<const FiniteGroup> group_;
    std::shared_ptr<const FiniteMetricSpace> metric_;
    SolenoidTruncation solenoid_;
};

/// A finite permutation group acting on a finite metric space.
struct GroupAction {
    FiniteMetricSpace space;
    /// Closed under composition; index i is group element i.
    std::vector<Permutation> elements;
};

/// The rotations x -> x + k (index k) of cycle_space(n, 1/n).
GroupAction rotation_action(std::size_t n);

/// Pairs (k, round(k m / n)) and (round(j n / m), j) between Z_n and Z_m,
/// indices mod n and m. Used for both the cycles and their rotation groups.
std::vector<std::pair<std::size_t, std::size_t>> rounding_pairs(std::size_t n, std::size_t m);

/// Elements of the action under max_x d(a x, b x). Throws unless every
/// element is an isometry and the set is closed under composition.
MetricGroup metric_group_of_action(const GroupAction& action, std::string name = "action");

/// Closure of `generators` under multiplication; throws past `limit`
/// elements.
std::vector<GroupElement> generated_subgroup(const MetricGroup& group, const std::vector<GroupElement>& generators,
                                             std::size_t limit = 100'000);

struct BiInvarianceViolation {
    GroupElement h, a, b;
};

/// Looks for h, a, b with d(ha, hb) != d(a, b) or d(ah, bh) != d(a, b).
/// Exhaustive for finite carriers of order at most `exhaustive_order`,
/// otherwise `samples` random triples (models on the grid 1/denominator).
std::optional<BiInvarianceViolation> bi_invariance_violation(const MetricGroup& group, std::size_t samples,
                                                             std::uint64_t seed, std::int64_t denominator = 10007,
                                                             std::size_t exhaustive_order = 120);

/// A map from a finite group into a MetricGroup, given by its full table.
struct QuasiMap {
    FiniteGroup source;
    std::shared_ptr<const MetricGroup> target;
    std::vector<GroupElement> table;

    /// Checks the table is total and every entry lies in the target.
    QuasiMap(FiniteGroup source, std::shared_ptr<const MetricGroup> target, std::vector<GroupElement> table);
};

struct DefectReport {
    Length value;
    /// A pair attaining the maximum (lowest in row-major order).
    std::uint32_t a = 0;
    std::uint32_t b = 0;
};

/// max over all source pairs of d(f(a) f(b), f(ab)).
DefectReport defect(const QuasiMap& qm, unsigned threads = 1);

/// Covering radius of the image. Exact (lower == upper) for finite targets
/// and the circle; for the torus and solenoid the largest distance from a
/// net to the image gives `lower` and adding the net's Hausdorff bound
/// (at most `resolution`) gives `upper`.
struct DensityBound {
    Length lower;
    Length upper;
    bool exact() const { return lower == upper; }
};

/// Throws std::invalid_argument when resolution <= 0, NetTooLarge when the
/// net would exceed kMaxDensityNet points.
DensityBound density(const QuasiMap& qm, const Length& resolution);

inline constexpr std::size_t kMaxDensityNet = 1'000'000;

struct QuasiFinitenessWitness {
    QuasiMap map;
    /// Source is abelian(orders).
    std::vector<std::size_t> orders;
    DefectReport defect;
    /// Exact covering radius of the image subgroup.
    Length density;
};

/// A homomorphism from a finite abelian group onto a finite subgroup of a
/// model whose image is epsilon-dense: Z_m -> circle and (Z_m)^d -> torus
/// with m = ceil(1/(2 eps)), and Z_n -> solenoid with n the least multiple
/// of K! that brings the covering radius down to eps.
QuasiFinitenessWitness quasi_finiteness_witness(std::shared_ptr<const MetricGroup> target, const Length& eps);

/// Some source element has no admissible point within epsilon.
class SnapRejected : public std::invalid_argument {
public:
    SnapRejected(std::uint32_t element, Length nearest, const std::string& what);
    std::uint32_t element() const { return element_; }
    /// Distance from its image to the nearest admissible point.
    const Length& nearest() const { return nearest_; }

private:
    std::uint32_t element_;
    Length nearest_;
};

struct SnapResult {
    QuasiMap map;
    Length epsilon;
    DefectReport defect_before;
    DefectReport defect_after;
    DensityBound density_before;
    DensityBound density_after;
    /// defect_after <= defect_before + 3 eps.
    bool defect_ok = false;
    /// density_after <= density_before + eps (lower after against upper before).
    bool density_ok = false;
    /// When defect_before <= eps: defect_after <= 4 eps, and when also
    /// density_before <= eps: density_after <= 2 eps.
    std::optional<bool> lemma_ok;
};

/// Replaces each image by the first admissible point within eps.
SnapResult snap_to_subgroup(const QuasiMap& qm, const std::vector<GroupElement>& admissible, const Length& eps,
                            const Length& resolution);

/// Maps for the limit construction: phi between the spaces and psi between
/// the groups (element indices of the two actions), each with a map back.
struct LimitEquivalences {
    std::vector<std::size_t> phi;
    std::vector<std::size_t> phi_back;
    std::vector<std::size_t> psi;
    std::vector<std::size_t> psi_back;
    Length epsilon;
};

/// Picks the maps from correspondences with epsilon_equivalence; epsilon is
/// the larger of the two distortions.
LimitEquivalences limit_equivalences(const GroupAction& gn, const GroupAction& g,
                                     const std::vector<std::pair<std::size_t, std::size_t>>& space_pairs,
                                     const std::vector<std::pair<std::size_t, std::size_t>>& group_pairs);

class LimitPreconditionFailed : public std::invalid_argument {
public:
    explicit LimitPreconditionFailed(const std::string& what, std::optional<std::pair<std::size_t, std::size_t>> triple = {});
    /// (g, x) of the violating triple (g, x, g x) in the first action.
    const std::optional<std::pair<std::size_t, std::size_t>>& triple() const { return triple_; }

private:
    std::optional<std::pair<std::size_t, std::size_t>> triple_;
};

struct LimitQuasiMorphism {
    QuasiMap psi;
    DefectReport defect;
    Length epsilon;
    /// 11 epsilon.
    Length certified_bound;
    /// Largest distance (sup metric) from a mapped triple (psi g, phi x,
    /// phi(g x)) to the triples of the second action.
    Length triple_gap;
    bool within_bound = false;
};

/// psi as a map from the first group into the metric group of the second
/// action. Checks that both actions are by isometries, that (phi, phi_back)
/// and (psi, psi_back) are epsilon-equivalences, and that every mapped
/// triple lies within epsilon of a triple of the second action; throws
/// LimitPreconditionFailed otherwise.
LimitQuasiMorphism limit_quasi_morphism(const GroupAction& gn, const GroupAction& g, const LimitEquivalences& eq,
                                        unsigned threads = 1);

} // namespace finhom
