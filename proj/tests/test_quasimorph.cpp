#include "doctest.h"
#include "helpers.hpp"
#include "oracles.hpp"

#include "finhom/isometry.hpp"
#include "finhom/quasimorph.hpp"
#include "finhom/spaces.hpp"

#include <random>

using namespace finhom;
using finhom::Rational;

namespace {

std::shared_ptr<const MetricGroup> circle_target() { return std::make_shared<const MetricGroup>(MetricGroup::circle()); }

GroupElement at(const Rational& t) { return {0, {t.frac()}}; }

// k -> k/n (plus optional offsets), as a map from Z_n to the circle.
QuasiMap circle_map(std::int64_t n, const std::vector<Rational>& offsets = {})
{
    std::vector<GroupElement> table;
    for (std::int64_t k = 0; k < n; ++k)
        table.push_back(at(Rational(k, n) + (offsets.empty() ? Rational(0) : offsets[static_cast<std::size_t>(k)])));
    return QuasiMap(FiniteGroup::cyclic(static_cast<std::size_t>(n)), circle_target(), table);
}

// Straight from the definition, with arcs computed here.
Rational circle_defect_oracle(const QuasiMap& qm)
{
    Rational worst(0);
    const auto m = qm.source.order();
    for (std::uint32_t a = 0; a < m; ++a)
        for (std::uint32_t b = 0; b < m; ++b) {
            Rational s = (qm.table[a].coords[0] + qm.table[b].coords[0] - qm.table[qm.source.multiply(a, b)].coords[0]).frac();
            worst = std::max(worst, std::min(s, Rational(1) - s));
        }
    return worst;
}

// Largest distance from the grid (1/steps)Z to the image, in the arc metric.
Rational circle_density_oracle(const QuasiMap& qm, std::int64_t steps)
{
    Rational worst(0);
    for (std::int64_t i = 0; i < steps; ++i) {
        Rational best(1);
        for (const auto& e : qm.table) {
            Rational s = (Rational(i, steps) - e.coords[0]).frac();
            best = std::min(best, std::min(s, Rational(1) - s));
        }
        worst = std::max(worst, best);
    }
    return worst;
}

std::vector<GroupElement> circle_subgroup(std::int64_t k)
{
    std::vector<GroupElement> out;
    for (std::int64_t i = 0; i < k; ++i) out.push_back(at(Rational(i, k)));
    return out;
}

} // namespace

TEST_CASE("model group laws")
{
    auto c = MetricGroup::circle();
    auto a = c.element({Rational(3, 4)});
    auto b = c.element({Rational(1, 2)});
    CHECK(c.multiply(a, b) == c.element({Rational(1, 4)}));
    CHECK(c.inverse(a) == c.element({Rational(1, 4)}));
    CHECK(c.distance(a, b) == q(1, 4));
    CHECK(c.distance(c.identity(), c.identity()) == q(0));
    CHECK(c.element({Rational(-1, 3)}).coords[0] == Rational(2, 3));
    CHECK_THROWS_AS(c.element(std::uint32_t{0}), std::invalid_argument);
    CHECK_THROWS_AS(c.check({0, {Rational(1)}}), std::invalid_argument);

    auto t = MetricGroup::torus(2);
    CHECK(t.distance(t.element({Rational(1, 10), Rational(0)}), t.element({Rational(0), Rational(7, 10)})) == q(3, 10));
    CHECK_THROWS_AS(t.element({Rational(0)}), std::invalid_argument);

    // Depth 2: levels of order 1 and 2 with weights 1/2 and 1/4.
    auto s = MetricGroup::solenoid(2);
    CHECK(s.distance(s.identity(), s.element({Rational(1, 2)})) == q(1, 8));
    CHECK(s.distance(s.identity(), s.element({Rational(1, 4)})) == q(5, 16));
}

TEST_CASE("bi-invariance")
{
    for (const auto& g : {MetricGroup::circle(), MetricGroup::torus(2), MetricGroup::torus(3), MetricGroup::solenoid(3),
                          MetricGroup::solenoid(5)})
        CHECK_FALSE(bi_invariance_violation(g, 10'000, 7).has_value());

    // Full isometry group of a hexagon, exhaustively.
    auto iso = isometry_group(cycle_space(6, q(1, 6)).space);
    auto d6 = metric_group_of_action({iso.base, iso.elements});
    CHECK_FALSE(bi_invariance_violation(d6, 0, 1).has_value());
    CHECK(d6.group().order() == 12);

    // Not translation invariant: 0 and 1 are closer than 1 and 2.
    auto bad = MetricGroup::finite(FiniteGroup::cyclic(4), int_space(4, {0, 1, 2, 2, 1, 0, 2, 2, 2, 2, 0, 2, 2, 2, 2, 0}));
    CHECK(bi_invariance_violation(bad, 0, 1).has_value());
}

TEST_CASE("actions")
{
    auto rot = metric_group_of_action(rotation_action(10));
    for (std::uint32_t k = 0; k < 10; ++k) CHECK(rot.metric().distance(0, k) == q(std::min<std::int64_t>(k, 10 - k), 10));
    GroupAction broken = rotation_action(6);
    std::swap(broken.elements[1][0], broken.elements[1][1]);
    CHECK_THROWS_AS(metric_group_of_action(broken), std::invalid_argument);
    GroupAction open = rotation_action(6);
    open.elements.pop_back();
    CHECK_THROWS_AS(metric_group_of_action(open), std::invalid_argument);

    auto pairs = rounding_pairs(4, 8);
    CHECK(pairs.size() == 12);
    CHECK(pairs[1] == std::make_pair<std::size_t, std::size_t>(1, 2));
}

TEST_CASE("subgroups")
{
    auto c = MetricGroup::circle();
    CHECK(generated_subgroup(c, {c.element({Rational(1, 6)})}).size() == 6);
    CHECK(generated_subgroup(c, {c.element({Rational(1, 4)}), c.element({Rational(1, 6)})}).size() == 12);
    auto t = MetricGroup::torus(2);
    CHECK(generated_subgroup(t, {t.element({Rational(1, 3), Rational(0)}), t.element({Rational(0), Rational(1, 2)})}).size() == 6);
    CHECK_THROWS_AS(generated_subgroup(c, {c.element({Rational(1, 1000)})}, 100), std::invalid_argument);
}

TEST_CASE("defect")
{
    for (std::int64_t n : {1, 2, 5, 12}) {
        auto d = defect(circle_map(n));
        CHECK(d.value == q(0));
    }
    // Any homomorphism between finite groups through a rotation action.
    auto z12 = std::make_shared<const MetricGroup>(metric_group_of_action(rotation_action(12)));
    std::vector<GroupElement> table;
    for (std::uint32_t k = 0; k < 6; ++k) table.push_back({2 * k, {}});
    CHECK(defect(QuasiMap(FiniteGroup::cyclic(6), z12, table)).value == q(0));
    table[1] = {3, {}};
    auto d = defect(QuasiMap(FiniteGroup::cyclic(6), z12, table));
    CHECK(d.value > q(0));

    // Perturbations of size at most delta cost at most 3 delta.
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 40; ++trial) {
        const std::int64_t delta_den = 24 + trial;
        std::uniform_int_distribution<int> wiggle(-1, 1);
        std::vector<Rational> offsets;
        for (int k = 0; k < 12; ++k) offsets.emplace_back(wiggle(rng), delta_den);
        auto qm = circle_map(12, offsets);
        auto got = defect(qm);
        CHECK(got.value == Length(circle_defect_oracle(qm)));
        CHECK(got.value <= q(3, delta_den));
        auto threaded = defect(qm, 4);
        CHECK(threaded.value == got.value);
        CHECK(threaded.a == got.a);
        CHECK(threaded.b == got.b);
    }
}

TEST_CASE("density")
{
    CHECK(density(circle_map(7), q(1, 100)).upper == q(1, 14));
    CHECK(density(circle_map(7), q(1, 100)).exact());
    CHECK(density(circle_map(1), q(1, 100)).lower == q(1, 2));
    CHECK_THROWS_AS(density(circle_map(3), q(0)), std::invalid_argument);
    CHECK_THROWS_AS(density(circle_map(3), q(-1, 2)), std::invalid_argument);

    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        std::uniform_int_distribution<int> pos(0, 59);
        std::vector<Rational> offsets;
        for (int k = 0; k < 5; ++k) offsets.emplace_back(pos(rng), 60);
        auto qm = circle_map(5, offsets);
        // Image points sit on (1/60)Z, so the worst point does too.
        CHECK(density(qm, q(1, 10)).lower == Length(circle_density_oracle(qm, 120)));
    }

    // Surjective onto a finite target.
    auto z8 = std::make_shared<const MetricGroup>(metric_group_of_action(rotation_action(8)));
    std::vector<GroupElement> all, half;
    for (std::uint32_t k = 0; k < 8; ++k) all.push_back({k, {}});
    for (std::uint32_t k = 0; k < 8; ++k) half.push_back({2 * (k % 4), {}});
    CHECK(density(QuasiMap(FiniteGroup::cyclic(8), z8, all), q(1)).upper == q(0));
    CHECK(density(QuasiMap(FiniteGroup::cyclic(8), z8, half), q(1)).upper == q(1, 8));

    // Nets bracket the true radius.
    auto t2 = std::make_shared<const MetricGroup>(MetricGroup::torus(2));
    std::vector<GroupElement> corner = {t2->identity()};
    auto lonely = QuasiMap(FiniteGroup::cyclic(1), t2, corner);
    auto b = density(lonely, q(1, 20));
    CHECK(b.lower <= q(1, 2));
    CHECK(b.upper >= q(1, 2));
    CHECK(b.upper - b.lower <= q(1, 20));
    CHECK_THROWS_AS(density(QuasiMap(FiniteGroup::cyclic(1), std::make_shared<const MetricGroup>(MetricGroup::torus(3)),
                                     {MetricGroup::torus(3).identity()}),
                            q(1, 1000)),
                    NetTooLarge);
}

TEST_CASE("quasi-finiteness witnesses")
{
    auto c = quasi_finiteness_witness(circle_target(), Length(0.1));
    CHECK(c.orders == std::vector<std::size_t>{5});
    CHECK(c.density == q(1, 10));
    CHECK(c.defect.value == q(0));
    CHECK(density(c.map, q(1, 100)).upper == q(1, 10));

    auto t = quasi_finiteness_witness(std::make_shared<const MetricGroup>(MetricGroup::torus(2)), q(1, 4));
    CHECK(t.orders == std::vector<std::size_t>{2, 2});
    CHECK(t.density == q(1, 4));
    CHECK(t.defect.value == q(0));
    auto tb = density(t.map, q(1, 64));
    CHECK(tb.lower <= q(1, 4));
    CHECK(tb.upper >= q(1, 4));

    for (int depth = 1; depth <= 4; ++depth) {
        auto target = std::make_shared<const MetricGroup>(MetricGroup::solenoid(depth));
        for (const auto& eps : {q(1, 3), q(1, 10), q(1, 50)}) {
            auto w = quasi_finiteness_witness(target, eps);
            std::size_t fact = 1;
            for (int j = 2; j <= depth; ++j) fact *= static_cast<std::size_t>(j);
            CHECK(w.orders.front() % fact == 0);
            CHECK(w.defect.value == q(0));
            CHECK(w.density <= eps);
            // Halfway between the first two image points is the worst spot.
            const auto n = static_cast<std::int64_t>(w.orders.front());
            CHECK(target->distance(target->identity(), target->element({Rational(1, 2 * n)})) == w.density);
            auto net = density(w.map, w.density / q(8));
            CHECK(net.lower <= w.density);
            CHECK(net.upper >= w.density);
        }
    }
    CHECK_THROWS_AS(quasi_finiteness_witness(circle_target(), q(0)), std::invalid_argument);
}

TEST_CASE("snapping")
{
    auto hom = circle_map(12);
    auto same = snap_to_subgroup(hom, circle_subgroup(12), q(0), q(1, 100));
    CHECK(same.map.table == hom.table);

    auto six = snap_to_subgroup(hom, circle_subgroup(6), q(1, 12), q(1, 100));
    CHECK(six.defect_after.value <= q(4, 12));
    CHECK(six.defect_after.value == Length(circle_defect_oracle(six.map)));
    CHECK(six.defect_ok);
    CHECK(six.density_ok);
    REQUIRE(six.lemma_ok.has_value());
    CHECK(*six.lemma_ok);

    auto inside = snap_to_subgroup(circle_map(6), circle_subgroup(12), q(1, 24), q(1, 100));
    CHECK(inside.defect_after.value == q(0));

    try {
        snap_to_subgroup(hom, circle_subgroup(3), q(1, 12), q(1, 100));
        FAIL("expected rejection");
    } catch (const SnapRejected& e) {
        CHECK(e.element() == 2);
        CHECK(e.nearest() == q(1, 6));
    }

    // Random perturbed maps snapped to random subgroups at the least
    // feasible epsilon.
    std::mt19937_64 rng(44);
    for (int trial = 0; trial < 60; ++trial) {
        std::uniform_int_distribution<std::int64_t> order(2, 16), sub(1, 20), wiggle(-2, 2);
        const std::int64_t m = order(rng), k = sub(rng);
        std::vector<Rational> offsets;
        for (std::int64_t i = 0; i < m; ++i) offsets.emplace_back(wiggle(rng), 97);
        auto qm = circle_map(m, offsets);
        Rational eps(0);
        for (const auto& e : qm.table) {
            Rational best(1);
            for (const auto& p : circle_subgroup(k)) {
                Rational s = (e.coords[0] - p.coords[0]).frac();
                best = std::min(best, std::min(s, Rational(1) - s));
            }
            eps = std::max(eps, best);
        }
        auto r = snap_to_subgroup(qm, circle_subgroup(k), Length(eps), q(1, 100));
        CHECK(r.defect_ok);
        CHECK(r.density_ok);
        CHECK(r.defect_after.value <= r.defect_before.value + Length(3) * Length(eps));
        CHECK(r.defect_after.value == Length(circle_defect_oracle(r.map)));
        if (r.lemma_ok) CHECK(*r.lemma_ok);
    }
}

TEST_CASE("limit quasi-morphisms")
{
    // Same group on both sides.
    auto c8 = rotation_action(8);
    LimitEquivalences id;
    for (std::size_t k = 0; k < 8; ++k) {
        id.phi.push_back(k);
        id.psi.push_back(k);
    }
    id.phi_back = id.phi;
    id.psi_back = id.psi;
    id.epsilon = q(0);
    auto same = limit_quasi_morphism(c8, c8, id);
    CHECK(same.defect.value == q(0));
    CHECK(same.within_bound);

    // Index doubling into the 48-point net.
    auto z24 = rotation_action(24), z48 = rotation_action(48);
    auto pairs = rounding_pairs(24, 48);
    auto eq = limit_equivalences(z24, z48, pairs, pairs);
    CHECK(eq.epsilon == q(1, 48));
    auto dbl = limit_quasi_morphism(z24, z48, eq);
    CHECK(dbl.certified_bound == q(11, 48));
    CHECK(dbl.defect.value <= dbl.certified_bound);
    CHECK(dbl.within_bound);
    CHECK(dbl.triple_gap <= eq.epsilon);

    // Incommensurate sizes: psi rounds, so it is not a homomorphism.
    std::optional<Length> previous;
    for (std::size_t n : {12u, 24u, 48u}) {
        const std::size_t m = 2 * n + 1;
        auto gn = rotation_action(n), g = rotation_action(m);
        auto rp = rounding_pairs(n, m);
        auto e = limit_equivalences(gn, g, rp, rp);
        auto r = limit_quasi_morphism(gn, g, e, 2);
        Rational oracle(0);
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b) {
                const auto s = static_cast<std::int64_t>(e.psi[a] + e.psi[b]) - static_cast<std::int64_t>(e.psi[(a + b) % n]);
                const Rational t = Rational(s, static_cast<std::int64_t>(m)).frac();
                oracle = std::max(oracle, std::min(t, Rational(1) - t));
            }
        CHECK(r.defect.value == Length(oracle));
        CHECK(r.defect.value > q(0));
        CHECK(r.within_bound);
        if (previous) CHECK(r.defect.value <= *previous);
        previous = r.defect.value;
    }

    // psi(a) = -2a respects the group metric but not the action.
    LimitEquivalences flipped = eq;
    for (std::size_t a = 0; a < 24; ++a) flipped.psi[a] = (48 - 2 * a) % 48;
    for (std::size_t j = 0; j < 48; ++j) flipped.psi_back[j] = ((48 - j) % 48) / 2;
    try {
        limit_quasi_morphism(z24, z48, flipped);
        FAIL("expected rejection");
    } catch (const LimitPreconditionFailed& e) {
        CHECK(e.triple().has_value());
    }

    LimitEquivalences loose = eq;
    loose.phi_back.assign(48, 0);
    CHECK_THROWS_AS(limit_quasi_morphism(z24, z48, loose), LimitPreconditionFailed);
}
