#include "doctest.h"
#include "helpers.hpp"
#include "oracles.hpp"

#include "finhom/isometry.hpp"
#include "finhom/spaces.hpp"

#include <random>
#include <set>

using namespace finhom;

namespace {

FiniteMetricSpace c4xc4()
{
    std::vector<FiniteMetricSpace> f = {cycle_space(4, q(1, 4)).space, cycle_space(4, q(1, 4)).space};
    return sup_product(f);
}

FiniteMetricSpace random_real_metric(std::size_t n, std::mt19937_64& rng)
{
    // Distances in [1, 2] always satisfy the triangle inequality.
    std::uniform_real_distribution<double> u(1.0, 2.0);
    std::vector<double> d(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) d[i * n + j] = d[j * n + i] = u(rng);
    return FiniteMetricSpace::approximate(n, d);
}

FiniteMetricSpace simplex(std::size_t n)
{
    std::vector<std::int64_t> d(n * n, 1);
    for (std::size_t i = 0; i < n; ++i) d[i * n + i] = 0;
    return int_space(n, d);
}

} // namespace

TEST_CASE("small groups")
{
    auto two = isometry_group(int_space(2, {0, 1, 1, 0}));
    CHECK(two.complete);
    CHECK(two.order() == 2);
    auto c6 = isometry_group(cycle_space(6, q(1, 6)).space);
    CHECK(c6.order() == 12);
    CHECK(c6.elements.front() == identity_permutation(6));
    std::mt19937_64 rng(2);
    CHECK(isometry_group(random_real_metric(5, rng)).order() == 1);
    CHECK(isometry_group(FiniteMetricSpace::point()).order() == 1);
}

TEST_CASE("search agrees with enumeration over all permutations")
{
    std::vector<FiniteMetricSpace> spaces;
    for (std::int64_t n = 3; n <= 8; ++n) spaces.push_back(cycle_space(static_cast<std::size_t>(n), q(1, n)).space);
    spaces.push_back(simplex(6));
    spaces.push_back(torus_grid(2, 3));
    spaces.push_back(archimedean_vertices("cube"));
    spaces.push_back(archimedean_vertices("octahedron"));
    spaces.push_back(solenoid_approximant(3, 6));
    spaces.push_back(int_space(3, {0, 1, 2, 1, 0, 1, 2, 1, 0}));
    std::vector<FiniteMetricSpace> pair = {int_space(2, {0, 1, 1, 0}), int_space(4, {0, 1, 2, 1, 1, 0, 1, 2, 2, 1, 0, 1, 1, 2, 1, 0})};
    spaces.push_back(sup_product(pair));
    std::mt19937_64 rng(4);
    for (int k = 0; k < 25; ++k) spaces.push_back(oracle::random_metric(4 + k % 5, rng, 1, 3));
    for (const auto& s : spaces) {
        auto g = isometry_group(s);
        REQUIRE(g.complete);
        CHECK(g.elements == oracle::isometries(s));
        for (const auto& p : g.elements) CHECK(is_isometry(s, p));
    }
}

TEST_CASE("budgets produce incomplete groups, not wrong ones")
{
    auto s = simplex(10);
    IsometryOptions small;
    small.max_elements = 1000;
    auto g = isometry_group(s, small);
    CHECK_FALSE(g.complete);
    CHECK_FALSE(g.note.empty());
    CHECK(is_distance_transitive(g) == std::nullopt);
    CHECK(sphere_orbit_transitivity(g, 0, q(1)) == std::nullopt);
    CHECK_THROWS_AS(group_as_metric_space(g), std::invalid_argument);
    // Point-by-point searches still settle the predicates.
    CHECK(is_homogeneous(s, small) == std::optional<bool>(true));
    CHECK(is_distance_transitive(s, small) == std::optional<bool>(true));

    IsometryOptions tiny;
    tiny.node_budget = 3;
    CHECK(is_homogeneous(cycle_space(9, q(1, 9)).space, tiny) == std::nullopt);
    IsometryOptions few_points;
    few_points.max_points = 5;
    CHECK_FALSE(isometry_group(cycle_space(9, q(1, 9)).space, few_points).complete);
}

TEST_CASE("homogeneity")
{
    std::vector<std::uint32_t> pm1 = {1, 4};
    CHECK(is_homogeneous(cayley_space(FiniteGroup::cyclic(5), pm1, q(1)).space) == std::optional<bool>(true));
    CHECK(is_homogeneous(int_space(3, {0, 1, 2, 1, 0, 1, 2, 1, 0})) == std::optional<bool>(false));
    CHECK(is_homogeneous(archimedean_vertices("icosahedron")) == std::optional<bool>(true));
    CHECK(isometry_group(archimedean_vertices("icosahedron")).order() == 120);
    // Two-valued random metrics, compared with the orbit of 0 under brute force.
    std::mt19937_64 rng(8);
    for (int k = 0; k < 10; ++k) {
        auto s = oracle::random_metric(7, rng, 1, 2);
        auto g = oracle::isometries(s);
        std::set<std::uint32_t> orbit0;
        for (const auto& p : g) orbit0.insert(p[0]);
        CHECK(is_homogeneous(s) == std::optional<bool>(orbit0.size() == s.size()));
    }
    CHECK(is_homogeneous(solenoid_approximant(6, 720)) == std::optional<bool>(true));
}

TEST_CASE("distance transitivity")
{
    for (std::int64_t n = 3; n <= 12; ++n) {
        auto c = cycle_space(static_cast<std::size_t>(n), q(1, n)).space;
        CHECK(is_distance_transitive(isometry_group(c)) == std::optional<bool>(true));
    }
    auto prod = c4xc4();
    CHECK(is_distance_transitive(isometry_group(prod)) == std::optional<bool>(false));
    CHECK(is_distance_transitive(int_space(2, {0, 1, 1, 0})) == std::optional<bool>(true));
    CHECK(is_distance_transitive(archimedean_vertices("icosahedron")) == std::optional<bool>(true));
    CHECK(is_distance_transitive(archimedean_vertices("truncated_icosahedron")) == std::optional<bool>(false));

    // Pair orbits of the full group versus stabilizer searches.
    IsometryOptions search_only;
    search_only.max_points = 0;
    std::vector<FiniteMetricSpace> spaces = {prod,
                                             archimedean_vertices("cube"),
                                             archimedean_vertices("cuboctahedron"),
                                             torus_grid(2, 3),
                                             torus_grid(2, 5),
                                             solenoid_approximant(3, 12),
                                             cycle_space(10, q(1, 10)).space,
                                             simplex(7)};
    for (const auto& s : spaces) {
        auto full = is_distance_transitive(isometry_group(s));
        REQUIRE(full.has_value());
        CHECK(is_distance_transitive(s, search_only) == full);
    }
}

TEST_CASE("sphere orbits under point stabilizers")
{
    auto prod = c4xc4();
    CHECK(sphere_orbit_transitivity(isometry_group(prod), 0, q(1, 4)) == std::optional<bool>(false));
    CHECK(sphere_orbit_transitivity(prod, 0, q(1, 4)) == std::optional<bool>(false));
    CHECK(sphere_orbit_transitivity(prod, 0, q(1, 2)) == std::optional<bool>(false));
    CHECK(sphere_orbit_transitivity(prod, 0, q(1)) == std::optional<bool>(true));
    auto c8 = cycle_space(8, q(1, 8)).space;
    auto g = isometry_group(c8);
    for (std::size_t x = 0; x < 8; ++x)
        for (std::int64_t k = 0; k <= 6; ++k) {
            CHECK(sphere_orbit_transitivity(g, x, q(k, 8)) == std::optional<bool>(true));
            CHECK(sphere_orbit_transitivity(c8, x, q(k, 8)) == std::optional<bool>(true));
        }
}

TEST_CASE("group metric")
{
    const std::size_t n = 9;
    auto c = cycle_space(n, q(1, 9)).space;
    auto g = isometry_group(c);
    Permutation rot(n);
    for (std::size_t x = 0; x < n; ++x) rot[x] = static_cast<std::uint32_t>((x + 1) % n);
    CHECK(group_metric(g, rot, identity_permutation(n)) == q(1, 9));
    for (const auto& a : g.elements) {
        CHECK(group_metric(g, a, a) == q(0));
        for (const auto& b : g.elements) {
            auto d = group_metric(g, a, b);
            CHECK(d <= c.diameter());
            CHECK(d == group_metric(g, b, a));
            for (const auto& h : g.elements) {
                CHECK(group_metric(g, compose(h, a), compose(h, b)) == d);
                CHECK(group_metric(g, compose(a, h), compose(b, h)) == d);
            }
        }
    }
    Permutation swap = identity_permutation(n);
    std::swap(swap[0], swap[1]);
    CHECK_THROWS_AS(group_metric(g, swap, rot), std::invalid_argument);
}

TEST_CASE("groups as metric spaces")
{
    std::mt19937_64 rng(6);
    CHECK(group_as_metric_space(isometry_group(random_real_metric(5, rng))).size() == 1);
    auto d6 = isometry_group(cycle_space(6, q(1, 6)).space);
    auto gs = group_as_metric_space(d6);
    CHECK(gs.size() == 12);
    CHECK(gs.diameter() == q(1, 2));
    CHECK(validate(gs).ok());
    for (const auto& h : d6.elements) {
        Permutation left(d6.order());
        for (std::size_t a = 0; a < d6.order(); ++a) left[a] = static_cast<std::uint32_t>(*d6.index_of(compose(h, d6.elements[a])));
        CHECK(is_isometry(gs, left));
    }
    std::vector<FiniteMetricSpace> bases = {c4xc4(), archimedean_vertices("icosahedron"), torus_grid(2, 5),
                                            solenoid_approximant(3, 12)};
    for (const auto& b : bases) {
        auto grp = group_as_metric_space(isometry_group(b));
        CHECK(validate(grp).ok());
        CHECK(grp.diameter() <= b.diameter());
    }
}

TEST_CASE("isometry entropy bound")
{
    auto check = verify_isometry_entropy_bound(cycle_space(6, q(1, 6)).space, Length(0.4));
    CHECK(check.lhs <= 12);
    CHECK(check.rhs == 46656);
    CHECK(check.holds);
    CHECK(check.exact);
    auto point = verify_isometry_entropy_bound(FiniteMetricSpace::point(), q(1));
    CHECK(point.lhs == 1);
    CHECK(point.rhs == 1);
    CHECK(point.holds);
    CHECK(self_power_saturating(0) == 1);
    CHECK(self_power_saturating(3) == 27);
    CHECK(self_power_saturating(40) == UINT64_MAX);

    std::mt19937_64 rng(10);
    for (int k = 0; k < 100; ++k) {
        auto s = oracle::random_metric(6, rng, 1, 3);
        for (const auto& eps : {q(1, 2), q(1), q(2), q(3), q(5)}) {
            auto c = verify_isometry_entropy_bound(s, eps);
            CHECK(c.exact);
            CHECK(c.holds);
        }
    }
    for (const auto& s : {cycle_space(12, q(1, 12)).space, archimedean_vertices("icosahedron"), torus_grid(2, 4)})
        for (double eps : {0.05, 0.1, 0.3, 0.7}) CHECK(verify_isometry_entropy_bound(s, Length(eps)).holds);
}
