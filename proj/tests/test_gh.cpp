#include "doctest.h"
#include "helpers.hpp"
#include "oracles.hpp"

#include "finhom/entropy.hpp"
#include "finhom/gh.hpp"
#include "finhom/isometry.hpp"
#include "finhom/spaces.hpp"

#include <numbers>
#include <random>

using namespace finhom;

namespace {

Length exact_gh(const FiniteMetricSpace& a, const FiniteMetricSpace& b)
{
    auto r = gh_exact(a, b);
    REQUIRE(r.exact);
    CHECK(r.lower == r.upper);
    CHECK(distortion(r.upper_certificate, a, b) == r.upper * q(2));
    return r.upper;
}

// Sides never mix under an isometry of the union when the cross distance
// exceeds every inner distance.
bool isometric_by_union(const FiniteMetricSpace& a, const FiniteMetricSpace& b)
{
    if (a.size() != b.size()) return false;
    const std::size_t na = a.size(), n = 2 * na;
    const Rational far = a.diameter().exact() + b.diameter().exact() + Rational(1);
    std::vector<Rational> d(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i < na && j < na) d[i * n + j] = a.exact_distance(i, j);
            else if (i >= na && j >= na) d[i * n + j] = b.exact_distance(i - na, j - na);
            else d[i * n + j] = far;
        }
    auto u = FiniteMetricSpace::exact(n, d);
    for (std::size_t t = na; t < n; ++t)
        if (find_isometry(u, {{0, t}}).found) return true;
    return false;
}

std::vector<FiniteMetricSpace> zoo(std::mt19937_64& rng, std::size_t count, std::size_t max_n)
{
    std::vector<FiniteMetricSpace> out = {FiniteMetricSpace::point(), int_space(2, {0, 1, 1, 0}),
                                          cycle_space(3, q(1, 3)).space, cycle_space(4, q(1, 4)).space};
    while (out.size() < count) out.push_back(oracle::random_metric(1 + rng() % max_n, rng, 1, 4, 2));
    return out;
}

} // namespace

TEST_CASE("distortion")
{
    auto c6 = cycle_space(6, q(1, 6)).space;
    CHECK(distortion(Correspondence::diagonal(6), c6, c6) == q(0));
    std::vector<std::pair<std::size_t, std::size_t>> to_point;
    for (std::size_t k = 0; k < 6; ++k) to_point.emplace_back(k, 0);
    CHECK(distortion(Correspondence::from_pairs(to_point), c6, FiniteMetricSpace::point()) == c6.diameter());
    CHECK_THROWS_AS(distortion(Correspondence::from_pairs({{0, 0}}), c6, c6), std::invalid_argument);

    // Roots of unity of order 6 inside the 12-point circle net.
    auto net = model_net(Circle{}, q(1, 24)).space;
    REQUIRE(net.size() == 12);
    std::vector<std::size_t> evens = {0, 2, 4, 6, 8, 10};
    auto sub = net.subspace(evens);
    std::vector<std::pair<std::size_t, std::size_t>> matching;
    for (std::size_t k = 0; k < 6; ++k) matching.emplace_back(k, k);
    CHECK(distortion(Correspondence::from_pairs(matching), c6, sub) == q(0));
}

TEST_CASE("exact GH on small cases")
{
    auto c6 = cycle_space(6, q(1, 6)).space;
    CHECK(exact_gh(c6, c6) == q(0));
    CHECK(exact_gh(FiniteMetricSpace::point(), c6) == q(1, 4));
    CHECK(exact_gh(int_space(2, {0, 1, 1, 0}), int_space(2, {0, 3, 3, 0}, 5)) == q(1, 5));
    auto approx = FiniteMetricSpace::approximate(2, {0, 0.6, 0.6, 0});
    auto r = gh_exact(int_space(2, {0, 1, 1, 0}), approx);
    CHECK(r.exact);
    CHECK(r.upper.value() == doctest::Approx(0.2));
}

TEST_CASE("exact GH matches exhaustive search")
{
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 150; ++trial) {
        auto a = oracle::random_metric(1 + rng() % 4, rng, 1, 5, 3);
        auto b = oracle::random_metric(1 + rng() % 4, rng, 1, 5, 3);
        auto value = exact_gh(a, b).exact();
        CHECK(value == oracle::gh_maps(a, b));
        if (a.size() * b.size() <= 12) CHECK(value == oracle::gh_relations(a, b));
    }
    for (int trial = 0; trial < 20; ++trial) {
        auto a = oracle::random_metric(5, rng, 1, 6);
        auto b = oracle::random_metric(3, rng, 1, 6);
        CHECK(exact_gh(a, b).exact() == oracle::gh_maps(a, b));
    }
}

TEST_CASE("exact GH is a metric on isometry classes")
{
    std::mt19937_64 rng(22);
    auto spaces = zoo(rng, 14, 6);
    std::vector<std::vector<Rational>> d(spaces.size(), std::vector<Rational>(spaces.size()));
    for (std::size_t i = 0; i < spaces.size(); ++i)
        for (std::size_t j = 0; j < spaces.size(); ++j) d[i][j] = exact_gh(spaces[i], spaces[j]).exact();
    for (std::size_t i = 0; i < spaces.size(); ++i)
        for (std::size_t j = 0; j < spaces.size(); ++j) {
            CHECK(d[i][j] == d[j][i]);
            CHECK((d[i][j] == Rational(0)) == isometric_by_union(spaces[i], spaces[j]));
            for (std::size_t k = 0; k < spaces.size(); ++k) CHECK(d[i][k] <= d[i][j] + d[j][k]);
        }
    // Relabelled copies are at distance zero.
    for (int trial = 0; trial < 10; ++trial) {
        auto a = oracle::random_metric(6, rng, 1, 3);
        std::vector<std::size_t> perm = {3, 1, 5, 0, 2, 4};
        CHECK(exact_gh(a, a.subspace(perm)) == q(0));
    }
}

TEST_CASE("GH to a point is half the diameter")
{
    std::mt19937_64 rng(23);
    for (const auto& s : zoo(rng, 20, 7)) CHECK(exact_gh(FiniteMetricSpace::point(), s) == s.diameter() / q(2));
    CHECK(exact_gh(FiniteMetricSpace::point(), torus_grid(2, 3)) == q(1, 6));
}

TEST_CASE("packing transfers through correspondences")
{
    std::mt19937_64 rng(24);
    for (int trial = 0; trial < 100; ++trial) {
        auto a = oracle::random_metric(2 + rng() % 6, rng, 1, 8, 2);
        auto b = oracle::random_metric(2 + rng() % 6, rng, 1, 8, 2);
        std::vector<std::size_t> f(a.size()), g(b.size());
        for (auto& v : f) v = rng() % b.size();
        for (auto& v : g) v = rng() % a.size();
        auto corr = Correspondence::from_maps(f, g);
        auto delta = distortion(corr, a, b);
        for (std::int64_t k = 1; k <= 18; ++k) {
            auto eps = q(k, 4);
            if (!(eps > delta)) continue;
            CHECK(oracle::packing(a, eps) <= oracle::packing(b, eps - delta));
        }
    }
}

TEST_CASE("lower and upper bounds bracket the exact value")
{
    std::mt19937_64 rng(25);
    for (int trial = 0; trial < 80; ++trial) {
        auto a = oracle::random_metric(1 + rng() % 6, rng, 1, 6, 2);
        auto b = oracle::random_metric(1 + rng() % 6, rng, 1, 6, 2);
        auto exact = exact_gh(a, b);
        auto lower = gh_lower_bounds(a, b);
        std::vector<std::size_t> f(a.size());
        for (auto& v : f) v = rng() % b.size();
        auto upper = gh_upper_from_map(a, b, f);
        CHECK(lower.value <= exact);
        CHECK(exact <= upper.value);
        CHECK(distortion(upper.corr, a, b) == upper.value * q(2));
    }
}

TEST_CASE("lower bound certificates")
{
    auto c6 = cycle_space(6, q(1, 6)).space;
    CHECK(gh_lower_bounds(c6, c6).value == q(0));
    auto pt = gh_lower_bounds(FiniteMetricSpace::point(), c6);
    CHECK(pt.value == q(1, 4));
    CHECK(pt.certificate.kind == GhLowerCertificate::Kind::diameter);

    auto c12 = cycle_space(12, q(1, 12)).space;
    std::vector<FiniteMetricSpace> f = {c12, c12};
    auto grid = sup_product(f);
    auto t = gh_lower_bounds(c12, grid);
    CHECK(t.value > q(0));
    CHECK(t.certificate.kind == GhLowerCertificate::Kind::packing_transfer);
    CHECK_FALSE(t.certificate.from_x);
    CHECK(t.certificate.packing_from > t.certificate.packing_to);
    // Below eps = 1/4 the grid still packs 16 > 12 points.
    CHECK(t.value >= q(1, 8));
    std::vector<std::size_t> diag;
    for (std::size_t k = 0; k < 12; ++k) diag.push_back(k * 12 + k);
    CHECK(t.value <= gh_upper_from_map(c12, grid, diag).value);
    CHECK_FALSE(t.certificate.describe().empty());
}

TEST_CASE("upper bounds from maps")
{
    auto c5 = cycle_space(5, q(1, 5)).space;
    std::vector<std::size_t> id = {0, 1, 2, 3, 4};
    CHECK(gh_upper_from_map(c5, c5, id).value == q(0));

    for (std::int64_t m : {3, 5, 8}) {
        auto grid = torus_grid(1, static_cast<std::size_t>(m), {q(1)});
        auto net = model_net(Circle{}, q(1, 4 * m));
        REQUIRE(net.space.size() == static_cast<std::size_t>(2 * m));
        std::vector<std::size_t> inc;
        for (std::int64_t k = 0; k < m; ++k) inc.push_back(static_cast<std::size_t>(2 * k));
        CHECK(gh_upper_from_map(grid, net.space, inc).value <= q(1, 2 * m) + net.hausdorff_bound / q(2));
    }

    std::mt19937_64 rng(26);
    for (int trial = 0; trial < 30; ++trial) {
        auto a = oracle::random_metric(1 + rng() % 5, rng);
        auto b = oracle::random_metric(1 + rng() % 5, rng);
        std::vector<std::size_t> constant(a.size(), rng() % b.size());
        CHECK(gh_upper_from_map(a, b, constant).value >= exact_gh(a, b));
    }
}

TEST_CASE("bounds against model spaces")
{
    auto mesh = q(1, 40);
    auto net = model_net(Circle{}, mesh);
    auto own = gh_to_model(net.space, Circle{}, mesh, net.points);
    CHECK(own.upper <= net.hausdorff_bound * q(2));
    for (std::size_t n : {6u, 10u, 24u, 60u}) {
        auto c = cycle_space(n, q(1, static_cast<std::int64_t>(n))).space;
        auto with_embedding = gh_to_model(c, Circle{}, mesh, cycle_embedding(n));
        auto h = model_net(Circle{}, mesh).hausdorff_bound;
        CHECK(with_embedding.upper <= q(1, 2 * static_cast<std::int64_t>(n)) + h * q(2));
        CHECK(with_embedding.lower <= with_embedding.upper);
        auto blind = gh_to_model(c, Circle{}, mesh);
        CHECK(blind.lower <= blind.upper);
        CHECK(blind.upper <= c.diameter() + h);
    }
    auto ico = archimedean_vertices("icosahedron");
    auto s = gh_to_model(ico, Sphere2{}, Length(0.3), archimedean_embedding("icosahedron"));
    CHECK(s.lower <= s.upper);
    CHECK(s.upper.value() < std::numbers::pi / 2);
}

TEST_CASE("epsilon equivalences")
{
    auto c7 = cycle_space(7, q(1, 7)).space;
    auto id = epsilon_equivalence(c7, c7, Correspondence::diagonal(7));
    CHECK(id.epsilon == q(0));
    CHECK(id.f == std::vector<std::size_t>{0, 1, 2, 3, 4, 5, 6});
    CHECK(id.g == id.f);

    auto best = gh_exact(FiniteMetricSpace::point(), c7);
    auto pe = epsilon_equivalence(FiniteMetricSpace::point(), c7, best.upper_certificate);
    CHECK(pe.epsilon == c7.diameter());

    auto c12 = cycle_space(12, q(1, 12)).space;
    auto c24 = cycle_space(24, q(1, 24)).space;
    std::vector<std::pair<std::size_t, std::size_t>> doubling;
    for (std::size_t k = 0; k < 12; ++k) {
        doubling.emplace_back(k, 2 * k);
        doubling.emplace_back(k, 2 * k + 1);
    }
    auto eq = epsilon_equivalence(c12, c24, Correspondence::from_pairs(doubling));
    CHECK(eq.epsilon == q(1, 24));
    auto defects = equivalence_defects(c12, c24, eq.f, eq.g);
    CHECK(defects.worst() <= q(1, 24));
    CHECK(defects.displacement_fg <= q(1, 24));
    CHECK(defects.displacement_gf == q(0));

    std::mt19937_64 rng(27);
    for (int trial = 0; trial < 40; ++trial) {
        auto a = oracle::random_metric(1 + rng() % 6, rng);
        auto b = oracle::random_metric(1 + rng() % 6, rng);
        std::vector<std::size_t> f(a.size()), g(b.size());
        for (auto& v : f) v = rng() % b.size();
        for (auto& v : g) v = rng() % a.size();
        auto e = epsilon_equivalence(a, b, Correspondence::from_maps(f, g));
        CHECK(equivalence_defects(a, b, e.f, e.g).worst() <= e.epsilon);
    }
}
