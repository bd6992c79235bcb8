#include "finhom/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <queue>
#include <set>
#include <tuple>

namespace finhom {

GraphSpace graph_space(std::size_t n, std::vector<std::pair<std::size_t, std::size_t>> edges, const Length& scale,
                       std::string provenance)
{
    if (n == 0) throw std::invalid_argument("graph needs at least one vertex");
    if (!(scale > Length(0))) throw std::invalid_argument("graph scale must be positive");
    std::set<std::pair<std::size_t, std::size_t>> unique;
    for (auto [u, v] : edges) {
        if (u >= n || v >= n) throw std::invalid_argument("edge endpoint out of range");
        if (u != v) unique.emplace(std::min(u, v), std::max(u, v));
    }
    std::vector<std::vector<std::size_t>> adj(n);
    for (auto [u, v] : unique) {
        adj[u].push_back(v);
        adj[v].push_back(u);
    }
    GraphSpace g;
    g.edges.assign(unique.begin(), unique.end());
    g.scale = scale;
    g.hops.assign(n * n, UINT32_MAX);
    for (std::size_t s = 0; s < n; ++s) {
        std::queue<std::size_t> queue;
        g.hops[s * n + s] = 0;
        queue.push(s);
        while (!queue.empty()) {
            auto u = queue.front();
            queue.pop();
            for (auto v : adj[u])
                if (g.hops[s * n + v] == UINT32_MAX) {
                    g.hops[s * n + v] = g.hops[s * n + u] + 1;
                    queue.push(v);
                }
        }
        if (s == 0)
            for (std::size_t v = 0; v < n; ++v)
                if (g.hops[v] == UINT32_MAX)
                    throw DisconnectedGraph("graph is disconnected: vertex " + std::to_string(v) + " unreachable", v);
    }
    std::vector<Length> d(n * n);
    for (std::size_t e = 0; e < n * n; ++e) d[e] = scale * Length(static_cast<std::int64_t>(g.hops[e]));
    g.space = FiniteMetricSpace::from_lengths(n, d, std::move(provenance));
    return g;
}

GraphSpace cycle_space(std::size_t n, const Length& scale)
{
    if (n < 3) throw std::invalid_argument("cycle needs at least 3 vertices");
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t i = 0; i < n; ++i) edges.emplace_back(i, (i + 1) % n);
    return graph_space(n, std::move(edges), scale, "cycle(" + std::to_string(n) + "," + scale.str() + ")");
}

GraphSpace cayley_space(const FiniteGroup& group, std::span<const std::uint32_t> generators, const Length& scale)
{
    const std::size_t n = group.order();
    std::set<std::uint32_t> gens(generators.begin(), generators.end());
    for (auto s : gens) {
        if (s >= n) throw std::invalid_argument("generator out of range");
        if (!gens.count(group.inverse(s)))
            throw std::invalid_argument("generating set is not symmetric: inverse of " + std::to_string(s) + " missing");
    }
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (std::uint32_t g = 0; g < n; ++g)
        for (auto s : gens) edges.emplace_back(g, group.multiply(g, s));
    try {
        // Vertex 0 need not be the identity, but connectivity does not care.
        return graph_space(n, std::move(edges), scale, "cayley(" + std::to_string(n) + "," + scale.str() + ")");
    } catch (const DisconnectedGraph& e) {
        throw DisconnectedGraph("generators do not generate the group: element " + std::to_string(e.unreachable()) +
                                    " unreachable",
                                e.unreachable());
    }
}

FiniteMetricSpace torus_grid(std::size_t d, std::size_t m, std::vector<Length> circumferences)
{
    if (d < 1) throw std::invalid_argument("torus grid dimension must be at least 1");
    if (m < 3) throw std::invalid_argument("torus grid needs m >= 3");
    if (circumferences.empty()) circumferences.assign(d, Length(1));
    if (circumferences.size() != d) throw std::invalid_argument("torus grid needs one circumference per dimension");
    std::vector<FiniteMetricSpace> factors;
    for (const auto& c : circumferences) {
        if (!(c > Length(0))) throw std::invalid_argument("circumferences must be positive");
        factors.push_back(cycle_space(m, c / Length(static_cast<std::int64_t>(m))).space);
    }
    FiniteMetricSpace out = sup_product(factors);
    out.set_provenance("torus_grid(" + std::to_string(d) + "," + std::to_string(m) + ")");
    return out;
}

FiniteMetricSpace solenoid_approximant(int depth, std::size_t n)
{
    if (depth < 1) throw std::invalid_argument("solenoid depth must be at least 1");
    if (n < 1) throw std::invalid_argument("solenoid approximant needs n >= 1");
    const SolenoidTruncation levels = SolenoidTruncation::factorial(depth);
    const std::int64_t top = levels.orders.back();
    const auto nn = static_cast<std::int64_t>(n);
    if (nn % top != 0)
        throw std::invalid_argument("n = " + std::to_string(n) + " is not a multiple of " + std::to_string(top));
    std::vector<Length> row(n);
    for (std::int64_t k = 0; k < nn; ++k) {
        Rational sum(0);
        for (std::size_t j = 0; j < levels.orders.size(); ++j)
            sum += levels.weights[j].exact() * arc_distance(Rational(k * levels.multiplier(j), nn), Rational(0));
        row[static_cast<std::size_t>(k)] = sum;
    }
    return circulant_space(row, "solenoid(" + std::to_string(depth) + "," + std::to_string(n) + ")");
}

namespace {

struct Pattern {
    Vec3 base;
    enum class Perms { cyclic, all } perms;
    enum class Signs { all, even_minus } signs = Signs::all;
};

std::vector<Vec3> expand(const std::vector<Pattern>& patterns)
{
    std::map<std::tuple<long long, long long, long long>, Vec3> unique;
    for (const auto& pat : patterns) {
        std::vector<std::array<int, 3>> orders = {{0, 1, 2}, {1, 2, 0}, {2, 0, 1}};
        if (pat.perms == Pattern::Perms::all) {
            orders.push_back({0, 2, 1});
            orders.push_back({2, 1, 0});
            orders.push_back({1, 0, 2});
        }
        for (const auto& o : orders)
            for (int signs = 0; signs < 8; ++signs) {
                int minus = 0;
                Vec3 v;
                for (int k = 0; k < 3; ++k) {
                    double c = pat.base[o[k]];
                    bool neg = (signs >> k) & 1;
                    if (neg && c == 0.0) {
                        minus = -100;  // duplicate of the unsigned zero
                    }
                    if (neg) ++minus;
                    v[k] = neg ? -c : c;
                }
                if (minus < 0) continue;
                if (pat.signs == Pattern::Signs::even_minus && minus % 2 != 0) continue;
                auto key = std::make_tuple(std::llround(v[0] * 1e9), std::llround(v[1] * 1e9), std::llround(v[2] * 1e9));
                unique.emplace(key, v);
            }
    }
    std::vector<Vec3> out;
    for (auto& [key, v] : unique) {
        double len = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
        out.push_back({v[0] / len, v[1] / len, v[2] / len});
    }
    return out;
}

const std::map<std::string, std::pair<std::vector<Pattern>, std::size_t>, std::less<>>& solids()
{
    using P = Pattern;
    constexpr double phi = std::numbers::phi;
    const double r2 = std::numbers::sqrt2;
    static const std::map<std::string, std::pair<std::vector<Pattern>, std::size_t>, std::less<>> table = {
        {"tetrahedron", {{{{1, 1, 1}, P::Perms::cyclic, P::Signs::even_minus}}, 4}},
        {"octahedron", {{{{1, 0, 0}, P::Perms::cyclic}}, 6}},
        {"cube", {{{{1, 1, 1}, P::Perms::cyclic}}, 8}},
        {"icosahedron", {{{{0, 1, phi}, P::Perms::cyclic}}, 12}},
        {"dodecahedron", {{{{1, 1, 1}, P::Perms::cyclic}, {{0, 1 / phi, phi}, P::Perms::cyclic}}, 20}},
        {"cuboctahedron", {{{{1, 1, 0}, P::Perms::cyclic}}, 12}},
        {"icosidodecahedron",
         {{{{0, 0, phi}, P::Perms::cyclic}, {{0.5, phi / 2, phi * phi / 2}, P::Perms::cyclic}}, 30}},
        {"truncated_tetrahedron", {{{{3, 1, 1}, P::Perms::cyclic, P::Signs::even_minus}}, 12}},
        {"truncated_octahedron", {{{{0, 1, 2}, P::Perms::all}}, 24}},
        {"truncated_cube", {{{{r2 - 1, 1, 1}, P::Perms::cyclic}}, 24}},
        {"rhombicuboctahedron", {{{{1, 1, 1 + r2}, P::Perms::cyclic}}, 24}},
        {"truncated_cuboctahedron", {{{{1, 1 + r2, 1 + 2 * r2}, P::Perms::all}}, 48}},
        {"truncated_icosahedron",
         {{{{0, 1, 3 * phi}, P::Perms::cyclic},
           {{1, 2 + phi, 2 * phi}, P::Perms::cyclic},
           {{phi, 2, phi * phi * phi}, P::Perms::cyclic}},
          60}},
        {"rhombicosidodecahedron",
         {{{{1, 1, phi * phi * phi}, P::Perms::cyclic},
           {{phi * phi, phi, 2 * phi}, P::Perms::cyclic},
           {{2 + phi, 0, phi * phi}, P::Perms::cyclic}},
          60}},
    };
    return table;
}

} // namespace

const std::vector<std::string>& archimedean_catalogue()
{
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const auto& [name, spec] : solids()) out.push_back(name);
        return out;
    }();
    return names;
}

std::vector<Vec3> archimedean_points(std::string_view name)
{
    auto it = solids().find(name);
    if (it == solids().end()) throw std::invalid_argument("unknown polyhedron '" + std::string(name) + "'");
    auto points = expand(it->second.first);
    if (points.size() != it->second.second)
        throw std::logic_error("polyhedron '" + std::string(name) + "' produced " + std::to_string(points.size()) +
                               " vertices");
    for (const auto& p : points)
        if (std::abs(p[0] * p[0] + p[1] * p[1] + p[2] * p[2] - 1.0) > 1e-9)
            throw std::logic_error("polyhedron vertex off the unit sphere");
    return points;
}

FiniteMetricSpace archimedean_vertices(std::string_view name)
{
    auto points = archimedean_points(name);
    const std::size_t n = points.size();
    std::vector<double> d(n * n);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) d[a * n + b] = a == b ? 0.0 : sphere_angle(points[a], points[b]);
    return FiniteMetricSpace::approximate(n, std::move(d), kDefaultTolerance, std::string(name));
}

std::optional<Length> girth(const GraphSpace& graph)
{
    const std::size_t n = graph.space.size();
    std::vector<std::vector<std::size_t>> adj(n);
    for (auto [u, v] : graph.edges) {
        adj[u].push_back(v);
        adj[v].push_back(u);
    }
    std::size_t best = SIZE_MAX;
    std::vector<std::size_t> dist(n), parent(n);
    for (std::size_t root = 0; root < n; ++root) {
        std::fill(dist.begin(), dist.end(), SIZE_MAX);
        dist[root] = 0;
        parent[root] = SIZE_MAX;
        std::queue<std::size_t> queue;
        queue.push(root);
        while (!queue.empty()) {
            auto u = queue.front();
            queue.pop();
            for (auto v : adj[u]) {
                if (dist[v] == SIZE_MAX) {
                    dist[v] = dist[u] + 1;
                    parent[v] = u;
                    queue.push(v);
                } else if (parent[u] != v) {
                    best = std::min(best, dist[u] + dist[v] + 1);
                }
            }
        }
    }
    if (best == SIZE_MAX) return std::nullopt;
    return graph.scale * Length(static_cast<std::int64_t>(best));
}

std::vector<ModelPoint> cycle_embedding(std::size_t n)
{
    std::vector<ModelPoint> out;
    for (std::size_t k = 0; k < n; ++k) out.push_back({static_cast<double>(k) / static_cast<double>(n)});
    return out;
}

std::vector<ModelPoint> torus_grid_embedding(std::size_t d, std::size_t m)
{
    std::size_t total = 1;
    for (std::size_t f = 0; f < d; ++f) total *= m;
    std::vector<std::size_t> orders(d, m);
    std::vector<ModelPoint> out;
    for (std::size_t p = 0; p < total; ++p) {
        auto digits = FiniteGroup::abelian_digits(orders, p);
        ModelPoint point;
        for (auto digit : digits) point.push_back(static_cast<double>(digit) / static_cast<double>(m));
        out.push_back(std::move(point));
    }
    return out;
}

std::vector<ModelPoint> solenoid_embedding(std::size_t n) { return cycle_embedding(n); }

std::vector<ModelPoint> archimedean_embedding(std::string_view name)
{
    std::vector<ModelPoint> out;
    for (const auto& p : archimedean_points(name)) out.push_back({p[0], p[1], p[2]});
    return out;
}

} // namespace finhom
