#pragma once

// Brute-force reference computations. They share no code with the library
// beyond reading distances, and only scale to tiny inputs.

#include "finhom/group.hpp"
#include "finhom/metric_space.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

namespace oracle {

using finhom::FiniteMetricSpace;
using finhom::Length;

inline bool exceeds(const FiniteMetricSpace& s, std::size_t i, std::size_t j, const Length& eps)
{
    if (s.is_exact() && eps.is_exact()) return s.exact_distance(i, j) > eps.exact();
    return s.value(i, j) > eps.value() + s.tolerance();
}

inline bool within(const FiniteMetricSpace& s, std::size_t i, std::size_t j, const Length& eps)
{
    if (s.is_exact() && eps.is_exact()) return s.exact_distance(i, j) <= eps.exact();
    return s.value(i, j) <= eps.value() + s.tolerance();
}

inline bool same_distance(const FiniteMetricSpace& s, std::size_t a, std::size_t b, std::size_t c, std::size_t d)
{
    if (s.is_exact()) return s.exact_distance(a, b) == s.exact_distance(c, d);
    return std::abs(s.value(a, b) - s.value(c, d)) <= s.tolerance();
}

/// Largest subset with all pairwise distances > eps, over all 2^n subsets.
inline std::size_t packing(const FiniteMetricSpace& s, const Length& eps)
{
    const std::size_t n = s.size();
    if (n > 22) throw std::invalid_argument("oracle packing limited to 22 points");
    std::size_t best = 0;
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
        const auto bits = static_cast<std::size_t>(__builtin_popcount(mask));
        if (bits <= best) continue;
        bool ok = true;
        for (std::size_t i = 0; i < n && ok; ++i)
            if (mask >> i & 1)
                for (std::size_t j = i + 1; j < n && ok; ++j)
                    if (mask >> j & 1) ok = exceeds(s, i, j, eps);
        if (ok) best = bits;
    }
    return best;
}

/// Fewest centres whose closed eps-balls cover, over all subsets.
inline std::size_t covering(const FiniteMetricSpace& s, const Length& eps)
{
    const std::size_t n = s.size();
    if (n > 22) throw std::invalid_argument("oracle covering limited to 22 points");
    std::size_t best = n;
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
        const auto bits = static_cast<std::size_t>(__builtin_popcount(mask));
        if (bits >= best) continue;
        bool ok = true;
        for (std::size_t p = 0; p < n && ok; ++p) {
            bool hit = false;
            for (std::size_t c = 0; c < n && !hit; ++c)
                if (mask >> c & 1) hit = within(s, c, p, eps);
            ok = hit;
        }
        if (ok) best = bits;
    }
    return best;
}

/// Every distance-preserving permutation, sorted.
inline std::vector<finhom::Permutation> isometries(const FiniteMetricSpace& s)
{
    const std::size_t n = s.size();
    if (n > 9) throw std::invalid_argument("oracle isometries limited to 9 points");
    std::vector<finhom::Permutation> out;
    finhom::Permutation p(n);
    std::iota(p.begin(), p.end(), 0u);
    do {
        bool ok = true;
        for (std::size_t i = 0; i < n && ok; ++i)
            for (std::size_t j = 0; j < n && ok; ++j) ok = same_distance(s, p[i], p[j], i, j);
        if (ok) out.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
    return out;
}

/// Random metric on n points: shortest paths over random integer weights in
/// [lo, hi], divided by `den`. Exact mode.
inline FiniteMetricSpace random_metric(std::size_t n, std::mt19937_64& rng, int lo = 1, int hi = 20, int den = 1)
{
    std::uniform_int_distribution<int> w(lo, hi);
    std::vector<std::int64_t> d(n * n, 0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) d[i * n + j] = d[j * n + i] = w(rng);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) d[i * n + j] = std::min(d[i * n + j], d[i * n + k] + d[k * n + j]);
    std::vector<finhom::Rational> q(n * n);
    for (std::size_t e = 0; e < n * n; ++e) q[e] = finhom::Rational(d[e], den);
    return FiniteMetricSpace::exact(n, q, "random");
}

inline finhom::Rational rabs(const finhom::Rational& r) { return r < finhom::Rational(0) ? -r : r; }

inline finhom::Rational relation_distortion(const FiniteMetricSpace& x, const FiniteMetricSpace& y,
                                            const std::vector<std::pair<std::size_t, std::size_t>>& rel)
{
    finhom::Rational worst(0);
    for (auto [a, b] : rel)
        for (auto [c, d] : rel) worst = std::max(worst, rabs(x.exact_distance(a, c) - y.exact_distance(b, d)));
    return worst;
}

/// Half the least distortion over every relation onto both sides (exact spaces,
/// |X| * |Y| <= 16).
inline finhom::Rational gh_relations(const FiniteMetricSpace& x, const FiniteMetricSpace& y)
{
    const std::size_t nx = x.size(), ny = y.size(), cells = nx * ny;
    if (cells > 16) throw std::invalid_argument("oracle relation search limited to 16 cells");
    std::optional<finhom::Rational> best;
    for (std::uint32_t mask = 1; mask < (1u << cells); ++mask) {
        std::vector<std::pair<std::size_t, std::size_t>> rel;
        std::vector<bool> hx(nx, false), hy(ny, false);
        for (std::size_t c = 0; c < cells; ++c)
            if (mask >> c & 1) {
                rel.emplace_back(c / ny, c % ny);
                hx[c / ny] = hy[c % ny] = true;
            }
        if (std::find(hx.begin(), hx.end(), false) != hx.end()) continue;
        if (std::find(hy.begin(), hy.end(), false) != hy.end()) continue;
        auto d = relation_distortion(x, y, rel);
        if (!best || d < *best) best = d;
    }
    return *best / finhom::Rational(2);
}

/// Half the least distortion over all map pairs f: X -> Y, g: Y -> X.
inline finhom::Rational gh_maps(const FiniteMetricSpace& x, const FiniteMetricSpace& y)
{
    const std::size_t nx = x.size(), ny = y.size();
    double combos = std::pow(double(ny), double(nx)) * std::pow(double(nx), double(ny));
    if (combos > 2e6) throw std::invalid_argument("oracle map search too large");
    std::vector<std::size_t> f(nx, 0), g(ny, 0);
    std::optional<finhom::Rational> best;
    while (true) {
        std::vector<std::pair<std::size_t, std::size_t>> rel;
        for (std::size_t a = 0; a < nx; ++a) rel.emplace_back(a, f[a]);
        for (std::size_t b = 0; b < ny; ++b) rel.emplace_back(g[b], b);
        auto d = relation_distortion(x, y, rel);
        if (!best || d < *best) best = d;
        // Odometer over f then g.
        std::size_t k = 0;
        for (; k < nx + ny; ++k) {
            auto& digit = k < nx ? f[k] : g[k - nx];
            const std::size_t base = k < nx ? ny : nx;
            if (++digit < base) break;
            digit = 0;
        }
        if (k == nx + ny) break;
    }
    return *best / finhom::Rational(2);
}

} // namespace oracle
