#include "finhom/isometry.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>

namespace finhom {

namespace {

class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), std::size_t{0}); }
    std::size_t find(std::size_t x)
    {
        while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
        return x;
    }
    void unite(std::size_t a, std::size_t b)
    {
        a = find(a);
        b = find(b);
        if (a != b) parent_[std::max(a, b)] = std::min(a, b);
    }

private:
    std::vector<std::size_t> parent_;
};

// Depth-first search for rank-preserving bijections.
class Backtracker {
public:
    Backtracker(const FiniteMetricSpace& space, const std::vector<std::uint32_t>& colours,
                const std::vector<std::pair<std::size_t, std::size_t>>& fixed, std::uint64_t budget)
        : s_(space), n_(space.size()), colours_(colours), fixed_(fixed), budget_(budget)
    {
        by_rank_.resize(n_);
        for (std::size_t b = 0; b < n_; ++b) {
            auto& row = by_rank_[b];
            row.resize(n_);
            std::iota(row.begin(), row.end(), 0u);
            std::stable_sort(row.begin(), row.end(),
                             [&](std::uint32_t x, std::uint32_t y) { return s_.rank(b, x) < s_.rank(b, y); });
        }
        std::vector<bool> placed(n_, false);
        for (auto [p, q] : fixed_) {
            if (p >= n_ || q >= n_) throw std::invalid_argument("fixed point out of range");
            if (placed[p]) throw std::invalid_argument("point fixed twice");
            placed[p] = true;
            order_.push_back(p);
        }
        if (order_.empty() && n_ > 0) {
            std::map<std::uint32_t, std::size_t> class_size;
            for (auto c : colours_) ++class_size[c];
            std::size_t first = 0;
            for (std::size_t p = 1; p < n_; ++p)
                if (class_size[colours_[p]] < class_size[colours_[first]]) first = p;
            placed[first] = true;
            order_.push_back(first);
        }
        std::vector<std::size_t> rest;
        for (std::size_t p = 0; p < n_; ++p)
            if (!placed[p]) rest.push_back(p);
        if (!order_.empty()) {
            const std::size_t root = order_.front();
            std::stable_sort(rest.begin(), rest.end(),
                             [&](std::size_t a, std::size_t b) { return s_.rank(root, a) < s_.rank(root, b); });
        }
        order_.insert(order_.end(), rest.begin(), rest.end());
        img_.assign(n_, 0);
        used_.assign(n_, false);
    }

    template <class Visit>
    void run(Visit&& visit)
    {
        aborted_ = false;
        stopped_ = false;
        nodes_ = 0;
        if (n_ == 0) return;
        dfs(0, visit);
    }

    bool aborted() const { return aborted_; }

private:
    bool consistent(std::size_t k, std::size_t p, std::uint32_t q) const
    {
        if (used_[q] || colours_[p] != colours_[q]) return false;
        for (std::size_t i = 0; i < k; ++i) {
            const std::size_t a = order_[i];
            if (s_.rank(img_[a], q) != s_.rank(a, p)) return false;
        }
        return true;
    }

    template <class Visit>
    void dfs(std::size_t k, Visit& visit)
    {
        if (stopped_) return;
        if (++nodes_ > budget_) {
            aborted_ = stopped_ = true;
            return;
        }
        if (k == n_) {
            if (!visit(img_)) stopped_ = true;
            return;
        }
        const std::size_t p = order_[k];
        auto try_candidate = [&](std::uint32_t q) {
            if (!consistent(k, p, q)) return;
            img_[p] = q;
            used_[q] = true;
            dfs(k + 1, visit);
            used_[q] = false;
        };
        if (k < fixed_.size()) {
            try_candidate(static_cast<std::uint32_t>(fixed_[k].second));
            return;
        }
        if (k == 0) {
            for (std::uint32_t q = 0; q < n_ && !stopped_; ++q) try_candidate(q);
            return;
        }
        // Candidates sit in the by-rank bucket of some already mapped point;
        // take the smallest such bucket.
        std::span<const std::uint32_t> best;
        bool have = false;
        for (std::size_t i = 0; i < k; ++i) {
            const std::size_t a = order_[i];
            const std::uint32_t r = s_.rank(a, p);
            const auto& row = by_rank_[img_[a]];
            const std::size_t b = img_[a];
            auto lo = std::lower_bound(row.begin(), row.end(), r,
                                       [&](std::uint32_t x, std::uint32_t v) { return s_.rank(b, x) < v; });
            auto hi = std::upper_bound(lo, row.end(), r,
                                       [&](std::uint32_t v, std::uint32_t x) { return v < s_.rank(b, x); });
            std::span<const std::uint32_t> bucket(&*row.begin() + (lo - row.begin()), static_cast<std::size_t>(hi - lo));
            if (!have || bucket.size() < best.size()) {
                best = bucket;
                have = true;
            }
            if (best.empty()) return;
        }
        // Copy: the recursion does not touch by_rank_, but keep the loop
        // independent of span lifetimes anyway.
        std::vector<std::uint32_t> candidates(best.begin(), best.end());
        for (auto q : candidates) {
            if (stopped_) return;
            try_candidate(q);
        }
    }

    const FiniteMetricSpace& s_;
    std::size_t n_;
    const std::vector<std::uint32_t>& colours_;
    std::vector<std::pair<std::size_t, std::size_t>> fixed_;
    std::uint64_t budget_;
    std::vector<std::vector<std::uint32_t>> by_rank_;
    std::vector<std::size_t> order_;
    Permutation img_;
    std::vector<bool> used_;
    std::uint64_t nodes_ = 0;
    bool aborted_ = false;
    bool stopped_ = false;
};

std::size_t class_count(const std::vector<std::uint32_t>& colours)
{
    std::vector<std::uint32_t> c = colours;
    std::sort(c.begin(), c.end());
    return static_cast<std::size_t>(std::unique(c.begin(), c.end()) - c.begin());
}

constexpr std::size_t kGeneratorLimit = 50'000;

std::vector<Permutation> greedy_generators(const std::vector<Permutation>& elements,
                                           const IsometryGroup& group)
{
    std::vector<Permutation> gens;
    std::vector<bool> in_sub(elements.size(), false);
    std::vector<std::size_t> members;
    in_sub[0] = true;
    members.push_back(0);
    for (std::size_t e = 1; e < elements.size(); ++e) {
        if (in_sub[e]) continue;
        gens.push_back(elements[e]);
        // Close the subgroup under left multiplication by every generator.
        std::vector<std::size_t> queue = members;
        while (!queue.empty()) {
            std::size_t h = queue.back();
            queue.pop_back();
            for (const auto& g : gens) {
                auto idx = group.index_of(compose(g, elements[h]));
                if (!idx) throw std::logic_error("isometry set is not closed under composition");
                if (!in_sub[*idx]) {
                    in_sub[*idx] = true;
                    members.push_back(*idx);
                    queue.push_back(*idx);
                }
            }
        }
    }
    return gens;
}

Length level_of(const FiniteMetricSpace& space, std::uint32_t rank) { return space.levels()[rank]; }

} // namespace

std::optional<std::size_t> IsometryGroup::index_of(const Permutation& p) const
{
    auto it = std::lower_bound(elements.begin(), elements.end(), p);
    if (it == elements.end() || *it != p) return std::nullopt;
    return static_cast<std::size_t>(it - elements.begin());
}

bool is_isometry(const FiniteMetricSpace& space, const Permutation& p)
{
    const std::size_t n = space.size();
    if (p.size() != n) return false;
    std::vector<bool> seen(n, false);
    for (auto x : p) {
        if (x >= n || seen[x]) return false;
        seen[x] = true;
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (space.rank(p[i], p[j]) != space.rank(i, j)) return false;
    return true;
}

std::vector<std::uint32_t> refine_colours(const FiniteMetricSpace& space)
{
    const std::size_t n = space.size();
    std::vector<std::uint32_t> colours(n, 0);
    std::size_t classes = n == 0 ? 0 : 1;
    using Signature = std::pair<std::uint32_t, std::vector<std::pair<std::uint32_t, std::uint32_t>>>;
    while (true) {
        std::vector<Signature> sig(n);
        for (std::size_t i = 0; i < n; ++i) {
            sig[i].first = colours[i];
            auto& pairs = sig[i].second;
            pairs.reserve(n);
            for (std::size_t j = 0; j < n; ++j) pairs.emplace_back(space.rank(i, j), colours[j]);
            std::sort(pairs.begin(), pairs.end());
        }
        std::vector<std::size_t> idx(n);
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return sig[a] < sig[b]; });
        std::vector<std::uint32_t> next(n, 0);
        std::uint32_t id = 0;
        for (std::size_t k = 0; k < n; ++k) {
            if (k > 0 && sig[idx[k]] != sig[idx[k - 1]]) ++id;
            next[idx[k]] = id;
        }
        colours = std::move(next);
        const std::size_t now = class_count(colours);
        if (now == classes) break;
        classes = now;
    }
    return colours;
}

IsometrySearch find_isometry(const FiniteMetricSpace& space,
                             const std::vector<std::pair<std::size_t, std::size_t>>& fixed,
                             std::uint64_t node_budget)
{
    return find_isometry_coloured(space, refine_colours(space), fixed, node_budget);
}

IsometrySearch find_isometry_coloured(const FiniteMetricSpace& space, const std::vector<std::uint32_t>& colours,
                                      const std::vector<std::pair<std::size_t, std::size_t>>& fixed,
                                      std::uint64_t node_budget)
{
    IsometrySearch out;
    Backtracker bt(space, colours, fixed, node_budget);
    bt.run([&](const Permutation& p) {
        out.found = p;
        return false;
    });
    out.exhausted = out.found.has_value() || !bt.aborted();
    return out;
}

IsometryGroup isometry_group(const FiniteMetricSpace& space, const IsometryOptions& options)
{
    IsometryGroup group;
    group.base = space;
    const std::size_t n = space.size();
    if (n > options.max_points) {
        group.elements.push_back(identity_permutation(n));
        group.complete = false;
        group.note = "space has " + std::to_string(n) + " points, above the limit of " +
                     std::to_string(options.max_points);
        return group;
    }
    const auto colours = refine_colours(space);
    Backtracker bt(space, colours, {}, options.node_budget);
    bool too_many = false;
    bt.run([&](const Permutation& p) {
        if (group.elements.size() >= options.max_elements) {
            too_many = true;
            return false;
        }
        group.elements.push_back(p);
        return true;
    });
    std::sort(group.elements.begin(), group.elements.end());
    if (too_many) {
        group.complete = false;
        group.note = "more than " + std::to_string(options.max_elements) + " isometries";
    } else if (bt.aborted()) {
        group.complete = false;
        group.note = "search node budget exhausted";
    }
    if (group.elements.empty() || group.elements.front() != identity_permutation(n))
        throw std::logic_error("isometry search missed the identity");
    if (group.complete && group.order() <= kGeneratorLimit) {
        group.generators = greedy_generators(group.elements, group);
        for (const auto& g : group.generators)
            for (const auto& h : group.elements)
                if (!group.contains(compose(g, h))) throw std::logic_error("isometry group is not closed");
    }
    return group;
}

std::optional<bool> is_homogeneous(const FiniteMetricSpace& space, const IsometryOptions& options)
{
    const std::size_t n = space.size();
    if (n <= 1) return true;
    const auto colours = refine_colours(space);
    if (class_count(colours) > 1) return false;
    UnionFind orbits(n);
    bool unresolved = false;
    for (std::size_t t = 1; t < n; ++t) {
        if (orbits.find(t) == orbits.find(0)) continue;
        auto res = find_isometry_coloured(space, colours, {{0, t}}, options.node_budget);
        if (res.found) {
            for (std::size_t x = 0; x < n; ++x) orbits.unite(x, (*res.found)[x]);
        } else if (res.exhausted) {
            return false;
        } else {
            unresolved = true;
        }
    }
    for (std::size_t t = 1; t < n; ++t)
        if (orbits.find(t) != orbits.find(0)) return unresolved ? std::nullopt : std::optional<bool>(false);
    return true;
}

std::optional<bool> sphere_orbit_transitivity(const FiniteMetricSpace& space, std::size_t x, const Length& r,
                                              const IsometryOptions& options)
{
    const std::size_t n = space.size();
    if (x >= n) throw std::invalid_argument("point out of range");
    auto rk = space.rank_of(r);
    if (!rk) return true;
    std::vector<std::size_t> sphere;
    for (std::size_t y = 0; y < n; ++y)
        if (space.rank(x, y) == *rk) sphere.push_back(y);
    if (sphere.size() <= 1) return true;
    const auto colours = refine_colours(space);
    UnionFind orbits(n);
    bool unresolved = false;
    const std::size_t y0 = sphere.front();
    for (std::size_t k = 1; k < sphere.size(); ++k) {
        const std::size_t y = sphere[k];
        if (orbits.find(y) == orbits.find(y0)) continue;
        std::vector<std::pair<std::size_t, std::size_t>> fixed = {{x, x}};
        if (y0 != x) fixed.emplace_back(y0, y);
        auto res = find_isometry_coloured(space, colours, fixed, options.node_budget);
        if (res.found) {
            for (auto z : sphere) orbits.unite(z, (*res.found)[z]);
        } else if (res.exhausted) {
            return false;
        } else {
            unresolved = true;
        }
    }
    for (auto y : sphere)
        if (orbits.find(y) != orbits.find(y0)) return unresolved ? std::nullopt : std::optional<bool>(false);
    return true;
}

std::optional<bool> sphere_orbit_transitivity(const IsometryGroup& group, std::size_t x, const Length& r)
{
    if (!group.complete) return std::nullopt;
    const auto& space = group.base;
    const std::size_t n = space.size();
    if (x >= n) throw std::invalid_argument("point out of range");
    auto rk = space.rank_of(r);
    if (!rk) return true;
    UnionFind orbits(n);
    for (const auto& g : group.elements)
        if (g[x] == x)
            for (std::size_t y = 0; y < n; ++y) orbits.unite(y, g[y]);
    std::optional<std::size_t> root;
    for (std::size_t y = 0; y < n; ++y) {
        if (space.rank(x, y) != *rk) continue;
        if (!root) root = orbits.find(y);
        else if (orbits.find(y) != *root) return false;
    }
    return true;
}

std::optional<bool> is_distance_transitive(const IsometryGroup& group)
{
    if (!group.complete) return std::nullopt;
    const auto& space = group.base;
    const std::size_t n = space.size();
    if (n <= 1) return true;
    // Orbits on ordered pairs; generators suffice when we have them.
    const auto& acting = (!group.generators.empty() || group.order() == 1) ? group.generators : group.elements;
    UnionFind pairs(n * n);
    for (const auto& g : acting)
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b) pairs.unite(a * n + b, g[a] * n + g[b]);
    std::vector<std::size_t> root_of_rank(space.levels().size(), SIZE_MAX);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
            auto& root = root_of_rank[space.rank(a, b)];
            const std::size_t here = pairs.find(a * n + b);
            if (root == SIZE_MAX) root = here;
            else if (root != here) return false;
        }
    return true;
}

std::optional<bool> is_distance_transitive(const FiniteMetricSpace& space, const IsometryOptions& options)
{
    if (space.size() <= options.max_points) {
        auto group = isometry_group(space, options);
        if (group.complete && (!group.generators.empty() || group.order() == 1)) return is_distance_transitive(group);
    }
    auto homogeneous = is_homogeneous(space, options);
    if (!homogeneous || !*homogeneous) return homogeneous;
    bool unresolved = false;
    for (std::size_t r = 1; r < space.levels().size(); ++r) {
        auto t = sphere_orbit_transitivity(space, 0, space.levels()[r], options);
        if (!t) unresolved = true;
        else if (!*t) return false;
    }
    if (unresolved) return std::nullopt;
    return true;
}

Length group_metric(const IsometryGroup& group, const Permutation& g1, const Permutation& g2)
{
    if (!group.contains(g1) || !group.contains(g2))
        throw std::invalid_argument("permutation is not an element of the isometry group");
    std::uint32_t worst = 0;
    for (std::size_t y = 0; y < g1.size(); ++y) worst = std::max(worst, group.base.rank(g1[y], g2[y]));
    return level_of(group.base, worst);
}

FiniteMetricSpace group_as_metric_space(const IsometryGroup& group)
{
    if (!group.complete) throw std::invalid_argument("isometry group is incomplete");
    const std::size_t m = group.order();
    if (m > kMaxGroupSpace)
        throw std::invalid_argument("isometry group of order " + std::to_string(m) + " exceeds the limit of " +
                                    std::to_string(kMaxGroupSpace));
    const auto& base = group.base;
    const std::size_t n = base.size();
    std::vector<Length> d(m * m);
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = a; b < m; ++b) {
            std::uint32_t worst = 0;
            for (std::size_t y = 0; y < n; ++y)
                worst = std::max(worst, base.rank(group.elements[a][y], group.elements[b][y]));
            d[a * m + b] = d[b * m + a] = level_of(base, worst);
        }
    return FiniteMetricSpace::from_lengths(m, d, "isom(" + base.provenance() + ")");
}

std::uint64_t self_power_saturating(std::uint64_t b)
{
    std::uint64_t out = 1;
    for (std::uint64_t k = 0; k < b; ++k) {
        if (__builtin_mul_overflow(out, b, &out)) return UINT64_MAX;
    }
    return out;
}

IsometryEntropyCheck verify_isometry_entropy_bound(const FiniteMetricSpace& space, const Length& eps,
                                                   const IsometryOptions& options)
{
    auto group = isometry_group(space, options);
    auto group_space = group_as_metric_space(group);
    auto lhs = packing_number(group_space, eps);
    auto small = packing_number(space, eps / Length(4));
    IsometryEntropyCheck out;
    out.lhs = lhs.count;
    out.lhs_upper = lhs.upper;
    out.rhs = self_power_saturating(small.count);
    out.exact = group.complete && lhs.exact && small.exact;
    out.holds = out.lhs_upper <= out.rhs;
    return out;
}

} // namespace finhom
