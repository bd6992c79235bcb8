#include "finhom/entropy.hpp"

#include "finhom/isometry.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>

namespace finhom {

namespace {

void require_positive(const Length& eps)
{
    if (!(eps > Length(0))) throw std::invalid_argument("epsilon must be positive");
}

std::uint64_t bit(std::size_t v) { return std::uint64_t{1} << v; }

// Max clique on at most 64 vertices with greedy-colouring bounds.
class CliqueSearch {
public:
    explicit CliqueSearch(std::vector<std::uint64_t> adj) : adj_(std::move(adj)) {}

    std::uint64_t run(std::uint64_t initial_best_set)
    {
        best_set_ = initial_best_set;
        best_ = std::popcount(initial_best_set);
        std::uint64_t all = adj_.size() == 64 ? ~std::uint64_t{0} : bit(adj_.size()) - 1;
        expand(all, 0, 0);
        return best_set_;
    }

private:
    void expand(std::uint64_t cand, std::uint64_t current, int size)
    {
        int order[64];
        int colour[64];
        int count = 0;
        std::uint64_t uncoloured = cand;
        int c = 0;
        while (uncoloured) {
            ++c;
            std::uint64_t q = uncoloured;
            while (q) {
                int v = std::countr_zero(q);
                q &= ~bit(v);
                q &= ~adj_[v];
                uncoloured &= ~bit(v);
                order[count] = v;
                colour[count] = c;
                ++count;
            }
        }
        for (int k = count - 1; k >= 0; --k) {
            if (size + colour[k] <= best_) return;
            int v = order[k];
            std::uint64_t next = cand & adj_[v];
            if (!next) {
                if (size + 1 > best_) {
                    best_ = size + 1;
                    best_set_ = current | bit(v);
                }
            } else {
                expand(next, current | bit(v), size + 1);
            }
            cand &= ~bit(v);
        }
    }

    std::vector<std::uint64_t> adj_;
    std::uint64_t best_set_ = 0;
    int best_ = 0;
};

std::vector<std::size_t> greedy_packing(const FiniteMetricSpace& space, std::uint32_t far)
{
    std::vector<std::size_t> chosen;
    for (std::size_t x = 0; x < space.size(); ++x) {
        auto row = space.rank_row(x);
        bool ok = std::all_of(chosen.begin(), chosen.end(), [&](std::size_t p) { return row[p] >= far; });
        if (ok) chosen.push_back(x);
    }
    return chosen;
}

std::vector<std::size_t> farthest_point_net(const FiniteMetricSpace& space, std::uint32_t far)
{
    const std::size_t n = space.size();
    std::vector<std::size_t> net{0};
    std::vector<std::uint32_t> nearest(space.rank_row(0).begin(), space.rank_row(0).end());
    while (true) {
        std::size_t pick = 0;
        std::uint32_t best = 0;
        for (std::size_t x = 0; x < n; ++x)
            if (nearest[x] > best) {
                best = nearest[x];
                pick = x;
            }
        if (best < far) break;
        net.push_back(pick);
        auto row = space.rank_row(pick);
        for (std::size_t x = 0; x < n; ++x) nearest[x] = std::min(nearest[x], row[x]);
    }
    return net;
}

// Any set of diameter <= eps holds at most one point of an eps-packing.
// Closed eps/2-balls have that property; weighting each ball by the
// reciprocal of the smallest ball size among its members gives a
// fractional cover, hence an upper bound.
std::size_t ball_weight_bound(const FiniteMetricSpace& space, const Length& eps)
{
    const std::size_t n = space.size();
    const Length half = eps / Length(2);
    std::vector<std::vector<std::size_t>> ball(n);
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = 0; y < n; ++y) {
            bool inside = space.is_exact() && half.is_exact() ? space.exact_distance(x, y) <= half.exact()
                                                               : space.value(x, y) <= half.value();
            if (inside) ball[x].push_back(y);
        }
    long double total = 0.0L;
    for (std::size_t x = 0; x < n; ++x) {
        std::size_t smallest = n;
        for (auto y : ball[x]) smallest = std::min(smallest, ball[y].size());
        total += 1.0L / static_cast<long double>(smallest);
    }
    return static_cast<std::size_t>(std::floor(total + 1e-7L));
}

// Greedy partition into sets of pairwise distance <= eps.
std::size_t clique_cover_bound(const FiniteMetricSpace& space, std::uint32_t far)
{
    std::vector<std::vector<std::size_t>> classes;
    for (std::size_t x = 0; x < space.size(); ++x) {
        auto row = space.rank_row(x);
        bool placed = false;
        for (auto& cls : classes) {
            if (std::all_of(cls.begin(), cls.end(), [&](std::size_t p) { return row[p] < far; })) {
                cls.push_back(x);
                placed = true;
                break;
            }
        }
        if (!placed) classes.push_back({x});
    }
    return classes.size();
}

// The homogeneity search costs too much on large model nets.
constexpr std::size_t kTransitiveBoundLimit = 512;

// In a homogeneous space every point lies in the same number of isometric
// copies of a set S of diameter <= eps, and each copy holds at most one
// packing point, so E <= n / |S|. S is a largest such set through point 0.
std::optional<std::size_t> transitive_clique_bound(const FiniteMetricSpace& space, std::uint32_t far)
{
    const std::size_t n = space.size();
    std::vector<std::size_t> near;
    auto row0 = space.rank_row(0);
    for (std::size_t y = 1; y < n; ++y)
        if (row0[y] < far) near.push_back(y);
    std::size_t clique = 1;
    if (near.size() <= 64) {
        std::vector<std::uint64_t> adj(near.size(), 0);
        for (std::size_t i = 0; i < near.size(); ++i)
            for (std::size_t j = 0; j < near.size(); ++j)
                if (i != j && space.rank(near[i], near[j]) < far) adj[i] |= bit(j);
        clique += static_cast<std::size_t>(std::popcount(CliqueSearch(std::move(adj)).run(0)));
    } else {
        std::vector<std::size_t> chosen{0};
        for (auto y : near) {
            auto row = space.rank_row(y);
            if (std::all_of(chosen.begin(), chosen.end(), [&](std::size_t p) { return row[p] < far; }))
                chosen.push_back(y);
        }
        clique = chosen.size();
    }
    IsometryOptions options;
    options.node_budget = 2'000'000;
    auto homogeneous = is_homogeneous(space, options);
    if (!homogeneous || !*homogeneous) return std::nullopt;
    return n / clique;
}

std::vector<std::size_t> bits_to_points(std::uint64_t set)
{
    std::vector<std::size_t> out;
    while (set) {
        int v = std::countr_zero(set);
        out.push_back(static_cast<std::size_t>(v));
        set &= set - 1;
    }
    return out;
}

class DominatingSetSearch {
public:
    explicit DominatingSetSearch(std::vector<std::uint64_t> cover) : cover_(std::move(cover)) {}

    std::uint64_t run(std::uint64_t initial)
    {
        best_set_ = initial;
        best_ = std::popcount(initial);
        std::uint64_t all = cover_.size() == 64 ? ~std::uint64_t{0} : bit(cover_.size()) - 1;
        search(all, 0, 0);
        return best_set_;
    }

private:
    void search(std::uint64_t uncovered, std::uint64_t chosen, int size)
    {
        if (!uncovered) {
            if (size < best_) {
                best_ = size;
                best_set_ = chosen;
            }
            return;
        }
        int reach = 0;
        for (auto c : cover_) reach = std::max(reach, std::popcount(c & uncovered));
        int need = (std::popcount(uncovered) + reach - 1) / reach;
        if (size + need >= best_) return;
        int u = std::countr_zero(uncovered);
        std::vector<std::pair<int, int>> options;
        std::uint64_t cands = cover_[u];
        while (cands) {
            int c = std::countr_zero(cands);
            cands &= cands - 1;
            options.emplace_back(-std::popcount(cover_[c] & uncovered), c);
        }
        std::sort(options.begin(), options.end());
        for (auto [gain, c] : options) search(uncovered & ~cover_[c], chosen | bit(c), size + 1);
    }

    std::vector<std::uint64_t> cover_;
    std::uint64_t best_set_ = 0;
    int best_ = 0;
};

} // namespace

PackingResult packing_number(const FiniteMetricSpace& space, const Length& eps)
{
    require_positive(eps);
    const std::size_t n = space.size();
    const std::uint32_t far = space.first_rank_above(eps);

    auto greedy = greedy_packing(space, far);
    auto net = farthest_point_net(space, far);
    PackingResult result;
    result.witness = net.size() > greedy.size() ? net : greedy;
    std::sort(result.witness.begin(), result.witness.end());

    if (n <= kExactEntropyLimit) {
        std::vector<std::uint64_t> adj(n, 0);
        for (std::size_t x = 0; x < n; ++x)
            for (std::size_t y = 0; y < n; ++y)
                if (x != y && space.rank(x, y) >= far) adj[x] |= bit(y);
        std::uint64_t initial = 0;
        for (auto p : result.witness) initial |= bit(p);
        result.witness = bits_to_points(CliqueSearch(std::move(adj)).run(initial));
        result.count = result.upper = result.witness.size();
        result.exact = true;
        return result;
    }

    result.count = result.witness.size();
    result.upper = std::min({n, ball_weight_bound(space, eps), clique_cover_bound(space, far)});
    if (result.count < result.upper && n <= kTransitiveBoundLimit)
        if (auto t = transitive_clique_bound(space, far)) result.upper = std::min(result.upper, *t);
    result.upper = std::max(result.upper, result.count);
    result.exact = result.count == result.upper;
    return result;
}

CoveringResult covering_number(const FiniteMetricSpace& space, const Length& eps)
{
    require_positive(eps);
    const std::size_t n = space.size();
    const std::uint32_t far = space.first_rank_above(eps);
    auto net = farthest_point_net(space, far);

    CoveringResult result;
    if (n <= kExactEntropyLimit) {
        std::vector<std::uint64_t> cover(n, 0);
        for (std::size_t x = 0; x < n; ++x)
            for (std::size_t y = 0; y < n; ++y)
                if (space.rank(x, y) < far) cover[x] |= bit(y);
        std::uint64_t initial = 0;
        for (auto p : net) initial |= bit(p);
        result.centers = bits_to_points(DominatingSetSearch(std::move(cover)).run(initial));
        result.count = result.centers.size();
        result.exact = true;
        return result;
    }
    result.centers = net;
    std::sort(result.centers.begin(), result.centers.end());
    result.count = net.size();
    // Points pairwise farther than 2 eps need distinct covering balls.
    const std::uint32_t far2 = space.first_rank_above(eps * Length(2));
    result.exact = greedy_packing(space, far2).size() == result.count ||
                   farthest_point_net(space, far2).size() == result.count;
    return result;
}

std::vector<std::size_t> epsilon_net(const FiniteMetricSpace& space, const Length& eps)
{
    require_positive(eps);
    return farthest_point_net(space, space.first_rank_above(eps));
}

EntropyProfile entropy_profile(const FiniteMetricSpace& space, std::span<const Length> epsilons)
{
    std::vector<Length> sorted(epsilons.begin(), epsilons.end());
    std::sort(sorted.begin(), sorted.end(), [](const Length& a, const Length& b) { return a < b; });
    EntropyProfile profile;
    for (const auto& eps : sorted) profile.push_back({eps, packing_number(space, eps)});
    return profile;
}

} // namespace finhom
