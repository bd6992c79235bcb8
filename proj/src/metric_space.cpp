#include "finhom/metric_space.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace finhom {

namespace {

void check_shape(std::size_t n, std::size_t entries)
{
    if (n == 0) throw std::invalid_argument("metric space needs at least one point");
    if (entries != n * n) throw std::invalid_argument("distance matrix must have n*n entries");
}

} // namespace

FiniteMetricSpace::FiniteMetricSpace() : FiniteMetricSpace(point()) {}

FiniteMetricSpace FiniteMetricSpace::point()
{
    return exact(1, {Rational(0)}, "point");
}

FiniteMetricSpace FiniteMetricSpace::exact(std::size_t n, std::vector<Rational> dist, std::string provenance)
{
    check_shape(n, dist.size());
    FiniteMetricSpace s(std::move(provenance), n);
    s.values_.resize(dist.size());
    std::transform(dist.begin(), dist.end(), s.values_.begin(), [](const Rational& q) { return q.to_double(); });
    s.exact_ = std::move(dist);
    s.build_levels();
    return s;
}

FiniteMetricSpace FiniteMetricSpace::approximate(std::size_t n, std::vector<double> dist, double tolerance,
                                                 std::string provenance)
{
    check_shape(n, dist.size());
    if (!(tolerance >= 0.0)) throw std::invalid_argument("tolerance must be nonnegative");
    for (double v : dist)
        if (!std::isfinite(v)) throw std::invalid_argument("distance matrix contains a non-finite value");
    FiniteMetricSpace s(std::move(provenance), n);
    s.values_ = std::move(dist);
    s.tol_ = tolerance;
    s.build_levels();
    return s;
}

FiniteMetricSpace FiniteMetricSpace::from_lengths(std::size_t n, const std::vector<Length>& dist,
                                                  std::string provenance)
{
    check_shape(n, dist.size());
    bool all_exact = std::all_of(dist.begin(), dist.end(), [](const Length& l) { return l.is_exact(); });
    if (all_exact) {
        std::vector<Rational> q;
        q.reserve(dist.size());
        for (const auto& l : dist) q.push_back(l.exact());
        return exact(n, std::move(q), std::move(provenance));
    }
    std::vector<double> v;
    v.reserve(dist.size());
    for (const auto& l : dist) v.push_back(l.value());
    return approximate(n, std::move(v), kDefaultTolerance, std::move(provenance));
}

FiniteMetricSpace::FiniteMetricSpace(std::string provenance, std::size_t n)
    : n_(n), provenance_(std::move(provenance))
{
}

void FiniteMetricSpace::build_levels()
{
    levels_.clear();
    rank_.assign(n_ * n_, 0);
    if (!exact_.empty()) {
        std::vector<Rational> sorted = exact_;
        std::sort(sorted.begin(), sorted.end());
        sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
        for (std::size_t e = 0; e < exact_.size(); ++e)
            rank_[e] = static_cast<std::uint32_t>(std::lower_bound(sorted.begin(), sorted.end(), exact_[e]) - sorted.begin());
        levels_.assign(sorted.begin(), sorted.end());
        return;
    }
    // Chain-bucket the sorted values: consecutive values within tolerance
    // share a level, represented by the smallest member.
    std::vector<std::size_t> order(values_.size());
    for (std::size_t e = 0; e < order.size(); ++e) order[e] = e;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values_[a] < values_[b]; });
    double prev = 0.0;
    for (std::size_t idx = 0; idx < order.size(); ++idx) {
        double v = values_[order[idx]];
        if (levels_.empty() || v - prev > tol_) levels_.emplace_back(v);
        prev = v;
        rank_[order[idx]] = static_cast<std::uint32_t>(levels_.size() - 1);
    }
}

Length FiniteMetricSpace::distance(std::size_t i, std::size_t j) const
{
    if (!exact_.empty()) return Length(exact_[i * n_ + j]);
    return Length(values_[i * n_ + j]);
}

std::uint32_t FiniteMetricSpace::first_rank_above(const Length& eps) const
{
    auto it = std::upper_bound(levels_.begin(), levels_.end(), eps, [&](const Length& e, const Length& level) {
        if (is_exact() && e.is_exact()) return e < level;
        return level.value() > e.value() + tol_;
    });
    return static_cast<std::uint32_t>(it - levels_.begin());
}

std::optional<std::uint32_t> FiniteMetricSpace::rank_of(const Length& r) const
{
    for (std::uint32_t k = 0; k < levels_.size(); ++k) {
        const Length& level = levels_[k];
        bool equal = (is_exact() && r.is_exact()) ? level == r : std::abs(level.value() - r.value()) <= std::max(tol_, kDefaultTolerance);
        if (equal) return k;
    }
    return std::nullopt;
}

void FiniteMetricSpace::set_labels(std::vector<std::string> labels)
{
    if (!labels.empty() && labels.size() != n_) throw std::invalid_argument("label count must match point count");
    labels_ = std::move(labels);
}

FiniteMetricSpace FiniteMetricSpace::subspace(std::span<const std::size_t> points) const
{
    const std::size_t m = points.size();
    for (auto p : points)
        if (p >= n_) throw std::out_of_range("subspace point index out of range");
    FiniteMetricSpace out;
    if (!exact_.empty()) {
        std::vector<Rational> d(m * m);
        for (std::size_t a = 0; a < m; ++a)
            for (std::size_t b = 0; b < m; ++b) d[a * m + b] = exact_[points[a] * n_ + points[b]];
        out = exact(m, std::move(d), provenance_);
    } else {
        std::vector<double> d(m * m);
        for (std::size_t a = 0; a < m; ++a)
            for (std::size_t b = 0; b < m; ++b) d[a * m + b] = values_[points[a] * n_ + points[b]];
        out = approximate(m, std::move(d), tol_, provenance_);
    }
    if (!labels_.empty()) {
        std::vector<std::string> l;
        for (auto p : points) l.push_back(labels_[p]);
        out.labels_ = std::move(l);
    }
    return out;
}

std::optional<ScaledDistances> FiniteMetricSpace::scaled() const
{
    if (exact_.empty()) return std::nullopt;
    try {
        std::int64_t den = 1;
        for (const auto& level : levels_) den = lcm_checked(den, level.exact().den());
        ScaledDistances out;
        out.denominator = den;
        out.values.resize(exact_.size());
        for (std::size_t e = 0; e < exact_.size(); ++e) {
            __int128 v = static_cast<__int128>(exact_[e].num()) * (den / exact_[e].den());
            if (v > (static_cast<__int128>(1) << 61) || v < -(static_cast<__int128>(1) << 61)) return std::nullopt;
            out.values[e] = static_cast<std::int64_t>(v);
        }
        return out;
    } catch (const std::overflow_error&) {
        return std::nullopt;
    }
}

bool operator==(const FiniteMetricSpace& a, const FiniteMetricSpace& b)
{
    return a.n_ == b.n_ && a.exact_ == b.exact_ && a.values_ == b.values_;
}

std::string to_string(Axiom axiom)
{
    switch (axiom) {
    case Axiom::diagonal: return "diagonal";
    case Axiom::symmetry: return "symmetry";
    case Axiom::positivity: return "positivity";
    case Axiom::triangle: return "triangle";
    }
    return "unknown";
}

namespace {

template <class T, class Leq>
void check_axioms(std::size_t n, const std::vector<T>& d, const T& zero, Leq leq_with_slack, ValidationReport& report)
{
    auto record = [&](Axiom a, std::size_t i, std::size_t j, std::size_t k) {
        ++report.total;
        if (report.violations.size() < ValidationReport::kMaxWitnesses) report.violations.push_back({a, i, j, k});
    };
    for (std::size_t i = 0; i < n; ++i) {
        // |d(i,i)| within slack of zero
        if (!(leq_with_slack(d[i * n + i], zero) && leq_with_slack(zero, d[i * n + i]))) record(Axiom::diagonal, i, i, i);
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const T& a = d[i * n + j];
            const T& b = d[j * n + i];
            if (!(leq_with_slack(a, b) && leq_with_slack(b, a))) record(Axiom::symmetry, i, j, j);
            if (leq_with_slack(a, zero) || leq_with_slack(b, zero)) record(Axiom::positivity, i, j, j);
        }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const T& dij = d[i * n + j];
            for (std::size_t k = 0; k < n; ++k) {
                if (k == i || k == j || k < i) continue;
                if (!leq_with_slack(d[i * n + k], dij + d[j * n + k])) record(Axiom::triangle, i, j, k);
            }
        }
}

} // namespace

ValidationReport validate(const FiniteMetricSpace& space)
{
    ValidationReport report;
    const std::size_t n = space.size();
    if (space.is_exact()) {
        if (auto scaled = space.scaled()) {
            check_axioms<std::int64_t>(n, scaled->values, 0, [](std::int64_t a, std::int64_t b) { return a <= b; }, report);
            return report;
        }
        std::vector<Rational> d(n * n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) d[i * n + j] = space.exact_distance(i, j);
        check_axioms<Rational>(n, d, Rational(0), [](const Rational& a, const Rational& b) { return a <= b; }, report);
        return report;
    }
    std::vector<double> d(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) d[i * n + j] = space.value(i, j);
    const double tol = space.tolerance();
    check_axioms<double>(n, d, 0.0, [tol](double a, double b) { return a <= b + tol; }, report);
    return report;
}

FiniteMetricSpace scale(const FiniteMetricSpace& space, const Length& factor)
{
    if (!(factor > Length(0))) throw std::invalid_argument("scale factor must be positive");
    const std::size_t n = space.size();
    FiniteMetricSpace out;
    if (space.is_exact() && factor.is_exact()) {
        std::vector<Rational> d(n * n);
        for (std::size_t e = 0; e < n * n; ++e) d[e] = space.exact_distance(e / n, e % n) * factor.exact();
        out = FiniteMetricSpace::exact(n, std::move(d), space.provenance());
    } else {
        std::vector<double> d(n * n);
        for (std::size_t e = 0; e < n * n; ++e) d[e] = space.value(e / n, e % n) * factor.value();
        out = FiniteMetricSpace::approximate(n, std::move(d), std::max(space.tolerance(), kDefaultTolerance),
                                             space.provenance());
    }
    out.set_labels(space.labels());
    return out;
}

FiniteMetricSpace sup_product(std::span<const FiniteMetricSpace> spaces)
{
    if (spaces.empty()) throw std::invalid_argument("sup_product needs at least one factor");
    if (spaces.size() == 1) return spaces.front();
    std::size_t total = 1;
    bool all_exact = true;
    double tol = 0.0;
    for (const auto& s : spaces) {
        total *= s.size();
        all_exact = all_exact && s.is_exact();
        tol = std::max(tol, s.tolerance());
    }
    // Mixed-radix digits of each product point.
    std::vector<std::vector<std::size_t>> digits(total, std::vector<std::size_t>(spaces.size()));
    for (std::size_t p = 0; p < total; ++p) {
        std::size_t rest = p;
        for (std::size_t f = spaces.size(); f-- > 0;) {
            digits[p][f] = rest % spaces[f].size();
            rest /= spaces[f].size();
        }
    }
    std::string provenance = "sup_product(";
    for (std::size_t f = 0; f < spaces.size(); ++f)
        provenance += (f ? "," : "") + spaces[f].provenance();
    provenance += ")";
    if (all_exact) {
        std::vector<Rational> d(total * total);
        for (std::size_t a = 0; a < total; ++a)
            for (std::size_t b = 0; b < total; ++b) {
                Rational m(0);
                for (std::size_t f = 0; f < spaces.size(); ++f) m = std::max(m, spaces[f].exact_distance(digits[a][f], digits[b][f]));
                d[a * total + b] = m;
            }
        return FiniteMetricSpace::exact(total, std::move(d), provenance);
    }
    std::vector<double> d(total * total);
    for (std::size_t a = 0; a < total; ++a)
        for (std::size_t b = 0; b < total; ++b) {
            double m = 0.0;
            for (std::size_t f = 0; f < spaces.size(); ++f) m = std::max(m, spaces[f].value(digits[a][f], digits[b][f]));
            d[a * total + b] = m;
        }
    return FiniteMetricSpace::approximate(total, std::move(d), std::max(tol, kDefaultTolerance), provenance);
}

Length hausdorff_distance(const FiniteMetricSpace& space, std::span<const std::size_t> a, std::span<const std::size_t> b)
{
    if (a.empty() || b.empty()) throw std::invalid_argument("hausdorff distance of an empty set");
    // Ranks order distances exactly, so the max-min can be taken on ranks.
    auto directed = [&](std::span<const std::size_t> from, std::span<const std::size_t> to) {
        std::uint32_t worst = 0;
        for (auto x : from) {
            std::uint32_t best = UINT32_MAX;
            for (auto y : to) best = std::min(best, space.rank(x, y));
            worst = std::max(worst, best);
        }
        return worst;
    };
    std::uint32_t r = std::max(directed(a, b), directed(b, a));
    for (auto x : a)
        for (auto y : b)
            if (space.rank(x, y) == r) return space.distance(x, y);
    return space.levels()[r];
}

FiniteMetricSpace quotient_by_partition(const FiniteMetricSpace& space,
                                        const std::vector<std::vector<std::size_t>>& partition)
{
    const std::size_t n = space.size();
    std::vector<int> seen(n, 0);
    for (const auto& block : partition) {
        if (block.empty()) throw std::invalid_argument("partition contains an empty block");
        for (auto p : block) {
            if (p >= n) throw std::invalid_argument("partition refers to a point out of range");
            if (seen[p]++) throw std::invalid_argument("partition blocks overlap at point " + std::to_string(p));
        }
    }
    for (std::size_t p = 0; p < n; ++p)
        if (!seen[p]) throw std::invalid_argument("partition does not cover point " + std::to_string(p));

    const std::size_t m = partition.size();
    std::vector<Length> d(m * m, Length(0));
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = a + 1; b < m; ++b) {
            Length h = hausdorff_distance(space, partition[a], partition[b]);
            d[a * m + b] = h;
            d[b * m + a] = h;
        }
    FiniteMetricSpace out = space.is_exact() ? FiniteMetricSpace::from_lengths(m, d, "quotient(" + space.provenance() + ")")
                                             : [&] {
                                                   std::vector<double> v(m * m);
                                                   for (std::size_t e = 0; e < m * m; ++e) v[e] = d[e].value();
                                                   return FiniteMetricSpace::approximate(m, std::move(v), space.tolerance(),
                                                                                         "quotient(" + space.provenance() + ")");
                                               }();
    if (!validate(out).ok()) throw std::logic_error("hausdorff quotient violated the metric axioms");
    return out;
}

} // namespace finhom
