#include "finhom/quasimorph.hpp"

#include "finhom/gh.hpp"
#include "finhom/isometry.hpp"
#include "finhom/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <thread>

namespace finhom {

namespace {

bool same_length(const Length& a, const Length& b)
{
    if (a.is_exact() && b.is_exact()) return a == b;
    return std::abs(a.value() - b.value()) <= kDefaultTolerance;
}

// Least integer k >= 1 with 1 / (2k) <= eps, i.e. ceil(1 / (2 eps)).
std::int64_t half_inverse_ceil(const Length& eps)
{
    if (eps.is_exact()) return std::max<std::int64_t>(1, (Rational(1) / (Rational(2) * eps.exact())).ceil());
    auto k = static_cast<std::int64_t>(std::ceil(1.0 / (2.0 * eps.value())));
    k = std::max<std::int64_t>(k, 1);
    while (Rational(1, 2 * k).to_double() > eps.value()) ++k;
    return k;
}

struct ElementLess {
    bool operator()(const GroupElement& a, const GroupElement& b) const
    {
        if (a.index != b.index) return a.index < b.index;
        return std::lexicographical_compare(a.coords.begin(), a.coords.end(), b.coords.begin(), b.coords.end());
    }
};

} // namespace

MetricGroup MetricGroup::finite(FiniteGroup group, FiniteMetricSpace metric, std::string name)
{
    if (metric.size() != group.order()) throw std::invalid_argument("metric size does not match the group order");
    MetricGroup g;
    g.kind_ = Kind::finite;
    g.name_ = std::move(name);
    g.dim_ = 0;
    g.group_ = std::make_shared<const FiniteGroup>(std::move(group));
    g.metric_ = std::make_shared<const FiniteMetricSpace>(std::move(metric));
    return g;
}

MetricGroup MetricGroup::circle()
{
    MetricGroup g;
    g.kind_ = Kind::circle;
    g.name_ = "circle(1)";
    return g;
}

MetricGroup MetricGroup::torus(std::size_t d)
{
    if (d < 1) throw std::invalid_argument("torus dimension must be at least 1");
    MetricGroup g;
    g.kind_ = Kind::torus;
    g.name_ = "torus(" + std::to_string(d) + ")";
    g.dim_ = d;
    return g;
}

MetricGroup MetricGroup::solenoid(int depth)
{
    MetricGroup g;
    g.kind_ = Kind::solenoid;
    g.solenoid_ = SolenoidTruncation::factorial(depth);
    g.name_ = "solenoid(" + std::to_string(depth) + ")";
    return g;
}

const FiniteGroup& MetricGroup::group() const
{
    if (!group_) throw std::logic_error("not a finite metric group");
    return *group_;
}

const FiniteMetricSpace& MetricGroup::metric() const
{
    if (!metric_) throw std::logic_error("not a finite metric group");
    return *metric_;
}

GroupElement MetricGroup::identity() const
{
    if (is_finite()) return {group_->identity(), {}};
    return {0, std::vector<Rational>(dim_, Rational(0))};
}

GroupElement MetricGroup::multiply(const GroupElement& a, const GroupElement& b) const
{
    if (is_finite()) return {group_->multiply(a.index, b.index), {}};
    GroupElement out{0, std::vector<Rational>(dim_)};
    for (std::size_t i = 0; i < dim_; ++i) out.coords[i] = (a.coords[i] + b.coords[i]).frac();
    return out;
}

GroupElement MetricGroup::inverse(const GroupElement& a) const
{
    if (is_finite()) return {group_->inverse(a.index), {}};
    GroupElement out{0, std::vector<Rational>(dim_)};
    for (std::size_t i = 0; i < dim_; ++i) out.coords[i] = (-a.coords[i]).frac();
    return out;
}

Length MetricGroup::distance(const GroupElement& a, const GroupElement& b) const
{
    switch (kind_) {
    case Kind::finite:
        return metric_->distance(a.index, b.index);
    case Kind::circle:
        return Length(arc_distance(a.coords[0], b.coords[0]));
    case Kind::torus: {
        Rational worst(0);
        for (std::size_t i = 0; i < dim_; ++i) worst = std::max(worst, arc_distance(a.coords[i], b.coords[i]));
        return Length(worst);
    }
    case Kind::solenoid: {
        const Rational delta = (a.coords[0] - b.coords[0]).frac();
        Length sum(0);
        for (std::size_t j = 0; j < solenoid_.orders.size(); ++j) {
            const Rational lifted = Rational(solenoid_.multiplier(j)) * delta;
            sum += solenoid_.weights[j] * Length(arc_distance(lifted, Rational(0)));
        }
        return sum;
    }
    }
    return Length(0);
}

GroupElement MetricGroup::element(std::uint32_t index) const
{
    if (!is_finite()) throw std::invalid_argument("model elements are given by coordinates");
    if (index >= group_->order()) throw std::invalid_argument("group element index out of range");
    return {index, {}};
}

GroupElement MetricGroup::element(std::vector<Rational> coords) const
{
    if (is_finite()) throw std::invalid_argument("finite group elements are given by index");
    if (coords.size() != dim_)
        throw std::invalid_argument(name_ + " expects " + std::to_string(dim_) + " coordinates");
    for (auto& c : coords) c = c.frac();
    return {0, std::move(coords)};
}

void MetricGroup::check(const GroupElement& a) const
{
    if (is_finite()) {
        if (!a.coords.empty() || a.index >= group_->order())
            throw std::invalid_argument("not an element of " + name_);
        return;
    }
    if (a.index != 0 || a.coords.size() != dim_) throw std::invalid_argument("not an element of " + name_);
    for (const auto& c : a.coords)
        if (c < Rational(0) || c >= Rational(1)) throw std::invalid_argument("model coordinates must lie in [0, 1)");
}

GroupElement MetricGroup::random_element(std::mt19937_64& rng, std::int64_t denominator) const
{
    if (is_finite()) {
        std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(group_->order() - 1));
        return {pick(rng), {}};
    }
    if (denominator < 1) throw std::invalid_argument("denominator must be positive");
    std::uniform_int_distribution<std::int64_t> pick(0, denominator - 1);
    GroupElement out{0, std::vector<Rational>(dim_)};
    for (auto& c : out.coords) c = Rational(pick(rng), denominator);
    return out;
}

std::string MetricGroup::str(const GroupElement& a) const
{
    if (is_finite()) {
        const auto& names = group_->names();
        return a.index < names.size() ? names[a.index] : std::to_string(a.index);
    }
    if (dim_ == 1) return a.coords[0].str();
    std::string out = "(";
    for (std::size_t i = 0; i < dim_; ++i) out += (i ? ", " : "") + a.coords[i].str();
    return out + ")";
}

GroupAction rotation_action(std::size_t n)
{
    GroupAction a{cycle_space(n, Length(Rational(1, static_cast<std::int64_t>(n)))).space, {}};
    for (std::size_t k = 0; k < n; ++k) {
        Permutation p(n);
        for (std::size_t x = 0; x < n; ++x) p[x] = static_cast<std::uint32_t>((x + k) % n);
        a.elements.push_back(std::move(p));
    }
    return a;
}

std::vector<std::pair<std::size_t, std::size_t>> rounding_pairs(std::size_t n, std::size_t m)
{
    if (n == 0 || m == 0) throw std::invalid_argument("rounding pairs need nonempty cycles");
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t k = 0; k < n; ++k) pairs.emplace_back(k, (2 * k * m + n) / (2 * n) % m);
    for (std::size_t j = 0; j < m; ++j) pairs.emplace_back((2 * j * n + m) / (2 * m) % n, j);
    return pairs;
}

MetricGroup metric_group_of_action(const GroupAction& action, std::string name)
{
    const auto& base = action.space;
    const std::size_t n = base.size(), m = action.elements.size();
    for (std::size_t a = 0; a < m; ++a) {
        if (action.elements[a].size() != n)
            throw std::invalid_argument("group element " + std::to_string(a) + " has the wrong size");
        if (!is_isometry(base, action.elements[a]))
            throw std::invalid_argument("group element " + std::to_string(a) + " is not an isometry");
    }
    auto group = FiniteGroup::from_permutations(action.elements);
    std::vector<Length> d(m * m);
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = a; b < m; ++b) {
            std::uint32_t worst = 0;
            for (std::size_t y = 0; y < n; ++y)
                worst = std::max(worst, base.rank(action.elements[a][y], action.elements[b][y]));
            d[a * m + b] = d[b * m + a] = base.levels()[worst];
        }
    auto metric = FiniteMetricSpace::from_lengths(m, d, name);
    return MetricGroup::finite(std::move(group), std::move(metric), std::move(name));
}

std::vector<GroupElement> generated_subgroup(const MetricGroup& group, const std::vector<GroupElement>& generators,
                                             std::size_t limit)
{
    for (const auto& g : generators) group.check(g);
    std::vector<GroupElement> out = {group.identity()};
    std::map<GroupElement, std::size_t, ElementLess> seen = {{out.front(), 0}};
    for (std::size_t i = 0; i < out.size(); ++i)
        for (const auto& g : generators) {
            auto next = group.multiply(out[i], g);
            if (seen.contains(next)) continue;
            if (out.size() >= limit)
                throw std::invalid_argument("subgroup exceeds " + std::to_string(limit) + " elements");
            seen.emplace(next, out.size());
            out.push_back(std::move(next));
        }
    return out;
}

std::optional<BiInvarianceViolation> bi_invariance_violation(const MetricGroup& group, std::size_t samples,
                                                             std::uint64_t seed, std::int64_t denominator,
                                                             std::size_t exhaustive_order)
{
    auto test = [&](const GroupElement& h, const GroupElement& a, const GroupElement& b) {
        const Length d = group.distance(a, b);
        return same_length(group.distance(group.multiply(h, a), group.multiply(h, b)), d) &&
               same_length(group.distance(group.multiply(a, h), group.multiply(b, h)), d);
    };
    if (group.is_finite() && group.group().order() <= exhaustive_order) {
        const auto m = static_cast<std::uint32_t>(group.group().order());
        for (std::uint32_t h = 0; h < m; ++h)
            for (std::uint32_t a = 0; a < m; ++a)
                for (std::uint32_t b = 0; b < m; ++b)
                    if (!test({h, {}}, {a, {}}, {b, {}}))
                        return BiInvarianceViolation{{h, {}}, {a, {}}, {b, {}}};
        return std::nullopt;
    }
    std::mt19937_64 rng(seed);
    for (std::size_t s = 0; s < samples; ++s) {
        auto h = group.random_element(rng, denominator);
        auto a = group.random_element(rng, denominator);
        auto b = group.random_element(rng, denominator);
        if (!test(h, a, b)) return BiInvarianceViolation{h, a, b};
    }
    return std::nullopt;
}

QuasiMap::QuasiMap(FiniteGroup source_, std::shared_ptr<const MetricGroup> target_, std::vector<GroupElement> table_)
    : source(std::move(source_)), target(std::move(target_)), table(std::move(table_))
{
    if (!target) throw std::invalid_argument("quasi map needs a target group");
    if (table.size() != source.order()) throw std::invalid_argument("quasi map table must cover the source group");
    for (const auto& e : table) target->check(e);
}

DefectReport defect(const QuasiMap& qm, unsigned threads)
{
    const auto m = static_cast<std::uint32_t>(qm.source.order());
    const MetricGroup& tg = *qm.target;
    threads = std::max(1u, std::min<unsigned>(threads, m));

    struct Partial {
        Length value = Length(0);
        std::uint32_t a = 0, b = 0;
    };
    auto rows = [&](std::uint32_t begin, std::uint32_t end) {
        Partial best;
        if (tg.is_finite()) {
            // Compare ranks and convert once.
            const auto& space = tg.metric();
            const auto& grp = tg.group();
            std::uint32_t worst = 0;
            for (std::uint32_t a = begin; a < end; ++a)
                for (std::uint32_t b = 0; b < m; ++b) {
                    const auto prod = grp.multiply(qm.table[a].index, qm.table[b].index);
                    const auto r = space.rank(prod, qm.table[qm.source.multiply(a, b)].index);
                    if (r > worst) {
                        worst = r;
                        best.a = a;
                        best.b = b;
                    }
                }
            best.value = space.levels()[worst];
            return best;
        }
        bool first = true;
        for (std::uint32_t a = begin; a < end; ++a)
            for (std::uint32_t b = 0; b < m; ++b) {
                auto d = tg.distance(tg.multiply(qm.table[a], qm.table[b]), qm.table[qm.source.multiply(a, b)]);
                if (first || d > best.value) {
                    best = {d, a, b};
                    first = false;
                }
            }
        return best;
    };

    std::vector<Partial> parts(threads);
    if (threads == 1) {
        parts[0] = rows(0, m);
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) {
            const auto begin = static_cast<std::uint32_t>(std::uint64_t{m} * t / threads);
            const auto end = static_cast<std::uint32_t>(std::uint64_t{m} * (t + 1) / threads);
            pool.emplace_back([&, t, begin, end] { parts[t] = rows(begin, end); });
        }
        for (auto& th : pool) th.join();
    }
    DefectReport out{parts[0].value, parts[0].a, parts[0].b};
    for (unsigned t = 1; t < threads; ++t)
        if (parts[t].value > out.value) out = {parts[t].value, parts[t].a, parts[t].b};
    if (out.value == Length(0)) out.a = out.b = 0;
    return out;
}

namespace {

std::vector<GroupElement> distinct_image(const QuasiMap& qm)
{
    std::vector<GroupElement> image = qm.table;
    std::sort(image.begin(), image.end(), ElementLess{});
    image.erase(std::unique(image.begin(), image.end()), image.end());
    return image;
}

// Largest distance from a net point to the image.
Length net_radius(const MetricGroup& tg, const std::vector<GroupElement>& net, const std::vector<GroupElement>& image)
{
    Length worst(0);
    for (const auto& p : net) {
        std::optional<Length> nearest;
        for (const auto& q : image) {
            auto d = tg.distance(p, q);
            if (!nearest || d < *nearest) nearest = d;
            if (*nearest <= worst) break;
        }
        if (*nearest > worst) worst = *nearest;
    }
    return worst;
}

} // namespace

DensityBound density(const QuasiMap& qm, const Length& resolution)
{
    if (!(resolution > Length(0))) throw std::invalid_argument("density resolution must be positive");
    const MetricGroup& tg = *qm.target;
    const auto image = distinct_image(qm);

    if (tg.is_finite()) {
        const auto& space = tg.metric();
        std::uint32_t worst = 0;
        for (std::size_t g = 0; g < space.size(); ++g) {
            auto best = std::numeric_limits<std::uint32_t>::max();
            for (const auto& q : image) best = std::min(best, space.rank(g, q.index));
            worst = std::max(worst, best);
        }
        return {space.levels()[worst], space.levels()[worst]};
    }

    if (tg.kind() == MetricGroup::Kind::circle) {
        // Half the largest gap between consecutive image points.
        Rational gap = image.front().coords[0] + Rational(1) - image.back().coords[0];
        for (std::size_t i = 1; i < image.size(); ++i)
            gap = std::max(gap, image[i].coords[0] - image[i - 1].coords[0]);
        const Length r(gap / Rational(2));
        return {r, r};
    }

    std::vector<GroupElement> net;
    Length h;
    if (tg.kind() == MetricGroup::Kind::torus) {
        // Grid (1/k)Z^d is within 1/(2k) of everything in the sup metric.
        const std::int64_t k = half_inverse_ceil(resolution);
        const std::size_t d = tg.dimension();
        double points = std::pow(double(k), double(d));
        if (points > double(kMaxDensityNet))
            throw NetTooLarge(points > 1e18 ? SIZE_MAX : static_cast<std::size_t>(points), kMaxDensityNet);
        std::vector<std::size_t> orders(d, static_cast<std::size_t>(k));
        for (std::size_t e = 0; e < static_cast<std::size_t>(points); ++e) {
            auto digits = FiniteGroup::abelian_digits(orders, e);
            GroupElement p{0, std::vector<Rational>(d)};
            for (std::size_t i = 0; i < d; ++i) p.coords[i] = Rational(static_cast<std::int64_t>(digits[i]), k);
            net.push_back(std::move(p));
        }
        h = Length(Rational(1, 2 * k));
    } else {
        // d(t, t + s) <= |s| * sum_j w_j m_j, so k points spaced 1/k are
        // within S / (2k).
        const auto& lv = tg.levels();
        Length slope(0);
        for (std::size_t j = 0; j < lv.orders.size(); ++j) slope += lv.weights[j] * Length(lv.multiplier(j));
        const std::int64_t k = half_inverse_ceil(resolution / slope);
        if (static_cast<std::uint64_t>(k) > kMaxDensityNet) throw NetTooLarge(static_cast<std::size_t>(k), kMaxDensityNet);
        for (std::int64_t i = 0; i < k; ++i) net.push_back({0, {Rational(i, k)}});
        h = slope / Length(2 * k);
    }
    Length lower = net_radius(tg, net, image);
    Length upper = lower + h;
    if (tg.kind() == MetricGroup::Kind::torus) upper = min(upper, Length(Rational(1, 2)));
    return {lower, upper};
}

QuasiFinitenessWitness quasi_finiteness_witness(std::shared_ptr<const MetricGroup> target, const Length& eps)
{
    if (!target) throw std::invalid_argument("witness needs a target group");
    if (!(eps > Length(0))) throw std::invalid_argument("epsilon must be positive");
    const MetricGroup& tg = *target;
    std::vector<std::size_t> orders;
    std::vector<GroupElement> table;
    Length radius;

    switch (tg.kind()) {
    case MetricGroup::Kind::finite:
        throw std::invalid_argument("witnesses are built for the circle, torus and solenoid models");
    case MetricGroup::Kind::circle:
    case MetricGroup::Kind::torus: {
        const std::int64_t m = half_inverse_ceil(eps);
        const std::size_t d = tg.dimension();
        if (std::pow(double(m), double(d)) > double(kMaxDensityNet))
            throw std::invalid_argument("witness group would exceed " + std::to_string(kMaxDensityNet) + " elements");
        orders.assign(d, static_cast<std::size_t>(m));
        std::size_t total = 1;
        for (auto o : orders) total *= o;
        for (std::size_t e = 0; e < total; ++e) {
            auto digits = FiniteGroup::abelian_digits(orders, e);
            GroupElement p{0, std::vector<Rational>(d)};
            for (std::size_t i = 0; i < d; ++i) p.coords[i] = Rational(static_cast<std::int64_t>(digits[i]), m);
            table.push_back(std::move(p));
        }
        radius = Length(Rational(1, 2 * m));
        break;
    }
    case MetricGroup::Kind::solenoid: {
        // k -> k/n on the deepest level. With K! | n every level moves by at
        // most half a turn within 1/(2n), so the covering radius is exactly
        // S / (2n) with S = sum_j w_j m_j, attained halfway between images.
        const auto& lv = tg.levels();
        const std::int64_t base = lv.orders.back();
        Length slope(0);
        for (std::size_t j = 0; j < lv.orders.size(); ++j) slope += lv.weights[j] * Length(lv.multiplier(j));
        std::int64_t t = half_inverse_ceil(eps * Length(base) / slope);
        while (slope / Length(2 * base * t) > eps) ++t;
        const std::int64_t n = base * t;
        if (static_cast<std::uint64_t>(n) > kMaxDensityNet)
            throw std::invalid_argument("witness group would exceed " + std::to_string(kMaxDensityNet) + " elements");
        orders = {static_cast<std::size_t>(n)};
        for (std::int64_t k = 0; k < n; ++k) table.push_back({0, {Rational(k, n)}});
        radius = slope / Length(2 * n);
        break;
    }
    }
    QuasiMap map(FiniteGroup::abelian(orders), std::move(target), std::move(table));
    auto d = defect(map);
    return {std::move(map), std::move(orders), d, radius};
}

SnapRejected::SnapRejected(std::uint32_t element, Length nearest, const std::string& what)
    : std::invalid_argument(what), element_(element), nearest_(std::move(nearest))
{
}

SnapResult snap_to_subgroup(const QuasiMap& qm, const std::vector<GroupElement>& admissible, const Length& eps,
                            const Length& resolution)
{
    if (eps < Length(0)) throw std::invalid_argument("epsilon must be nonnegative");
    if (admissible.empty()) throw std::invalid_argument("no admissible points");
    const MetricGroup& tg = *qm.target;
    for (const auto& p : admissible) tg.check(p);

    std::vector<GroupElement> table;
    table.reserve(qm.table.size());
    for (std::uint32_t a = 0; a < qm.table.size(); ++a) {
        const GroupElement* chosen = nullptr;
        std::optional<Length> nearest;
        for (const auto& p : admissible) {
            auto d = tg.distance(qm.table[a], p);
            if (leq_tol(d, eps)) {
                chosen = &p;
                break;
            }
            if (!nearest || d < *nearest) nearest = d;
        }
        if (!chosen)
            throw SnapRejected(a, *nearest,
                               "source element " + std::to_string(a) + " maps to " + tg.str(qm.table[a]) +
                                   ", whose nearest admissible point is at distance " + nearest->str() +
                                   " > epsilon " + eps.str());
        table.push_back(*chosen);
    }

    SnapResult out{QuasiMap(qm.source, qm.target, std::move(table)), eps, defect(qm), {}, density(qm, resolution), {},
                   false, false, std::nullopt};
    out.defect_after = defect(out.map);
    out.density_after = density(out.map, resolution);
    out.defect_ok = leq_tol(out.defect_after.value, out.defect_before.value + Length(3) * eps);
    out.density_ok = leq_tol(out.density_after.lower, out.density_before.upper + eps);
    if (leq_tol(out.defect_before.value, eps)) {
        bool ok = leq_tol(out.defect_after.value, Length(4) * eps);
        if (leq_tol(out.density_before.upper, eps))
            ok = ok && leq_tol(out.density_after.lower, Length(2) * eps);
        out.lemma_ok = ok;
    }
    return out;
}

LimitEquivalences limit_equivalences(const GroupAction& gn, const GroupAction& g,
                                     const std::vector<std::pair<std::size_t, std::size_t>>& space_pairs,
                                     const std::vector<std::pair<std::size_t, std::size_t>>& group_pairs)
{
    auto spaces = epsilon_equivalence(gn.space, g.space, Correspondence::from_pairs(space_pairs));
    auto groups = epsilon_equivalence(metric_group_of_action(gn).metric(), metric_group_of_action(g).metric(),
                                      Correspondence::from_pairs(group_pairs));
    return {spaces.f, spaces.g, groups.f, groups.g, max(spaces.epsilon, groups.epsilon)};
}

LimitPreconditionFailed::LimitPreconditionFailed(const std::string& what,
                                                 std::optional<std::pair<std::size_t, std::size_t>> triple)
    : std::invalid_argument(what), triple_(triple)
{
}

LimitQuasiMorphism limit_quasi_morphism(const GroupAction& gn, const GroupAction& g, const LimitEquivalences& eq,
                                        unsigned threads)
{
    const auto source = std::make_shared<const MetricGroup>(metric_group_of_action(gn, "G_n"));
    const auto target = std::make_shared<const MetricGroup>(metric_group_of_action(g, "G"));
    const auto& xn = gn.space;
    const auto& x = g.space;
    const Length& eps = eq.epsilon;

    auto check_map = [](const std::vector<std::size_t>& f, std::size_t from, std::size_t to, const char* name) {
        if (f.size() != from) throw std::invalid_argument(std::string(name) + " must be total");
        for (auto v : f)
            if (v >= to) throw std::invalid_argument(std::string(name) + " value out of range");
    };
    check_map(eq.phi, xn.size(), x.size(), "phi");
    check_map(eq.phi_back, x.size(), xn.size(), "phi_back");
    check_map(eq.psi, gn.elements.size(), g.elements.size(), "psi");
    check_map(eq.psi_back, g.elements.size(), gn.elements.size(), "psi_back");

    auto space_defects = equivalence_defects(xn, x, eq.phi, eq.phi_back).worst();
    if (!leq_tol(space_defects, eps))
        throw LimitPreconditionFailed("space maps are only a " + space_defects.str() + "-equivalence, epsilon is " +
                                      eps.str());
    auto group_defects = equivalence_defects(source->metric(), target->metric(), eq.psi, eq.psi_back).worst();
    if (!leq_tol(group_defects, eps))
        throw LimitPreconditionFailed("group maps are only a " + group_defects.str() + "-equivalence, epsilon is " +
                                      eps.str());

    // Every mapped triple (psi g, phi x, phi(g x)) must be within eps of some
    // (h, y, h y); try (h, y) = (psi g, phi x) before searching.
    const auto& gmetric = target->metric();
    Length gap(0);
    for (std::size_t a = 0; a < gn.elements.size(); ++a)
        for (std::size_t p = 0; p < xn.size(); ++p) {
            const std::size_t h0 = eq.psi[a], y0 = eq.phi[p], z = eq.phi[gn.elements[a][p]];
            Length best = x.distance(z, g.elements[h0][y0]);
            if (!leq_tol(best, eps)) {
                for (std::size_t h = 0; h < g.elements.size(); ++h) {
                    const Length dh = gmetric.distance(h0, h);
                    if (!leq_tol(dh, eps)) continue;
                    for (std::size_t y = 0; y < x.size(); ++y) {
                        const Length dy = x.distance(y0, y);
                        if (!leq_tol(dy, eps)) continue;
                        const Length d = max(max(dh, dy), x.distance(z, g.elements[h][y]));
                        if (d < best) best = d;
                    }
                }
            }
            if (!leq_tol(best, eps))
                throw LimitPreconditionFailed("triple (g=" + std::to_string(a) + ", x=" + std::to_string(p) +
                                                  ", gx=" + std::to_string(gn.elements[a][p]) +
                                                  ") maps farther than epsilon " + eps.str() +
                                                  " from every triple of the second action",
                                              std::make_pair(a, p));
            gap = max(gap, best);
        }

    std::vector<GroupElement> table;
    for (auto v : eq.psi) table.push_back({static_cast<std::uint32_t>(v), {}});
    QuasiMap psi(source->group(), target, std::move(table));
    auto d = defect(psi, threads);
    const Length bound = Length(11) * eps;
    const bool within = leq_tol(d.value, bound);
    return {std::move(psi), d, eps, bound, gap, within};
}

} // namespace finhom
