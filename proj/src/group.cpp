#include "finhom/group.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>

namespace finhom {

Permutation compose(const Permutation& a, const Permutation& b)
{
    if (a.size() != b.size()) throw std::invalid_argument("composing permutations of different degree");
    Permutation out(a.size());
    for (std::size_t x = 0; x < a.size(); ++x) out[x] = a[b[x]];
    return out;
}

Permutation inverse(const Permutation& p)
{
    Permutation out(p.size());
    for (std::size_t x = 0; x < p.size(); ++x) out[p[x]] = static_cast<std::uint32_t>(x);
    return out;
}

Permutation identity_permutation(std::size_t n)
{
    Permutation p(n);
    std::iota(p.begin(), p.end(), 0u);
    return p;
}

FiniteGroup::FiniteGroup(std::size_t order, std::vector<std::uint32_t> table, std::vector<std::string> names)
    : order_(order), table_(std::move(table)), names_(std::move(names))
{
    if (order_ == 0) throw std::invalid_argument("group must be nonempty");
    if (table_.size() != order_ * order_) throw std::invalid_argument("group table must be order x order");
    if (!names_.empty() && names_.size() != order_) throw std::invalid_argument("group names must match the order");
    for (auto v : table_)
        if (v >= order_) throw std::invalid_argument("group table entry out of range");
    bool found = false;
    for (std::uint32_t e = 0; e < order_ && !found; ++e) {
        bool is_identity = true;
        for (std::uint32_t a = 0; a < order_ && is_identity; ++a)
            is_identity = multiply(e, a) == a && multiply(a, e) == a;
        if (is_identity) {
            identity_ = e;
            found = true;
        }
    }
    if (!found) throw std::invalid_argument("group table has no identity");
    inverse_.assign(order_, 0);
    for (std::uint32_t a = 0; a < order_; ++a) {
        bool has = false;
        for (std::uint32_t b = 0; b < order_ && !has; ++b)
            if (multiply(a, b) == identity_ && multiply(b, a) == identity_) {
                inverse_[a] = b;
                has = true;
            }
        if (!has) throw std::invalid_argument("group element " + std::to_string(a) + " has no inverse");
    }
    if (order_ <= kAssociativityCheckLimit)
        for (std::uint32_t a = 0; a < order_; ++a)
            for (std::uint32_t b = 0; b < order_; ++b)
                for (std::uint32_t c = 0; c < order_; ++c)
                    if (multiply(multiply(a, b), c) != multiply(a, multiply(b, c)))
                        throw std::invalid_argument("group table is not associative");
}

FiniteGroup FiniteGroup::cyclic(std::size_t m)
{
    if (m == 0) throw std::invalid_argument("cyclic group order must be positive");
    std::vector<std::uint32_t> table(m * m);
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = 0; b < m; ++b) table[a * m + b] = static_cast<std::uint32_t>((a + b) % m);
    return FiniteGroup(m, std::move(table));
}

FiniteGroup FiniteGroup::direct_product(const FiniteGroup& g, const FiniteGroup& h)
{
    const std::size_t m = g.order(), k = h.order(), n = m * k;
    std::vector<std::uint32_t> table(n * n);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
            auto first = g.multiply(static_cast<std::uint32_t>(a / k), static_cast<std::uint32_t>(b / k));
            auto second = h.multiply(static_cast<std::uint32_t>(a % k), static_cast<std::uint32_t>(b % k));
            table[a * n + b] = static_cast<std::uint32_t>(first * k + second);
        }
    return FiniteGroup(n, std::move(table));
}

FiniteGroup FiniteGroup::abelian(const std::vector<std::size_t>& orders)
{
    if (orders.empty()) return cyclic(1);
    FiniteGroup g = cyclic(orders.front());
    for (std::size_t i = 1; i < orders.size(); ++i) g = direct_product(g, cyclic(orders[i]));
    return g;
}

std::vector<std::size_t> FiniteGroup::abelian_digits(const std::vector<std::size_t>& orders, std::size_t element)
{
    std::vector<std::size_t> digits(orders.size());
    for (std::size_t f = orders.size(); f-- > 0;) {
        digits[f] = element % orders[f];
        element /= orders[f];
    }
    return digits;
}

FiniteGroup FiniteGroup::from_permutations(const std::vector<Permutation>& elements)
{
    const std::size_t n = elements.size();
    std::map<Permutation, std::uint32_t> index;
    for (std::size_t i = 0; i < n; ++i) index.emplace(elements[i], static_cast<std::uint32_t>(i));
    if (index.size() != n) throw std::invalid_argument("duplicate permutations in group");
    std::vector<std::uint32_t> table(n * n);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
            auto it = index.find(compose(elements[a], elements[b]));
            if (it == index.end()) throw std::invalid_argument("permutations are not closed under composition");
            table[a * n + b] = it->second;
        }
    return FiniteGroup(n, std::move(table));
}

FiniteGroup FiniteGroup::symmetric(std::size_t k)
{
    std::vector<Permutation> elements;
    Permutation p = identity_permutation(k);
    do {
        elements.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
    return from_permutations(elements);
}

FiniteGroup FiniteGroup::dihedral(std::size_t n)
{
    if (n < 1) throw std::invalid_argument("dihedral group needs n >= 1");
    // Acts on Z_n: r^i(x) = x + i, s r^i(x) = -(x + i).
    std::vector<Permutation> elements;
    for (std::size_t i = 0; i < n; ++i) {
        Permutation p(n);
        for (std::size_t x = 0; x < n; ++x) p[x] = static_cast<std::uint32_t>((x + i) % n);
        elements.push_back(p);
    }
    for (std::size_t i = 0; i < n; ++i) {
        Permutation p(n);
        for (std::size_t x = 0; x < n; ++x) p[x] = static_cast<std::uint32_t>((2 * n - x - i) % n);
        elements.push_back(p);
    }
    if (n <= 2) {
        // The action on Z_n is not faithful; build the table abstractly.
        const std::size_t order = 2 * n;
        std::vector<std::uint32_t> table(order * order);
        for (std::size_t a = 0; a < order; ++a)
            for (std::size_t b = 0; b < order; ++b) {
                std::size_t ra = a % n, rb = b % n;
                bool sa = a >= n, sb = b >= n;
                // (s^sa r^ra)(s^sb r^rb) = s^(sa+sb) r^(±ra + rb)
                std::size_t r = sb ? (n - ra + rb) % n : (ra + rb) % n;
                table[a * order + b] = static_cast<std::uint32_t>(((sa != sb) ? n : 0) + r);
            }
        return FiniteGroup(order, std::move(table));
    }
    return from_permutations(elements);
}

} // namespace finhom
