#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace finhom {

/// Permutation of {0..n-1} as its image array.
using Permutation = std::vector<std::uint32_t>;

/// (a * b)(x) = a(b(x)).
Permutation compose(const Permutation& a, const Permutation& b);
Permutation inverse(const Permutation& p);
Permutation identity_permutation(std::size_t n);

/// A finite group given by its multiplication table.
class FiniteGroup {
public:
    /// `table[a * order + b]` is the index of a*b. Throws std::invalid_argument
    /// unless the table has an identity and inverses; associativity is checked
    /// for orders up to kAssociativityCheckLimit.
    FiniteGroup(std::size_t order, std::vector<std::uint32_t> table, std::vector<std::string> names = {});

    static constexpr std::size_t kAssociativityCheckLimit = 200;

    static FiniteGroup cyclic(std::size_t m);
    /// Elements ordered lexicographically, first factor most significant.
    static FiniteGroup direct_product(const FiniteGroup& a, const FiniteGroup& b);
    /// Product of cyclic groups Z_m1 x ... x Z_mk.
    static FiniteGroup abelian(const std::vector<std::size_t>& orders);
    /// The given permutations must be closed under composition; elements are
    /// kept in the given order.
    static FiniteGroup from_permutations(const std::vector<Permutation>& elements);
    /// Symmetric group on k letters, elements in lexicographic order.
    static FiniteGroup symmetric(std::size_t k);
    /// Symmetries of the regular n-gon: rotations r^i (index i) then
    /// reflections s r^i (index n + i).
    static FiniteGroup dihedral(std::size_t n);

    std::size_t order() const { return order_; }
    std::uint32_t multiply(std::uint32_t a, std::uint32_t b) const { return table_[a * order_ + b]; }
    std::uint32_t inverse(std::uint32_t a) const { return inverse_[a]; }
    std::uint32_t identity() const { return identity_; }
    const std::vector<std::string>& names() const { return names_; }
    const std::vector<std::uint32_t>& table() const { return table_; }

    /// Mixed-radix digits of an element of abelian({m1,...,mk}).
    static std::vector<std::size_t> abelian_digits(const std::vector<std::size_t>& orders, std::size_t element);

private:
    std::size_t order_;
    std::vector<std::uint32_t> table_;
    std::vector<std::uint32_t> inverse_;
    std::uint32_t identity_ = 0;
    std::vector<std::string> names_;
};

} // namespace finhom
