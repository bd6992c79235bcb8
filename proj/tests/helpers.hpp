#pragma once

#include "finhom/length.hpp"
#include "finhom/metric_space.hpp"

#include <vector>

inline finhom::Length q(std::int64_t p, std::int64_t d = 1) { return finhom::Length(finhom::Rational(p, d)); }

/// Exact space from a row-major integer matrix over a common denominator.
inline finhom::FiniteMetricSpace int_space(std::size_t n, const std::vector<std::int64_t>& d, std::int64_t den = 1)
{
    std::vector<finhom::Rational> out;
    for (auto v : d) out.emplace_back(v, den);
    return finhom::FiniteMetricSpace::exact(n, out);
}
