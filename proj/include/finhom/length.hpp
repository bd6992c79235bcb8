#pragma once

#include "finhom/rational.hpp"

#include <compare>
#include <string>

namespace finhom {

/// Default comparison tolerance for approximate (floating point) metrics.
inline constexpr double kDefaultTolerance = 1e-9;

/// A nonnegative-or-signed length that is either an exact rational or a
/// 64-bit float. Mixed arithmetic promotes to float; exact arithmetic that
/// overflows also degrades to float instead of throwing.
class Length {
public:
    Length() : exact_(true) {}
    Length(const Rational& q) : q_(q), v_(q.to_double()), exact_(true) {}
    Length(double v) : v_(v), exact_(false) {}
    Length(std::int64_t v) : Length(Rational(v)) {}
    Length(int v) : Length(Rational(v)) {}

    static Length parse(const std::string& text);

    bool is_exact() const { return exact_; }
    /// Only meaningful when is_exact().
    const Rational& exact() const { return q_; }
    double value() const { return v_; }

    /// "p/q" for exact values, shortest round-trip decimal otherwise.
    std::string str() const;

    Length operator-() const;
    friend Length operator+(const Length& a, const Length& b);
    friend Length operator-(const Length& a, const Length& b);
    friend Length operator*(const Length& a, const Length& b);
    friend Length operator/(const Length& a, const Length& b);
    Length& operator+=(const Length& b) { return *this = *this + b; }
    Length& operator-=(const Length& b) { return *this = *this - b; }

    friend bool operator==(const Length& a, const Length& b);
    friend std::partial_ordering operator<=>(const Length& a, const Length& b);

private:
    Rational q_;
    double v_ = 0.0;
    bool exact_;
};

Length abs(const Length& x);
Length max(const Length& a, const Length& b);
Length min(const Length& a, const Length& b);

/// a <= b, allowing slack `tol` when either side is inexact.
bool leq_tol(const Length& a, const Length& b, double tol = kDefaultTolerance);

} // namespace finhom
