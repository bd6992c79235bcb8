#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace finhom {

/// Exact rational number with 64-bit numerator and positive denominator,
/// always kept in lowest terms. Arithmetic that would overflow throws
/// std::overflow_error.
class Rational {
public:
    constexpr Rational() = default;
    Rational(std::int64_t num, std::int64_t den = 1);

    /// Parses "p", "p/q" or "-p/q".
    static Rational parse(std::string_view text);

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }

    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
    std::string str() const;

    bool is_zero() const { return num_ == 0; }
    bool is_integer() const { return den_ == 1; }

    /// Largest integer not exceeding the value.
    std::int64_t floor() const;
    std::int64_t ceil() const;

    /// Representative of the value modulo 1 in [0, 1).
    Rational frac() const;

    Rational operator-() const;
    Rational& operator+=(const Rational& rhs);
    Rational& operator-=(const Rational& rhs);
    Rational& operator*=(const Rational& rhs);
    Rational& operator/=(const Rational& rhs);

    friend Rational operator+(Rational lhs, const Rational& rhs) { return lhs += rhs; }
    friend Rational operator-(Rational lhs, const Rational& rhs) { return lhs -= rhs; }
    friend Rational operator*(Rational lhs, const Rational& rhs) { return lhs *= rhs; }
    friend Rational operator/(Rational lhs, const Rational& rhs) { return lhs /= rhs; }

    friend bool operator==(const Rational& a, const Rational& b) = default;
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

private:
    static Rational from_wide(__int128 num, __int128 den);

    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

Rational abs(const Rational& q);

/// Circle arc distance between two positions on a circumference-1 circle.
Rational arc_distance(const Rational& s, const Rational& t);

std::int64_t lcm_checked(std::int64_t a, std::int64_t b);

} // namespace finhom
