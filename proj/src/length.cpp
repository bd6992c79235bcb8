#include "finhom/length.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace finhom {

namespace {

template <class ExactOp, class FloatOp>
Length combine(const Length& a, const Length& b, ExactOp exact_op, FloatOp float_op)
{
    if (a.is_exact() && b.is_exact()) {
        try {
            return Length(exact_op(a.exact(), b.exact()));
        } catch (const std::overflow_error&) {
        }
    }
    return Length(float_op(a.value(), b.value()));
}

} // namespace

Length Length::parse(const std::string& text)
{
    if (text.find_first_of(".eE") == std::string::npos) return Length(Rational::parse(text));
    std::size_t used = 0;
    double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument("malformed length: '" + text + "'");
    return Length(v);
}

std::string Length::str() const
{
    if (exact_) return q_.str();
    return nlohmann::json(v_).dump();
}

Length Length::operator-() const { return exact_ ? Length(-q_) : Length(-v_); }

Length operator+(const Length& a, const Length& b)
{
    return combine(a, b, [](const Rational& x, const Rational& y) { return x + y; },
                   [](double x, double y) { return x + y; });
}

Length operator-(const Length& a, const Length& b)
{
    return combine(a, b, [](const Rational& x, const Rational& y) { return x - y; },
                   [](double x, double y) { return x - y; });
}

Length operator*(const Length& a, const Length& b)
{
    return combine(a, b, [](const Rational& x, const Rational& y) { return x * y; },
                   [](double x, double y) { return x * y; });
}

Length operator/(const Length& a, const Length& b)
{
    if (b.is_exact() ? b.exact().is_zero() : b.value() == 0.0) throw std::domain_error("length division by zero");
    return combine(a, b, [](const Rational& x, const Rational& y) { return x / y; },
                   [](double x, double y) { return x / y; });
}

bool operator==(const Length& a, const Length& b)
{
    if (a.exact_ && b.exact_) return a.q_ == b.q_;
    return a.v_ == b.v_;
}

std::partial_ordering operator<=>(const Length& a, const Length& b)
{
    if (a.exact_ && b.exact_) return a.q_ <=> b.q_;
    return a.v_ <=> b.v_;
}

Length abs(const Length& x) { return x < Length(0) ? -x : x; }
Length max(const Length& a, const Length& b) { return a < b ? b : a; }
Length min(const Length& a, const Length& b) { return b < a ? b : a; }

bool leq_tol(const Length& a, const Length& b, double tol)
{
    if (a.is_exact() && b.is_exact()) return a.exact() <= b.exact();
    return a.value() <= b.value() + tol;
}

} // namespace finhom
