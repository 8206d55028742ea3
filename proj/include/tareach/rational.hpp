#pragma once

#include <cstdint>
#include <numeric>
#include <string>
#include <string_view>

#include "tareach/error.hpp"

namespace tareach {

/// Exact rational number on 64-bit components, always kept in lowest terms
/// with a positive denominator. Clock values and query constants in this tool
/// are tiny, so plain int64 arithmetic is ample.
class Rational {
public:
    constexpr Rational() = default;
    constexpr Rational(std::int64_t n) : num_(n) {}  // NOLINT: implicit by design
    Rational(std::int64_t num, std::int64_t den);

    [[nodiscard]] std::int64_t num() const { return num_; }
    [[nodiscard]] std::int64_t den() const { return den_; }

    [[nodiscard]] bool is_integer() const { return den_ == 1; }
    [[nodiscard]] bool is_nonnegative() const { return num_ >= 0; }

    /// Largest integer <= *this.
    [[nodiscard]] std::int64_t floor() const;

    friend Rational operator+(const Rational& a, const Rational& b);
    friend Rational operator-(const Rational& a, const Rational& b);
    friend Rational operator*(const Rational& a, const Rational& b);
    friend Rational operator/(const Rational& a, const Rational& b);
    Rational operator-() const { Rational r; r.num_ = -num_; r.den_ = den_; return r; }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
    friend bool operator<(const Rational& a, const Rational& b) {
        return a.num_ * b.den_ < b.num_ * a.den_;
    }
    friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
    friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
    friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

    /// Accepts "3", "1/2" and decimal forms like "2.5"; all parsed exactly.
    static Rational parse(std::string_view text);

    [[nodiscard]] std::string to_string() const;

private:
    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

}  // namespace tareach
