#include "tareach/rational.hpp"

#include <cctype>
#include <cstdlib>

namespace tareach {

Rational::Rational(std::int64_t num, std::int64_t den) : num_(num), den_(den) {
    if (den_ == 0) {
        throw SemanticError("rational with zero denominator");
    }
    if (den_ < 0) {
        num_ = -num_;
        den_ = -den_;
    }
    const std::int64_t g = std::gcd(num_ < 0 ? -num_ : num_, den_);
    if (g > 1) {
        num_ /= g;
        den_ /= g;
    }
}

std::int64_t Rational::floor() const {
    if (num_ >= 0) {
        return num_ / den_;
    }
    return -((-num_ + den_ - 1) / den_);
}

Rational operator+(const Rational& a, const Rational& b) {
    return {a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_};
}

Rational operator-(const Rational& a, const Rational& b) {
    return {a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_};
}

Rational operator*(const Rational& a, const Rational& b) {
    return {a.num_ * b.num_, a.den_ * b.den_};
}

Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) {
        throw SemanticError("rational division by zero");
    }
    return {a.num_ * b.den_, a.den_ * b.num_};
}

namespace {

std::int64_t parse_digits(std::string_view text, std::size_t& pos) {
    if (pos >= text.size() || !std::isdigit(static_cast<unsigned char>(text[pos]))) {
        throw ParseError("expected digits in number at offset " + std::to_string(pos));
    }
    std::int64_t value = 0;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
        value = value * 10 + (text[pos] - '0');
        ++pos;
    }
    return value;
}

}  // namespace

Rational Rational::parse(std::string_view text) {
    std::size_t pos = 0;
    bool negative = false;
    if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
        negative = text[pos] == '-';
        ++pos;
    }
    const std::int64_t whole = parse_digits(text, pos);
    Rational result(whole);
    if (pos < text.size() && text[pos] == '/') {
        ++pos;
        const std::int64_t den = parse_digits(text, pos);
        result = Rational(whole, den);
    } else if (pos < text.size() && text[pos] == '.') {
        ++pos;
        const std::size_t frac_start = pos;
        const std::int64_t frac = parse_digits(text, pos);
        std::int64_t scale = 1;
        for (std::size_t i = frac_start; i < pos; ++i) {
            scale *= 10;
        }
        result = Rational(whole * scale + frac, scale);
    }
    if (pos != text.size()) {
        throw ParseError("trailing characters in number '" + std::string(text) + "'");
    }
    return negative ? -result : result;
}

std::string Rational::to_string() const {
    if (den_ == 1) {
        return std::to_string(num_);
    }
    return std::to_string(num_) + "/" + std::to_string(den_);
}

}  // namespace tareach
