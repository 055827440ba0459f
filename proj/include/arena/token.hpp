#pragma once

#include <cstdint>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace arena {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

// Every failure carries a short machine-readable kind plus a human detail.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& detail)
        : std::runtime_error(kind + ": " + detail), kind_(std::move(kind)) {}
    const std::string& kind() const { return kind_; }

private:
    std::string kind_;
};

// Non-negative token count in base units. Underflow throws instead of wrapping.
class TokenAmount {
public:
    constexpr TokenAmount() = default;
    constexpr TokenAmount(std::int64_t v) : v_(v) {
        if (v < 0) throw Error("negative-amount", std::to_string(v));
    }

    constexpr std::int64_t value() const { return v_; }

    friend constexpr TokenAmount operator+(TokenAmount a, TokenAmount b) {
        if (a.v_ > std::numeric_limits<std::int64_t>::max() - b.v_)
            throw Error("overflow", "token addition");
        return TokenAmount(a.v_ + b.v_);
    }
    friend constexpr TokenAmount operator-(TokenAmount a, TokenAmount b) {
        if (b.v_ > a.v_)
            throw Error("underflow", std::to_string(a.v_) + " - " + std::to_string(b.v_));
        return TokenAmount(a.v_ - b.v_);
    }
    friend constexpr TokenAmount operator*(TokenAmount a, std::int64_t k) {
        if (k < 0) throw Error("negative-amount", "scale " + std::to_string(k));
        return TokenAmount(a.v_ * k);
    }
    TokenAmount& operator+=(TokenAmount o) { return *this = *this + o; }
    TokenAmount& operator-=(TokenAmount o) { return *this = *this - o; }

    friend constexpr auto operator<=>(TokenAmount, TokenAmount) = default;
    friend std::ostream& operator<<(std::ostream& os, TokenAmount t) { return os << t.v_; }

private:
    std::int64_t v_ = 0;
};

using Round = std::int64_t;
constexpr Round kForever = std::numeric_limits<Round>::max() / 4;

inline std::string to_string(const Rational& r) {
    std::string s = boost::multiprecision::numerator(r).str();
    if (boost::multiprecision::denominator(r) != 1)
        s += "/" + boost::multiprecision::denominator(r).str();
    else
        s += "/1";
    return s;
}

// BigInt treats a leading 0 as octal.
inline BigInt parse_int(std::string s) {
    bool neg = !s.empty() && s[0] == '-';
    if (neg || (!s.empty() && s[0] == '+')) s.erase(0, 1);
    auto nz = s.find_first_not_of('0');
    s = nz == std::string::npos ? "0" : s.substr(nz);
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) throw Error("parse-error", "not a number");
    BigInt v(s);
    return neg ? BigInt(-v) : v;
}

inline Rational parse_rational(const std::string& s) {
    auto slash = s.find('/');
    if (slash != std::string::npos) {
        BigInt den = parse_int(s.substr(slash + 1));
        if (den == 0) throw Error("parse-error", "zero denominator");
        return Rational(parse_int(s.substr(0, slash)), den);
    }
    auto dot = s.find('.');
    if (dot == std::string::npos) return Rational(parse_int(s));
    std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    BigInt den = 1;
    for (std::size_t i = dot + 1; i < s.size(); ++i) den *= 10;
    return Rational(parse_int(digits), den);
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

inline Rational pow(const Rational& base, std::int64_t e) {
    Rational out = 1;
    for (std::int64_t i = 0; i < e; ++i) out *= base;
    return out;
}

inline std::int64_t floor_to_int(const Rational& r) {
    BigInt q = boost::multiprecision::numerator(r) / boost::multiprecision::denominator(r);
    if (r < 0 && q * boost::multiprecision::denominator(r) != boost::multiprecision::numerator(r)) q -= 1;
    return q.convert_to<std::int64_t>();
}

inline std::int64_t ceil_to_int(const Rational& r) {
    std::int64_t f = floor_to_int(r);
    return Rational(f) == r ? f : f + 1;
}

} // namespace arena
