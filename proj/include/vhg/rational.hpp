#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>
#include <string_view>

#include "vhg/errors.hpp"

namespace vhg {

// Exact rational arithmetic. Rewards, accuracies and expression constants
// stay rational end to end; doubles appear only at evaluation and reporting
// boundaries.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline bool is_integer(const Rational& r) {
    return boost::multiprecision::denominator(r) == 1;
}

inline BigInt numerator(const Rational& r) {
    return boost::multiprecision::numerator(r);
}

inline BigInt denominator(const Rational& r) {
    return boost::multiprecision::denominator(r);
}

// "3", "-3", "3/4". Denominator-1 rationals print as plain integers.
inline std::string to_string(const Rational& r) {
    if (is_integer(r)) return numerator(r).str();
    return numerator(r).str() + "/" + denominator(r).str();
}

inline double to_double(const Rational& r) {
    return r.convert_to<double>();
}

// Parses "3", "-3/4"; also accepts decimal literals ("0.5" -> 1/2).
inline Rational rational_from_string(std::string_view text) {
    if (text.empty()) throw ConfigError("empty rational literal");
    std::string s(text);
    auto slash = s.find('/');
    if (slash != std::string::npos) {
        BigInt num(s.substr(0, slash));
        BigInt den(s.substr(slash + 1));
        if (den == 0) throw ConfigError("rational with zero denominator: " + s);
        return Rational(num, den);
    }
    auto dot = s.find('.');
    if (dot == std::string::npos) return Rational(BigInt(s));
    std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    BigInt den = 1;
    for (std::size_t i = dot + 1; i < s.size(); ++i) den *= 10;
    return Rational(BigInt(digits), den);
}

// r^n for integer n; n < 0 inverts. Caller guarantees r != 0 when n < 0.
inline Rational pow_int(const Rational& r, std::int64_t n) {
    Rational base = r;
    if (n < 0) {
        base = Rational(denominator(r), numerator(r));
        n = -n;
    }
    Rational acc = 1;
    while (n > 0) {
        if (n & 1) acc *= base;
        base *= base;
        n >>= 1;
    }
    return acc;
}

}  // namespace vhg
